#pragma once

#include <array>
#include <cmath>

#include "geoprox/common.hpp"
#include "geoprox/space.hpp"

namespace geoprox {

/*
 * Comparison triangle in the model surface of curvature kappa, placed
 * canonically: v1 at the basepoint, v2 along the first axis, v3 in the upper
 * half. Side lengths: side(0)=d(v1,v2), side(1)=d(v1,v3), side(2)=d(v2,v3).
 */
struct ComparisonTriangle {
    double kappa = 0.0;
    SpaceHandle model;
    std::array<Point, 3> vertices;
    std::array<double, 3> side_lengths;
};

inline SpaceHandle model_space(double kappa) {
    if (kappa < 0.0) return Space::hyperbolic(kappa);
    if (kappa > 0.0) return Space::spherical(kappa);
    return Space::euclidean(2);
}

inline ComparisonTriangle comparison_triangle(double kappa, double l12, double l13, double l23) {
    if (l12 < 0.0 || l13 < 0.0 || l23 < 0.0)
        throw usage_error("comparison_triangle: side lengths must be nonnegative");
    const double slack = 1e-12 * std::max({1.0, l12, l13, l23});
    if (l12 + l13 < l23 - slack || l12 + l23 < l13 - slack || l13 + l23 < l12 - slack)
        throw usage_error("comparison_triangle: triangle inequality violated");
    if (kappa > 0.0) {
        const double pi = 3.14159265358979323846;
        if (l12 + l13 + l23 >= 2.0 * pi / std::sqrt(kappa))
            throw usage_error("comparison_triangle: perimeter too large for the sphere");
    }

    const SpaceHandle model = model_space(kappa);

    // angle at v1 by the model law of cosines
    double gamma = 0.0;
    if (l12 > 1e-15 && l13 > 1e-15) {
        double cosg;
        if (kappa == 0.0) {
            cosg = (l12 * l12 + l13 * l13 - l23 * l23) / (2.0 * l12 * l13);
        } else if (kappa < 0.0) {
            const double s = std::sqrt(-kappa);
            cosg = (std::cosh(s * l12) * std::cosh(s * l13) - std::cosh(s * l23)) /
                   (std::sinh(s * l12) * std::sinh(s * l13));
        } else {
            const double s = std::sqrt(kappa);
            cosg = (std::cos(s * l23) - std::cos(s * l12) * std::cos(s * l13)) /
                   (std::sin(s * l12) * std::sin(s * l13));
        }
        gamma = std::acos(clamp_unit_interval(cosg));
    }

    Point v1 = base_point(model);
    Point v2 = v1, v3 = v1;
    switch (model->kind()) {
        case SpaceKind::euclidean: {
            v2 = Point{model, {l12, 0.0}};
            v3 = Point{model, {l13 * std::cos(gamma), l13 * std::sin(gamma)}};
            break;
        }
        case SpaceKind::hyperbolic: {
            const double s = model->curvature_scale();
            auto place = [&](double dist, double angle) {
                const double a = s * dist;
                std::vector<double> c = {std::sinh(a) * std::cos(angle), std::sinh(a) * std::sin(angle),
                                         std::cosh(a)};
                for (double& x : c) x /= s;
                return Point{model, std::move(c)};
            };
            v2 = place(l12, 0.0);
            v3 = place(l13, gamma);
            break;
        }
        case SpaceKind::spherical: {
            const double s = model->curvature_scale();
            auto place = [&](double dist, double angle) {
                const double a = s * dist;
                std::vector<double> c = {std::sin(a) * std::cos(angle), std::sin(a) * std::sin(angle),
                                         std::cos(a)};
                for (double& x : c) x /= s;
                return Point{model, std::move(c)};
            };
            v2 = place(l12, 0.0);
            v3 = place(l13, gamma);
            break;
        }
        default:
            throw usage_error("comparison_triangle: unsupported model");
    }
    return ComparisonTriangle{kappa, model, {v1, v2, v3}, {l12, l13, l23}};
}

/*
 * Triangle side indexing shared by cat_defect: side 0 joins vertices (0,1),
 * side 1 joins (0,2), side 2 joins (1,2).
 */
struct TrianglePointParam {
    int side = 0;       // 0, 1, or 2
    double t = 0.0;     // position along the side, in [0,1]
};

namespace detail {

inline std::pair<int, int> side_vertices(int side) {
    switch (side) {
        case 0: return {0, 1};
        case 1: return {0, 2};
        case 2: return {1, 2};
        default: throw usage_error("triangle side index must be 0, 1, or 2");
    }
}

}  // namespace detail

/*
 * CAT(kappa) comparison defect d_model(px̄, qȳ) - d(px, qy) for two interior
 * points of a geodesic triangle. Nonnegative (within tolerance) in CAT(kappa)
 * spaces; nonpositive under the reversed inequality.
 */
inline double cat_defect(const Point& x1, const Point& x2, const Point& x3,
                         const TrianglePointParam& p, const TrianglePointParam& q, double kappa) {
    detail::check_same_space(x1, x2, "cat_defect");
    detail::check_same_space(x1, x3, "cat_defect");
    const double l12 = distance(x1, x2);
    const double l13 = distance(x1, x3);
    const double l23 = distance(x2, x3);
    const ComparisonTriangle bar = comparison_triangle(kappa, l12, l13, l23);

    const Point* verts[3] = {&x1, &x2, &x3};
    auto realize = [&](const TrianglePointParam& param, bool comparison) {
        const auto [i, j] = detail::side_vertices(param.side);
        if (comparison) return geodesic_point(bar.vertices[i], bar.vertices[j], param.t);
        return geodesic_point(*verts[i], *verts[j], param.t);
    };
    const Point x = realize(p, false), y = realize(q, false);
    const Point xb = realize(p, true), yb = realize(q, true);
    return distance(xb, yb) - distance(x, y);
}

/*
 * Generalized (CN) inequality defect with m = (1-t) y1 + t y2:
 *   (1-t) d(x,y1)^2 + t d(x,y2)^2 - t(1-t) d(y1,y2)^2 - d(x,m)^2.
 * Nonnegative in CAT(0) spaces; identically zero in euclidean space.
 */
inline double cn_defect(const Point& x, const Point& y1, const Point& y2, double t) {
    detail::check_same_space(x, y1, "cn_defect");
    detail::check_same_space(x, y2, "cn_defect");
    if (t == 0.0 || t == 1.0) return 0.0;
    const Point m = geodesic_point(y1, y2, t);
    const double dxy1 = distance(x, y1);
    const double dxy2 = distance(x, y2);
    const double dy12 = distance(y1, y2);
    const double dxm = distance(x, m);
    return (1.0 - t) * dxy1 * dxy1 + t * dxy2 * dxy2 - t * (1.0 - t) * dy12 * dy12 - dxm * dxm;
}

/*
 * Convex-metric defect for two geodesics in their proportional parameterization:
 *   (1-t) d(c1(0),c2(0)) + t d(c1(l1),c2(l2)) - d(c1(t l1), c2(t l2)).
 * Nonnegative when the metric is convex.
 */
inline double convexity_defect(const Point& c1_start, const Point& c1_end,
                               const Point& c2_start, const Point& c2_end, double t) {
    detail::check_same_space(c1_start, c2_start, "convexity_defect");
    const Point p = geodesic_point(c1_start, c1_end, t);
    const Point q = geodesic_point(c2_start, c2_end, t);
    return (1.0 - t) * distance(c1_start, c2_start) + t * distance(c1_end, c2_end) - distance(p, q);
}

}  // namespace geoprox
