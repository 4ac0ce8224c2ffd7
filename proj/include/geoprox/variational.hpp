#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "geoprox/common.hpp"
#include "geoprox/finite_set.hpp"
#include "geoprox/proximity.hpp"
#include "geoprox/space.hpp"

namespace geoprox {

enum class FieldKind { dist_to_point, dist_to_set, affine_along_geodesic, max_dist_pair, table };

/*
 * Real-valued field over points. Distance-based kinds are 1-Lipschitz; the
 * convex flag is caller-asserted (distance functions are convex in the
 * CAT(0)/convex-metric settings this library works in) and spot-checked by
 * the test suite.
 */
struct ScalarField {
    FieldKind kind = FieldKind::dist_to_point;
    std::optional<Point> z;
    std::optional<Point> z2;
    std::shared_ptr<const FiniteSet> set;
    std::optional<Point> g0, g1;  // affine kind anchors
    double slope = 1.0;
    double offset = 0.0;
    std::shared_ptr<const FiniteSet> table_base;
    std::vector<double> table_values;
    double lipschitz_bound = 1.0;
    bool convex = true;

    double operator()(const Point& p) const {
        switch (kind) {
            case FieldKind::dist_to_point:
                return distance(p, *z);
            case FieldKind::dist_to_set:
                return dist_to(p, *set).first;
            case FieldKind::max_dist_pair:
                return std::max(distance(p, *z), distance(p, *z2));
            case FieldKind::affine_along_geodesic: {
                // clamped arclength coordinate along [g0,g1]; affine on the
                // segment, saturating beyond its ends
                const double length = distance(*g0, *g1);
                const double coord = 0.5 * (distance(p, *g0) - distance(p, *g1) + length);
                return offset + slope * coord;
            }
            case FieldKind::table: {
                for (std::size_t i = 0; i < table_base->points.size(); ++i)
                    if (distance(p, table_base->points[i]) <= 1e-9) return table_values[i];
                throw usage_error("table field: point is not a table sample");
            }
        }
        throw usage_error("unknown field kind");
    }

    // Global minimizer when the kind knows one (hypothesis (ii) fields).
    std::optional<Point> global_minimizer() const {
        if (kind == FieldKind::dist_to_point) return z;
        if (kind == FieldKind::max_dist_pair) return geodesic_point(*z, *z2, 0.5);
        return std::nullopt;
    }
};

inline ScalarField field_dist_to_point(Point z) {
    ScalarField f;
    f.kind = FieldKind::dist_to_point;
    f.z = std::move(z);
    return f;
}

inline ScalarField field_dist_to_set(FiniteSet set) {
    ScalarField f;
    f.kind = FieldKind::dist_to_set;
    f.set = std::make_shared<const FiniteSet>(std::move(set));
    return f;
}

inline ScalarField field_max_dist_pair(Point z1, Point z2) {
    ScalarField f;
    f.kind = FieldKind::max_dist_pair;
    f.z = std::move(z1);
    f.z2 = std::move(z2);
    return f;
}

inline ScalarField field_affine_along_geodesic(Point g0, Point g1, double slope, double offset) {
    ScalarField f;
    f.kind = FieldKind::affine_along_geodesic;
    f.g0 = std::move(g0);
    f.g1 = std::move(g1);
    f.slope = slope;
    f.offset = offset;
    f.lipschitz_bound = std::fabs(slope);
    f.convex = false;
    return f;
}

inline ScalarField field_table(FiniteSet base, std::vector<double> values, double lipschitz,
                               bool convex) {
    if (base.points.size() != values.size())
        throw usage_error("field_table: one value per sample required");
    ScalarField f;
    f.kind = FieldKind::table;
    f.table_base = std::make_shared<const FiniteSet>(std::move(base));
    f.table_values = std::move(values);
    f.lipschitz_bound = lipschitz;
    f.convex = convex;
    return f;
}

/*
 * Flower petal P_{alpha,delta}(x0,f) = { x : f(x) <= f(x0) - alpha d(x,x0) + delta }.
 */
struct Petal {
    Point x0;
    double alpha = 1.0;
    double delta = 0.0;
    const ScalarField* field = nullptr;
};

inline bool petal_contains(const Petal& petal, const Point& x) {
    const double lhs = (*petal.field)(x);
    const double rhs =
        (*petal.field)(petal.x0) - petal.alpha * distance(x, petal.x0) + petal.delta;
    return lhs <= rhs + 1e-12;  // slack toward inclusion
}

struct PetalSearchResult {
    std::size_t index = 0;
    std::vector<std::size_t> trace;   // strictly f-decreasing chain, starts at x0
    std::vector<double> trace_values;
    bool petal_singleton = false;     // A ∩ P_{alpha,0}(a,f) = {a} over samples
    bool in_start_petal = false;      // a ∈ P_{alpha,delta}(x0,f)
};

/*
 * Iterates a_{n+1} = argmin f over A ∩ P_{alpha,0}(a_n,f) from a_0 = x0 until
 * the argmin is the current point. Moves strictly decrease f by at least
 * alpha times the step, so the iteration terminates after at most |A| moves.
 */
inline PetalSearchResult petal_search(const FiniteSet& a, const ScalarField& f, double alpha,
                                      double delta, std::size_t x0_index) {
    if (!(alpha > 0.0)) throw usage_error("petal_search: alpha must be positive");
    if (x0_index >= a.points.size()) throw usage_error("petal_search: x0 index out of range");
    std::vector<double> values(a.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) values[i] = f(a.points[i]);

    PetalSearchResult result;
    std::size_t cur = x0_index;
    result.trace.push_back(cur);
    result.trace_values.push_back(values[cur]);
    for (std::size_t guard = 0; guard <= a.points.size(); ++guard) {
        std::size_t best = cur;
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            if (i == cur) continue;
            if (values[i] >= values[best]) continue;
            if (values[i] <= values[cur] - alpha * distance(a.points[i], a.points[cur]) + 1e-12)
                best = i;
        }
        if (best == cur) break;
        cur = best;
        result.trace.push_back(cur);
        result.trace_values.push_back(values[cur]);
    }
    result.index = cur;

    result.petal_singleton = true;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (i == cur) continue;
        if (values[i] <= values[cur] - alpha * distance(a.points[i], a.points[cur]) + 1e-12 &&
            distance(a.points[i], a.points[cur]) > 1e-9) {
            result.petal_singleton = false;
            break;
        }
    }
    result.in_start_petal =
        values[cur] <=
        values[x0_index] - alpha * distance(a.points[cur], a.points[x0_index]) + delta + 1e-12;
    return result;
}

namespace detail {

// planar coordinates in which geodesics are straight lines: identity for
// euclidean 2-space, the Klein disk for the hyperbolic plane
inline std::pair<double, double> straight_chart(const Point& p) {
    const Space& sp = *p.space;
    if (sp.kind() == SpaceKind::euclidean && sp.dim() == 2) return {p.c[0], p.c[1]};
    if (sp.kind() == SpaceKind::hyperbolic) {
        const double s = sp.curvature_scale();
        return {s * p.c[0] / (s * p.c[2]), s * p.c[1] / (s * p.c[2])};
    }
    throw usage_error("straight_chart: needs euclidean 2-space or the hyperbolic plane");
}

inline std::vector<std::size_t> convex_hull_indices(const std::vector<std::pair<double, double>>& q) {
    std::vector<std::size_t> idx(q.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return q[a] < q[b]; });
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (q[a].first - q[o].first) * (q[b].second - q[o].second) -
               (q[a].second - q[o].second) * (q[b].first - q[o].first);
    };
    std::vector<std::size_t> hull;
    for (const std::size_t i : idx) {  // lower chain
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 0.0)
            hull.pop_back();
        hull.push_back(i);
    }
    const std::size_t lower = hull.size() + 1;
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {  // upper chain
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();
    return hull;
}

// distance from z to the segment [p,q]; unimodal along a geodesic in the
// spaces handled here, so golden-section search converges
inline double segment_distance(const Point& z, const Point& p, const Point& q) {
    double lo = 0.0, hi = 1.0;
    const double inv_phi = 0.6180339887498948482;
    double m1 = hi - inv_phi * (hi - lo);
    double m2 = lo + inv_phi * (hi - lo);
    double f1 = distance(z, geodesic_point(p, q, m1));
    double f2 = distance(z, geodesic_point(p, q, m2));
    for (int it = 0; it < 80; ++it) {
        if (f1 <= f2) {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - inv_phi * (hi - lo);
            f1 = distance(z, geodesic_point(p, q, m1));
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + inv_phi * (hi - lo);
            f2 = distance(z, geodesic_point(p, q, m2));
        }
    }
    return std::min({f1, f2, distance(z, p), distance(z, q)});
}

}  // namespace detail

/*
 * Distance from z to the closed convex hull of the set's generators. For the
 * two straight-chart spaces this is exact: the hull is a chart polygon and
 * the distance is minimized over its edges. Elsewhere it falls back to the
 * sampled distance refined over segments through the nearest sample.
 */
inline double hull_distance(const Point& z, const FiniteSet& b) {
    const Space& sp = *z.space;
    const bool chartable =
        (sp.kind() == SpaceKind::euclidean && sp.dim() == 2) || sp.kind() == SpaceKind::hyperbolic;
    const std::vector<Point>& gens = b.generators.empty() ? b.points : b.generators;
    if (!chartable || gens.size() <= 1) {
        double best = dist_to(z, b).first;
        const Point& p0 = b.points[dist_to(z, b).second];
        for (const Point& q : b.points) best = std::min(best, detail::segment_distance(z, p0, q));
        return best;
    }
    std::vector<std::pair<double, double>> chart(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) chart[i] = detail::straight_chart(gens[i]);
    const auto hull = detail::convex_hull_indices(chart);
    if (hull.size() >= 3) {
        const auto [zx, zy] = detail::straight_chart(z);
        bool inside = true;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const auto& p = chart[hull[i]];
            const auto& q = chart[hull[(i + 1) % hull.size()]];
            const double cross = (q.first - p.first) * (zy - p.second) -
                                 (q.second - p.second) * (zx - p.first);
            if (cross < -1e-14) {
                inside = false;
                break;
            }
        }
        if (inside) return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    if (hull.size() == 1) return distance(z, gens[hull[0]]);
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point& p = gens[hull[i]];
        const Point& q = gens[hull[(i + 1) % hull.size()]];
        best = std::min(best, detail::segment_distance(z, p, q));
    }
    return best;
}

struct DropSearchReport {
    std::size_t a_index = 0;
    double dist_a_to_b = 0.0;
    double alpha = 0.0;
    bool cond_dist_ok = false;        // (i)  dist(a,B) < lambda_AB + eps
    bool cond_separation_ok = false;  // (ii) no other A sample within 1e-9 of the drop
    double separation = 0.0;
    bool cond_petal_ok = false;       // (iii) drop ⊆ P_{alpha,0}(a, dist(.,B))
    double min_petal_defect = 0.0;
    PetalSearchResult petal;
};

/*
 * Drop theorem search: petal iteration for f = dist(.,B) with
 * alpha = lambda_AB / (lambda_AB + diam B), then the drop co(B ∪ {a}) and
 * certification of the three conclusions over samples.
 */
inline std::tuple<std::size_t, FiniteSet, DropSearchReport> drop_search(const FiniteSet& a,
                                                                        const FiniteSet& b,
                                                                        double eps) {
    if (!a.space->flags().convex_metric) throw usage_error("drop_search: space must have a convex metric");
    if (!(eps > 0.0)) throw usage_error("drop_search: eps must be positive");
    const LambdaMu lm = lambda_mu(a, b);
    if (!(lm.lambda > 0.0)) throw usage_error("drop_search: requires lambda_AB > 0");

    const double alpha = lm.lambda / (lm.lambda + diam(b));
    const ScalarField f = field_dist_to_set(b);
    const std::size_t x0 = lm.arg_lambda.first;  // exact argmin of dist(.,B) over A
    PetalSearchResult petal = petal_search(a, f, alpha, eps / 2.0, x0);
    const std::size_t a_idx = petal.index;
    const Point& a_pt = a.points[a_idx];

    std::vector<Point> gens = b.generators.empty() ? b.points : b.generators;
    gens.push_back(a_pt);
    FiniteSet drop;
    drop.space = b.space;
    drop.convex_closure = true;
    drop.hull = b.hull;
    drop.generators = gens;
    drop.points = hull_samples(gens, b.hull);

    DropSearchReport report;
    report.a_index = a_idx;
    report.alpha = alpha;
    report.dist_a_to_b = dist_to(a_pt, b).first;
    report.cond_dist_ok = report.dist_a_to_b < lm.lambda + eps;
    report.petal = petal;

    double separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (i == a_idx) continue;
        for (const Point& y : drop.points) separation = std::min(separation, distance(a.points[i], y));
    }
    report.separation = a.points.size() > 1 ? separation : std::numeric_limits<double>::infinity();
    report.cond_separation_ok = !(report.separation <= 1e-9);

    // hull-in-petal inclusion measured against the exact hull distance
    const double fa = report.dist_a_to_b;
    double min_defect = std::numeric_limits<double>::infinity();
    for (const Point& y : drop.points) {
        const double defect = fa - alpha * distance(a_pt, y) - hull_distance(y, b);
        min_defect = std::min(min_defect, defect);
    }
    report.min_petal_defect = min_defect;
    report.cond_petal_ok = min_defect >= -1e-9;
    return {a_idx, std::move(drop), std::move(report)};
}

/*
 * Sublevel-distance table: for f convex and continuous with f(z) < c, every
 * eps admits a delta with dist(x, {f<=c}) < eps whenever f(x) < c + delta.
 * The sublevel set is sampled from a hull around z and X plus bisection
 * points on the level surface f = c.
 */
inline std::vector<std::pair<double, double>> sublevel_dist_check(const ScalarField& f, double c,
                                                                  const Point& z, const FiniteSet& x,
                                                                  const std::vector<double>& eps_grid) {
    if (!(f(z) < c)) throw usage_error("sublevel_dist_check: needs f(z) < c");

    std::vector<Point> pool = x.points;
    pool.push_back(z);
    {
        std::vector<Point> gens = x.generators.empty() ? x.points : x.generators;
        gens.push_back(z);
        HullParams params = x.hull;
        for (const Point& p : hull_samples(gens, params)) pool.push_back(p);
    }

    std::vector<Point> sublevel;
    for (const Point& p : pool) {
        const double v = f(p);
        if (v <= c) {
            sublevel.push_back(p);
        } else {
            // f is convex along [p, z] with f(p) > c > f(z): bisect the crossing
            double lo = 0.0, hi = 1.0;  // t toward z
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (f(geodesic_point(p, z, mid)) > c)
                    lo = mid;
                else
                    hi = mid;
            }
            sublevel.push_back(geodesic_point(p, z, hi));
        }
    }
    if (sublevel.empty()) throw sampling_error("sublevel_dist_check: no sublevel samples found");

    auto dist_to_sublevel = [&](const Point& p) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& s : sublevel) best = std::min(best, distance(p, s));
        return best;
    };

    std::vector<std::pair<double, double>> table;
    for (const double eps : eps_grid) {
        double chosen = 0.0;
        for (int j = 0; j < 24; ++j) {
            const double delta = eps * std::pow(0.5, j);
            bool ok = true;
            for (const Point& p : x.points) {
                if (f(p) < c + delta && !(dist_to_sublevel(p) < eps)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                chosen = delta;
                break;
            }
        }
        table.emplace_back(eps, chosen);
    }
    return table;
}

struct FDiagnostics {
    std::vector<double> sigma_grid;
    std::vector<double> diam_column;
    double tau_wp = 0.0;
    bool verdict = false;
};

struct ConvexMinResult {
    FiniteSet y;
    Point minimizer;
    double value = 0.0;  // sampled sublevel value m
    FDiagnostics diagnostics;
    bool used_shortcut = false;  // hypothesis (ii) with dist(z0, X) <= r
};

namespace detail {

inline std::vector<Point> neighborhood_samples(const Point& center, double radius, int directions = 8) {
    std::vector<Point> out;
    const Space& sp = *center.space;
    if (sp.kind() == SpaceKind::hyperbolic) {
        for (int k = 0; k < directions; ++k) {
            const double theta = 6.283185307179586 * k / directions;
            out.push_back(hyperbolic_exp(center, radius, theta));
        }
        return out;
    }
    if (sp.kind() == SpaceKind::euclidean) {
        const int n = sp.dim();
        if (n == 2) {
            for (int k = 0; k < directions; ++k) {
                const double theta = 6.283185307179586 * k / directions;
                out.push_back(euclidean_offset(center, {radius * std::cos(theta), radius * std::sin(theta)}));
            }
        } else {
            for (int i = 0; i < n; ++i)
                for (const double sgn : {1.0, -1.0}) {
                    std::vector<double> delta(n, 0.0);
                    delta[i] = sgn * radius;
                    out.push_back(euclidean_offset(center, delta));
                }
        }
        return out;
    }
    throw usage_error("neighborhood_samples: unsupported space");
}

}  // namespace detail

/*
 * Well-posed regularization of min(X,f) for convex continuous f. Follows the
 * density proof: either the known minimizer z0 is within r of X and
 * Y = co(X ∪ {z0}), or the drop machinery runs on A = {f <= m} with
 * B = {dist(.,X) <= r/2}, m = min f over B.
 */
inline ConvexMinResult regularize_convex_min(const FiniteSet& x, const ScalarField& f, double r) {
    if (!x.space->flags().convex_metric)
        throw usage_error("regularize_convex_min: space must have a convex metric");
    if (!(r > 0.0)) throw usage_error("regularize_convex_min: r must be positive");

    ConvexMinResult result;
    const std::optional<Point> z0 = f.global_minimizer();

    Point chosen = x.points.front();
    if (z0 && dist_to(*z0, x).first <= r) {
        chosen = *z0;
        result.used_shortcut = true;
        result.value = f(chosen);
    } else {
        // B = { dist(.,X) <= r/2 } sampled as X plus shells around its samples
        std::vector<Point> b_pool = x.points;
        for (const Point& p : x.points) {
            for (const Point& q : detail::neighborhood_samples(p, r / 4.0)) b_pool.push_back(q);
            for (const Point& q : detail::neighborhood_samples(p, r / 2.0)) b_pool.push_back(q);
        }
        double m = std::numeric_limits<double>::infinity();
        for (const Point& p : b_pool) m = std::min(m, f(p));

        // witness with f < m, needed to bisect the level surface f = m
        Point witness = x.points.front();
        bool have_witness = false;
        if (z0 && f(*z0) < m - 1e-12) {
            witness = *z0;
            have_witness = true;
        }
        if (!have_witness) {
            // walk along the steepest pool descent until f drops below m
            std::size_t best_idx = 0;
            for (std::size_t i = 0; i < b_pool.size(); ++i)
                if (f(b_pool[i]) < f(b_pool[best_idx])) best_idx = i;
            const Point& anchor = b_pool[best_idx];
            for (const Point& q : detail::neighborhood_samples(anchor, r)) {
                if (f(q) < m - 1e-12) {
                    witness = q;
                    have_witness = true;
                    break;
                }
            }
        }
        if (!have_witness)
            throw sampling_error("regularize_convex_min: could not find a point below the level m");

        // A = {f <= m} sampled on the level surface via bisection toward the witness
        std::vector<Point> a_pts;
        for (const Point& p : b_pool) {
            if (f(p) <= m + 1e-12 && f(p) >= m - 1e-12) {
                a_pts.push_back(p);
                continue;
            }
            if (f(p) > m) {
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (f(geodesic_point(p, witness, mid)) > m)
                        lo = mid;
                    else
                        hi = mid;
                }
                a_pts.push_back(geodesic_point(p, witness, hi));
            }
        }
        if (a_pts.empty()) throw sampling_error("regularize_convex_min: no sublevel samples found");

        // dedup into a FiniteSet
        FiniteSet a_set;
        a_set.space = x.space;
        a_set.hull = x.hull;
        {
            std::unordered_set<detail::GridKey, detail::GridKeyHash> seen;
            for (Point& p : a_pts)
                if (seen.insert(detail::grid_key(p, kDedupGrid)).second)
                    a_set.points.push_back(std::move(p));
        }
        a_set.generators = a_set.points;

        auto [a_idx, drop, report] = drop_search(a_set, x, r / 2.0);
        (void)drop;
        (void)report;
        chosen = a_set.points[a_idx];
        result.value = f(chosen);
    }

    std::vector<Point> gens = x.generators.empty() ? x.points : x.generators;
    gens.push_back(chosen);
    result.y.space = x.space;
    result.y.convex_closure = true;
    result.y.hull = x.hull;
    result.y.generators = gens;
    result.y.points = hull_samples(gens, x.hull);
    result.minimizer = chosen;
    if (result.used_shortcut) result.value = f(chosen);

    // Revalski slices L_{Y,f}(sigma) over the Y samples plus a fine stencil
    // around the minimizer
    const double scale = std::max(diam(result.y), 1e-12);
    const std::vector<double> grid = make_sigma_grid(scale);
    const double tau_wp = 1e-3 * scale;
    double inf_f = std::numeric_limits<double>::infinity();
    for (const Point& p : result.y.points) inf_f = std::min(inf_f, f(p));

    std::vector<Point> pool = result.y.points;
    const double sigma_min = grid.back();
    for (const double rho : {sigma_min / 2.0, sigma_min, 2.0 * sigma_min})
        for (const Point& q : detail::neighborhood_samples(chosen, rho)) pool.push_back(q);

    FDiagnostics diag;
    diag.sigma_grid = grid;
    diag.tau_wp = tau_wp;
    for (const double sigma : grid) {
        std::vector<const Point*> members;
        for (const Point& p : pool)
            if (f(p) <= inf_f + sigma && dist_to(p, result.y).first <= sigma) members.push_back(&p);
        double best = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j)
                best = std::max(best, distance(*members[i], *members[j]));
        diag.diam_column.push_back(best);
    }
    diag.verdict = diag.diam_column.back() <= tau_wp;
    result.diagnostics = diag;
    return result;
}

}  // namespace geoprox
