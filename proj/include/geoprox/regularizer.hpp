#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "geoprox/common.hpp"
#include "geoprox/finite_set.hpp"
#include "geoprox/proximity.hpp"
#include "geoprox/space.hpp"

namespace geoprox {

/*
 * Hull bound for y in co(X ∪ {x'}):
 *   dist(y,X) <= dist(x',X) - alpha d(x',y),
 *   alpha = dist(x',X) / (dist(x',X) + diam X).
 * Returns RHS - LHS; nonnegative (within tolerance) in convex-metric spaces.
 */
inline double lemma_hull_bound_defect(const FiniteSet& x, const Point& x_prime, const Point& y) {
    const double rho = dist_to(x_prime, x).first;
    if (!(rho > 0.0)) throw usage_error("lemma_hull_bound_defect: x' must lie outside X");
    const double alpha = rho / (rho + diam(x));
    return (rho - alpha * distance(x_prime, y)) - dist_to(y, x).first;
}

// Indices of A within tol of the nearest (resp. farthest) distance to z.
inline std::vector<std::size_t> nearest_map(const FiniteSet& a, const Point& z, double tol = kTol) {
    if (a.points.empty()) throw usage_error("nearest_map: empty set");
    const double best = dist_to(z, a).first;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (distance(z, a.points[i]) <= best + tol) out.push_back(i);
    return out;
}

inline std::vector<std::size_t> farthest_map(const FiniteSet& a, const Point& z, double tol = kTol) {
    if (a.points.empty()) throw usage_error("farthest_map: empty set");
    const double best = remotal_to(z, a).first;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (distance(z, a.points[i]) >= best - tol) out.push_back(i);
    return out;
}

struct DropConstants {
    double sigma = 0.0;
    double tau = 0.0;
    double alpha = 0.0;
    std::int64_t n0 = 0;
};

struct DropResult {
    FiniteSet y;
    Point x_prime;
    std::size_t anchor_x_index = 0;  // into the input X samples
    std::size_t anchor_a_index = 0;  // into A samples
    double r = 0.0;
    ProblemMode mode = ProblemMode::min;
    Diagnostics certified;
    DropConstants constants;
    std::vector<std::size_t> map_indices;  // nearest/farthest map at x' (compact variants)
};

namespace detail {

// Largest sigma in (0, hi) with g(sigma) < target; g is increasing with
// g(0+) = 0, so a feasible sigma always exists. Bisection to ~1e-12 * hi.
template <typename G>
double select_sigma(G&& g, double hi, double target, const char* who) {
    double lo = 0.0;
    double hi_eval = hi * (1.0 - 1e-12);
    if (g(hi_eval) < target) return hi_eval;
    const double floor_sigma = hi * 1e-15;
    if (!(g(floor_sigma) < target))
        throw usage_error(std::string(who) + ": no sigma satisfies the 1/p bound; smallest achievable F+2sigma = " +
                          std::to_string(g(floor_sigma)));
    lo = floor_sigma;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi_eval);
        if (g(mid) < target)
            lo = mid;
        else
            hi_eval = mid;
    }
    return lo;
}

// n0 from the shrinkage lemma: 1/n0 < level * eps / (4 (level + diam X)).
inline std::int64_t shrinkage_n0(double level, double eps, double diam_x) {
    const double bound = level * eps / (4.0 * (level + diam_x));
    if (!(bound > 0.0)) throw usage_error("shrinkage_n0: degenerate bound");
    auto n0 = static_cast<std::int64_t>(std::floor(1.0 / bound)) + 1;
    while (!(1.0 / static_cast<double>(n0) < bound)) ++n0;
    return n0;
}

/*
 * Samples of co(X ∪ {x'}) as the geodesic cone from the existing samples
 * toward x'. Cone arcs are capped at r (the sample's distance to X's own
 * samples stays <= r by construction, so the sampled Hausdorff distance to X
 * equals r exactly instead of drifting with sample density); the segment
 * through the anchor additionally gets a dyadically refined tip so the
 * near-optimal slices are populated.
 */
inline FiniteSet cone_drop_samples(const FiniteSet& x, const Point& x_prime,
                                   std::size_t anchor_index, double r, double tau) {
    const int m = std::max(1, x.hull.samples);
    FiniteSet y;
    y.space = x.space;
    y.convex_closure = true;
    y.hull = x.hull;
    y.generators = x.generators;
    y.generators.push_back(x_prime);
    y.points = x.points;
    y.points.reserve(x.points.size() * (m + 1) + 64);

    std::unordered_set<GridKey, GridKeyHash> seen;
    for (const Point& p : y.points) seen.insert(grid_key(p, kDedupGrid));
    auto push = [&](Point p) {
        if (seen.insert(grid_key(p, kDedupGrid)).second) y.points.push_back(std::move(p));
    };

    for (std::size_t i = 0; i < x.points.size(); ++i) {
        const Point& p = x.points[i];
        const double dp = distance(p, x_prime);
        if (dp <= 0.0) continue;
        const double cap = std::min(r, dp);
        for (int j = 1; j <= m; ++j) {
            const double s = cap * static_cast<double>(j) / (m + 1);
            push(geodesic_point(p, x_prime, s / dp));
        }
    }
    // dyadic tip refinement along the anchor segment
    const Point& anchor = x.points[anchor_index];
    const double da = distance(anchor, x_prime);
    const double tip_floor = std::max(tau / 8.0, 4e-9);
    double gap = r / 2.0;
    for (int level = 0; level < 60 && gap > tip_floor; ++level, gap *= 0.5) {
        const double s = r - gap;
        if (s <= 0.0) continue;
        push(geodesic_point(anchor, x_prime, s / da));
    }
    push(x_prime);
    return y;
}

}  // namespace detail

/*
 * Density-proof drop for min(A,X) in a space with convex metric and curvature
 * bounded below: pick sigma with F_kappa(r, lambda_X, sigma) + 2 sigma < 1/p,
 * take a minimizing pair (x1,a1), move x' a distance r from x1 along [x1,a1],
 * and return Y standing for co(X ∪ {x'}) together with its diagnostics.
 */
inline DropResult regularize_min(const FiniteSet& a, const FiniteSet& x, double r, int p) {
    const SpaceFlags& flags = x.space->flags();
    if (!flags.convex_metric) throw usage_error("regularize_min: space must have a convex metric");
    if (!flags.curvature_bounded_below)
        throw usage_error("regularize_min: space needs curvature bounded below");
    if (!x.convex_closure && x.points.size() > 1)
        throw usage_error("regularize_min: X must carry the convex-closure interpretation");
    if (p < 1) throw usage_error("regularize_min: p must be >= 1");
    const double kappa = *flags.curvature_bounded_below;

    const LambdaMu lm = lambda_mu(x, a);
    if (!(r > 0.0 && r < lm.lambda))
        throw usage_error("regularize_min: r must satisfy 0 < r < lambda_AX");

    const double target = 1.0 / p;
    const double sigma = detail::select_sigma(
        [&](double s) { return f_kappa(kappa, r, lm.lambda, s) + 2.0 * s; }, r, target,
        "regularize_min");
    const double diam_x = diam(x);
    const std::int64_t n0 = detail::shrinkage_n0(r / 2.0, sigma / 2.0, diam_x);
    const double tau = std::min(sigma / 2.0, 1.0 / static_cast<double>(n0));

    const std::size_t x1 = lm.arg_lambda.first;
    const std::size_t a1 = lm.arg_lambda.second;
    const double d_pair = distance(x.points[x1], a.points[a1]);
    const Point x_prime = geodesic_point(x.points[x1], a.points[a1], r / d_pair);

    DropResult result;
    result.y = detail::cone_drop_samples(x, x_prime, x1, r, tau);
    result.x_prime = x_prime;
    result.anchor_x_index = x1;
    result.anchor_a_index = a1;
    result.r = r;
    result.mode = ProblemMode::min;
    result.constants.sigma = sigma;
    result.constants.tau = tau;
    result.constants.n0 = n0;
    const double rho = dist_to(x_prime, x).first;
    result.constants.alpha = rho / (rho + diam_x);
    result.certified = wellposedness_profile(a, result.y, ProblemMode::min);
    return result;
}

/*
 * Maximization counterpart: sigma satisfies
 * F_kappa(r, mu_X + r - sigma, sigma) + 2 sigma < 1/p and x' extends the
 * maximizing geodesic beyond x1 so that d(a1,x') = d(a1,x1) + r.
 */
inline DropResult regularize_max(const FiniteSet& a, const FiniteSet& x, double r, int p) {
    const SpaceFlags& flags = x.space->flags();
    if (!flags.convex_metric) throw usage_error("regularize_max: space must have a convex metric");
    if (!flags.curvature_bounded_below)
        throw usage_error("regularize_max: space needs curvature bounded below");
    if (!flags.geodesic_extension)
        throw usage_error("regularize_max: space needs the geodesic extension property");
    if (!x.convex_closure && x.points.size() > 1)
        throw usage_error("regularize_max: X must carry the convex-closure interpretation");
    if (p < 1) throw usage_error("regularize_max: p must be >= 1");
    const double kappa = *flags.curvature_bounded_below;

    const LambdaMu lm = lambda_mu(x, a);
    if (!(r > 0.0 && r < lm.mu)) throw usage_error("regularize_max: r must satisfy 0 < r < mu_AX");

    const double target = 1.0 / p;
    const double sigma = detail::select_sigma(
        [&](double s) { return f_kappa(kappa, r, lm.mu + r - s, s) + 2.0 * s; }, r, target,
        "regularize_max");
    const double diam_x = diam(x);
    const std::int64_t n0 = detail::shrinkage_n0(r / 2.0, sigma / 2.0, diam_x);
    const double tau = std::min(sigma / 2.0, 1.0 / static_cast<double>(n0));

    const std::size_t x1 = lm.arg_mu.first;
    const std::size_t a1 = lm.arg_mu.second;
    const Point x_prime = extend_geodesic(a.points[a1], x.points[x1], r);

    DropResult result;
    result.y = detail::cone_drop_samples(x, x_prime, x1, r, tau);
    result.x_prime = x_prime;
    result.anchor_x_index = x1;
    result.anchor_a_index = a1;
    result.r = r;
    result.mode = ProblemMode::max;
    result.constants.sigma = sigma;
    result.constants.tau = tau;
    result.constants.n0 = n0;
    const double rho = dist_to(x_prime, x).first;
    result.constants.alpha = rho / (rho + diam_x);
    result.certified = wellposedness_profile(a, result.y, ProblemMode::max);
    return result;
}

/*
 * Compact-case drop: no curvature bound, but the space must be free of
 * bifurcating geodesics (override to demonstrate the counterexample). The
 * solution pair exists because samples are finite; x' is placed as in the
 * noncompact case and P_A(x') is certified to be a singleton.
 */
inline DropResult regularize_min_compact(const FiniteSet& a, const FiniteSet& x, double r,
                                         double map_tol = 1e-6, bool override_bifurcation = false) {
    const SpaceFlags& flags = x.space->flags();
    if (!flags.convex_metric)
        throw usage_error("regularize_min_compact: space must have a convex metric");
    if (!flags.bifurcation_free && !override_bifurcation)
        throw usage_error("regularize_min_compact: space has bifurcating geodesics");

    const LambdaMu lm = lambda_mu(x, a);
    if (!(r > 0.0 && r < lm.lambda))
        throw usage_error("regularize_min_compact: r must satisfy 0 < r < lambda_AX");

    const std::size_t x1 = lm.arg_lambda.first;
    const std::size_t a1 = lm.arg_lambda.second;
    const double d_pair = distance(x.points[x1], a.points[a1]);
    const Point x_prime = geodesic_point(x.points[x1], a.points[a1], r / d_pair);

    DropResult result;
    result.y = detail::cone_drop_samples(x, x_prime, x1, r, 1e-6);
    result.x_prime = x_prime;
    result.anchor_x_index = x1;
    result.anchor_a_index = a1;
    result.r = r;
    result.mode = ProblemMode::min;
    result.constants.alpha =
        dist_to(x_prime, x).first / (dist_to(x_prime, x).first + diam(x));
    result.map_indices = nearest_map(a, x_prime, map_tol);
    result.certified = wellposedness_profile(a, result.y, ProblemMode::min);
    return result;
}

/*
 * Compact maximization drop: Y = X ∪ {x'} with no hull, exactly as in the
 * proof. `hulled` switches to Y = co(X ∪ {x'}) per the locally-compact remark.
 */
inline DropResult regularize_max_compact(const FiniteSet& a, const FiniteSet& x, double r,
                                         double map_tol = 1e-6, bool hulled = false,
                                         bool override_bifurcation = false) {
    const SpaceFlags& flags = x.space->flags();
    if (!flags.bifurcation_free && !override_bifurcation)
        throw usage_error("regularize_max_compact: space has bifurcating geodesics");
    if (!flags.geodesic_extension)
        throw usage_error("regularize_max_compact: space needs the geodesic extension property");
    if (hulled && !flags.convex_metric)
        throw usage_error("regularize_max_compact: hulled variant needs a convex metric");

    const LambdaMu lm = lambda_mu(x, a);
    if (!(r > 0.0 && r < lm.mu))
        throw usage_error("regularize_max_compact: r must satisfy 0 < r < mu_AX");

    const std::size_t x1 = lm.arg_mu.first;
    const std::size_t a1 = lm.arg_mu.second;
    const Point x_prime = extend_geodesic(a.points[a1], x.points[x1], r);

    DropResult result;
    if (hulled) {
        result.y = detail::cone_drop_samples(x, x_prime, x1, r, 1e-6);
    } else {
        result.y.space = x.space;
        result.y.points = x.points;
        result.y.points.push_back(x_prime);
        result.y.generators = result.y.points;
        result.y.convex_closure = false;
        result.y.hull = x.hull;
    }
    result.x_prime = x_prime;
    result.anchor_x_index = x1;
    result.anchor_a_index = a1;
    result.r = r;
    result.mode = ProblemMode::max;
    result.map_indices = farthest_map(a, x_prime, map_tol);
    result.certified = wellposedness_profile(a, result.y, ProblemMode::max);
    return result;
}

/*
 * Slice-level audit of a drop against the density-proof bounds; used by tests
 * and by the check commands.
 */
struct DropAudit {
    double hausdorff_xy = 0.0;
    double value_shift_error = 0.0;  // |lambda_AY - (lambda_AX - r)| or mu analogue
    double diam_yside_halftau = 0.0;
    double diam_aside_quartertau = 0.0;
    bool ok = false;
};

inline DropAudit audit_drop(const FiniteSet& a, const FiniteSet& x, const DropResult& drop, int p) {
    DropAudit audit;
    audit.hausdorff_xy = hausdorff(x, drop.y);
    const LambdaMu before = lambda_mu(x, a);
    const LambdaMu after = lambda_mu(drop.y, a);
    const double tau = drop.constants.tau;
    if (drop.mode == ProblemMode::min) {
        audit.value_shift_error = std::fabs(after.lambda - (before.lambda - drop.r));
        const SliceSet ys = slice(drop.y, a, tau / 2.0, SliceMode::L_near);
        const SliceSet as = slice(a, drop.y, tau / 4.0, SliceMode::L_near);
        audit.diam_yside_halftau = slice_diam(ys);
        audit.diam_aside_quartertau = slice_diam(as);
    } else {
        audit.value_shift_error = std::fabs(after.mu - (before.mu + drop.r));
        const SliceSet ys = slice(drop.y, a, tau / 2.0, SliceMode::M_far);
        const SliceSet as = slice(a, drop.y, tau / 4.0, SliceMode::M_far);
        audit.diam_yside_halftau = slice_diam(ys);
        audit.diam_aside_quartertau = slice_diam(as);
    }
    audit.ok = audit.hausdorff_xy <= drop.r + 1e-6 && audit.value_shift_error <= tau &&
               audit.diam_yside_halftau < drop.constants.sigma / 2.0 &&
               audit.diam_aside_quartertau < 1.0 / p;
    return audit;
}

}  // namespace geoprox
