#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "geoprox/common.hpp"
#include "geoprox/finite_set.hpp"
#include "geoprox/rng.hpp"
#include "geoprox/space.hpp"

namespace geoprox {

enum class ProblemMode { min, max };

/*
 * min(A,X) / max(A,X): find a pair realizing lambda_AX or mu_AX over the
 * sample product.
 */
struct PairProblem {
    FiniteSet a;
    FiniteSet x;
    ProblemMode mode = ProblemMode::min;
    mutable std::optional<LambdaMu> cache;

    const LambdaMu& values() const {
        if (!cache) cache = lambda_mu(a, x);
        return *cache;
    }
};

struct SolveResult {
    std::size_t a_index = 0;
    std::size_t x_index = 0;
    double value = 0.0;
};

inline SolveResult solve(const PairProblem& problem) {
    const LambdaMu& lm = problem.values();
    if (problem.mode == ProblemMode::min)
        return {lm.arg_lambda.first, lm.arg_lambda.second, lm.lambda};
    return {lm.arg_mu.first, lm.arg_mu.second, lm.mu};
}

// Dyadic grid sigma_i = sigma0 * 2^-i, i = 0..levels-1, sigma0 = scale/4.
inline std::vector<double> make_sigma_grid(double scale, int levels = 13) {
    if (levels < 1) throw usage_error("make_sigma_grid: levels must be >= 1");
    if (!(scale > 0.0)) scale = 1.0;
    std::vector<double> grid(levels);
    double sigma = scale / 4.0;
    for (int i = 0; i < levels; ++i) {
        grid[i] = sigma;
        sigma *= 0.5;
    }
    return grid;
}

inline double pair_scale(const FiniteSet& a, const FiniteSet& x) {
    const double s = std::max(diam(a), diam(x));
    if (s > 0.0) return s;
    return std::max(lambda_mu(a, x).lambda, 1.0);
}

/*
 * Slice-diameter table over a descending sigma grid, with the verdict read at
 * the smallest sigma: both columns must fall to tau_wp or below.
 */
struct Diagnostics {
    ProblemMode mode = ProblemMode::min;
    std::vector<double> sigma_grid;
    std::vector<double> diam_x_side;  // slices of X against partner A
    std::vector<double> diam_a_side;  // slices of A against partner X
    double tau_wp = 0.0;
    bool verdict = false;
};

namespace detail {

inline double subset_diam(const std::vector<Point>& pts, const std::vector<std::size_t>& idx) {
    if (idx.size() < 2) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = idx[0], bj = idx[0];
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const double d = distance_surrogate(pts[idx[a]], pts[idx[b]]);
            if (d > best) {
                best = d;
                bi = idx[a];
                bj = idx[b];
            }
        }
    if (bi == bj) return 0.0;
    return distance(pts[bi], pts[bj]);
}

// per-point distances to the partner set: dist for min mode, Dist for max mode
inline std::vector<double> side_values(const FiniteSet& base, const FiniteSet& partner,
                                       ProblemMode mode) {
    std::vector<double> vals(base.points.size());
    for (std::size_t i = 0; i < base.points.size(); ++i)
        vals[i] = mode == ProblemMode::min ? dist_to(base.points[i], partner).first
                                           : remotal_to(base.points[i], partner).first;
    return vals;
}

}  // namespace detail

inline Diagnostics wellposedness_profile(const FiniteSet& a, const FiniteSet& x, ProblemMode mode,
                                         std::vector<double> sigma_grid = {},
                                         double tau_wp = -1.0) {
    if (sigma_grid.empty()) sigma_grid = make_sigma_grid(pair_scale(a, x));
    for (std::size_t i = 0; i + 1 < sigma_grid.size(); ++i)
        if (!(sigma_grid[i] > sigma_grid[i + 1]) || !(sigma_grid[i + 1] > 0.0))
            throw usage_error("wellposedness_profile: sigma grid must be strictly descending, positive");
    if (tau_wp < 0.0) tau_wp = 1e-3 * pair_scale(a, x);

    const LambdaMu lm = lambda_mu(a, x);
    const std::vector<double> a_vals = detail::side_values(a, x, mode);
    const std::vector<double> x_vals = detail::side_values(x, a, mode);
    const double opt = mode == ProblemMode::min ? lm.lambda : lm.mu;

    Diagnostics diag;
    diag.mode = mode;
    diag.sigma_grid = sigma_grid;
    diag.tau_wp = tau_wp;
    diag.diam_a_side.reserve(sigma_grid.size());
    diag.diam_x_side.reserve(sigma_grid.size());
    for (const double sigma : sigma_grid) {
        std::vector<std::size_t> a_members, x_members;
        for (std::size_t i = 0; i < a_vals.size(); ++i) {
            const bool in = mode == ProblemMode::min ? a_vals[i] <= opt + sigma
                                                     : a_vals[i] >= opt - sigma;
            if (in) a_members.push_back(i);
        }
        for (std::size_t i = 0; i < x_vals.size(); ++i) {
            const bool in = mode == ProblemMode::min ? x_vals[i] <= opt + sigma
                                                     : x_vals[i] >= opt - sigma;
            if (in) x_members.push_back(i);
        }
        diag.diam_a_side.push_back(detail::subset_diam(a.points, a_members));
        diag.diam_x_side.push_back(detail::subset_diam(x.points, x_members));
    }
    diag.verdict = diag.diam_a_side.back() <= tau_wp && diag.diam_x_side.back() <= tau_wp;
    return diag;
}

/*
 * Steckin-type bound function for curvature kappa < 0:
 *
 *   F_kappa(d,r,sigma) = (2/s) arccosh( cosh^2(sA)
 *       - (sinh(sA)/sinh(sd)) [cosh(sr) - cosh(sd) cosh(sA)] ),
 *   s = sqrt(-kappa), A = r - d + sigma.
 *
 * Evaluated through the identity arg - 1 =
 *   sinh(sS) sinh(sA) sinh(sd + sA)/sinh(sd)
 *   - (cosh(sS) - 1) sinh(sA) (sinh(sA) + cosh(sA) coth(sd)),   S = sigma,
 * which is exact at sigma = 0 and free of the catastrophic cancellation the
 * raw expression has near it.
 */
inline double f_kappa(double kappa, double d, double r, double sigma) {
    if (!(kappa < 0.0)) throw usage_error("f_kappa: kappa must be negative");
    if (d < 0.0 || r < 0.0 || sigma < 0.0) throw usage_error("f_kappa: arguments must be nonnegative");
    if (d == 0.0) throw usage_error("f_kappa: d = 0 lies outside the domain (sinh division)");
    const double s = std::sqrt(-kappa);
    const double D = s * d;
    const double A = s * (r - d + sigma);
    const double S = s * sigma;
    const double sinhA = std::sinh(A);
    const double coshA = std::cosh(A);
    const double cothD = std::cosh(D) / std::sinh(D);
    const double excess = std::sinh(S) * sinhA * std::sinh(D + A) / std::sinh(D) -
                          (std::cosh(S) - 1.0) * sinhA * (sinhA + coshA * cothD);
    double e = excess;
    if (e < 0.0) {
        if (e < -1e-9) ++clamp_event_count();
        e = 0.0;
    }
    return 2.0 / s * acosh1p(e);
}

// assumption (1): x in E, r > 0, y in B(x, r/2) \ {x}, 0 <= sigma <= 2 d(x,y)
inline void require_assumption1(const Point& x, const Point& y, double r, double sigma) {
    const double d = distance(x, y);
    if (!(r > 0.0)) throw usage_error("assumption (1): r must be positive");
    if (!(d > 0.0)) throw usage_error("assumption (1): y must differ from x");
    if (!(d < r / 2.0)) throw usage_error("assumption (1): y must lie in B(x, r/2)");
    if (sigma < 0.0 || sigma > 2.0 * d)
        throw usage_error("assumption (1): sigma must lie in [0, 2 d(x,y)]");
}

// D(x,y;r,sigma) membership: d(z,y) <= r - d(x,y) + sigma and d(z,x) >= r.
inline bool d_set_contains(const Point& x, const Point& y, double r, double sigma, const Point& z) {
    require_assumption1(x, y, r, sigma);
    const double d = distance(x, y);
    return distance(z, y) <= r - d + sigma && distance(z, x) >= r;
}

struct SteckinReport {
    double empirical_diam = 0.0;
    double bound = 0.0;
    bool ok = false;
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    bool starved = false;
};

/*
 * Rejection-samples D(x,y;r,sigma) in a space of curvature bounded below and
 * compares the empirical diameter against F_kappa(d(x,y),r,sigma) + 2 sigma.
 * The deterministic witness u (d(x,u)=r, d(y,u)=r-d(x,y)) seeds the sample.
 */
inline SteckinReport steckin_bound_check(const Point& x, const Point& y, double r, double sigma,
                                         std::size_t n_samples, std::uint64_t seed = 1) {
    require_assumption1(x, y, r, sigma);
    const SpaceHandle space = x.space;
    const auto kappa_lb = space->flags().curvature_bounded_below;
    if (!kappa_lb) throw usage_error("steckin_bound_check: space needs curvature bounded below");
    if (!space->flags().geodesic_extension)
        throw usage_error("steckin_bound_check: space needs the geodesic extension property");

    const double d = distance(x, y);
    const double radius = r - d + sigma;
    const Point u = extend_geodesic(x, y, r - d);

    std::vector<Point> accepted;
    accepted.reserve(n_samples);
    accepted.push_back(u);

    Rng rng(seed);
    const double reject_threshold = surrogate_of_distance(space, r);
    std::size_t attempts = 0;
    const std::size_t max_attempts = std::max<std::size_t>(n_samples * 10000ULL, 1000000ULL);
    bool starved = false;
    while (accepted.size() < n_samples) {
        if (attempts >= max_attempts) {
            starved = true;
            break;
        }
        ++attempts;
        Point z = sample_ball(y, radius, rng);
        if (distance_surrogate(z, x) >= reject_threshold) accepted.push_back(std::move(z));
        if (attempts >= 10000 &&
            static_cast<double>(accepted.size()) < 1e-4 * static_cast<double>(attempts)) {
            starved = true;
            break;
        }
    }

    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < accepted.size(); ++i)
        for (std::size_t j = i + 1; j < accepted.size(); ++j) {
            const double q = distance_surrogate(accepted[i], accepted[j]);
            if (q > best) {
                best = q;
                bi = i;
                bj = j;
            }
        }
    SteckinReport report;
    report.empirical_diam = bi == bj ? 0.0 : distance(accepted[bi], accepted[bj]);
    report.bound = f_kappa(*kappa_lb, d, r, sigma) + 2.0 * sigma;
    report.ok = report.empirical_diam <= report.bound + 1e-6;
    report.accepted = accepted.size();
    report.attempts = attempts;
    report.starved = starved;
    return report;
}

/*
 * Empirical test of the CAT(0) one-sided characterization: if the Y-side
 * slice diameters vanish at the grid floor, the X-side ones must as well and
 * all near-minimizing pairs must cluster at a single solution.
 */
struct Cat0OneSideReport {
    bool hypothesis_met = false;   // diam L_{YX}(sigma_min) <= tau_wp
    bool x_side_ok = false;        // some grid sigma' has diam L_{XY}(sigma') <= tau_wp
    double cluster_radius = 0.0;   // spread of near-minimizing pairs at sigma_min
    bool pass = false;
};

inline Cat0OneSideReport cat0_oneside_check(const FiniteSet& x, const FiniteSet& y,
                                            std::vector<double> sigma_grid = {},
                                            double tau_wp = -1.0) {
    if (!x.space->flags().cat0) throw usage_error("cat0_oneside_check: space is not CAT(0)");
    if (!x.convex_closure && x.points.size() > 1)
        throw usage_error("cat0_oneside_check: X must carry the convex-closure interpretation");
    if (sigma_grid.empty()) sigma_grid = make_sigma_grid(pair_scale(x, y));
    if (tau_wp < 0.0) tau_wp = 1e-3 * pair_scale(x, y);

    const LambdaMu lm = lambda_mu(x, y);
    const double sigma_min = sigma_grid.back();

    Cat0OneSideReport report;
    const std::vector<double> y_vals = detail::side_values(y, x, ProblemMode::min);
    std::vector<std::size_t> y_members;
    for (std::size_t i = 0; i < y_vals.size(); ++i)
        if (y_vals[i] <= lm.lambda + sigma_min) y_members.push_back(i);
    report.hypothesis_met = detail::subset_diam(y.points, y_members) <= tau_wp;
    if (!report.hypothesis_met) return report;

    const std::vector<double> x_vals = detail::side_values(x, y, ProblemMode::min);
    for (const double sigma : sigma_grid) {
        std::vector<std::size_t> x_members;
        for (std::size_t i = 0; i < x_vals.size(); ++i)
            if (x_vals[i] <= lm.lambda + sigma) x_members.push_back(i);
        if (detail::subset_diam(x.points, x_members) <= tau_wp) {
            report.x_side_ok = true;
            break;
        }
    }

    // all near-minimizing pairs at the grid floor; their spread is the cluster radius
    std::vector<std::size_t> px, py;
    for (std::size_t i = 0; i < x.points.size(); ++i)
        for (std::size_t j = 0; j < y.points.size(); ++j)
            if (distance(x.points[i], y.points[j]) <= lm.lambda + sigma_min) {
                px.push_back(i);
                py.push_back(j);
            }
    std::sort(px.begin(), px.end());
    px.erase(std::unique(px.begin(), px.end()), px.end());
    std::sort(py.begin(), py.end());
    py.erase(std::unique(py.begin(), py.end()), py.end());
    report.cluster_radius =
        std::max(detail::subset_diam(x.points, px), detail::subset_diam(y.points, py));
    report.pass = report.x_side_ok && report.cluster_radius <= tau_wp;
    return report;
}

}  // namespace geoprox
