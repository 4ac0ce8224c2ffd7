#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "geoprox/common.hpp"
#include "geoprox/space.hpp"

namespace geoprox {

struct HullParams {
    int depth = 3;     // rounds of geodesic insertion
    int samples = 9;   // evenly spaced interior samples per segment
    std::size_t point_cap = kDefaultPointCap;
};

namespace detail {

// Grid key for deduplication. Tree points snap edge endpoints to a vertex key
// so the same vertex reached via different edges deduplicates.
struct GridKey {
    std::vector<std::int64_t> v;
    bool operator==(const GridKey& other) const { return v == other.v; }
};

struct GridKeyHash {
    std::size_t operator()(const GridKey& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (const std::int64_t x : k.v) {
            std::uint64_t t = static_cast<std::uint64_t>(x) + h;
            t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9ULL;
            t = (t ^ (t >> 27)) * 0x94d049bb133111ebULL;
            h = t ^ (t >> 31);
        }
        return static_cast<std::size_t>(h);
    }
};

inline GridKey grid_key(const Point& p, double grid) {
    GridKey key;
    if (p.space->kind() == SpaceKind::tree) {
        const auto& g = p.space->tree_graph();
        const int e = p.tree_edge();
        const double off = p.tree_offset();
        const double len = g.edges[e].len;
        if (off <= grid) {
            key.v = {-1, g.edges[e].u};
        } else if (off >= len - grid) {
            key.v = {-1, g.edges[e].v};
        } else {
            key.v = {e, static_cast<std::int64_t>(std::llround(off / grid))};
        }
        return key;
    }
    key.v.reserve(p.c.size());
    for (const double x : p.c) key.v.push_back(static_cast<std::int64_t>(std::llround(x / grid)));
    return key;
}

}  // namespace detail

/*
 * Samples of G_k(generators): k rounds of inserting `samples` evenly spaced
 * geodesic points on every pair of current points, deduplicating on a 1e-9
 * grid. Each round only needs to process pairs touching points added in the
 * previous round; older pairs were already sampled and would deduplicate.
 * Throws once the deduplicated output would exceed the configured cap.
 */
inline std::vector<Point> hull_samples(const std::vector<Point>& generators, const HullParams& params) {
    if (generators.empty()) throw usage_error("hull_samples: no generators");
    if (params.depth < 0) throw usage_error("hull_samples: depth must be >= 0");
    if (params.samples < 1) throw usage_error("hull_samples: samples must be >= 1");

    std::vector<Point> out;
    std::unordered_set<detail::GridKey, detail::GridKeyHash> seen;
    auto try_insert = [&](const Point& p) {
        if (seen.insert(detail::grid_key(p, kDedupGrid)).second) {
            out.push_back(p);
            if (out.size() > params.point_cap)
                throw usage_error("hull_samples: point cap of " + std::to_string(params.point_cap) +
                                  " exceeded; lower depth/samples or raise the cap");
            return true;
        }
        return false;
    };

    for (const Point& g : generators) try_insert(g);

    std::size_t frontier_begin = 0;
    for (int round = 0; round < params.depth; ++round) {
        const std::size_t round_end = out.size();
        const std::size_t new_begin = round == 0 ? 0 : frontier_begin;
        for (std::size_t i = 0; i < round_end; ++i) {
            const std::size_t j_begin = std::max(i + 1, new_begin);
            for (std::size_t j = j_begin; j < round_end; ++j) {
                for (int k = 1; k <= params.samples; ++k) {
                    const double t = static_cast<double>(k) / (params.samples + 1);
                    try_insert(geodesic_point(out[i], out[j], t));
                }
            }
        }
        if (out.size() == round_end) break;  // saturated
        frontier_begin = round_end;
    }
    return out;
}

/*
 * Finite stand-in for a bounded closed set. With convex_closure set, the
 * generators are interpreted as generators of a convex hull and `points`
 * holds the materialized hull samples.
 */
struct FiniteSet {
    SpaceHandle space;
    std::vector<Point> points;
    std::vector<Point> generators;
    bool convex_closure = false;
    HullParams hull;

    std::size_t size() const { return points.size(); }
    const Point& operator[](std::size_t i) const { return points[i]; }
};

inline FiniteSet make_finite_set(std::vector<Point> pts, bool convex_closure = false,
                                 HullParams hull = HullParams{}) {
    if (pts.empty()) throw usage_error("make_finite_set: a set needs at least one point");
    const SpaceHandle space = pts.front().space;
    for (const Point& p : pts)
        if (!p.space->same_geometry(*space))
            throw usage_error("make_finite_set: mixed spaces in one set");
    if (convex_closure && !space->flags().convex_metric)
        throw usage_error("make_finite_set: convex closure requires a convex metric");
    if (pts.size() <= 1024) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                if (distance(pts[i], pts[j]) < kDupTol)
                    throw usage_error("make_finite_set: duplicate points");
    }
    FiniteSet set;
    set.space = space;
    set.generators = pts;
    set.convex_closure = convex_closure;
    set.hull = hull;
    set.points = convex_closure ? hull_samples(pts, hull) : std::move(pts);
    return set;
}

inline FiniteSet hull_iterate(const FiniteSet& generators, int depth, int samples,
                              std::size_t cap = kDefaultPointCap) {
    HullParams params{depth, samples, cap};
    FiniteSet out;
    out.space = generators.space;
    out.generators = generators.generators;
    out.convex_closure = true;
    out.hull = params;
    out.points = hull_samples(generators.generators, params);
    return out;
}

// (distance, argmin index); ties keep the lowest index.
inline std::pair<double, std::size_t> dist_to(const Point& z, const FiniteSet& set) {
    if (set.points.empty()) throw usage_error("dist_to: empty set");
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        const double d = distance_surrogate(z, set.points[i]);
        if (d < best) {
            best = d;
            arg = i;
        }
    }
    return {distance(z, set.points[arg]), arg};
}

// (remotal distance, argmax index); ties keep the lowest index.
inline std::pair<double, std::size_t> remotal_to(const Point& z, const FiniteSet& set) {
    if (set.points.empty()) throw usage_error("remotal_to: empty set");
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        const double d = distance_surrogate(z, set.points[i]);
        if (d > best) {
            best = d;
            arg = i;
        }
    }
    return {distance(z, set.points[arg]), arg};
}

inline double diam(const FiniteSet& set) {
    if (set.points.empty()) throw usage_error("diam: empty set");
    double best = 0.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < set.points.size(); ++i)
        for (std::size_t j = i + 1; j < set.points.size(); ++j) {
            const double d = distance_surrogate(set.points[i], set.points[j]);
            if (d > best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    if (bi == bj) return 0.0;
    return distance(set.points[bi], set.points[bj]);
}

inline double hausdorff(const FiniteSet& x, const FiniteSet& y) {
    if (x.points.empty() || y.points.empty()) throw usage_error("hausdorff: empty set");
    if (!x.space->same_geometry(*y.space)) throw usage_error("hausdorff: mixed spaces");
    double sup = 0.0;
    for (const Point& p : x.points) sup = std::max(sup, dist_to(p, y).first);
    for (const Point& q : y.points) sup = std::max(sup, dist_to(q, x).first);
    return sup;
}

struct LambdaMu {
    double lambda = 0.0;
    double mu = 0.0;
    std::pair<std::size_t, std::size_t> arg_lambda;
    std::pair<std::size_t, std::size_t> arg_mu;
};

inline LambdaMu lambda_mu(const FiniteSet& x, const FiniteSet& y) {
    if (x.points.empty() || y.points.empty()) throw usage_error("lambda_mu: empty set");
    if (!x.space->same_geometry(*y.space)) throw usage_error("lambda_mu: mixed spaces");
    LambdaMu result;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.points.size(); ++i)
        for (std::size_t j = 0; j < y.points.size(); ++j) {
            const double d = distance_surrogate(x.points[i], y.points[j]);
            if (d < lo) {
                lo = d;
                result.arg_lambda = {i, j};
            }
            if (d > hi) {
                hi = d;
                result.arg_mu = {i, j};
            }
        }
    result.lambda = distance(x.points[result.arg_lambda.first], y.points[result.arg_lambda.second]);
    result.mu = distance(x.points[result.arg_mu.first], y.points[result.arg_mu.second]);
    return result;
}

enum class SliceMode { L_near, M_far };

/*
 * L_{XY}(sigma) = { x in X : dist(x,Y) <= lambda_XY + sigma } or the remotal
 * M-analogue, with lambda/mu evaluated over the same finite samples.
 */
struct SliceSet {
    const FiniteSet* base = nullptr;
    const FiniteSet* partner = nullptr;
    double sigma = 0.0;
    SliceMode mode = SliceMode::L_near;
    std::vector<std::size_t> members;
};

inline SliceSet slice(const FiniteSet& x, const FiniteSet& y, double sigma, SliceMode mode) {
    if (sigma < 0.0) throw usage_error("slice: sigma must be >= 0");
    const LambdaMu lm = lambda_mu(x, y);
    SliceSet s;
    s.base = &x;
    s.partner = &y;
    s.sigma = sigma;
    s.mode = mode;
    for (std::size_t i = 0; i < x.points.size(); ++i) {
        if (mode == SliceMode::L_near) {
            if (dist_to(x.points[i], y).first <= lm.lambda + sigma) s.members.push_back(i);
        } else {
            if (remotal_to(x.points[i], y).first >= lm.mu - sigma) s.members.push_back(i);
        }
    }
    return s;
}

inline double slice_diam(const SliceSet& s) {
    if (s.members.empty()) return 0.0;
    double best = 0.0;
    std::size_t bi = s.members[0], bj = s.members[0];
    for (std::size_t a = 0; a < s.members.size(); ++a)
        for (std::size_t b = a + 1; b < s.members.size(); ++b) {
            const double d =
                distance_surrogate(s.base->points[s.members[a]], s.base->points[s.members[b]]);
            if (d > best) {
                best = d;
                bi = s.members[a];
                bj = s.members[b];
            }
        }
    if (bi == bj) return 0.0;
    return distance(s.base->points[bi], s.base->points[bj]);
}

/*
 * C_n = samples of co(X ∪ {x'}) outside every ball B(x, dist(x',X) - 1/n).
 * The filter keeps points with dist(y,X) >= dist(x',X) - 1/n - 1e-12 so x'
 * itself is always a member.
 */
inline FiniteSet c_n_set(const FiniteSet& x, const Point& x_prime, int n) {
    if (n < 1) throw usage_error("c_n_set: n must be >= 1");
    const double rho = dist_to(x_prime, x).first;
    if (!(rho > 1.0 / n)) throw usage_error("c_n_set: requires dist(x',X) > 1/n");
    std::vector<Point> gens = x.generators;
    gens.push_back(x_prime);
    const std::vector<Point> hull = hull_samples(gens, x.hull);
    const double threshold = rho - 1.0 / n - 1e-12;
    FiniteSet out;
    out.space = x.space;
    out.convex_closure = false;
    out.hull = x.hull;
    for (const Point& y : hull)
        if (dist_to(y, x).first >= threshold) out.points.push_back(y);
    out.generators = out.points;
    return out;
}

}  // namespace geoprox
