#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geoprox/common.hpp"
#include "geoprox/rng.hpp"

namespace geoprox {

enum class SpaceKind { euclidean, hyperbolic, spherical, tree };

/*
 * Finite weighted tree. Points live on edges as (edge index, offset from the
 * edge's u endpoint). Included as the canonical bifurcating-geodesic
 * counterexample space.
 */
struct TreeGraph {
    struct Edge {
        int u = 0;
        int v = 0;
        double len = 0.0;
    };
    int vertex_count = 0;
    std::vector<Edge> edges;
};

struct SpaceFlags {
    bool convex_metric = false;
    bool cat0 = false;
    std::optional<double> curvature_bounded_below;  // some kappa < 0
    bool geodesic_extension = false;
    bool bifurcation_free = false;
};

class Space;
using SpaceHandle = std::shared_ptr<const Space>;

class Space {
public:
    static SpaceHandle euclidean(int dim) {
        if (dim < 1) throw usage_error("euclidean dimension must be >= 1");
        Space s;
        s.kind_ = SpaceKind::euclidean;
        s.dim_ = dim;
        s.flags_ = {true, true, -1.0, true, true};
        return std::make_shared<const Space>(std::move(s));
    }

    static SpaceHandle hyperbolic(double kappa) {
        if (!(kappa < 0.0)) throw usage_error("hyperbolic curvature must be negative");
        Space s;
        s.kind_ = SpaceKind::hyperbolic;
        s.dim_ = 2;
        s.kappa_ = kappa;
        s.flags_ = {true, true, kappa, true, true};
        return std::make_shared<const Space>(std::move(s));
    }

    static SpaceHandle spherical(double kappa) {
        if (!(kappa > 0.0)) throw usage_error("spherical curvature must be positive");
        Space s;
        s.kind_ = SpaceKind::spherical;
        s.dim_ = 2;
        s.kappa_ = kappa;
        // comparison-triangle target only
        s.flags_ = {false, false, std::nullopt, true, true};
        return std::make_shared<const Space>(std::move(s));
    }

    static SpaceHandle tree(TreeGraph graph) {
        validate_tree(graph);
        Space s;
        s.kind_ = SpaceKind::tree;
        s.tree_ = std::move(graph);
        s.build_tree_tables();
        const bool branchless = s.max_degree_ <= 2;
        s.flags_ = {true, true, std::nullopt, false, branchless};
        return std::make_shared<const Space>(std::move(s));
    }

    SpaceKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double kappa() const { return kappa_; }
    const SpaceFlags& flags() const { return flags_; }
    const TreeGraph& tree_graph() const { return tree_; }

    // hyperbolic/spherical rescaling factor sqrt(|kappa|)
    double curvature_scale() const { return std::sqrt(std::fabs(kappa_)); }

    bool same_geometry(const Space& other) const {
        if (kind_ != other.kind_) return false;
        switch (kind_) {
            case SpaceKind::euclidean: return dim_ == other.dim_;
            case SpaceKind::hyperbolic:
            case SpaceKind::spherical: return kappa_ == other.kappa_;
            case SpaceKind::tree:
                if (tree_.vertex_count != other.tree_.vertex_count) return false;
                if (tree_.edges.size() != other.tree_.edges.size()) return false;
                for (std::size_t i = 0; i < tree_.edges.size(); ++i) {
                    const auto& a = tree_.edges[i];
                    const auto& b = other.tree_.edges[i];
                    if (a.u != b.u || a.v != b.v || a.len != b.len) return false;
                }
                return true;
        }
        return false;
    }

    std::string name() const {
        switch (kind_) {
            case SpaceKind::euclidean: return "euclidean(" + std::to_string(dim_) + ")";
            case SpaceKind::hyperbolic: return "hyperbolic(kappa=" + std::to_string(kappa_) + ")";
            case SpaceKind::spherical: return "spherical(kappa=" + std::to_string(kappa_) + ")";
            case SpaceKind::tree: return "tree(" + std::to_string(tree_.vertex_count) + " vertices)";
        }
        return "?";
    }

    // --- tree helpers -----------------------------------------------------

    double tree_vertex_distance(int a, int b) const {
        return vertex_dist_[static_cast<std::size_t>(a) * tree_.vertex_count + b];
    }

    // Vertex path a -> b (inclusive), unique in a tree.
    std::vector<int> tree_vertex_path(int a, int b) const {
        std::vector<int> forward;
        int cur = b;
        while (cur != a) {
            forward.push_back(cur);
            cur = parent_from_[static_cast<std::size_t>(a) * tree_.vertex_count + cur];
        }
        forward.push_back(a);
        std::reverse(forward.begin(), forward.end());
        return forward;
    }

    int tree_edge_between(int a, int b) const {
        return edge_of_[static_cast<std::size_t>(a) * tree_.vertex_count + b];
    }

    int tree_max_degree() const { return max_degree_; }

private:
    static void validate_tree(const TreeGraph& g) {
        if (g.vertex_count < 1) throw usage_error("tree needs at least one vertex");
        if (g.edges.size() + 1 != static_cast<std::size_t>(g.vertex_count))
            throw usage_error("tree must have exactly n-1 edges");
        for (const auto& e : g.edges) {
            if (e.u < 0 || e.u >= g.vertex_count || e.v < 0 || e.v >= g.vertex_count)
                throw usage_error("tree edge endpoint out of range");
            if (e.u == e.v) throw usage_error("tree edge is a loop");
            if (!(e.len > 0.0)) throw usage_error("tree edge length must be positive");
        }
    }

    void build_tree_tables() {
        const int n = tree_.vertex_count;
        std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge idx)
        for (std::size_t i = 0; i < tree_.edges.size(); ++i) {
            adj[tree_.edges[i].u].emplace_back(tree_.edges[i].v, static_cast<int>(i));
            adj[tree_.edges[i].v].emplace_back(tree_.edges[i].u, static_cast<int>(i));
        }
        max_degree_ = 0;
        for (const auto& a : adj) max_degree_ = std::max(max_degree_, static_cast<int>(a.size()));

        vertex_dist_.assign(static_cast<std::size_t>(n) * n, 0.0);
        parent_from_.assign(static_cast<std::size_t>(n) * n, -1);
        edge_of_.assign(static_cast<std::size_t>(n) * n, -1);
        std::vector<int> stack;
        std::vector<char> seen(n);
        for (int root = 0; root < n; ++root) {
            std::fill(seen.begin(), seen.end(), 0);
            stack.assign(1, root);
            seen[root] = 1;
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                for (const auto& [nxt, eidx] : adj[cur]) {
                    if (seen[nxt]) continue;
                    seen[nxt] = 1;
                    const std::size_t base = static_cast<std::size_t>(root) * n;
                    vertex_dist_[base + nxt] = vertex_dist_[base + cur] + tree_.edges[eidx].len;
                    parent_from_[base + nxt] = cur;
                    edge_of_[base + nxt] = eidx;
                    stack.push_back(nxt);
                }
            }
            for (int v = 0; v < n; ++v)
                if (!seen[v]) throw usage_error("tree graph is not connected");
        }
        // edge_of_[a*n+b] currently stores the edge used to first reach b from a;
        // for adjacent vertices that is the connecting edge, which is all we need.
    }

    SpaceKind kind_ = SpaceKind::euclidean;
    int dim_ = 2;
    double kappa_ = 0.0;
    SpaceFlags flags_;
    TreeGraph tree_;
    std::vector<double> vertex_dist_;
    std::vector<int> parent_from_;
    std::vector<int> edge_of_;
    int max_degree_ = 0;
};

/*
 * A point of one space. Model spaces store the ambient vector (hyperboloid
 * vector with Minkowski square -1/|kappa| for hyperbolic, vector of square
 * norm 1/kappa for spherical). Tree points store {edge index, offset}.
 */
struct Point {
    SpaceHandle space;
    std::vector<double> c;

    int tree_edge() const { return static_cast<int>(c[0]); }
    double tree_offset() const { return c[1]; }
};

namespace detail {

inline double minkowski(const std::vector<double>& a, const std::vector<double>& b) {
    return a[0] * b[0] + a[1] * b[1] - a[2] * b[2];
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void check_same_space(const Point& a, const Point& b, const char* op) {
    if (!a.space || !b.space || !a.space->same_geometry(*b.space))
        throw usage_error(std::string(op) + ": points belong to different spaces");
}

// Renormalize a hyperboloid vector (unit model, <x,x> = -1, x3 > 0).
inline void renormalize_hyperboloid(std::vector<double>& x) {
    const double q = -minkowski(x, x);
    if (q > 0.0) {
        const double inv = 1.0 / std::sqrt(q);
        for (double& v : x) v *= inv;
    }
    if (x[2] < 0.0)
        for (double& v : x) v = -v;
}

}  // namespace detail

inline Point make_euclidean_point(const SpaceHandle& space, std::vector<double> coords) {
    if (space->kind() != SpaceKind::euclidean) throw usage_error("space is not euclidean");
    if (static_cast<int>(coords.size()) != space->dim())
        throw usage_error("euclidean point has wrong dimension");
    return Point{space, std::move(coords)};
}

// Accepts hyperboloid coordinates and validates the model constraint.
inline Point make_hyperbolic_point(const SpaceHandle& space, std::vector<double> coords) {
    if (space->kind() != SpaceKind::hyperbolic) throw usage_error("space is not hyperbolic");
    if (coords.size() != 3) throw usage_error("hyperbolic point needs 3 hyperboloid coordinates");
    const double target = 1.0 / std::fabs(space->kappa());
    const double q = -detail::minkowski(coords, coords);
    if (std::fabs(q - target) > 1e-9 * std::max(1.0, target))
        throw usage_error("hyperboloid constraint violated");
    if (coords[2] <= 0.0) throw usage_error("hyperboloid point must lie on the upper sheet");
    return Point{space, std::move(coords)};
}

inline Point make_spherical_point(const SpaceHandle& space, std::vector<double> coords) {
    if (space->kind() != SpaceKind::spherical) throw usage_error("space is not spherical");
    if (coords.size() != 3) throw usage_error("spherical point needs 3 coordinates");
    const double target = 1.0 / space->kappa();
    if (std::fabs(detail::dot(coords, coords) - target) > 1e-9 * std::max(1.0, target))
        throw usage_error("sphere constraint violated");
    return Point{space, std::move(coords)};
}

inline Point make_tree_point(const SpaceHandle& space, int edge, double offset) {
    if (space->kind() != SpaceKind::tree) throw usage_error("space is not a tree");
    const auto& g = space->tree_graph();
    if (edge < 0 || edge >= static_cast<int>(g.edges.size()))
        throw usage_error("tree edge index out of range");
    const double len = g.edges[edge].len;
    if (offset < -1e-12 || offset > len + 1e-12)
        throw usage_error("tree offset outside edge");
    offset = std::clamp(offset, 0.0, len);
    return Point{space, {static_cast<double>(edge), offset}};
}

// Basepoint of a model space: origin, or the hyperboloid/sphere pole.
inline Point base_point(const SpaceHandle& space) {
    switch (space->kind()) {
        case SpaceKind::euclidean:
            return Point{space, std::vector<double>(static_cast<std::size_t>(space->dim()), 0.0)};
        case SpaceKind::hyperbolic: {
            const double radius = 1.0 / space->curvature_scale();
            return Point{space, {0.0, 0.0, radius}};
        }
        case SpaceKind::spherical: {
            const double radius = 1.0 / space->curvature_scale();
            return Point{space, {0.0, 0.0, radius}};
        }
        case SpaceKind::tree:
            return make_tree_point(space, 0, 0.0);
    }
    throw usage_error("unknown space kind");
}

namespace detail {

inline double tree_distance(const Space& sp, const Point& a, const Point& b) {
    const auto& g = sp.tree_graph();
    const int ea = a.tree_edge(), eb = b.tree_edge();
    if (ea == eb) return std::fabs(a.tree_offset() - b.tree_offset());
    const auto& EA = g.edges[ea];
    const auto& EB = g.edges[eb];
    const double au = a.tree_offset(), av = EA.len - a.tree_offset();
    const double bu = b.tree_offset(), bv = EB.len - b.tree_offset();
    double best = std::numeric_limits<double>::infinity();
    const int ends_a[2] = {EA.u, EA.v};
    const double offs_a[2] = {au, av};
    const int ends_b[2] = {EB.u, EB.v};
    const double offs_b[2] = {bu, bv};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            best = std::min(best, offs_a[i] + sp.tree_vertex_distance(ends_a[i], ends_b[j]) + offs_b[j]);
    return best;
}

}  // namespace detail

inline double distance(const Point& a, const Point& b) {
    detail::check_same_space(a, b, "distance");
    const Space& sp = *a.space;
    switch (sp.kind()) {
        case SpaceKind::euclidean: {
            double s = 0.0;
            for (std::size_t i = 0; i < a.c.size(); ++i) {
                const double d = a.c[i] - b.c[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case SpaceKind::hyperbolic: {
            // d = (1/sqrt(-kappa)) acosh(kappa <a,b>_M), argument clamped to >= 1
            const double arg = clamp_at_least(sp.kappa() * detail::minkowski(a.c, b.c), 1.0);
            return std::acosh(arg) / sp.curvature_scale();
        }
        case SpaceKind::spherical: {
            const double arg = clamp_unit_interval(sp.kappa() * detail::dot(a.c, b.c));
            return std::acos(arg) / sp.curvature_scale();
        }
        case SpaceKind::tree:
            return detail::tree_distance(sp, a, b);
    }
    throw usage_error("unknown space kind");
}

/*
 * Monotone stand-in for distance; cheap to evaluate in bulk loops (diameters,
 * ball membership). Strictly increasing in the true distance within one space.
 */
inline double distance_surrogate(const Point& a, const Point& b) {
    const Space& sp = *a.space;
    switch (sp.kind()) {
        case SpaceKind::euclidean: {
            double s = 0.0;
            for (std::size_t i = 0; i < a.c.size(); ++i) {
                const double d = a.c[i] - b.c[i];
                s += d * d;
            }
            return s;
        }
        case SpaceKind::hyperbolic:
            return sp.kappa() * detail::minkowski(a.c, b.c);  // = cosh(s d)
        case SpaceKind::spherical:
            return -sp.kappa() * detail::dot(a.c, b.c);  // = -cos(s d)
        case SpaceKind::tree:
            return detail::tree_distance(sp, a, b);
    }
    throw usage_error("unknown space kind");
}

inline double surrogate_of_distance(const SpaceHandle& space, double d) {
    switch (space->kind()) {
        case SpaceKind::euclidean: return d * d;
        case SpaceKind::hyperbolic: return std::cosh(space->curvature_scale() * d);
        case SpaceKind::spherical: return -std::cos(space->curvature_scale() * d);
        case SpaceKind::tree: return d;
    }
    throw usage_error("unknown space kind");
}

namespace detail {

inline Point tree_geodesic_point(const SpaceHandle& space, const Point& a, const Point& b, double t) {
    const Space& sp = *space;
    const auto& g = sp.tree_graph();
    const double total = tree_distance(sp, a, b);
    if (total <= 0.0) return a;
    double target = t * total;
    const int ea = a.tree_edge(), eb = b.tree_edge();
    if (ea == eb) {
        const double off = a.tree_offset() + (b.tree_offset() > a.tree_offset() ? target : -target);
        return make_tree_point(space, ea, off);
    }
    // choose exit endpoints realizing the unique path
    const auto& EA = g.edges[ea];
    const auto& EB = g.edges[eb];
    const int ends_a[2] = {EA.u, EA.v};
    const double offs_a[2] = {a.tree_offset(), EA.len - a.tree_offset()};
    const int ends_b[2] = {EB.u, EB.v};
    const double offs_b[2] = {b.tree_offset(), EB.len - b.tree_offset()};
    double best = std::numeric_limits<double>::infinity();
    int exit_a = EA.u, exit_b = EB.u;
    double off_a = offs_a[0], off_b = offs_b[0];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double cand = offs_a[i] + sp.tree_vertex_distance(ends_a[i], ends_b[j]) + offs_b[j];
            if (cand < best - 1e-15) {
                best = cand;
                exit_a = ends_a[i];
                off_a = offs_a[i];
                exit_b = ends_b[j];
                off_b = offs_b[j];
            }
        }
    if (target <= off_a) {
        // still on a's edge, moving toward exit_a
        const double off = exit_a == EA.u ? a.tree_offset() - target : a.tree_offset() + target;
        return make_tree_point(space, ea, off);
    }
    target -= off_a;
    const auto path = sp.tree_vertex_path(exit_a, exit_b);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        // edge joining path[i] and path[i+1]: the edge into path[i+1] on the walk from exit_a
        const int edge_idx = sp.tree_edge_between(exit_a, path[i + 1]);
        const auto& e = g.edges[edge_idx];
        if (target <= e.len + 1e-15) {
            const double off = e.u == path[i] ? std::min(target, e.len) : e.len - std::min(target, e.len);
            return make_tree_point(space, edge_idx, off);
        }
        target -= e.len;
    }
    // remainder lies on b's edge, approaching from exit_b
    const double off = exit_b == EB.u ? std::min(target, EB.len) : EB.len - std::min(target, EB.len);
    return make_tree_point(space, eb, off);
}

}  // namespace detail

/*
 * Point z = (1-t) a + t b on a geodesic [a, b]: d(a,z) = t d(a,b), and
 * d(z,b) = (1-t) d(a,b). Parameters outside [0,1] reach the geodesic line
 * through a and b where the space supports it (used by extend_geodesic).
 */
inline Point geodesic_point(const Point& a, const Point& b, double t) {
    detail::check_same_space(a, b, "geodesic_point");
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    const Space& sp = *a.space;
    switch (sp.kind()) {
        case SpaceKind::euclidean: {
            std::vector<double> z(a.c.size());
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = (1.0 - t) * a.c[i] + t * b.c[i];
            return Point{a.space, std::move(z)};
        }
        case SpaceKind::hyperbolic: {
            const double s = sp.curvature_scale();
            std::vector<double> ah = a.c, bh = b.c;
            for (double& v : ah) v *= s;
            for (double& v : bh) v *= s;
            const double theta = std::acosh(clamp_at_least(-detail::minkowski(ah, bh), 1.0));
            std::vector<double> z(3);
            if (theta < 1e-12) {
                for (int i = 0; i < 3; ++i) z[i] = (1.0 - t) * ah[i] + t * bh[i];
            } else {
                const double w0 = std::sinh((1.0 - t) * theta) / std::sinh(theta);
                const double w1 = std::sinh(t * theta) / std::sinh(theta);
                for (int i = 0; i < 3; ++i) z[i] = w0 * ah[i] + w1 * bh[i];
            }
            detail::renormalize_hyperboloid(z);
            for (double& v : z) v /= s;
            return Point{a.space, std::move(z)};
        }
        case SpaceKind::spherical: {
            const double s = sp.curvature_scale();
            const double theta = std::acos(clamp_unit_interval(sp.kappa() * detail::dot(a.c, b.c)));
            const double pi = 3.14159265358979323846;
            if (theta > pi - 1e-9)
                throw usage_error("geodesic_point: antipodal spherical pair has no unique geodesic");
            std::vector<double> z(3);
            if (theta < 1e-12) {
                for (int i = 0; i < 3; ++i) z[i] = (1.0 - t) * a.c[i] + t * b.c[i];
            } else {
                const double w0 = std::sin((1.0 - t) * theta) / std::sin(theta);
                const double w1 = std::sin(t * theta) / std::sin(theta);
                for (int i = 0; i < 3; ++i) z[i] = w0 * a.c[i] + w1 * b.c[i];
            }
            // project back to the sphere of radius 1/sqrt(kappa)
            const double target = 1.0 / sp.kappa();
            const double q = detail::dot(z, z);
            if (q > 0.0) {
                const double f = std::sqrt(target / q);
                for (double& v : z) v *= f;
            }
            return Point{a.space, std::move(z)};
        }
        case SpaceKind::tree: {
            if (t < 0.0 || t > 1.0)
                throw usage_error("geodesic_point: tree geodesics cannot be extrapolated");
            return detail::tree_geodesic_point(a.space, a, b, t);
        }
    }
    throw usage_error("unknown space kind");
}

/*
 * Point x' beyond b on the geodesic through a and b with d(b,x') = s and
 * d(a,x') = d(a,b) + s. Requires the geodesic extension property.
 */
inline Point extend_geodesic(const Point& a, const Point& b, double s) {
    detail::check_same_space(a, b, "extend_geodesic");
    if (s < 0.0) throw usage_error("extend_geodesic: extension length must be >= 0");
    if (s == 0.0) return b;
    if (!a.space->flags().geodesic_extension)
        throw usage_error("extend_geodesic: space lacks the geodesic extension property");
    const double d = distance(a, b);
    if (d <= 0.0) throw usage_error("extend_geodesic: endpoints coincide");
    return geodesic_point(a, b, (d + s) / d);
}

// Minkowski-orthonormal tangent frame at a hyperbolic point (unit model).
inline void hyperbolic_tangent_frame(const std::vector<double>& unit_center,
                                     std::vector<double>& e1, std::vector<double>& e2) {
    const std::vector<double> trial1 = {1.0, 0.0, 0.0};
    const std::vector<double> trial2 = {0.0, 1.0, 0.0};
    auto project = [&](const std::vector<double>& v) {
        // v + <v,c>_M c is Minkowski-orthogonal to c when <c,c>_M = -1
        const double m = detail::minkowski(v, unit_center);
        std::vector<double> out(3);
        for (int i = 0; i < 3; ++i) out[i] = v[i] + m * unit_center[i];
        const double norm = std::sqrt(std::max(detail::minkowski(out, out), 1e-300));
        for (double& x : out) x /= norm;
        return out;
    };
    e1 = project(trial1);
    // Gram-Schmidt the second direction against e1
    std::vector<double> t2 = trial2;
    const double m12 = detail::minkowski(t2, e1);
    for (int i = 0; i < 3; ++i) t2[i] -= m12 * e1[i];
    const double mc = detail::minkowski(t2, unit_center);
    for (int i = 0; i < 3; ++i) t2[i] += mc * unit_center[i];
    const double norm = std::sqrt(std::max(detail::minkowski(t2, t2), 1e-300));
    for (double& x : t2) x /= norm;
    e2 = t2;
}

// Exponential map: walk distance rho from `center` in tangent direction theta.
inline Point hyperbolic_exp(const Point& center, double rho, double theta) {
    const Space& sp = *center.space;
    const double s = sp.curvature_scale();
    std::vector<double> c = center.c;
    for (double& v : c) v *= s;
    std::vector<double> e1, e2;
    hyperbolic_tangent_frame(c, e1, e2);
    const double arc = s * rho;
    std::vector<double> z(3);
    const double ce = std::cos(theta), se = std::sin(theta);
    for (int i = 0; i < 3; ++i)
        z[i] = std::cosh(arc) * c[i] + std::sinh(arc) * (ce * e1[i] + se * e2[i]);
    detail::renormalize_hyperboloid(z);
    for (double& v : z) v /= s;
    return Point{center.space, std::move(z)};
}

inline Point euclidean_offset(const Point& center, const std::vector<double>& delta) {
    std::vector<double> z = center.c;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += delta[i];
    return Point{center.space, std::move(z)};
}

/*
 * Uniform sample from the closed geodesic ball B(center, radius) with respect
 * to the space's area/volume element (hyperbolic polar density sinh, euclidean
 * r^{n-1}).
 */
inline Point sample_ball(const Point& center, double radius, Rng& rng) {
    const Space& sp = *center.space;
    switch (sp.kind()) {
        case SpaceKind::euclidean: {
            const int n = sp.dim();
            std::vector<double> dir(n);
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (double& v : dir) {
                    v = rng.normal();
                    norm2 += v * v;
                }
            } while (norm2 <= 1e-300);
            const double norm = std::sqrt(norm2);
            const double rho = radius * std::pow(rng.uniform01(), 1.0 / n);
            for (double& v : dir) v *= rho / norm;
            return euclidean_offset(center, dir);
        }
        case SpaceKind::hyperbolic: {
            const double s = sp.curvature_scale();
            const double u = rng.uniform01();
            const double rho = acosh1p(u * (std::cosh(s * radius) - 1.0)) / s;
            const double theta = rng.uniform(0.0, 6.283185307179586476925286766559);
            return hyperbolic_exp(center, rho, theta);
        }
        default:
            throw usage_error("sample_ball: supported for euclidean and hyperbolic spaces");
    }
}

}  // namespace geoprox
