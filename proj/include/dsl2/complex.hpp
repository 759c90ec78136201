#pragma once

#include "dsl2/error.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace dsl2 {

enum class Color { black, white };

/// Reference to side `side` of triangle `tri`, the oriented segment from local
/// vertex `side` to local vertex `side + 1 (mod 3)`.
struct HalfEdge {
    int tri = -1;
    int side = -1;

    [[nodiscard]] bool valid() const noexcept { return tri >= 0; }
    friend bool operator==(const HalfEdge&, const HalfEdge&) = default;
};

struct Edge {
    int a = -1; ///< smaller vertex index
    int b = -1; ///< larger vertex index
    std::array<HalfEdge, 2> halves{}; ///< second entry invalid on boundary edges

    [[nodiscard]] bool interior() const noexcept { return halves[1].valid(); }
};

/// Closed or open strip of triangles glued along edges.
///
/// `faces[i]` is the edge shared by `triangles[i]` and `triangles[i + 1]`; for
/// a closed path the last face joins the last triangle back to the first, so
/// `faces.size() == triangles.size()`.
struct ThickPath {
    std::vector<int> triangles;
    std::vector<int> faces;
    bool closed = false;

    [[nodiscard]] std::size_t size() const noexcept { return triangles.size(); }
};

/// Vertex path P_0..P_m with framing triangles T_1..T_m.
struct FramedPath {
    std::vector<int> vertices;
    std::vector<int> triangles;

    [[nodiscard]] bool closed() const noexcept {
        return !vertices.empty() && vertices.front() == vertices.back();
    }
};

/// Oriented triangulated surface (possibly with boundary).
///
/// Triangles are cyclically ordered vertex triples; each triangle side is glued
/// to at most one side of another triangle running in the opposite direction.
/// Edges are identified by gluing, not by vertex pairs, so very small periodic
/// lattices (where two distinct edges join the same vertex pair) are
/// representable. Immutable after construction.
class Complex2D {
public:
    using Triangle = std::array<int, 3>;

    /// Builds from a triangle list, gluing sides that join the same vertex pair.
    static Complex2D from_triangles(int vertex_count, std::vector<Triangle> triangles,
                                    std::optional<std::vector<Color>> coloring = std::nullopt);

    /// Builds from a triangle list with explicit gluing: `twins[t][s]` is the
    /// half-edge glued to side s of triangle t, or invalid for boundary sides.
    static Complex2D from_glued(int vertex_count, std::vector<Triangle> triangles,
                                const std::vector<std::array<HalfEdge, 3>>& twins,
                                std::optional<std::vector<Color>> coloring = std::nullopt);

    [[nodiscard]] int vertex_count() const noexcept { return vertex_count_; }
    [[nodiscard]] int triangle_count() const noexcept { return static_cast<int>(triangles_.size()); }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_.size()); }

    [[nodiscard]] const Triangle& triangle(int t) const { return triangles_.at(static_cast<std::size_t>(t)); }
    [[nodiscard]] const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    [[nodiscard]] const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }

    [[nodiscard]] int vertex_at(int t, int local) const { return triangle(t)[static_cast<std::size_t>(local % 3)]; }
    [[nodiscard]] int edge_of(int t, int side) const {
        return edge_ids_.at(static_cast<std::size_t>(t))[static_cast<std::size_t>(side)];
    }
    [[nodiscard]] HalfEdge twin(int t, int side) const {
        return twins_.at(static_cast<std::size_t>(t))[static_cast<std::size_t>(side)];
    }

    /// Local index (0..2) of vertex p in triangle t, or -1.
    [[nodiscard]] int local_index(int t, int p) const {
        const auto& tri = triangle(t);
        for (int i = 0; i < 3; ++i) {
            if (tri[static_cast<std::size_t>(i)] == p) {
                return i;
            }
        }
        return -1;
    }

    /// Side of triangle t carrying edge e, or -1.
    [[nodiscard]] int side_of_edge(int t, int e) const {
        for (int s = 0; s < 3; ++s) {
            if (edge_of(t, s) == e) {
                return s;
            }
        }
        return -1;
    }

    /// Corners (triangle, local index) at vertex p.
    [[nodiscard]] const std::vector<std::pair<int, int>>& corners(int p) const {
        return corners_.at(static_cast<std::size_t>(p));
    }

    [[nodiscard]] bool is_boundary_vertex(int p) const {
        return boundary_vertex_.at(static_cast<std::size_t>(p));
    }
    [[nodiscard]] bool is_closed() const noexcept;
    [[nodiscard]] bool is_connected() const;
    [[nodiscard]] int euler_characteristic() const noexcept {
        return vertex_count() - edge_count() + triangle_count();
    }

    [[nodiscard]] const std::optional<std::vector<Color>>& coloring() const noexcept { return coloring_; }

private:
    Complex2D() = default;
    void finish(std::optional<std::vector<Color>> coloring);

    int vertex_count_ = 0;
    std::vector<Triangle> triangles_;
    std::vector<std::array<HalfEdge, 3>> twins_;
    std::vector<std::array<int, 3>> edge_ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, int>>> corners_;
    std::vector<bool> boundary_vertex_;
    std::optional<std::vector<Color>> coloring_;
};

// ---------------------------------------------------------------------------
// Construction

inline Complex2D Complex2D::from_triangles(int vertex_count, std::vector<Triangle> triangles,
                                           std::optional<std::vector<Color>> coloring) {
    std::map<std::pair<int, int>, std::vector<HalfEdge>> by_pair;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        for (int s = 0; s < 3; ++s) {
            const int p = triangles[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
            const int q = triangles[static_cast<std::size_t>(t)][static_cast<std::size_t>((s + 1) % 3)];
            by_pair[{std::min(p, q), std::max(p, q)}].push_back({t, s});
        }
    }
    std::vector<std::array<HalfEdge, 3>> twins(triangles.size());
    for (const auto& [pair, halves] : by_pair) {
        if (halves.size() > 2) {
            throw Error(ErrorCode::NonManifold, "edge (" + std::to_string(pair.first) + "," +
                                                    std::to_string(pair.second) + ") lies in " +
                                                    std::to_string(halves.size()) + " triangles");
        }
        if (halves.size() == 2) {
            twins[static_cast<std::size_t>(halves[0].tri)][static_cast<std::size_t>(halves[0].side)] = halves[1];
            twins[static_cast<std::size_t>(halves[1].tri)][static_cast<std::size_t>(halves[1].side)] = halves[0];
        }
    }
    return from_glued(vertex_count, std::move(triangles), twins, std::move(coloring));
}

inline Complex2D Complex2D::from_glued(int vertex_count, std::vector<Triangle> triangles,
                                       const std::vector<std::array<HalfEdge, 3>>& twins,
                                       std::optional<std::vector<Color>> coloring) {
    if (vertex_count < 0 || twins.size() != triangles.size()) {
        throw Error(ErrorCode::InvalidInput, "malformed complex description");
    }
    Complex2D c;
    c.vertex_count_ = vertex_count;
    c.triangles_ = std::move(triangles);
    c.twins_ = twins;
    const int nt = c.triangle_count();
    for (int t = 0; t < nt; ++t) {
        const auto& tri = c.triangles_[static_cast<std::size_t>(t)];
        for (int v : tri) {
            if (v < 0 || v >= vertex_count) {
                throw Error(ErrorCode::InvalidInput, "triangle " + std::to_string(t) + " has vertex out of range");
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            throw Error(ErrorCode::InvalidInput, "triangle " + std::to_string(t) + " repeats a vertex");
        }
    }
    for (int t = 0; t < nt; ++t) {
        for (int s = 0; s < 3; ++s) {
            const HalfEdge tw = c.twins_[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
            if (!tw.valid()) {
                continue;
            }
            if (tw.tri < 0 || tw.tri >= nt || tw.side < 0 || tw.side > 2 || tw.tri == t) {
                throw Error(ErrorCode::NonManifold, "invalid gluing at triangle " + std::to_string(t));
            }
            const HalfEdge back = c.twins_[static_cast<std::size_t>(tw.tri)][static_cast<std::size_t>(tw.side)];
            if (back != HalfEdge{t, s}) {
                throw Error(ErrorCode::NonManifold, "asymmetric gluing at triangle " + std::to_string(t));
            }
            const int p = c.vertex_at(t, s);
            const int q = c.vertex_at(t, s + 1);
            const int p2 = c.vertex_at(tw.tri, tw.side);
            const int q2 = c.vertex_at(tw.tri, tw.side + 1);
            if (p2 == q && q2 == p) {
                continue;
            }
            if (p2 == p && q2 == q) {
                throw Error(ErrorCode::IncoherentOrientation,
                            "edge (" + std::to_string(p) + "," + std::to_string(q) +
                                ") traversed in the same direction by triangles " + std::to_string(t) +
                                " and " + std::to_string(tw.tri));
            }
            throw Error(ErrorCode::NonManifold, "glued sides join different vertices");
        }
    }

    // Edge ids ordered by (min vertex, max vertex, first half-edge).
    struct Pending {
        int a, b;
        HalfEdge first, second;
    };
    std::vector<Pending> pending;
    for (int t = 0; t < nt; ++t) {
        for (int s = 0; s < 3; ++s) {
            const HalfEdge tw = c.twins_[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
            if (tw.valid() && (tw.tri < t || (tw.tri == t && tw.side < s))) {
                continue;
            }
            const int p = c.vertex_at(t, s);
            const int q = c.vertex_at(t, s + 1);
            pending.push_back({std::min(p, q), std::max(p, q), HalfEdge{t, s}, tw});
        }
    }
    std::sort(pending.begin(), pending.end(), [](const Pending& x, const Pending& y) {
        if (x.a != y.a) return x.a < y.a;
        if (x.b != y.b) return x.b < y.b;
        if (x.first.tri != y.first.tri) return x.first.tri < y.first.tri;
        return x.first.side < y.first.side;
    });
    c.edge_ids_.assign(static_cast<std::size_t>(nt), {-1, -1, -1});
    for (const auto& pe : pending) {
        const int id = static_cast<int>(c.edges_.size());
        c.edges_.push_back(Edge{pe.a, pe.b, {pe.first, pe.second}});
        c.edge_ids_[static_cast<std::size_t>(pe.first.tri)][static_cast<std::size_t>(pe.first.side)] = id;
        if (pe.second.valid()) {
            c.edge_ids_[static_cast<std::size_t>(pe.second.tri)][static_cast<std::size_t>(pe.second.side)] = id;
        }
    }
    c.finish(std::move(coloring));
    return c;
}

inline void Complex2D::finish(std::optional<std::vector<Color>> coloring) {
    corners_.assign(static_cast<std::size_t>(vertex_count_), {});
    for (int t = 0; t < triangle_count(); ++t) {
        for (int i = 0; i < 3; ++i) {
            corners_[static_cast<std::size_t>(vertex_at(t, i))].emplace_back(t, i);
        }
    }
    boundary_vertex_.assign(static_cast<std::size_t>(vertex_count_), false);
    for (const auto& e : edges_) {
        if (!e.interior()) {
            boundary_vertex_[static_cast<std::size_t>(e.a)] = true;
            boundary_vertex_[static_cast<std::size_t>(e.b)] = true;
        }
    }
    // Each vertex star must be one fan: walking from one corner reaches all.
    for (int p = 0; p < vertex_count_; ++p) {
        const auto& cs = corners_[static_cast<std::size_t>(p)];
        if (cs.empty()) {
            continue;
        }
        std::pair<int, int> start = cs.front();
        if (boundary_vertex_[static_cast<std::size_t>(p)]) {
            // Rewind to the corner whose incoming side is on the boundary.
            for (const auto& [t, i] : cs) {
                if (!twin(t, (i + 2) % 3).valid()) {
                    start = {t, i};
                    break;
                }
            }
        }
        std::size_t visited = 0;
        auto cur = start;
        while (true) {
            ++visited;
            const HalfEdge tw = twin(cur.first, cur.second);
            if (!tw.valid() || visited > cs.size()) {
                break;
            }
            cur = {tw.tri, (tw.side + 1) % 3};
            if (cur == start) {
                break;
            }
        }
        if (visited != cs.size()) {
            throw Error(ErrorCode::NonManifold, "star of vertex " + std::to_string(p) + " is not a single fan");
        }
    }
    if (coloring && coloring->size() != triangles_.size()) {
        throw Error(ErrorCode::InvalidInput, "coloring size does not match triangle count");
    }
    coloring_ = std::move(coloring);
}

inline bool Complex2D::is_closed() const noexcept {
    return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.interior(); });
}

inline bool Complex2D::is_connected() const {
    if (triangle_count() == 0) {
        return true;
    }
    std::vector<bool> seen(static_cast<std::size_t>(triangle_count()), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
        const int t = q.front();
        q.pop();
        for (int s = 0; s < 3; ++s) {
            const HalfEdge tw = twin(t, s);
            if (tw.valid() && !seen[static_cast<std::size_t>(tw.tri)]) {
                seen[static_cast<std::size_t>(tw.tri)] = true;
                ++count;
                q.push(tw.tri);
            }
        }
    }
    for (int p = 0; p < vertex_count_; ++p) {
        if (corners(p).empty()) {
            return false;
        }
    }
    return count == triangle_count();
}

// ---------------------------------------------------------------------------
// Paths

/// Throws InvalidPath unless `path` is a valid thick path in `c`.
inline void validate(const Complex2D& c, const ThickPath& path) {
    const std::size_t m = path.triangles.size();
    const std::size_t expected_faces = path.closed ? m : (m == 0 ? 0 : m - 1);
    if (path.faces.size() != expected_faces || (path.closed && m < 2)) {
        throw Error(ErrorCode::InvalidPath, "thick path has inconsistent face count");
    }
    for (int t : path.triangles) {
        if (t < 0 || t >= c.triangle_count()) {
            throw Error(ErrorCode::InvalidPath, "thick path triangle out of range");
        }
    }
    for (std::size_t i = 0; i < path.faces.size(); ++i) {
        const int e = path.faces[i];
        if (e < 0 || e >= c.edge_count()) {
            throw Error(ErrorCode::InvalidPath, "thick path face out of range");
        }
        const int t0 = path.triangles[i];
        const int t1 = path.triangles[(i + 1) % m];
        const auto& edge = c.edge(e);
        const bool glued = edge.interior() &&
                           ((edge.halves[0].tri == t0 && edge.halves[1].tri == t1) ||
                            (edge.halves[0].tri == t1 && edge.halves[1].tri == t0));
        if (!glued) {
            throw Error(ErrorCode::InvalidPath, "face " + std::to_string(i) + " is not shared by consecutive triangles");
        }
    }
    const std::size_t nf = path.faces.size();
    const std::size_t pairs = path.closed ? nf : (nf == 0 ? 0 : nf - 1);
    for (std::size_t i = 0; i < pairs; ++i) {
        if (path.faces[i] == path.faces[(i + 1) % nf]) {
            throw Error(ErrorCode::InvalidPath, "consecutive faces coincide at step " + std::to_string(i));
        }
    }
}

/// Throws InvalidPath unless every P_{i-1}P_i is an edge of T_i.
inline void validate(const Complex2D& c, const FramedPath& path) {
    if (path.vertices.empty() ? !path.triangles.empty() : path.triangles.size() + 1 != path.vertices.size()) {
        throw Error(ErrorCode::InvalidPath, "framed path needs one triangle per step");
    }
    for (std::size_t i = 0; i < path.triangles.size(); ++i) {
        const int t = path.triangles[i];
        if (t < 0 || t >= c.triangle_count()) {
            throw Error(ErrorCode::InvalidPath, "framed path triangle out of range");
        }
        const int p = path.vertices[i];
        const int q = path.vertices[i + 1];
        if (p == q || c.local_index(t, p) < 0 || c.local_index(t, q) < 0) {
            throw Error(ErrorCode::InvalidPath, "step " + std::to_string(i) + " is not an edge of its framing triangle");
        }
    }
}

/// Cyclic thick path of the triangles around interior vertex p, in the
/// orientation of the surface, starting at the smallest incident triangle.
inline ThickPath vertex_star(const Complex2D& c, int p) {
    if (p < 0 || p >= c.vertex_count()) {
        throw Error(ErrorCode::InvalidInput, "vertex out of range");
    }
    if (c.is_boundary_vertex(p) || c.corners(p).empty()) {
        throw Error(ErrorCode::BoundaryVertex, "vertex " + std::to_string(p) + " is not interior");
    }
    auto start = *std::min_element(c.corners(p).begin(), c.corners(p).end());
    ThickPath path;
    path.closed = true;
    auto cur = start;
    do {
        path.triangles.push_back(cur.first);
        path.faces.push_back(c.edge_of(cur.first, cur.second));
        const HalfEdge tw = c.twin(cur.first, cur.second);
        cur = {tw.tri, (tw.side + 1) % 3};
    } while (cur != start);
    return path;
}

/// Two-coloring of the dual graph (adjacent triangles differ), if one exists.
/// Breadth-first from triangle 0, which is black.
inline std::optional<std::vector<Color>> bipartite_coloring(const Complex2D& c) {
    const int nt = c.triangle_count();
    std::vector<int> side(static_cast<std::size_t>(nt), -1);
    for (int root = 0; root < nt; ++root) {
        if (side[static_cast<std::size_t>(root)] >= 0) {
            continue;
        }
        side[static_cast<std::size_t>(root)] = 0;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int t = q.front();
            q.pop();
            for (int s = 0; s < 3; ++s) {
                const HalfEdge tw = c.twin(t, s);
                if (!tw.valid()) {
                    continue;
                }
                auto& other = side[static_cast<std::size_t>(tw.tri)];
                if (other < 0) {
                    other = 1 - side[static_cast<std::size_t>(t)];
                    q.push(tw.tri);
                } else if (other == side[static_cast<std::size_t>(t)]) {
                    return std::nullopt;
                }
            }
        }
    }
    std::vector<Color> out;
    out.reserve(static_cast<std::size_t>(nt));
    for (int s : side) {
        out.push_back(s == 0 ? Color::black : Color::white);
    }
    return out;
}

/// Tree-cotree split used by the homology loops and by connection
/// reconstruction: a primal spanning tree of edges, a dual spanning tree of
/// triangles avoiding it, and the leftover edges (2g of them on a closed
/// orientable surface of genus g).
struct TreeCotree {
    std::vector<bool> primal_tree;  ///< per edge
    std::vector<bool> dual_tree;    ///< per edge
    std::vector<int> dual_parent;   ///< per triangle, -1 at root
    std::vector<int> dual_parent_edge;
    std::vector<int> dual_depth;
    std::vector<int> dual_order;    ///< triangles in BFS order
    std::vector<int> leftover;      ///< ascending edge ids
};

inline TreeCotree tree_cotree(const Complex2D& c) {
    const int ne = c.edge_count();
    const int nv = c.vertex_count();
    const int nt = c.triangle_count();
    TreeCotree out;
    out.primal_tree.assign(static_cast<std::size_t>(ne), false);
    out.dual_tree.assign(static_cast<std::size_t>(ne), false);

    std::vector<std::vector<std::pair<int, int>>> incident(static_cast<std::size_t>(nv));
    for (int e = 0; e < ne; ++e) {
        incident[static_cast<std::size_t>(c.edge(e).a)].emplace_back(e, c.edge(e).b);
        incident[static_cast<std::size_t>(c.edge(e).b)].emplace_back(e, c.edge(e).a);
    }
    std::vector<bool> seen(static_cast<std::size_t>(nv), false);
    for (int root = 0; root < nv; ++root) {
        if (seen[static_cast<std::size_t>(root)]) {
            continue;
        }
        seen[static_cast<std::size_t>(root)] = true;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int p = q.front();
            q.pop();
            for (const auto& [e, other] : incident[static_cast<std::size_t>(p)]) {
                if (!seen[static_cast<std::size_t>(other)]) {
                    seen[static_cast<std::size_t>(other)] = true;
                    out.primal_tree[static_cast<std::size_t>(e)] = true;
                    q.push(other);
                }
            }
        }
    }

    out.dual_parent.assign(static_cast<std::size_t>(nt), -1);
    out.dual_parent_edge.assign(static_cast<std::size_t>(nt), -1);
    out.dual_depth.assign(static_cast<std::size_t>(nt), -1);
    for (int root = 0; root < nt; ++root) {
        if (out.dual_depth[static_cast<std::size_t>(root)] >= 0) {
            continue;
        }
        out.dual_depth[static_cast<std::size_t>(root)] = 0;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int t = q.front();
            q.pop();
            out.dual_order.push_back(t);
            for (int s = 0; s < 3; ++s) {
                const int e = c.edge_of(t, s);
                const HalfEdge tw = c.twin(t, s);
                if (!tw.valid() || out.primal_tree[static_cast<std::size_t>(e)]) {
                    continue;
                }
                if (out.dual_depth[static_cast<std::size_t>(tw.tri)] < 0) {
                    out.dual_depth[static_cast<std::size_t>(tw.tri)] = out.dual_depth[static_cast<std::size_t>(t)] + 1;
                    out.dual_parent[static_cast<std::size_t>(tw.tri)] = t;
                    out.dual_parent_edge[static_cast<std::size_t>(tw.tri)] = e;
                    out.dual_tree[static_cast<std::size_t>(e)] = true;
                    q.push(tw.tri);
                }
            }
        }
    }
    for (int e = 0; e < ne; ++e) {
        if (!out.primal_tree[static_cast<std::size_t>(e)] && !out.dual_tree[static_cast<std::size_t>(e)] &&
            c.edge(e).interior()) {
            out.leftover.push_back(e);
        }
    }
    return out;
}

/// Closed thick paths generating H_1 of a closed connected surface: one loop
/// per leftover edge of the tree-cotree split, running through the dual tree
/// and back across that edge.
inline std::vector<ThickPath> homology_generator_loops(const Complex2D& c) {
    if (!c.is_closed()) {
        throw Error(ErrorCode::NotClosed, "homology loops need a closed surface");
    }
    if (!c.is_connected()) {
        throw Error(ErrorCode::Disconnected, "homology loops need a connected surface");
    }
    const TreeCotree tc = tree_cotree(c);
    std::vector<ThickPath> loops;
    for (int e : tc.leftover) {
        const int a = c.edge(e).halves[0].tri;
        const int b = c.edge(e).halves[1].tri;
        std::vector<int> up_a{a};
        std::vector<int> up_b{b};
        std::vector<int> faces_a;
        std::vector<int> faces_b;
        int x = a;
        int y = b;
        while (x != y) {
            if (tc.dual_depth[static_cast<std::size_t>(x)] >= tc.dual_depth[static_cast<std::size_t>(y)]) {
                faces_a.push_back(tc.dual_parent_edge[static_cast<std::size_t>(x)]);
                x = tc.dual_parent[static_cast<std::size_t>(x)];
                up_a.push_back(x);
            } else {
                faces_b.push_back(tc.dual_parent_edge[static_cast<std::size_t>(y)]);
                y = tc.dual_parent[static_cast<std::size_t>(y)];
                up_b.push_back(y);
            }
        }
        ThickPath loop;
        loop.closed = true;
        loop.triangles = up_a;                 // a .. lca
        loop.faces = faces_a;
        for (std::size_t i = up_b.size() - 1; i-- > 0;) {
            loop.faces.push_back(faces_b[i]);
            loop.triangles.push_back(up_b[i]); // .. b
        }
        loop.faces.push_back(e);               // b back to a
        loops.push_back(std::move(loop));
    }
    return loops;
}

/// Closed framed path along the left side of a closed thick path; its framed
/// holonomy is the abelian invariant attached to the loop.
inline FramedPath left_boundary(const Complex2D& c, const ThickPath& loop) {
    validate(c, loop);
    if (!loop.closed) {
        throw Error(ErrorCode::InvalidPath, "left boundary needs a closed thick path");
    }
    const std::size_t m = loop.triangles.size();
    FramedPath out;
    // Entry side of T_1 is the last face; in T_1's orientation it runs left -> right.
    const int t0 = loop.triangles[0];
    int left = c.vertex_at(t0, c.side_of_edge(t0, loop.faces[m - 1]));
    out.vertices.push_back(left);
    for (std::size_t i = 0; i < m; ++i) {
        const int t = loop.triangles[i];
        const int entry = c.side_of_edge(t, loop.faces[(i + m - 1) % m]);
        const int exit = c.side_of_edge(t, loop.faces[i]);
        // Sides x->y (entry), y->s, s->x. Leaving through s->x keeps x on the left.
        const int s_vertex = c.vertex_at(t, entry + 2);
        if (exit == (entry + 1) % 3) {
            out.vertices.push_back(s_vertex);
            out.triangles.push_back(t);
            left = s_vertex;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generators

inline Complex2D octahedron() {
    std::vector<Complex2D::Triangle> tris{{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                          {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    auto c = Complex2D::from_triangles(6, tris);
    return Complex2D::from_triangles(6, std::move(tris), bipartite_coloring(c));
}

inline Complex2D icosahedron() {
    std::vector<Complex2D::Triangle> tris{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                          {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                          {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                          {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return Complex2D::from_triangles(12, std::move(tris));
}

/// Periodic M x N equilateral lattice. Vertex (m, n) has index m * N + n; cell
/// (m, n) holds the black triangle 2(mN + n) = ((m,n), (m+1,n), (m,n+1)) and
/// the white triangle 2(mN + n) + 1 = ((m+1,n), (m+1,n+1), (m,n+1)).
inline Complex2D torus_grid(int rows, int cols) {
    if (rows < 2 || cols < 2) {
        throw Error(ErrorCode::InvalidInput, "torus grid needs at least 2 x 2 cells");
    }
    auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
    auto vid = [&](int m, int n) { return wrap(m, rows) * cols + wrap(n, cols); };
    auto up = [&](int m, int n) { return 2 * vid(m, n); };
    auto down = [&](int m, int n) { return 2 * vid(m, n) + 1; };
    const int nt = 2 * rows * cols;
    std::vector<Complex2D::Triangle> tris(static_cast<std::size_t>(nt));
    std::vector<std::array<HalfEdge, 3>> twins(static_cast<std::size_t>(nt));
    std::vector<Color> colors(static_cast<std::size_t>(nt));
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) {
            const auto u = static_cast<std::size_t>(up(m, n));
            const auto d = static_cast<std::size_t>(down(m, n));
            tris[u] = {vid(m, n), vid(m + 1, n), vid(m, n + 1)};
            tris[d] = {vid(m + 1, n), vid(m + 1, n + 1), vid(m, n + 1)};
            twins[u] = {HalfEdge{down(m, n - 1), 1}, HalfEdge{down(m, n), 2}, HalfEdge{down(m - 1, n), 0}};
            twins[d] = {HalfEdge{up(m + 1, n), 2}, HalfEdge{up(m, n + 1), 0}, HalfEdge{up(m, n), 1}};
            colors[u] = Color::black;
            colors[d] = Color::white;
        }
    }
    return Complex2D::from_glued(rows * cols, std::move(tris), twins, std::move(colors));
}

/// Non-periodic patch of the equilateral lattice: M x N cells on
/// (M + 1) x (N + 1) vertices, same triangle layout as `torus_grid`.
inline Complex2D disk_patch(int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw Error(ErrorCode::InvalidInput, "disk patch needs at least one cell");
    }
    auto vid = [&](int m, int n) { return m * (cols + 1) + n; };
    std::vector<Complex2D::Triangle> tris;
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) {
            tris.push_back({vid(m, n), vid(m + 1, n), vid(m, n + 1)});
            tris.push_back({vid(m + 1, n), vid(m + 1, n + 1), vid(m, n + 1)});
        }
    }
    auto c = Complex2D::from_triangles((rows + 1) * (cols + 1), tris);
    return Complex2D::from_triangles((rows + 1) * (cols + 1), std::move(tris), bipartite_coloring(c));
}

/// Genus-2 surface: two 3 x 3 lattice tori, each with one triangle removed,
/// joined by a triangulated tube (the second torus reflected so orientations
/// agree). 18 vertices, 40 triangles, 60 edges.
inline Complex2D genus_two() {
    auto torus_tris = [](int offset, bool reflect) {
        std::vector<Complex2D::Triangle> out;
        auto vid = [&](int m, int n) { return offset + ((m + 3) % 3) * 3 + (n + 3) % 3; };
        for (int m = 0; m < 3; ++m) {
            for (int n = 0; n < 3; ++n) {
                if (m != 0 || n != 0) {
                    out.push_back({vid(m, n), vid(m + 1, n), vid(m, n + 1)});
                }
                out.push_back({vid(m + 1, n), vid(m + 1, n + 1), vid(m, n + 1)});
            }
        }
        if (reflect) {
            for (auto& t : out) {
                std::swap(t[1], t[2]);
            }
        }
        return out;
    };
    std::vector<Complex2D::Triangle> tris = torus_tris(0, false);
    const auto second = torus_tris(9, true);
    tris.insert(tris.end(), second.begin(), second.end());
    // Removed triangles: (0, 3, 1) on the first torus, (9, 12, 10) on the second.
    const std::array<int, 3> hole{0, 3, 1};
    const std::array<int, 3> hole2{9, 12, 10};
    for (int i = 0; i < 3; ++i) {
        const int a = hole[static_cast<std::size_t>(i)];
        const int b = hole[static_cast<std::size_t>((i + 1) % 3)];
        const int a2 = hole2[static_cast<std::size_t>(i)];
        const int b2 = hole2[static_cast<std::size_t>((i + 1) % 3)];
        tris.push_back({a, b, b2});
        tris.push_back({a, b2, a2});
    }
    return Complex2D::from_triangles(18, std::move(tris));
}

} // namespace dsl2
