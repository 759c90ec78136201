#pragma once

#include "dsl2/complex.hpp"
#include "dsl2/error.hpp"
#include "dsl2/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace dsl2 {

/// Discrete R+-valued GL2 connection: a positive coefficient u_{T:P} for every
/// triangle T and each of its three vertices (stored by local index).
class Connection {
public:
    Connection(std::shared_ptr<const Complex2D> complex, std::vector<std::array<double, 3>> coeffs)
        : complex_(std::move(complex)), coeffs_(std::move(coeffs)) {
        if (!complex_ || coeffs_.size() != static_cast<std::size_t>(complex_->triangle_count())) {
            throw Error(ErrorCode::InvalidInput, "connection needs one coefficient triple per triangle");
        }
        for (const auto& tri : coeffs_) {
            for (double u : tri) {
                if (!(u > 0.0) || !std::isfinite(u)) {
                    throw Error(ErrorCode::NonPositiveCoefficient, "connection coefficients must be positive");
                }
            }
        }
    }

    /// All coefficients equal to 1.
    static Connection canonical(std::shared_ptr<const Complex2D> complex) {
        const auto nt = static_cast<std::size_t>(complex->triangle_count());
        return {std::move(complex), std::vector<std::array<double, 3>>(nt, {1.0, 1.0, 1.0})};
    }

    /// Independent log-uniform coefficients in [lo, hi).
    static Connection random(std::shared_ptr<const Complex2D> complex, Rng& rng, double lo = 0.5, double hi = 2.0) {
        std::vector<std::array<double, 3>> coeffs(static_cast<std::size_t>(complex->triangle_count()));
        for (auto& tri : coeffs) {
            for (double& u : tri) {
                u = rng.positive(lo, hi);
            }
        }
        return {std::move(complex), std::move(coeffs)};
    }

    [[nodiscard]] const Complex2D& complex() const noexcept { return *complex_; }
    [[nodiscard]] const std::shared_ptr<const Complex2D>& complex_ptr() const noexcept { return complex_; }
    [[nodiscard]] const std::vector<std::array<double, 3>>& coeffs() const noexcept { return coeffs_; }

    [[nodiscard]] double u_local(int t, int local) const {
        return coeffs_.at(static_cast<std::size_t>(t))[static_cast<std::size_t>(local % 3)];
    }

    /// u_{T:P}; throws VertexNotInTriangle.
    [[nodiscard]] double u(int t, int p) const {
        const int i = complex_->local_index(t, p);
        if (i < 0) {
            throw Error(ErrorCode::VertexNotInTriangle,
                        "vertex " + std::to_string(p) + " not in triangle " + std::to_string(t));
        }
        return u_local(t, i);
    }

private:
    std::shared_ptr<const Complex2D> complex_;
    std::vector<std::array<double, 3>> coeffs_;
};

/// Abelian gauge data: g on triangles, h on vertices, all positive.
struct GaugePair {
    std::vector<double> g;
    std::vector<double> h;
};

/// Positive weight A(R) per edge id.
struct EdgeWeights {
    std::vector<double> values;
};

/// u'_{T:P} = g_T u_{T:P} / h_P.
inline Connection gauge_transform(const Connection& conn, const GaugePair& gp) {
    const auto& c = conn.complex();
    if (gp.g.size() != static_cast<std::size_t>(c.triangle_count()) ||
        gp.h.size() != static_cast<std::size_t>(c.vertex_count())) {
        throw Error(ErrorCode::InvalidInput, "gauge pair must cover all triangles and vertices");
    }
    auto coeffs = conn.coeffs();
    for (int t = 0; t < c.triangle_count(); ++t) {
        for (int i = 0; i < 3; ++i) {
            coeffs[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] *=
                gp.g[static_cast<std::size_t>(t)] / gp.h[static_cast<std::size_t>(c.vertex_at(t, i))];
        }
    }
    return {conn.complex_ptr(), std::move(coeffs)};
}

/// mu^T_{PP'} = u_{T:P} / u_{T:P'}.
inline double mu_ratio(const Connection& conn, int t, int p, int q) {
    if (p == q) {
        throw Error(ErrorCode::VertexNotInTriangle, "mu ratio needs two distinct vertices");
    }
    return conn.u(t, p) / conn.u(t, q);
}

/// rho^{TT'}_{PP'} = mu^T_{PP'} mu^{T'}_{P'P}, with T' glued to T along PP'.
inline double rho(const Connection& conn, int t, int p, int q) {
    const auto& c = conn.complex();
    const int i = c.local_index(t, p);
    const int j = c.local_index(t, q);
    if (i < 0 || j < 0 || i == j) {
        throw Error(ErrorCode::VertexNotInTriangle, "rho needs an edge of the triangle");
    }
    const int side = (j == (i + 1) % 3) ? i : j;
    const HalfEdge tw = c.twin(t, side);
    if (!tw.valid()) {
        throw Error(ErrorCode::BoundaryEdge, "edge of triangle " + std::to_string(t) + " is on the boundary");
    }
    return mu_ratio(conn, t, p, q) * mu_ratio(conn, tw.tri, q, p);
}

/// rho of edge e read from p to q, with T the triangle in which p -> q is a
/// positively oriented side.
inline double rho_edge(const Connection& conn, int e, int p, int q) {
    const auto& c = conn.complex();
    const auto& edge = c.edge(e);
    if (!edge.interior()) {
        throw Error(ErrorCode::BoundaryEdge, "edge " + std::to_string(e) + " is on the boundary");
    }
    if (!((edge.a == p && edge.b == q) || (edge.a == q && edge.b == p))) {
        throw Error(ErrorCode::VertexNotInTriangle, "vertices do not span the edge");
    }
    for (const HalfEdge& h : edge.halves) {
        if (c.vertex_at(h.tri, h.side) == p) {
            return rho(conn, h.tri, p, q);
        }
    }
    throw Error(ErrorCode::InvalidInput, "edge orientation not found");
}

/// rho(T): product of rho^{TT_q}_{R_q} over the three positively oriented sides.
inline double rho_triangle(const Connection& conn, int t) {
    const auto& c = conn.complex();
    double out = 1.0;
    for (int s = 0; s < 3; ++s) {
        out *= rho(conn, t, c.vertex_at(t, s), c.vertex_at(t, s + 1));
    }
    return out;
}

/// Abelian framed holonomy prod_i mu^{T_i}_{P_{i-1} P_i}, accumulated in log space.
inline double framed_holonomy(const Connection& conn, const FramedPath& path) {
    validate(conn.complex(), path);
    double log_sum = 0.0;
    for (std::size_t i = 0; i < path.triangles.size(); ++i) {
        const int t = path.triangles[i];
        log_sum += std::log(conn.u(t, path.vertices[i])) - std::log(conn.u(t, path.vertices[i + 1]));
    }
    return std::exp(log_sum);
}

/// 2 x 2 holonomy matrix stored as scale * exp(log_scale); row-major.
struct HolonomyMatrix {
    std::array<double, 4> scaled{1.0, 0.0, 0.0, 1.0};
    double log_scale = 0.0;

    [[nodiscard]] double at(int r, int col) const {
        return scaled[static_cast<std::size_t>(2 * r + col)] * std::exp(log_scale);
    }
    [[nodiscard]] double determinant() const {
        return (scaled[0] * scaled[3] - scaled[1] * scaled[2]) * std::exp(2.0 * log_scale);
    }
    /// Left-multiplies by `step`.
    void apply(const std::array<double, 4>& step) {
        const auto& a = scaled;
        scaled = {step[0] * a[0] + step[1] * a[2], step[0] * a[1] + step[1] * a[3],
                  step[2] * a[0] + step[3] * a[2], step[2] * a[1] + step[3] * a[3]};
    }
    void renormalize() {
        const double big = std::max({std::abs(scaled[0]), std::abs(scaled[1]), std::abs(scaled[2]), std::abs(scaled[3])});
        if (big > 0.0) {
            for (double& x : scaled) {
                x /= big;
            }
            log_scale += std::log(big);
        }
    }
    /// Same map written in the swapped basis.
    [[nodiscard]] HolonomyMatrix swapped() const {
        HolonomyMatrix out = *this;
        out.scaled = {scaled[3], scaled[2], scaled[1], scaled[0]};
        return out;
    }
};

namespace detail {

// Transport of (psi_a, psi_b), a < b the vertices of face `in`, across
// triangle t to the face `out` (ascending basis). Solves Q psi = 0 in t.
inline std::array<double, 4> transport_step(const Connection& conn, int t, int in, int out) {
    const auto& c = conn.complex();
    const auto& ein = c.edge(in);
    const auto& eout = c.edge(out);
    const int s = c.vertex_at(t, 3 - c.local_index(t, ein.a) - c.local_index(t, ein.b));
    const double ua = conn.u(t, ein.a);
    const double ub = conn.u(t, ein.b);
    const double us = conn.u(t, s);
    auto row = [&](int v) -> std::array<double, 2> {
        if (v == ein.a) return {1.0, 0.0};
        if (v == ein.b) return {0.0, 1.0};
        return {-ua / us, -ub / us};
    };
    const auto r0 = row(eout.a);
    const auto r1 = row(eout.b);
    return {r0[0], r0[1], r1[0], r1[1]};
}

} // namespace detail

/// Nonabelian holonomy of a thick path: the linear map from psi on the seed
/// edge (ascending vertex order) to psi on the final face, obtained by solving
/// Q psi = 0 triangle by triangle. For a closed path the seed is the face
/// joining the last triangle back to the first and the map returns to it. For
/// an open path T_1..T_m the map ends on the last shared face F_{m-1}.
inline HolonomyMatrix thick_holonomy(const Connection& conn, const ThickPath& path, int seed_edge) {
    const auto& c = conn.complex();
    validate(c, path);
    HolonomyMatrix k;
    if (path.triangles.empty()) {
        return k;
    }
    const int t1 = path.triangles.front();
    if (seed_edge < 0 || seed_edge >= c.edge_count() || c.side_of_edge(t1, seed_edge) < 0) {
        throw Error(ErrorCode::SeedNotInFirstTriangle, "seed edge is not a side of the first triangle");
    }
    if (path.closed && seed_edge != path.faces.back()) {
        throw Error(ErrorCode::InvalidPath, "closed path must be seeded at its closing face");
    }
    if (!path.faces.empty() && seed_edge == path.faces.front()) {
        throw Error(ErrorCode::InvalidPath, "seed edge coincides with the first face");
    }
    int in = seed_edge;
    const std::size_t steps = path.closed ? path.size() : path.faces.size();
    for (std::size_t i = 0; i < steps; ++i) {
        const int out = path.faces[i];
        k.apply(detail::transport_step(conn, path.triangles[i], in, out));
        if ((i + 1) % 16 == 0) {
            k.renormalize();
        }
        in = out;
    }
    k.renormalize();
    return k;
}

/// Holonomy of a closed thick path seeded at its closing face.
inline HolonomyMatrix loop_holonomy(const Connection& conn, const ThickPath& loop) {
    return thick_holonomy(conn, loop, loop.faces.back());
}

/// Nonabelian curvature at an interior vertex.
struct Curvature {
    int vertex = -1;
    int seed_edge = -1;
    HolonomyMatrix matrix;   ///< basis (psi_P, psi_Q) on the seed edge PQ
    double alpha = 0.0;      ///< lower-left entry after normalizing the upper-left to 1
    double mu_matrix = 1.0;  ///< |lower-right| / |upper-left|
    double mu_lemma = 1.0;   ///< product of rho around the star
    int sign = 1;            ///< sign of the determinant
};

inline Curvature vertex_curvature(const Connection& conn, int p) {
    const auto& c = conn.complex();
    const ThickPath star = vertex_star(c, p);
    Curvature out;
    out.vertex = p;
    out.seed_edge = star.faces.back();
    HolonomyMatrix k = thick_holonomy(conn, star, out.seed_edge);
    if (c.edge(out.seed_edge).a != p) {
        k = k.swapped();
    }
    out.matrix = k;
    const double k00 = k.at(0, 0);
    out.alpha = k.at(1, 0) / k00;
    out.mu_matrix = std::abs(k.scaled[3] / k.scaled[0]);
    out.sign = k.determinant() >= 0.0 ? 1 : -1;

    const std::size_t m = star.size();
    double log_mu = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& e = c.edge(star.faces[i]);
        const int q = e.a == p ? e.b : e.a;
        const int before = star.triangles[i];
        const int after = star.triangles[(i + 1) % m];
        log_mu += std::log(mu_ratio(conn, before, p, q)) + std::log(mu_ratio(conn, after, q, p));
    }
    out.mu_lemma = std::exp(log_mu);
    return out;
}

enum class Sl2Verdict { gl2, sl2_pm, sl2 };

inline const char* to_string(Sl2Verdict v) {
    switch (v) {
    case Sl2Verdict::gl2: return "GL2";
    case Sl2Verdict::sl2_pm: return "SL2pm";
    case Sl2Verdict::sl2: return "SL2";
    }
    return "?";
}

struct Sl2Report {
    struct VertexEntry {
        int vertex;
        double mu_lemma;
        double mu_matrix;
        int sign;
        bool ok;
    };
    struct LoopEntry {
        int loop;
        std::size_t length;
        double determinant;
        bool ok;
    };
    std::vector<VertexEntry> vertices;
    std::vector<LoopEntry> loops;
    bool local = true;
    bool global = true;
    bool colorable = false;
    bool all_positive = true;
    double max_mu_deviation = 0.0;
    double max_det_deviation = 0.0;
    Sl2Verdict verdict = Sl2Verdict::gl2;

    [[nodiscard]] bool sl2_pm() const noexcept { return local && global; }
};

/// Local check (mu_P = 1 at interior vertices via the rho product), global
/// check (|det| = 1 on homology generator loops) and sign refinement.
/// Generator loops are only taken on closed surfaces.
inline Sl2Report is_sl2(const Connection& conn, double tol = 1e-10) {
    const auto& c = conn.complex();
    Sl2Report r;
    for (int p = 0; p < c.vertex_count(); ++p) {
        if (c.is_boundary_vertex(p) || c.corners(p).empty()) {
            continue;
        }
        const Curvature k = vertex_curvature(conn, p);
        const double dev = std::abs(k.mu_lemma - 1.0);
        const bool ok = dev <= tol;
        r.vertices.push_back({p, k.mu_lemma, k.mu_matrix, k.sign, ok});
        r.local = r.local && ok;
        r.all_positive = r.all_positive && k.sign > 0;
        r.max_mu_deviation = std::max(r.max_mu_deviation, dev);
    }
    if (c.is_closed() && c.is_connected()) {
        const auto loops = homology_generator_loops(c);
        for (std::size_t i = 0; i < loops.size(); ++i) {
            const double det = loop_holonomy(conn, loops[i]).determinant();
            const double dev = std::abs(std::abs(det) - 1.0);
            const bool ok = dev <= tol;
            r.loops.push_back({static_cast<int>(i), loops[i].size(), det, ok});
            r.global = r.global && ok;
            r.all_positive = r.all_positive && det > 0.0;
            r.max_det_deviation = std::max(r.max_det_deviation, dev);
        }
    }
    r.colorable = bipartite_coloring(c).has_value();
    if (!r.sl2_pm()) {
        r.verdict = Sl2Verdict::gl2;
    } else if (r.colorable && r.all_positive) {
        r.verdict = Sl2Verdict::sl2;
    } else {
        r.verdict = Sl2Verdict::sl2_pm;
    }
    return r;
}

/// Connection with u_{T:P_i} u_{T:P_{i+1}} = A(P_i P_{i+1}) in every triangle.
inline Connection build_from_edge_weights(std::shared_ptr<const Complex2D> complex, const EdgeWeights& a) {
    const auto& c = *complex;
    if (a.values.size() != static_cast<std::size_t>(c.edge_count())) {
        throw Error(ErrorCode::InvalidInput, "edge weights must cover every edge");
    }
    for (double w : a.values) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::NonPositiveWeight, "edge weights must be positive");
        }
    }
    std::vector<std::array<double, 3>> coeffs(static_cast<std::size_t>(c.triangle_count()));
    for (int t = 0; t < c.triangle_count(); ++t) {
        // A_s joins local vertices s and s + 1.
        const double a0 = a.values[static_cast<std::size_t>(c.edge_of(t, 0))];
        const double a1 = a.values[static_cast<std::size_t>(c.edge_of(t, 1))];
        const double a2 = a.values[static_cast<std::size_t>(c.edge_of(t, 2))];
        coeffs[static_cast<std::size_t>(t)] = {std::sqrt(a0 * a2 / a1), std::sqrt(a0 * a1 / a2),
                                               std::sqrt(a1 * a2 / a0)};
    }
    return {std::move(complex), std::move(coeffs)};
}

inline EdgeWeights random_edge_weights(const Complex2D& c, Rng& rng, double lo = 0.5, double hi = 2.0) {
    EdgeWeights a;
    a.values.resize(static_cast<std::size_t>(c.edge_count()));
    for (double& w : a.values) {
        w = rng.positive(lo, hi);
    }
    return a;
}

/// Recovers edge weights A with u_{T:P} u_{T:P'} proportional to A(PP') in
/// every triangle, starting from A(seed_edge) = seed_value and propagating
/// breadth-first over edges. Throws NotSL2 when a revisited edge disagrees.
inline EdgeWeights reconstruct_edge_weights(const Connection& conn, int seed_edge, double seed_value,
                                            double tol = 1e-10) {
    const auto& c = conn.complex();
    if (seed_edge < 0 || seed_edge >= c.edge_count() || !(seed_value > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "seed must be an edge with a positive value");
    }
    const auto ne = static_cast<std::size_t>(c.edge_count());
    EdgeWeights a;
    a.values.assign(ne, 0.0);
    std::vector<bool> known(ne, false);
    std::vector<bool> tri_done(static_cast<std::size_t>(c.triangle_count()), false);
    known[static_cast<std::size_t>(seed_edge)] = true;
    a.values[static_cast<std::size_t>(seed_edge)] = seed_value;
    std::queue<int> q;
    q.push(seed_edge);
    auto side_product = [&](int t, int s) { return conn.u_local(t, s) * conn.u_local(t, s + 1); };
    while (!q.empty()) {
        const int e = q.front();
        q.pop();
        for (const HalfEdge& h : c.edge(e).halves) {
            if (!h.valid() || tri_done[static_cast<std::size_t>(h.tri)]) {
                continue;
            }
            tri_done[static_cast<std::size_t>(h.tri)] = true;
            const double scale = a.values[static_cast<std::size_t>(e)] / side_product(h.tri, h.side);
            for (int s = 0; s < 3; ++s) {
                const int f = c.edge_of(h.tri, s);
                const double value = scale * side_product(h.tri, s);
                if (known[static_cast<std::size_t>(f)]) {
                    const double prev = a.values[static_cast<std::size_t>(f)];
                    if (std::abs(value - prev) > tol * std::max(std::abs(prev), 1.0)) {
                        throw Error(ErrorCode::NotSL2, "edge " + std::to_string(f) +
                                                           " receives inconsistent weights; connection is not SL2");
                    }
                } else {
                    known[static_cast<std::size_t>(f)] = true;
                    a.values[static_cast<std::size_t>(f)] = value;
                    q.push(f);
                }
            }
        }
    }
    if (!std::all_of(known.begin(), known.end(), [](bool k) { return k; })) {
        throw Error(ErrorCode::Disconnected, "not every edge is reachable from the seed");
    }
    return a;
}

/// Gauge-invariant data of a connection: rho per triangle side (read in the
/// triangle's orientation). Twin sides carry equal values.
struct RhoData {
    std::vector<std::array<double, 3>> side;
};

inline RhoData extract_rho(const Connection& conn) {
    const auto& c = conn.complex();
    RhoData out;
    out.side.resize(static_cast<std::size_t>(c.triangle_count()));
    for (int t = 0; t < c.triangle_count(); ++t) {
        for (int s = 0; s < 3; ++s) {
            out.side[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] =
                rho(conn, t, c.vertex_at(t, s), c.vertex_at(t, s + 1));
        }
    }
    return out;
}

/// Framed holonomy of each homology generator loop, read along its left boundary.
inline std::vector<double> loop_invariants(const Connection& conn) {
    std::vector<double> out;
    for (const auto& loop : homology_generator_loops(conn.complex())) {
        out.push_back(framed_holonomy(conn, left_boundary(conn.complex(), loop)));
    }
    return out;
}

struct InvariantReconstruction {
    Connection connection;
    std::vector<double> lambda; ///< per edge id, read from edge.a to edge.b
};

namespace detail {

// log lambda per edge solving sum over each triangle's sides of
// (+/-) x = -log(rho(T)) / 2, with primal-tree edges at 0 and leftover edges
// prescribed. Returns the residual at the dual roots.
inline double solve_lambda(const Complex2D& c, const TreeCotree& tc, const std::vector<double>& rhs,
                           std::vector<double>& x) {
    auto sign = [&](int t, int s) { return c.vertex_at(t, s) == c.edge(c.edge_of(t, s)).a ? 1.0 : -1.0; };
    double root_residual = 0.0;
    for (auto it = tc.dual_order.rbegin(); it != tc.dual_order.rend(); ++it) {
        const int t = *it;
        const int parent_edge = tc.dual_parent_edge[static_cast<std::size_t>(t)];
        double known = 0.0;
        double coef = 0.0;
        for (int s = 0; s < 3; ++s) {
            const int e = c.edge_of(t, s);
            if (e == parent_edge) {
                coef = sign(t, s);
            } else {
                known += sign(t, s) * x[static_cast<std::size_t>(e)];
            }
        }
        if (parent_edge < 0) {
            root_residual = std::max(root_residual, std::abs(known - rhs[static_cast<std::size_t>(t)]));
        } else {
            x[static_cast<std::size_t>(parent_edge)] = (rhs[static_cast<std::size_t>(t)] - known) / coef;
        }
    }
    return root_residual;
}

inline Connection connection_from_lambda(std::shared_ptr<const Complex2D> complex, const RhoData& rho,
                                         const std::vector<double>& x) {
    const auto& c = *complex;
    std::vector<std::array<double, 3>> coeffs(static_cast<std::size_t>(c.triangle_count()));
    for (int t = 0; t < c.triangle_count(); ++t) {
        std::array<double, 3> log_mu{};
        for (int s = 0; s < 3; ++s) {
            const int e = c.edge_of(t, s);
            const double sgn = c.vertex_at(t, s) == c.edge(e).a ? 1.0 : -1.0;
            log_mu[static_cast<std::size_t>(s)] =
                sgn * x[static_cast<std::size_t>(e)] +
                0.5 * std::log(rho.side[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)]);
        }
        // mu_{01} = u_0 / u_1, mu_{12} = u_1 / u_2.
        const double l0 = 0.0;
        const double l1 = l0 - log_mu[0];
        const double l2 = l1 - log_mu[1];
        coeffs[static_cast<std::size_t>(t)] = {std::exp(l0), std::exp(l1), std::exp(l2)};
    }
    return {std::move(complex), std::move(coeffs)};
}

} // namespace detail

/// Rebuilds a connection from its rho invariants and the framed holonomies of
/// the homology generator loops (see `loop_invariants`).
inline InvariantReconstruction reconstruct_connection_from_invariants(std::shared_ptr<const Complex2D> complex,
                                                                      const RhoData& rho,
                                                                      const std::vector<double>& loop_values,
                                                                      double tol = 1e-10) {
    const auto& c = *complex;
    if (!c.is_closed() || !c.is_connected()) {
        throw Error(ErrorCode::NotClosed, "reconstruction needs a closed connected surface");
    }
    const auto nt = static_cast<std::size_t>(c.triangle_count());
    if (rho.side.size() != nt) {
        throw Error(ErrorCode::InvalidInput, "rho data must cover every triangle");
    }
    double log_total = 0.0;
    std::vector<double> rhs(nt);
    for (int t = 0; t < c.triangle_count(); ++t) {
        double log_rho_t = 0.0;
        for (int s = 0; s < 3; ++s) {
            const double r = rho.side[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
            const HalfEdge tw = c.twin(t, s);
            const double r_twin = rho.side[static_cast<std::size_t>(tw.tri)][static_cast<std::size_t>(tw.side)];
            if (!(r > 0.0) || std::abs(r - r_twin) > tol * std::max(r, 1.0)) {
                throw Error(ErrorCode::InconsistentRho, "rho must be positive and agree across each edge");
            }
            log_rho_t += std::log(r);
        }
        rhs[static_cast<std::size_t>(t)] = -0.5 * log_rho_t;
        log_total += log_rho_t;
    }
    if (std::abs(log_total) > tol * std::max(1.0, static_cast<double>(nt))) {
        throw Error(ErrorCode::InconsistentRho, "product of rho(T) over the surface differs from 1");
    }

    const TreeCotree tc = tree_cotree(c);
    const std::size_t ng = tc.leftover.size();
    if (loop_values.size() != ng) {
        throw Error(ErrorCode::UnsatisfiableLoopValues,
                    "expected " + std::to_string(ng) + " loop values, got " + std::to_string(loop_values.size()));
    }
    for (double v : loop_values) {
        if (!(v > 0.0)) {
            throw Error(ErrorCode::UnsatisfiableLoopValues, "loop values must be positive");
        }
    }

    std::vector<double> x(static_cast<std::size_t>(c.edge_count()), 0.0);
    if (detail::solve_lambda(c, tc, rhs, x) > 1e-8) {
        throw Error(ErrorCode::InconsistentRho, "cocycle condition fails");
    }
    Connection base = detail::connection_from_lambda(complex, rho, x);
    if (ng == 0) {
        std::vector<double> lambda(x.size());
        std::transform(x.begin(), x.end(), lambda.begin(), [](double v) { return std::exp(v); });
        return {std::move(base), std::move(lambda)};
    }

    // Closed cochains z_j, one per leftover edge, and their pairing with the loops.
    const auto loops = homology_generator_loops(c);
    std::vector<FramedPath> paths;
    for (const auto& loop : loops) {
        paths.push_back(left_boundary(c, loop));
    }
    auto log_loops = [&](const Connection& conn) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(ng));
        for (std::size_t k = 0; k < ng; ++k) {
            v(static_cast<Eigen::Index>(k)) = std::log(framed_holonomy(conn, paths[k]));
        }
        return v;
    };
    const Eigen::VectorXd current = log_loops(base);
    Eigen::MatrixXd pairing(static_cast<Eigen::Index>(ng), static_cast<Eigen::Index>(ng));
    std::vector<std::vector<double>> cocycles;
    const std::vector<double> zero_rhs(nt, 0.0);
    for (std::size_t j = 0; j < ng; ++j) {
        std::vector<double> z(x.size(), 0.0);
        z[static_cast<std::size_t>(tc.leftover[j])] = 1.0;
        detail::solve_lambda(c, tc, zero_rhs, z);
        std::vector<double> shifted(x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            shifted[i] += z[i];
        }
        pairing.col(static_cast<Eigen::Index>(j)) =
            log_loops(detail::connection_from_lambda(complex, rho, shifted)) - current;
        cocycles.push_back(std::move(z));
    }
    Eigen::VectorXd target(static_cast<Eigen::Index>(ng));
    for (std::size_t k = 0; k < ng; ++k) {
        target(static_cast<Eigen::Index>(k)) = std::log(loop_values[k]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(pairing);
    if (lu.rank() < static_cast<Eigen::Index>(ng)) {
        throw Error(ErrorCode::UnsatisfiableLoopValues, "generator loops do not pair with the cocycle basis");
    }
    const Eigen::VectorXd coef = lu.solve(target - current);
    for (std::size_t j = 0; j < ng; ++j) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += coef(static_cast<Eigen::Index>(j)) * cocycles[j][i];
        }
    }
    Connection result = detail::connection_from_lambda(complex, rho, x);
    const Eigen::VectorXd achieved = log_loops(result);
    if ((achieved - target).cwiseAbs().maxCoeff() > 1e-8) {
        throw Error(ErrorCode::UnsatisfiableLoopValues, "loop values could not be matched");
    }
    std::vector<double> lambda(x.size());
    std::transform(x.begin(), x.end(), lambda.begin(), [](double v) { return std::exp(v); });
    return {std::move(result), std::move(lambda)};
}

} // namespace dsl2
