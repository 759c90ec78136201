#pragma once

#include "dsl2/complex.hpp"
#include "dsl2/error.hpp"
#include "dsl2/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dsl2 {

struct NetEdge {
    int i = 0;
    int j = 0;
    double c = 1.0;
};

/// Graph with conductivities and an optional set of black triangles K.
/// Sign convention: L = d C d* has off-diagonal +c and diagonal -sum c.
class ElectricNetwork {
public:
    ElectricNetwork(int vertex_count, std::vector<NetEdge> edges,
                    std::optional<std::vector<std::array<int, 3>>> black = std::nullopt)
        : n_(vertex_count), edges_(std::move(edges)), black_(std::move(black)) {
        if (n_ < 1) {
            throw Error(ErrorCode::InvalidInput, "network needs a vertex");
        }
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const auto& ed = edges_[e];
            if (ed.i < 0 || ed.j < 0 || ed.i >= n_ || ed.j >= n_ || ed.i == ed.j) {
                throw Error(ErrorCode::InvalidInput, "bad edge " + std::to_string(e));
            }
            if (!(ed.c > 0.0) || !std::isfinite(ed.c)) {
                throw Error(ErrorCode::NonPositiveConductivity, "edge " + std::to_string(e) + " has c <= 0");
            }
            if (!index_.emplace(key(ed.i, ed.j), static_cast<int>(e)).second) {
                throw Error(ErrorCode::InvalidInput, "parallel edges are not supported");
            }
        }
        if (black_) validate_k();
    }

    [[nodiscard]] int vertex_count() const noexcept { return n_; }
    [[nodiscard]] const std::vector<NetEdge>& edges() const noexcept { return edges_; }
    [[nodiscard]] bool has_k() const noexcept { return black_.has_value(); }

    [[nodiscard]] const std::vector<std::array<int, 3>>& black() const {
        if (!black_) {
            throw Error(ErrorCode::InvalidKStructure, "network has no black triangles");
        }
        return *black_;
    }

    [[nodiscard]] std::optional<int> edge_between(int p, int q) const {
        const auto it = index_.find(key(p, q));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] double conductivity(int p, int q) const {
        const auto e = edge_between(p, q);
        if (!e) {
            throw Error(ErrorCode::InvalidInput, "no edge " + std::to_string(p) + "-" + std::to_string(q));
        }
        return edges_[static_cast<std::size_t>(*e)].c;
    }

    [[nodiscard]] Eigen::MatrixXd laplacian() const {
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_, n_);
        for (const auto& e : edges_) {
            l(e.i, e.j) += e.c;
            l(e.j, e.i) += e.c;
            l(e.i, e.i) -= e.c;
            l(e.j, e.j) -= e.c;
        }
        return l;
    }

private:
    static std::pair<int, int> key(int p, int q) { return {std::min(p, q), std::max(p, q)}; }

    // Every edge on exactly one black triangle, every triangle side an edge.
    // The ">= 3 triangles per vertex" rule is not enforced.
    void validate_k() const {
        std::vector<int> hits(edges_.size(), 0);
        for (std::size_t t = 0; t < black_->size(); ++t) {
            const auto& tri = (*black_)[t];
            for (int s = 0; s < 3; ++s) {
                const int p = tri[static_cast<std::size_t>(s)];
                const int q = tri[static_cast<std::size_t>((s + 1) % 3)];
                const auto e = (p >= 0 && p < n_ && q >= 0 && q < n_ && p != q) ? edge_between(p, q) : std::nullopt;
                if (!e) {
                    throw Error(ErrorCode::InvalidKStructure, "triangle " + std::to_string(t) + " side is not an edge");
                }
                ++hits[static_cast<std::size_t>(*e)];
            }
        }
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (hits[e] != 1) {
                throw Error(ErrorCode::InvalidKStructure,
                            "edge " + std::to_string(e) + " lies on " + std::to_string(hits[e]) + " black triangles");
            }
        }
    }

    int n_;
    std::vector<NetEdge> edges_;
    std::optional<std::vector<std::array<int, 3>>> black_;
    std::map<std::pair<int, int>, int> index_;
};

/// Edges of the complex with random conductivities; black triangles as K.
inline ElectricNetwork network_from_complex(const Complex2D& c, Rng& rng, double lo = 0.5, double hi = 2.0) {
    std::vector<NetEdge> edges;
    for (int e = 0; e < c.edge_count(); ++e) edges.push_back({c.edge(e).a, c.edge(e).b, rng.positive(lo, hi)});
    const auto colors = c.coloring() ? c.coloring() : bipartite_coloring(c);
    if (!colors) {
        throw Error(ErrorCode::NoColoring, "complex admits no black-white coloring");
    }
    std::vector<std::array<int, 3>> black;
    for (int t = 0; t < c.triangle_count(); ++t) {
        if ((*colors)[static_cast<std::size_t>(t)] == Color::black) {
            black.push_back({c.vertex_at(t, 0), c.vertex_at(t, 1), c.vertex_at(t, 2)});
        }
    }
    return {c.vertex_count(), std::move(edges), std::move(black)};
}

/// Octahedron with black triangles (0,2,4), (1,3,4), (1,2,5), (0,3,5).
inline ElectricNetwork octahedron_network(Rng& rng, double lo = 0.5, double hi = 2.0) {
    const std::vector<std::array<int, 3>> black{{0, 2, 4}, {1, 3, 4}, {1, 2, 5}, {0, 3, 5}};
    std::vector<NetEdge> edges;
    for (const auto& t : black) {
        for (int s = 0; s < 3; ++s) {
            edges.push_back({t[static_cast<std::size_t>(s)], t[static_cast<std::size_t>((s + 1) % 3)], rng.positive(lo, hi)});
        }
    }
    return {6, std::move(edges), black};
}

/// (LU)(P) = sum c([P,P_i]) (U(P_i) - U(P)).
inline Eigen::VectorXd total_current(const ElectricNetwork& net, const Eigen::VectorXd& u) {
    if (u.size() != net.vertex_count()) {
        throw Error(ErrorCode::InvalidInput, "U must be defined on every vertex");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(net.vertex_count());
    for (const auto& e : net.edges()) {
        const double j = e.c * (u(e.j) - u(e.i)); // current into i along [i, j]
        out(e.i) += j;
        out(e.j) -= j;
    }
    return out;
}

inline double free_vertex_value(const ElectricNetwork& net, const Eigen::VectorXd& u, int p) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& e : net.edges()) {
        if (e.i == p || e.j == p) {
            num += e.c * u(e.i == p ? e.j : e.i);
            den += e.c;
        }
    }
    if (den == 0.0) {
        throw Error(ErrorCode::IsolatedVertex, "vertex " + std::to_string(p) + " has no neighbours");
    }
    return num / den;
}

/// c'_i = (c1 c2 + c1 c3 + c2 c3) / c_i; c_i sits on the side opposite vertex i.
inline std::array<double, 3> star_triangle_single(double c1, double c2, double c3) {
    if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) {
        throw Error(ErrorCode::NonPositiveConductivity, "conductivities must be positive");
    }
    const double s = c1 * c2 + c1 * c3 + c2 * c3;
    return {s / c1, s / c2, s / c3};
}

/// Side conductivities of a black triangle, indexed by the opposite vertex.
inline std::array<double, 3> opposite_conductivities(const ElectricNetwork& net, const std::array<int, 3>& t) {
    return {net.conductivity(t[1], t[2]), net.conductivity(t[0], t[2]), net.conductivity(t[0], t[1])};
}

struct StarTriangleResult {
    ElectricNetwork network; ///< centers are vertices n, n + 1, ...
    Eigen::VectorXd u;
    double current_residual = 0.0; ///< max |dJ' - dJ| on original vertices
};

inline StarTriangleResult star_triangle_network(const ElectricNetwork& net, const Eigen::VectorXd& u) {
    const auto& black = net.black();
    const int n = net.vertex_count();
    const int m = static_cast<int>(black.size());
    std::vector<NetEdge> edges;
    for (const auto& e : net.edges()) {
        bool inside = false;
        for (const auto& t : black) {
            const auto has = [&](int p) { return std::find(t.begin(), t.end(), p) != t.end(); };
            inside = inside || (has(e.i) && has(e.j));
        }
        if (!inside) edges.push_back(e);
    }
    for (int k = 0; k < m; ++k) {
        const auto& t = black[static_cast<std::size_t>(k)];
        const auto c = opposite_conductivities(net, t);
        const auto star = star_triangle_single(c[0], c[1], c[2]);
        for (std::size_t i = 0; i < 3; ++i) edges.push_back({t[i], n + k, star[i]});
    }
    ElectricNetwork out(n + m, std::move(edges));
    Eigen::VectorXd up = Eigen::VectorXd::Zero(n + m);
    up.head(n) = u;
    for (int k = 0; k < m; ++k) up(n + k) = free_vertex_value(out, up, n + k);
    const Eigen::VectorXd before = total_current(net, u);
    const Eigen::VectorXd after = total_current(out, up);
    const double res = (after.head(n) - before).cwiseAbs().maxCoeff();
    return {std::move(out), std::move(up), res};
}

struct BlackFactorization {
    Eigen::MatrixXd Q;     ///< |K| x n, Q(T, P_i) = c'_i(T)
    Eigen::VectorXd sigma; ///< sigma(T) = sum c'_i(T)
    Eigen::VectorXd W;
    double triangle_identity = 0.0; ///< max |c'_i c'_j / sigma - c_k|
    double residual = 0.0;          ///< max |Q^+ C'^{-1} Q - W - L|
};

/// L = Q^+ (C')^{-1} Q - W.
inline BlackFactorization black_factorization(const ElectricNetwork& net) {
    const auto& black = net.black();
    const int n = net.vertex_count();
    const int m = static_cast<int>(black.size());
    BlackFactorization f{Eigen::MatrixXd::Zero(m, n), Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(n), 0.0, 0.0};
    for (int k = 0; k < m; ++k) {
        const auto& t = black[static_cast<std::size_t>(k)];
        const auto c = opposite_conductivities(net, t);
        const auto cp = star_triangle_single(c[0], c[1], c[2]);
        const double sigma = cp[0] + cp[1] + cp[2];
        f.sigma(k) = sigma;
        for (std::size_t i = 0; i < 3; ++i) {
            f.Q(k, t[i]) = cp[i];
            const double pair = cp[(i + 1) % 3] * cp[(i + 2) % 3] / sigma;
            f.triangle_identity = std::max(f.triangle_identity, std::abs(pair - c[i]));
        }
    }
    const Eigen::MatrixXd l = net.laplacian();
    const Eigen::MatrixXd qcq = f.Q.transpose() * f.sigma.cwiseInverse().asDiagonal() * f.Q;
    f.W = qcq.diagonal() - l.diagonal();
    f.residual = (qcq - Eigen::MatrixXd(f.W.asDiagonal()) - l).cwiseAbs().maxCoeff();
    return f;
}

enum class UPrimeNormalization { c_prime_q_u, c_prime_inverse_q_u };

inline std::string to_string(UPrimeNormalization n) {
    return n == UPrimeNormalization::c_prime_q_u ? "C'QU" : "(C')^-1 QU";
}

struct LaplaceImage {
    Eigen::MatrixXd L;  ///< Q W^{-1} Q^+ - C' on black triangles
    Eigen::VectorXd u;  ///< verified U'
    UPrimeNormalization normalization = UPrimeNormalization::c_prime_inverse_q_u;
    double residual_c_prime = 0.0;         ///< |L' C'QU| on asserted triangles
    double residual_c_prime_inverse = 0.0; ///< |L' (C')^{-1}QU| on asserted triangles
    double kernel_residual = 0.0;
    std::vector<int> asserted_triangles;
};

/// Tries both normalizations of U'. Only triangles whose three vertices are in
/// `asserted` (default: all) enter the residual, since LU = 0 is required there.
inline LaplaceImage laplace_image(const ElectricNetwork& net, const Eigen::VectorXd& u,
                                  std::optional<std::vector<int>> asserted = std::nullopt, double tol = 1e-10) {
    const auto f = black_factorization(net);
    for (int p = 0; p < net.vertex_count(); ++p) {
        if (f.W(p) == 0.0) {
            throw Error(ErrorCode::ZeroW, "W vanishes at vertex " + std::to_string(p));
        }
    }
    const auto& black = net.black();
    std::vector<char> ok(static_cast<std::size_t>(net.vertex_count()), asserted ? 0 : 1);
    if (asserted) {
        for (int p : *asserted) ok.at(static_cast<std::size_t>(p)) = 1;
    }
    LaplaceImage out;
    for (int k = 0; k < static_cast<int>(black.size()); ++k) {
        const auto& t = black[static_cast<std::size_t>(k)];
        if (ok[static_cast<std::size_t>(t[0])] && ok[static_cast<std::size_t>(t[1])] && ok[static_cast<std::size_t>(t[2])]) {
            out.asserted_triangles.push_back(k);
        }
    }
    out.L = f.Q * f.W.cwiseInverse().asDiagonal() * f.Q.transpose() - Eigen::MatrixXd(f.sigma.asDiagonal());
    const Eigen::VectorXd qu = f.Q * u;
    const Eigen::VectorXd a = f.sigma.cwiseProduct(qu);
    const Eigen::VectorXd b = qu.cwiseQuotient(f.sigma);
    auto residual = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd r = out.L * x;
        double worst = 0.0;
        for (int k : out.asserted_triangles) worst = std::max(worst, std::abs(r(k)));
        return worst;
    };
    out.residual_c_prime = residual(a);
    out.residual_c_prime_inverse = residual(b);
    if (std::min(out.residual_c_prime, out.residual_c_prime_inverse) >= tol) {
        throw Error(ErrorCode::NoKernelVector, "neither normalization is a kernel vector: C'QU " +
                                                   std::to_string(out.residual_c_prime) + ", (C')^-1 QU " +
                                                   std::to_string(out.residual_c_prime_inverse));
    }
    const bool inverse = out.residual_c_prime_inverse <= out.residual_c_prime;
    out.normalization = inverse ? UPrimeNormalization::c_prime_inverse_q_u : UPrimeNormalization::c_prime_q_u;
    out.u = inverse ? b : a;
    out.kernel_residual = inverse ? out.residual_c_prime_inverse : out.residual_c_prime;
    return out;
}

/// U with LU = 0 on `free` vertices; U = `boundary` elsewhere.
inline Eigen::VectorXd dirichlet_solve(const ElectricNetwork& net, const std::vector<int>& free,
                                       const Eigen::VectorXd& boundary) {
    const Eigen::MatrixXd l = net.laplacian();
    const int n = net.vertex_count();
    std::vector<char> is_free(static_cast<std::size_t>(n), 0);
    for (int p : free) is_free.at(static_cast<std::size_t>(p)) = 1;
    const int k = static_cast<int>(free.size());
    Eigen::MatrixXd a(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < k; ++i) {
        const int p = free[static_cast<std::size_t>(i)];
        for (int j = 0; j < k; ++j) a(i, j) = l(p, free[static_cast<std::size_t>(j)]);
        for (int q = 0; q < n; ++q) {
            if (!is_free[static_cast<std::size_t>(q)]) rhs(i) -= l(p, q) * boundary(q);
        }
    }
    const Eigen::VectorXd inner = a.fullPivLu().solve(rhs);
    Eigen::VectorXd u = boundary;
    for (int i = 0; i < k; ++i) u(free[static_cast<std::size_t>(i)]) = inner(i);
    return u;
}

} // namespace dsl2
