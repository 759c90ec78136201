#pragma once

#include "dsl2/complex.hpp"
#include "dsl2/connection.hpp"
#include "dsl2/error.hpp"
#include "dsl2/random.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace dsl2 {

/// L psi_P = sum_{P'} b_{P:P'} psi_{P'} + W(P) psi_P. One off-diagonal value
/// per edge id; parallel edges between the same vertices simply add up.
struct SelfAdjointOperator {
    std::shared_ptr<const Complex2D> complex;
    std::vector<double> offdiag;
    std::vector<double> potential;

    void check() const {
        if (!complex || offdiag.size() != static_cast<std::size_t>(complex->edge_count()) ||
            potential.size() != static_cast<std::size_t>(complex->vertex_count())) {
            throw Error(ErrorCode::InvalidInput, "operator needs one value per edge and per vertex");
        }
        for (double b : offdiag) {
            if (!(b > 0.0) || !std::isfinite(b)) {
                throw Error(ErrorCode::NonPositiveOffdiag, "off-diagonal coefficients must be positive");
            }
        }
    }
};

inline SelfAdjointOperator random_operator(std::shared_ptr<const Complex2D> c, Rng& rng, double lo = 0.5,
                                           double hi = 2.0) {
    SelfAdjointOperator l;
    l.offdiag.resize(static_cast<std::size_t>(c->edge_count()));
    for (double& b : l.offdiag) b = rng.positive(lo, hi);
    l.potential.resize(static_cast<std::size_t>(c->vertex_count()));
    for (double& w : l.potential) w = rng.uniform(-2.0, 2.0);
    l.complex = std::move(c);
    return l;
}

inline std::vector<double> apply_operator(const SelfAdjointOperator& l, const std::vector<double>& psi) {
    const auto& c = *l.complex;
    if (psi.size() != static_cast<std::size_t>(c.vertex_count())) {
        throw Error(ErrorCode::InvalidInput, "function must be defined on every vertex");
    }
    std::vector<double> out(psi.size());
    for (std::size_t p = 0; p < psi.size(); ++p) out[p] = l.potential[p] * psi[p];
    for (int e = 0; e < c.edge_count(); ++e) {
        const auto& edge = c.edge(e);
        const double b = l.offdiag[static_cast<std::size_t>(e)];
        out[static_cast<std::size_t>(edge.a)] += b * psi[static_cast<std::size_t>(edge.b)];
        out[static_cast<std::size_t>(edge.b)] += b * psi[static_cast<std::size_t>(edge.a)];
    }
    return out;
}

/// Coefficients of Q^b (or Q^w): only triangles of `color` carry values.
struct TriangleOperator {
    Color color = Color::black;
    std::vector<std::array<double, 3>> coeffs;
};

struct BWFactorization {
    TriangleOperator black;
    TriangleOperator white;
    std::vector<double> w_black;
    std::vector<double> w_white;
};

namespace detail {

inline std::vector<Color> require_coloring(const Complex2D& c) {
    const auto colors = c.coloring() ? c.coloring() : bipartite_coloring(c);
    if (!colors) {
        throw Error(ErrorCode::NoColoring, "complex admits no black-white coloring");
    }
    return *colors;
}

} // namespace detail

/// L = Q^{b+} Q^b + W^b = Q^{w+} Q^w + W^w. Each edge must carry one black
/// and one white triangle, so the surface has to be closed.
inline BWFactorization factorize_bw(const SelfAdjointOperator& l) {
    l.check();
    const auto& c = *l.complex;
    const auto colors = detail::require_coloring(c);
    for (int e = 0; e < c.edge_count(); ++e) {
        if (!c.edge(e).interior()) {
            throw Error(ErrorCode::BoundaryEdge, "edge " + std::to_string(e) + " has no triangle of one color");
        }
    }
    const Connection both = build_from_edge_weights(l.complex, EdgeWeights{l.offdiag});
    BWFactorization f;
    f.black.color = Color::black;
    f.white.color = Color::white;
    const auto nt = static_cast<std::size_t>(c.triangle_count());
    f.black.coeffs.assign(nt, {0.0, 0.0, 0.0});
    f.white.coeffs.assign(nt, {0.0, 0.0, 0.0});
    f.w_black = l.potential;
    f.w_white = l.potential;
    for (int t = 0; t < c.triangle_count(); ++t) {
        const bool black = colors[static_cast<std::size_t>(t)] == Color::black;
        auto& dst = black ? f.black.coeffs : f.white.coeffs;
        auto& w = black ? f.w_black : f.w_white;
        dst[static_cast<std::size_t>(t)] = both.coeffs()[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) {
            const double u = both.u_local(t, i);
            w[static_cast<std::size_t>(c.vertex_at(t, i))] -= u * u;
        }
    }
    return f;
}

/// Q^+ Q + W assembled back into an operator.
inline SelfAdjointOperator assemble(std::shared_ptr<const Complex2D> complex, const TriangleOperator& q,
                                    const std::vector<double>& w) {
    const auto& c = *complex;
    const auto colors = detail::require_coloring(c);
    SelfAdjointOperator out;
    out.offdiag.assign(static_cast<std::size_t>(c.edge_count()), 0.0);
    out.potential = w;
    for (int t = 0; t < c.triangle_count(); ++t) {
        if (colors[static_cast<std::size_t>(t)] != q.color) continue;
        const auto& u = q.coeffs[static_cast<std::size_t>(t)];
        for (int s = 0; s < 3; ++s) {
            out.offdiag[static_cast<std::size_t>(c.edge_of(t, s))] +=
                u[static_cast<std::size_t>(s)] * u[static_cast<std::size_t>((s + 1) % 3)];
            out.potential[static_cast<std::size_t>(c.vertex_at(t, s))] +=
                u[static_cast<std::size_t>(s)] * u[static_cast<std::size_t>(s)];
        }
    }
    out.complex = std::move(complex);
    return out;
}

/// Max-norm distance between two operators on the same complex.
inline double operator_distance(const SelfAdjointOperator& a, const SelfAdjointOperator& b) {
    double worst = 0.0;
    for (std::size_t e = 0; e < a.offdiag.size(); ++e) worst = std::max(worst, std::abs(a.offdiag[e] - b.offdiag[e]));
    for (std::size_t p = 0; p < a.potential.size(); ++p) {
        worst = std::max(worst, std::abs(a.potential[p] - b.potential[p]));
    }
    return worst;
}

/// Black and white coefficients joined into one connection.
inline Connection combined_connection(std::shared_ptr<const Complex2D> complex, const TriangleOperator& black,
                                      const TriangleOperator& white) {
    if (black.color != Color::black || white.color != Color::white) {
        throw Error(ErrorCode::ColorMismatch, "expected one black and one white operator");
    }
    const auto& c = *complex;
    const auto colors = detail::require_coloring(c);
    const auto nt = static_cast<std::size_t>(c.triangle_count());
    if (black.coeffs.size() != nt || white.coeffs.size() != nt) {
        throw Error(ErrorCode::ColorMismatch, "operators belong to a different complex");
    }
    std::vector<std::array<double, 3>> coeffs(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        coeffs[t] = colors[t] == Color::black ? black.coeffs[t] : white.coeffs[t];
        if (!(coeffs[t][0] > 0.0 && coeffs[t][1] > 0.0 && coeffs[t][2] > 0.0)) {
            throw Error(ErrorCode::ColorMismatch, "triangle " + std::to_string(t) + " lacks coefficients of its color");
        }
    }
    return {std::move(complex), std::move(coeffs)};
}

} // namespace dsl2
