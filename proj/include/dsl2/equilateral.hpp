#pragma once

#include "dsl2/complex.hpp"
#include "dsl2/connection.hpp"
#include "dsl2/error.hpp"
#include "dsl2/lattice_field.hpp"
#include "dsl2/random.hpp"
#include "dsl2/schrodinger.hpp"

#include <array>
#include <cmath>
#include <memory>

namespace dsl2 {

// Equilateral lattice on a periodic M x N window. Shifts T1 = (1,0),
// T2 = (0,1); the third edge direction is T1^{-1} T2 = (-1,1).
//
// L = a + b(m+1,n) T1 + c(m,n+1) T2 + d(m-1,n+1) T1^{-1} T2 + adjoint, so
//   b(m,n) sits on the edge (m-1,n) - (m,n),
//   c(m,n) on (m,n-1) - (m,n),
//   d(m,n) on (m+1,n-1) - (m,n).

struct Shift {
    int dm;
    int dn;
    friend bool operator==(Shift, Shift) = default;
};

/// dir_k, k = 0..5, counterclockwise; dir_{k+3} = -dir_k.
inline constexpr std::array<Shift, 6> hex_directions{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

inline Shift hex_direction(int k) { return hex_directions[static_cast<std::size_t>(((k % 6) + 6) % 6)]; }

inline int hex_index(Shift s) {
    for (int k = 0; k < 6; ++k) {
        if (hex_directions[static_cast<std::size_t>(k)] == s) return k;
    }
    throw Error(ErrorCode::InvalidInput, "not a lattice direction");
}

struct EquilateralOperator {
    LatticeField a;
    LatticeField b;
    LatticeField c;
    LatticeField d;

    [[nodiscard]] int rows() const noexcept { return a.rows(); }
    [[nodiscard]] int cols() const noexcept { return a.cols(); }

    void check() const {
        for (const LatticeField* f : {&b, &c, &d}) {
            if (!f->same_shape(a) || !f->periodic()) {
                throw Error(ErrorCode::InvalidInput, "coefficient fields must share one periodic window");
            }
            for (int m = 0; m < rows(); ++m) {
                for (int n = 0; n < cols(); ++n) {
                    if (!((*f)(m, n) > 0.0)) {
                        throw Error(ErrorCode::NonPositiveCoefficient, "off-diagonal coefficients must be positive");
                    }
                }
            }
        }
    }

    /// Coefficient of psi(P + dir_k) in (L psi)(P).
    [[nodiscard]] double arm(int m, int n, int k) const {
        switch (((k % 6) + 6) % 6) {
        case 0: return b(m + 1, n);
        case 1: return c(m, n + 1);
        case 2: return d(m - 1, n + 1);
        case 3: return b(m, n);
        case 4: return c(m, n);
        default: return d(m, n);
        }
    }

    static EquilateralOperator constant(int rows, int cols, double a0, double off = 1.0) {
        return {LatticeField(rows, cols, a0), LatticeField(rows, cols, off), LatticeField(rows, cols, off),
                LatticeField(rows, cols, off)};
    }

    static EquilateralOperator random(int rows, int cols, Rng& rng, double lo = 0.5, double hi = 2.0) {
        auto pos = [&](int, int) { return rng.positive(lo, hi); };
        LatticeField a = LatticeField::generate(rows, cols, [&](int, int) { return rng.uniform(4.0, 8.0); });
        LatticeField b = LatticeField::generate(rows, cols, pos);
        LatticeField c = LatticeField::generate(rows, cols, pos);
        LatticeField d = LatticeField::generate(rows, cols, pos);
        return {std::move(a), std::move(b), std::move(c), std::move(d)};
    }
};

/// Row-wise hexagonal stencil: center(P) and arms[k](P) = coefficient of psi(P + dir_k).
struct HexStencil {
    LatticeField center;
    std::array<LatticeField, 6> arms;

    HexStencil(int rows, int cols)
        : center(rows, cols, 0.0),
          arms{LatticeField(rows, cols, 0.0), LatticeField(rows, cols, 0.0), LatticeField(rows, cols, 0.0),
               LatticeField(rows, cols, 0.0), LatticeField(rows, cols, 0.0), LatticeField(rows, cols, 0.0)} {}

    void add_arm(int m, int n, int k, double value) {
        auto& f = arms[static_cast<std::size_t>(((k % 6) + 6) % 6)];
        f.set(m, n, f(m, n) + value);
    }
    void add_center(int m, int n, double value) { center.set(m, n, center(m, n) + value); }

    /// Largest mismatch between arm k at P and arm k+3 at P + dir_k.
    [[nodiscard]] double asymmetry() const {
        double worst = 0.0;
        for (int m = 0; m < center.rows(); ++m) {
            for (int n = 0; n < center.cols(); ++n) {
                for (int k = 0; k < 3; ++k) {
                    const Shift s = hex_direction(k);
                    worst = std::max(worst, std::abs(arms[static_cast<std::size_t>(k)](m, n) -
                                                     arms[static_cast<std::size_t>(k + 3)](m + s.dm, n + s.dn)));
                }
            }
        }
        return worst;
    }

    [[nodiscard]] EquilateralOperator to_operator() const {
        const int r = center.rows();
        const int c = center.cols();
        return {center, LatticeField::generate(r, c, [&](int m, int n) { return arms[3](m, n); }),
                LatticeField::generate(r, c, [&](int m, int n) { return arms[4](m, n); }),
                LatticeField::generate(r, c, [&](int m, int n) { return arms[5](m, n); })};
    }
};

/// (L psi)(P) evaluated straight from the shifts.
inline LatticeField apply_operator(const EquilateralOperator& l, const LatticeField& psi) {
    return LatticeField::generate(l.rows(), l.cols(), [&](int m, int n) {
        double s = l.a(m, n) * psi(m, n);
        for (int k = 0; k < 6; ++k) {
            const Shift d = hex_direction(k);
            s += l.arm(m, n, k) * psi(m + d.dm, n + d.dn);
        }
        return s;
    });
}

/// Q_j = u + v T_{dir_j} + w T_{dir_{j+1}} and the potential W_j with
/// L = Q_j^+ Q_j + W_j. Even j acts on black (up) triangles, odd j on white.
struct EquilateralFactor {
    int j = 0;
    LatticeField u;
    LatticeField v;
    LatticeField w;
    LatticeField potential;

    /// Offsets of the triangle anchored at P: (0, dir_j, dir_{j+1}).
    [[nodiscard]] std::array<Shift, 3> offsets() const {
        return {Shift{0, 0}, hex_direction(j), hex_direction(j + 1)};
    }
    [[nodiscard]] std::array<double, 3> at(int m, int n) const { return {u(m, n), v(m, n), w(m, n)}; }
};

inline EquilateralFactor equilateral_factorize(const EquilateralOperator& l, int j) {
    l.check();
    if (j < 0 || j > 5) {
        throw Error(ErrorCode::InvalidInput, "direction must be in 0..5");
    }
    const int r = l.rows();
    const int c = l.cols();
    EquilateralFactor f{j, LatticeField(r, c, 0.0), LatticeField(r, c, 0.0), LatticeField(r, c, 0.0),
                        LatticeField(r, c, 0.0)};
    const Shift dj = hex_direction(j);
    const Shift dj1 = hex_direction(j + 1);
    for (int m = 0; m < r; ++m) {
        for (int n = 0; n < c; ++n) {
            const double a1 = l.arm(m, n, j);
            const double a2 = l.arm(m + dj.dm, n + dj.dn, j + 2);
            const double a3 = l.arm(m + dj1.dm, n + dj1.dn, j + 4);
            f.u.set(m, n, std::sqrt(a1 * a3 / a2));
            f.v.set(m, n, std::sqrt(a1 * a2 / a3));
            f.w.set(m, n, std::sqrt(a2 * a3 / a1));
        }
    }
    // Three triangles of the colour meet at P: anchored at P, P - dir_j, P - dir_{j+1}.
    for (int m = 0; m < r; ++m) {
        for (int n = 0; n < c; ++n) {
            const double v = f.v(m - dj.dm, n - dj.dn);
            const double w = f.w(m - dj1.dm, n - dj1.dn);
            f.potential.set(m, n, l.a(m, n) - (f.u(m, n) * f.u(m, n) + v * v + w * w));
        }
    }
    return f;
}

/// Q^+ Q + potential as a stencil.
inline HexStencil expand_qtq(const EquilateralFactor& f, const LatticeField& potential) {
    const int r = f.u.rows();
    const int c = f.u.cols();
    HexStencil h(r, c);
    const auto o = f.offsets();
    for (int m = 0; m < r; ++m) {
        for (int n = 0; n < c; ++n) {
            const auto q = f.at(m, n);
            for (std::size_t i = 0; i < 3; ++i) {
                const int xm = m + o[i].dm;
                const int xn = n + o[i].dn;
                h.add_center(xm, xn, q[i] * q[i]);
                for (std::size_t k = 0; k < 3; ++k) {
                    if (k == i) continue;
                    h.add_arm(xm, xn, hex_index({o[k].dm - o[i].dm, o[k].dn - o[i].dn}), q[i] * q[k]);
                }
            }
        }
    }
    for (int m = 0; m < r; ++m) {
        for (int n = 0; n < c; ++n) h.add_center(m, n, potential(m, n));
    }
    return h;
}

/// Q Q^+ + level on functions of anchors (triangles of the factor's colour).
inline HexStencil expand_qqt(const EquilateralFactor& f, double level) {
    const int r = f.u.rows();
    const int c = f.u.cols();
    HexStencil h(r, c);
    const auto o = f.offsets();
    for (int m = 0; m < r; ++m) {
        for (int n = 0; n < c; ++n) {
            const auto q = f.at(m, n);
            h.add_center(m, n, level);
            for (std::size_t i = 0; i < 3; ++i) {
                h.add_center(m, n, q[i] * q[i]);
                // The vertex P + o_i is corner k of the triangle anchored at P + o_i - o_k.
                for (std::size_t k = 0; k < 3; ++k) {
                    if (k == i) continue;
                    const Shift step{o[i].dm - o[k].dm, o[i].dn - o[k].dn};
                    h.add_arm(m, n, hex_index(step), q[i] * f.at(m + step.dm, n + step.dn)[k]);
                }
            }
        }
    }
    return h;
}

/// Max-norm distance between two operators on the same window.
inline double operator_distance(const EquilateralOperator& x, const EquilateralOperator& y) {
    return std::max({max_abs_difference(x.a, y.a), max_abs_difference(x.b, y.b), max_abs_difference(x.c, y.c),
                     max_abs_difference(x.d, y.d)});
}

inline double factorization_residual(const EquilateralOperator& l, const EquilateralFactor& f) {
    return operator_distance(expand_qtq(f, f.potential).to_operator(), l);
}

/// f L f for a positive vertex function f.
inline EquilateralOperator conjugate(const EquilateralOperator& l, const LatticeField& f) {
    const int r = l.rows();
    const int c = l.cols();
    return {LatticeField::generate(r, c, [&](int m, int n) { return f(m, n) * f(m, n) * l.a(m, n); }),
            LatticeField::generate(r, c, [&](int m, int n) { return f(m, n) * f(m - 1, n) * l.b(m, n); }),
            LatticeField::generate(r, c, [&](int m, int n) { return f(m, n) * f(m, n - 1) * l.c(m, n); }),
            LatticeField::generate(r, c, [&](int m, int n) { return f(m, n) * f(m + 1, n - 1) * l.d(m, n); })};
}

struct EquilateralLaplace {
    EquilateralOperator result;  ///< Q_j Q_j^+ + level
    EquilateralFactor factor;    ///< Q_j of the gauged operator f L f
    LatticeField gauge;          ///< f
    int iterations = 0;
};

struct GaugeSearch {
    double damping = 0.5;
    int budget = 10000;
    double tol = 1e-13;
};

/// Gauge L -> f L f so that W_j becomes the constant `level` (0 or 1), then
/// return Q_j Q_j^+ + level. Under the gauge W_j -> f^2 W_j, so level 1 needs
/// W_j > 0 and level 0 needs W_j = 0 already.
inline EquilateralLaplace equilateral_laplace(const EquilateralOperator& l, int j, int level,
                                              const GaugeSearch& opts = {}) {
    if (level != 0 && level != 1) {
        throw Error(ErrorCode::InvalidInput, "level must be 0 or 1");
    }
    EquilateralFactor f = equilateral_factorize(l, j);
    const int r = l.rows();
    const int c = l.cols();
    LatticeField gauge(r, c, 1.0);
    int iterations = 0;
    if (level == 0) {
        if (f.potential.max_abs() > 1e-10 * std::max(1.0, l.a.max_abs())) {
            throw Error(ErrorCode::GaugeNotFound, "no positive gauge brings W_j to 0 unless it already vanishes");
        }
    } else {
        LatticeField log_f(r, c, 0.0);
        bool converged = false;
        for (; iterations < opts.budget; ++iterations) {
            double worst = 0.0;
            for (int m = 0; m < r; ++m) {
                for (int n = 0; n < c; ++n) {
                    const double w = f.potential(m, n);
                    if (!(w > 0.0)) {
                        throw Error(ErrorCode::GaugeNotFound, "W_j is not positive; level 1 is unreachable");
                    }
                    const double res = std::log(w);
                    worst = std::max(worst, std::abs(res));
                    log_f.set(m, n, log_f(m, n) - opts.damping * res / 2.0);
                }
            }
            if (worst <= opts.tol) {
                converged = true;
                break;
            }
            gauge = LatticeField::generate(r, c, [&](int m, int n) { return std::exp(log_f(m, n)); });
            f = equilateral_factorize(conjugate(l, gauge), j);
        }
        if (!converged) {
            throw Error(ErrorCode::GaugeNotFound, "gauge iteration did not converge");
        }
    }
    EquilateralOperator out = expand_qqt(f, static_cast<double>(level)).to_operator();
    out.check();
    return {std::move(out), std::move(f), std::move(gauge), iterations};
}

/// The same operator on torus_grid(rows, cols); up triangles are black.
inline SelfAdjointOperator to_self_adjoint(const EquilateralOperator& l) {
    l.check();
    auto complex = std::make_shared<const Complex2D>(torus_grid(l.rows(), l.cols()));
    SelfAdjointOperator out;
    out.offdiag.assign(static_cast<std::size_t>(complex->edge_count()), 0.0);
    out.potential.assign(static_cast<std::size_t>(complex->vertex_count()), 0.0);
    for (int m = 0; m < l.rows(); ++m) {
        for (int n = 0; n < l.cols(); ++n) {
            const int up = 2 * (m * l.cols() + n);
            out.potential[static_cast<std::size_t>(m * l.cols() + n)] = l.a(m, n);
            out.offdiag[static_cast<std::size_t>(complex->edge_of(up, 0))] = l.b(m + 1, n);
            out.offdiag[static_cast<std::size_t>(complex->edge_of(up, 1))] = l.d(m, n + 1);
            out.offdiag[static_cast<std::size_t>(complex->edge_of(up, 2))] = l.c(m, n + 1);
        }
    }
    out.complex = std::move(complex);
    return out;
}

namespace detail {

// Triangle id on torus_grid and the local index of each anchored corner.
inline std::pair<int, std::array<int, 3>> torus_triangle(int rows, int cols, int m, int n,
                                                         const std::array<Shift, 3>& o) {
    auto wrap = [](int i, int k) { return ((i % k) + k) % k; };
    static constexpr std::array<std::array<Shift, 3>, 2> shapes{{{{{0, 0}, {1, 0}, {0, 1}}},   // up
                                                                 {{{1, 0}, {1, 1}, {0, 1}}}}}; // down
    for (int kind = 0; kind < 2; ++kind) {
        const auto& shape = shapes[static_cast<std::size_t>(kind)];
        // Corner 0 of the anchored triangle sits at some corner s0 of the shape.
        for (std::size_t s0 = 0; s0 < 3; ++s0) {
            const Shift base{o[0].dm - shape[s0].dm, o[0].dn - shape[s0].dn};
            std::array<int, 3> local{-1, -1, -1};
            bool ok = true;
            for (std::size_t i = 0; i < 3 && ok; ++i) {
                const Shift rel{o[i].dm - base.dm, o[i].dn - base.dn};
                ok = false;
                for (std::size_t s = 0; s < 3; ++s) {
                    if (shape[s] == rel) {
                        local[i] = static_cast<int>(s);
                        ok = true;
                    }
                }
            }
            if (ok) {
                const int vid = wrap(m + base.dm, rows) * cols + wrap(n + base.dn, cols);
                return {2 * vid + kind, local};
            }
        }
    }
    throw Error(ErrorCode::InvalidInput, "offsets do not span a lattice triangle");
}

} // namespace detail

/// Coefficients of Q_j placed on the triangles of torus_grid(rows, cols).
inline TriangleOperator to_triangle_operator(const EquilateralFactor& f) {
    const int r = f.u.rows();
    const int c = f.u.cols();
    TriangleOperator q;
    q.color = f.j % 2 == 0 ? Color::black : Color::white;
    q.coeffs.assign(static_cast<std::size_t>(2 * r * c), {0.0, 0.0, 0.0});
    const auto o = f.offsets();
    for (int m = 0; m < r; ++m) {
        for (int n = 0; n < c; ++n) {
            const auto [t, local] = detail::torus_triangle(r, c, m, n, o);
            const auto vals = f.at(m, n);
            for (std::size_t i = 0; i < 3; ++i) {
                q.coeffs[static_cast<std::size_t>(t)][static_cast<std::size_t>(local[i])] = vals[i];
            }
        }
    }
    return q;
}

/// Connection {Q^w, Q^b} built from the pair (Q_j, Q_{j+3}).
inline Connection direction_connection(const EquilateralOperator& l, int j) {
    const auto qa = to_triangle_operator(equilateral_factorize(l, j));
    const auto qb = to_triangle_operator(equilateral_factorize(l, (j + 3) % 6));
    auto complex = std::make_shared<const Complex2D>(torus_grid(l.rows(), l.cols()));
    return qa.color == Color::black ? combined_connection(std::move(complex), qa, qb)
                                    : combined_connection(std::move(complex), qb, qa);
}

} // namespace dsl2
