#pragma once

#include "dsl2/error.hpp"
#include "dsl2/lattice_field.hpp"
#include "dsl2/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace dsl2 {

// Square lattice, shifts T1 = (m+1, n), T2 = (n+1). Subscripts as usual:
// f1 = f(m+1,n), f2 = f(m,n+1), f12 = f(m+1,n+1).
//
// Coefficients multiply at the point they are written:
//   ((1 + u T1)(1 + v T2) + w) psi = psi + u psi1 + v psi2 + u v1 psi12 + w psi.
// With this placement u' = f'u/w, v' = f'v/w2 and u'v'1 = f'v u2/w2 hold
// together. Row coefficients (a, b, c, d) are stored the same way:
//   L psi = a psi + b psi1 + c psi2 + d psi12,
// so our b(m,n) is the coefficient written b(m+1,n) T1 in the paper.

struct HyperbolicOperator {
    LatticeField u;
    LatticeField v;
    LatticeField w;

    static HyperbolicOperator constant(int rows, int cols, double u0, double v0, double w0,
                                       Boundary boundary = Boundary::periodic) {
        return {LatticeField(rows, cols, u0, boundary), LatticeField(rows, cols, v0, boundary),
                LatticeField(rows, cols, w0, boundary)};
    }
};

struct RowCoefficients {
    LatticeField a;
    LatticeField b;
    LatticeField c;
    LatticeField d;
};

/// (1 + u T1)(1 + v T2) + w written as a + b T1 + c T2 + d T1T2.
inline RowCoefficients expand(const HyperbolicOperator& h) {
    const int r = h.u.rows();
    const int c = h.u.cols();
    const Boundary bd = h.u.boundary();
    auto gen = [&](auto f) { return LatticeField::generate(r, c, f, bd); };
    return {gen([&](int m, int n) { return 1.0 + h.w(m, n); }), h.u, h.v,
            gen([&](int m, int n) { return h.u.stencil_valid(m, n, 0, 1, 0, 0) ? h.u(m, n) * h.v(m + 1, n) : 0.0; })};
}

/// (L psi)(m,n) from row coefficients; periodic windows only.
inline LatticeField apply_rows(const RowCoefficients& l, const LatticeField& psi) {
    return LatticeField::generate(psi.rows(), psi.cols(), [&](int m, int n) {
        return l.a(m, n) * psi(m, n) + l.b(m, n) * psi(m + 1, n) + l.c(m, n) * psi(m, n + 1) +
               l.d(m, n) * psi(m + 1, n + 1);
    });
}

/// Left form (1 + v T2)(1 + u T1) + w_L expanded: the T1T2 term is v u2.
inline RowCoefficients expand_left(const HyperbolicOperator& h) {
    const int r = h.u.rows();
    const int c = h.u.cols();
    return {LatticeField::generate(r, c, [&](int m, int n) { return 1.0 + h.w(m, n); }), h.u, h.v,
            LatticeField::generate(r, c, [&](int m, int n) { return h.v(m, n) * h.u(m, n + 1); })};
}

inline RowCoefficients scale_rows(const RowCoefficients& l, const LatticeField& f) {
    auto mul = [&](const LatticeField& x) { return pointwise(x, f, [](double p, double q) { return p * q; }); };
    return {mul(l.a), mul(l.b), mul(l.c), mul(l.d)};
}

inline double row_distance(const RowCoefficients& x, const RowCoefficients& y) {
    return std::max({max_abs_difference(x.a, y.a), max_abs_difference(x.b, y.b), max_abs_difference(x.c, y.c),
                     max_abs_difference(x.d, y.d)});
}

struct HyperbolicFactorization {
    HyperbolicOperator right; ///< L = f[(1 + u T1)(1 + v T2) + w]
    LatticeField f;
    HyperbolicOperator left;  ///< L = g[(1 + v T2)(1 + u T1) + w_L]
    LatticeField g;
};

/// Right and left monic forms of a + b T1 + c T2 + d T1T2 (periodic).
inline HyperbolicFactorization hyperbolic_factorize(const RowCoefficients& l) {
    const int r = l.a.rows();
    const int c = l.a.cols();
    for (const LatticeField* x : {&l.b, &l.c, &l.d}) {
        for (int m = 0; m < r; ++m) {
            for (int n = 0; n < c; ++n) {
                if ((*x)(m, n) == 0.0) {
                    throw Error(ErrorCode::DegenerateCoefficient,
                                "zero coefficient at (" + std::to_string(m) + "," + std::to_string(n) + ")");
                }
            }
        }
    }
    // f u = b, f v = c, f u v1 = d  =>  f1 = b c1 / d.
    const LatticeField f = LatticeField::generate(r, c, [&](int m, int n) {
        return l.b(m - 1, n) * l.c(m, n) / l.d(m - 1, n);
    });
    // g u = b, g v = c, g v u2 = d  =>  g2 = c b2 / d.
    const LatticeField g = LatticeField::generate(r, c, [&](int m, int n) {
        return l.c(m, n - 1) * l.b(m, n) / l.d(m, n - 1);
    });
    auto monic = [&](const LatticeField& s) {
        return HyperbolicOperator{
            LatticeField::generate(r, c, [&](int m, int n) { return l.b(m, n) / s(m, n); }),
            LatticeField::generate(r, c, [&](int m, int n) { return l.c(m, n) / s(m, n); }),
            LatticeField::generate(r, c, [&](int m, int n) { return l.a(m, n) / s(m, n) - 1.0; })};
    };
    return {monic(f), f, monic(g), g};
}

/// Curvature H = v u2 / (u v1).
inline LatticeField curvature_H(const HyperbolicOperator& h) {
    return LatticeField::generate(
        h.u.rows(), h.u.cols(),
        [&](int m, int n) { return h.v(m, n) * h.u(m, n + 1) / (h.u(m, n) * h.v(m + 1, n)); }, h.u.boundary());
}

struct Invariants {
    LatticeField H;
    LatticeField w;
};

inline Invariants invariants_Hw(const HyperbolicOperator& h) { return {curvature_H(h), h.w}; }

/// f^{-1} L f; keeps the monic form, changes u and v, leaves w and H.
inline HyperbolicOperator gauge_conjugate(const HyperbolicOperator& h, const LatticeField& f) {
    const int r = h.u.rows();
    const int c = h.u.cols();
    return {LatticeField::generate(r, c, [&](int m, int n) { return h.u(m, n) * f(m + 1, n) / f(m, n); }),
            LatticeField::generate(r, c, [&](int m, int n) { return h.v(m, n) * f(m, n + 1) / f(m, n); }), h.w};
}

namespace detail {

// 1 + w'_1 = (1 + w_1) w w_12 / (w_1 w_2) H, stored back at (m+1, n).
inline LatticeField next_w(const LatticeField& H, const LatticeField& w) {
    const int r = w.rows();
    const int c = w.cols();
    LatticeField out(r, c, 0.0);
    for (int m = 0; m < r; ++m) {
        for (int n = 0; n < c; ++n) {
            const double den = w(m + 1, n) * w(m, n + 1);
            if (den == 0.0) {
                throw Error(ErrorCode::SingularDenominator,
                            "w vanishes next to (" + std::to_string(m) + "," + std::to_string(n) + ")");
            }
            out.set(m + 1, n, (1.0 + w(m + 1, n)) * w(m, n) * w(m + 1, n + 1) / den * H(m, n) - 1.0);
        }
    }
    return out;
}

} // namespace detail

/// (H, w) -> (H', w'): w' from the shifted formula, H' = (1 + w'_2)/(1 + w_2).
inline Invariants laplace_invariant_update(const LatticeField& H, const LatticeField& w) {
    LatticeField wp = detail::next_w(H, w);
    LatticeField hp = LatticeField::generate(w.rows(), w.cols(), [&](int m, int n) {
        const double den = 1.0 + w(m, n + 1);
        if (den == 0.0) {
            throw Error(ErrorCode::SingularDenominator, "1 + w vanishes");
        }
        return (1.0 + wp(m, n + 1)) / den;
    });
    return {std::move(hp), std::move(wp)};
}

/// Unshifted placement: 1 + w' = (1 + w) w_{m-1,n} w_{m,n+1} / (w w_{m-1,n+1}) H_{m-1,n}.
inline LatticeField next_w_unshifted(const LatticeField& H, const LatticeField& w) {
    return LatticeField::generate(w.rows(), w.cols(), [&](int m, int n) {
        return (1.0 + w(m, n)) * w(m - 1, n) * w(m, n + 1) / (w(m, n) * w(m - 1, n + 1)) * H(m - 1, n) - 1.0;
    });
}

/// L~ = f'[(1 + v T2) w^{-1} (1 + u T1) + 1] brought back to monic form,
/// with f' = (1 + w') w / (1 + w).
inline HyperbolicOperator laplace_transform_square(const HyperbolicOperator& h) {
    const int r = h.w.rows();
    const int c = h.w.cols();
    for (int m = 0; m < r; ++m) {
        for (int n = 0; n < c; ++n) {
            const std::string at = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
            if (h.w(m, n) == 0.0) throw Error(ErrorCode::ZeroPotential, "w = 0 at " + at);
            if (1.0 + h.w(m, n) == 0.0) throw Error(ErrorCode::SingularGauge, "1 + w = 0 at " + at);
            if (h.u(m, n) == 0.0 || h.v(m, n) == 0.0) throw Error(ErrorCode::DegenerateCoefficient, "u or v = 0 at " + at);
        }
    }
    const LatticeField wp = detail::next_w(curvature_H(h), h.w);
    const LatticeField fp = LatticeField::generate(r, c, [&](int m, int n) {
        return (1.0 + wp(m, n)) * h.w(m, n) / (1.0 + h.w(m, n));
    });
    return {LatticeField::generate(r, c, [&](int m, int n) { return fp(m, n) * h.u(m, n) / h.w(m, n); }),
            LatticeField::generate(r, c, [&](int m, int n) { return fp(m, n) * h.v(m, n) / h.w(m, n + 1); }), wp};
}

/// The gauge factor f' of the transform.
inline LatticeField laplace_gauge_factor(const HyperbolicOperator& h, const HyperbolicOperator& next) {
    return LatticeField::generate(h.w.rows(), h.w.cols(), [&](int m, int n) {
        return (1.0 + next.w(m, n)) * h.w(m, n) / (1.0 + h.w(m, n));
    });
}

/// Layers w^k for k = k0, k0 + 1, ...
struct TodaStack {
    int k0 = 0;
    std::vector<LatticeField> layers;

    [[nodiscard]] int k1() const noexcept { return k0 + static_cast<int>(layers.size()) - 1; }
    [[nodiscard]] bool has(int k) const noexcept { return k >= k0 && k <= k1(); }
    [[nodiscard]] const LatticeField& layer(int k) const {
        if (!has(k)) {
            throw Error(ErrorCode::MissingLayer, "layer " + std::to_string(k) + " not in stack");
        }
        return layers[static_cast<std::size_t>(k - k0)];
    }
};

/// Cross-multiplied chain equation at layer k; 0 where the stencil leaves a fixed window.
inline LatticeField toda_residual(const TodaStack& s, int k) {
    const LatticeField& lo = s.layer(k - 1);
    const LatticeField& w = s.layer(k);
    const LatticeField& hi = s.layer(k + 1);
    return LatticeField::generate(
        w.rows(), w.cols(),
        [&](int m, int n) {
            if (!w.stencil_valid(m, n, 0, 1, 0, 1)) return 0.0;
            return (hi(m + 1, n) + 1.0) * (lo(m, n + 1) + 1.0) * w(m + 1, n) * w(m, n + 1) -
                   (w(m + 1, n) + 1.0) * (w(m, n + 1) + 1.0) * w(m, n) * w(m + 1, n + 1);
        },
        w.boundary());
}

/// Largest |toda_residual| over all interior layers.
inline double max_toda_residual(const TodaStack& s) {
    double worst = 0.0;
    for (int k = s.k0 + 1; k < s.k1(); ++k) worst = std::max(worst, toda_residual(s, k).max_abs());
    return worst;
}

/// Iterates the Laplace transform; layer k is the potential of L_k.
inline TodaStack evolve_chain(const HyperbolicOperator& h0, int steps, std::vector<HyperbolicOperator>* ops = nullptr) {
    if (steps < 0) {
        throw Error(ErrorCode::InvalidInput, "steps must be non-negative");
    }
    TodaStack s;
    s.layers.push_back(h0.w);
    HyperbolicOperator h = h0;
    if (ops) ops->push_back(h);
    for (int k = 0; k < steps; ++k) {
        try {
            h = laplace_transform_square(h);
        } catch (const Error& e) {
            throw StepError(e.code(), k, e.what());
        }
        s.layers.push_back(h.w);
        if (ops) ops->push_back(h);
    }
    return s;
}

/// u, v, w with w = w0 (1 + eps x), x uniform in [-1, 1].
inline HyperbolicOperator near_constant_operator(int rows, int cols, Rng& rng, double eps = 0.01, double u0 = 1.0,
                                                 double v0 = 1.0, double w0 = 1.0) {
    auto jitter = [&](double base) {
        return LatticeField::generate(rows, cols, [&](int, int) { return base * (1.0 + eps * rng.uniform(-1.0, 1.0)); });
    };
    LatticeField u = jitter(u0);
    LatticeField v = jitter(v0);
    LatticeField w = jitter(w0);
    return {std::move(u), std::move(v), std::move(w)};
}

struct Cyclic2Residual {
    LatticeField g;      ///< G G12 - G1 G2, G = a b
    LatticeField system; ///< (C + b1)(C + b2) - b b12 (1 + b1)(1 + b2), C = G(0,0)
    double C = 0.0;
};

inline Cyclic2Residual cyclic2_residual(const LatticeField& a, const LatticeField& b) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCode::InvalidInput, "a and b must share a window");
    }
    const LatticeField G = pointwise(a, b, [](double x, double y) { return x * y; });
    const double C = G(0, 0);
    Cyclic2Residual out{LatticeField(a.rows(), a.cols(), 0.0, a.boundary()),
                        LatticeField(a.rows(), a.cols(), 0.0, a.boundary()), C};
    for (int m = 0; m < a.rows(); ++m) {
        for (int n = 0; n < a.cols(); ++n) {
            if (1.0 + b(m, n) == 0.0) {
                throw Error(ErrorCode::SingularDenominator, "1 + b vanishes");
            }
            if (!a.stencil_valid(m, n, 0, 1, 0, 1)) continue;
            out.g.set(m, n, G(m, n) * G(m + 1, n + 1) - G(m + 1, n) * G(m, n + 1));
            const double b1 = b(m + 1, n);
            const double b2 = b(m, n + 1);
            out.system.set(m, n, (C + b1) * (C + b2) - b(m, n) * b(m + 1, n + 1) * (1.0 + b1) * (1.0 + b2));
        }
    }
    return out;
}

/// Period-2 stack a, b, a, b, ... with a b = C, built on a fixed window from
/// b on the first row and column via b12 = (C + b1)(C + b2) / ((1 + b1)(1 + b2) b).
inline TodaStack cyclic2_stack(double C, const std::vector<double>& first_row, const std::vector<double>& first_col,
                               int layers) {
    const int r = static_cast<int>(first_col.size());
    const int c = static_cast<int>(first_row.size());
    if (r < 2 || c < 2 || first_row.front() != first_col.front()) {
        throw Error(ErrorCode::InvalidInput, "seed row and column must agree at the corner and have length >= 2");
    }
    LatticeField b(r, c, 0.0, Boundary::fixed);
    for (int n = 0; n < c; ++n) b.set(0, n, first_row[static_cast<std::size_t>(n)]);
    for (int m = 0; m < r; ++m) b.set(m, 0, first_col[static_cast<std::size_t>(m)]);
    for (int m = 0; m + 1 < r; ++m) {
        for (int n = 0; n + 1 < c; ++n) {
            const double b1 = b(m + 1, n);
            const double b2 = b(m, n + 1);
            const double den = (1.0 + b1) * (1.0 + b2) * b(m, n);
            if (den == 0.0) {
                throw Error(ErrorCode::SingularDenominator, "Goursat step hits a zero denominator");
            }
            b.set(m + 1, n + 1, (C + b1) * (C + b2) / den);
        }
    }
    const LatticeField a = LatticeField::generate(r, c, [&](int m, int n) { return C / b(m, n); }, Boundary::fixed);
    TodaStack s;
    for (int k = 0; k < layers; ++k) s.layers.push_back(k % 2 == 0 ? a : b);
    return s;
}

/// gamma F(k+1,m+1,n) F(k-1,m,n+1) + alpha F(k,m,n) F(k,m+1,n+1) + beta F(k,m+1,n) F(k,m,n+1)
/// for every interior layer k.
inline TodaStack hirota_residual(const TodaStack& F, double alpha, double beta, double gamma, double tol = 1e-14) {
    if (std::abs(alpha + beta + gamma) > tol * std::max({1.0, std::abs(alpha), std::abs(beta), std::abs(gamma)})) {
        throw Error(ErrorCode::CoefficientSumNonzero, "alpha + beta + gamma must vanish");
    }
    TodaStack out;
    out.k0 = F.k0 + 1;
    for (int k = F.k0 + 1; k < F.k1(); ++k) {
        const LatticeField& lo = F.layer(k - 1);
        const LatticeField& f = F.layer(k);
        const LatticeField& hi = F.layer(k + 1);
        out.layers.push_back(LatticeField::generate(
            f.rows(), f.cols(),
            [&](int m, int n) {
                if (!f.stencil_valid(m, n, 0, 1, 0, 1)) return 0.0;
                return gamma * hi(m + 1, n) * lo(m, n + 1) + alpha * f(m, n) * f(m + 1, n + 1) +
                       beta * f(m + 1, n) * f(m, n + 1);
            },
            f.boundary()));
    }
    return out;
}

/// With v = w + 1: v^{k+1}_1 v^{k-1}_2 (v_1 - kappa)(v_2 - kappa) - v_1 v_2 (v - kappa)(v_12 - kappa)
/// at layer k. kappa = 1 is exactly toda_residual.
inline LatticeField toda_kappa_residual(const TodaStack& s, int k, double kappa) {
    const LatticeField& lo = s.layer(k - 1);
    const LatticeField& w = s.layer(k);
    const LatticeField& hi = s.layer(k + 1);
    return LatticeField::generate(
        w.rows(), w.cols(),
        [&](int m, int n) {
            if (!w.stencil_valid(m, n, 0, 1, 0, 1)) return 0.0;
            const double v = w(m, n) + 1.0;
            const double v1 = w(m + 1, n) + 1.0;
            const double v2 = w(m, n + 1) + 1.0;
            const double v12 = w(m + 1, n + 1) + 1.0;
            return (hi(m + 1, n) + 1.0) * (lo(m, n + 1) + 1.0) * (v1 - kappa) * (v2 - kappa) -
                   v1 * v2 * (v - kappa) * (v12 - kappa);
        },
        w.boundary());
}

/// kappa-form residual for every interior layer.
inline TodaStack toda_to_hirota_form(const TodaStack& s, double kappa) {
    TodaStack out;
    out.k0 = s.k0 + 1;
    for (int k = s.k0 + 1; k < s.k1(); ++k) out.layers.push_back(toda_kappa_residual(s, k, kappa));
    return out;
}

inline double max_abs(const TodaStack& s) {
    double worst = 0.0;
    for (const auto& l : s.layers) worst = std::max(worst, l.max_abs());
    return worst;
}

} // namespace dsl2
