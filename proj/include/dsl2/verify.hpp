#pragma once

#include "dsl2/connection.hpp"
#include "dsl2/electric.hpp"
#include "dsl2/equilateral.hpp"
#include "dsl2/face_balance.hpp"
#include "dsl2/laplace_toda.hpp"
#include "dsl2/schrodinger.hpp"
#include "dsl2/trivalent.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace dsl2::verify {

using json = nlohmann::json;

/// One row of the property report. `value` is the worst observed error,
/// `pass` requires value < tol plus any boolean condition in `details`.
struct Criterion {
    int id = 0;
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
    json details = json::object();
};

namespace detail {

inline std::shared_ptr<const Complex2D> share(Complex2D c) { return std::make_shared<const Complex2D>(std::move(c)); }

inline double rel(double a, double b) { return std::abs(a / b - 1.0); }

inline std::vector<std::shared_ptr<const Complex2D>> closed_surfaces() {
    return {share(octahedron()), share(icosahedron()), share(torus_grid(3, 4)), share(torus_grid(6, 6)),
            share(genus_two())};
}

inline void finish(Criterion& c, bool extra = true) { c.pass = extra && c.value < c.tol; }

} // namespace detail

// 1. Edge-weight connections are SL2; weights come back from the connection.
inline Criterion edge_weights_are_sl2(Rng& rng) {
    Criterion c{1, "edge weights give SL2 connections", 0.0, 1e-10};
    int verdicts = 0;
    double det = 0.0;
    double mu = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 3 + trial % 10; // tori 3x3 .. 12x12, every tenth an octahedron
        const auto cx = trial % 10 == 9 ? detail::share(octahedron()) : detail::share(torus_grid(k, k));
        const auto a = random_edge_weights(*cx, rng);
        const auto conn = build_from_edge_weights(cx, a);
        const auto rep = is_sl2(conn);
        verdicts += rep.sl2_pm();
        det = std::max(det, rep.max_det_deviation);
        const auto back = build_from_edge_weights(cx, reconstruct_edge_weights(conn, 0, a.values[0]));
        for (int t = 0; t < cx->triangle_count(); ++t) {
            for (int s = 0; s < 3; ++s) {
                const int p = cx->vertex_at(t, s);
                const int q = cx->vertex_at(t, s + 1);
                mu = std::max(mu, detail::rel(mu_ratio(back, t, p, q), mu_ratio(conn, t, p, q)));
            }
        }
    }
    c.value = std::max(det, mu);
    c.details = {{"instances", 100}, {"sl2_verdicts", verdicts}, {"max_det_deviation", det},
                 {"max_mu_ratio_error", mu}};
    detail::finish(c, verdicts == 100);
    return c;
}

// 2. prod_T rho(T) = 1 on closed surfaces.
inline Criterion rho_cocycle(Rng& rng) {
    Criterion c{2, "rho cocycle product is 1", 0.0, 1e-10};
    int n = 0;
    for (const auto& cx : detail::closed_surfaces()) {
        for (int trial = 0; trial < 20; ++trial, ++n) {
            const auto conn = Connection::random(cx, rng);
            double log_prod = 0.0;
            for (int t = 0; t < cx->triangle_count(); ++t) log_prod += std::log(rho_triangle(conn, t));
            c.value = std::max(c.value, std::abs(std::exp(log_prod) - 1.0));
        }
    }
    c.details = {{"connections", n}};
    detail::finish(c);
    return c;
}

// 3. mu_P from the matrix holonomy equals the rho product.
inline Criterion lemma_one(Rng& rng) {
    Criterion c{3, "curvature mu equals rho product", 0.0, 1e-10};
    const auto surfaces = detail::closed_surfaces();
    int vertices = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& cx = surfaces[static_cast<std::size_t>(trial) % surfaces.size()];
        const auto conn = Connection::random(cx, rng);
        for (int p = 0; p < cx->vertex_count(); ++p, ++vertices) {
            const auto k = vertex_curvature(conn, p);
            c.value = std::max(c.value, detail::rel(k.mu_matrix, k.mu_lemma));
        }
    }
    c.details = {{"connections", 100}, {"vertices", vertices}};
    detail::finish(c);
    return c;
}

// 4. Black/white factorization of a self-adjoint operator gives an SL2 connection.
inline Criterion operator_connection_sl2(Rng& rng) {
    Criterion c{4, "black-white connection is SL2", 0.0, 1e-10};
    const std::vector<std::shared_ptr<const Complex2D>> cxs{detail::share(octahedron()), detail::share(torus_grid(4, 4)),
                                                            detail::share(torus_grid(6, 4))};
    int sl2 = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& cx = cxs[static_cast<std::size_t>(trial) % cxs.size()];
        const auto l = random_operator(cx, rng);
        const auto f = factorize_bw(l);
        const auto rep = is_sl2(combined_connection(cx, f.black, f.white));
        sl2 += rep.verdict == Sl2Verdict::sl2;
        c.value = std::max({c.value, rep.max_det_deviation, rep.max_mu_deviation});
    }
    c.details = {{"operators", 100}, {"sl2_verdicts", sl2}};
    detail::finish(c, sl2 == 100);
    return c;
}

// 5. All six equilateral factorizations give the same mu ratios.
inline Criterion six_directions(Rng& rng) {
    Criterion c{5, "six directions agree", 0.0, 1e-12};
    for (int trial = 0; trial < 5; ++trial) {
        const auto l = EquilateralOperator::random(8, 8, rng);
        const auto ref = direction_connection(l, 0);
        const auto& cx = ref.complex();
        const auto sa = to_self_adjoint(l);
        const auto bw = factorize_bw(sa);
        std::vector<Connection> others{combined_connection(sa.complex, bw.black, bw.white)};
        for (int j = 1; j < 6; ++j) others.push_back(direction_connection(l, j));
        for (const auto& conn : others) {
            for (int t = 0; t < cx.triangle_count(); ++t) {
                for (int s = 0; s < 3; ++s) {
                    const int p = cx.vertex_at(t, s);
                    const int q = cx.vertex_at(t, s + 1);
                    c.value = std::max(c.value, detail::rel(mu_ratio(conn, t, p, q), mu_ratio(ref, t, p, q)));
                }
            }
        }
    }
    c.details = {{"operators", 5}, {"size", "8x8"}, {"compared_with", "directions 1..5 and the general black-white factorization"}};
    detail::finish(c);
    return c;
}

// 6. Laplace chains satisfy the Toda equation; both update paths agree.
inline Criterion toda_chain(Rng& rng) {
    Criterion c{6, "Laplace chain solves discrete Toda", 0.0, 1e-10};
    double chain = 0.0;
    double commute = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        const auto h0 = near_constant_operator(8, 8, rng, 0.01);
        chain = std::max(chain, max_toda_residual(evolve_chain(h0, 4)));
        const auto inv = laplace_invariant_update(curvature_H(h0), h0.w);
        const auto next = laplace_transform_square(h0);
        commute = std::max({commute, max_abs_difference(inv.w, next.w), max_abs_difference(inv.H, curvature_H(next))});
    }
    c.value = std::max(chain, commute);
    c.details = {{"seeds", 20}, {"steps", 4}, {"max_chain_residual", chain}, {"max_commute_error", commute}};
    detail::finish(c);
    return c;
}

// 7. Hirota forms.
inline Criterion hirota(Rng& rng) {
    Criterion c{7, "Hirota forms", 0.0, 1e-12};
    double kappa = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = evolve_chain(near_constant_operator(8, 8, rng, 0.1), 4);
        for (int k = 1; k < s.k1(); ++k) {
            kappa = std::max(kappa, max_abs_difference(toda_kappa_residual(s, k, 1.0), toda_residual(s, k)));
        }
    }
    TodaStack ones{0, {LatticeField(4, 4, 1.0), LatticeField(4, 4, 1.0), LatticeField(4, 4, 1.0)}};
    TodaStack power;
    for (int k = 0; k < 4; ++k) power.layers.emplace_back(4, 4, std::pow(1.5, k));
    const double nulls = std::max(max_abs(hirota_residual(ones, 1.0, 2.0, -3.0)),
                                  max_abs(hirota_residual(power, 1.0, 2.0, -3.0)));
    c.value = kappa;
    c.details = {{"kappa_one_difference", kappa}, {"null_case_residual", nulls}, {"null_tol", 1e-14}};
    detail::finish(c, nulls <= 1e-14);
    return c;
}

// 8. Cyclic period-2 reduction.
inline Criterion cyclic2(Rng& rng) {
    Criterion c{8, "period-2 reduction", 0.0, 1e-12};
    const LatticeField one(4, 4, 1.0, Boundary::fixed);
    const auto trivial = cyclic2_residual(one, one);
    const double trivial_res = std::max(trivial.g.max_abs(), trivial.system.max_abs());
    double chain = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const double C = rng.positive(0.5, 2.0);
        std::vector<double> row;
        std::vector<double> col;
        for (int i = 0; i < 6; ++i) row.push_back(std::sqrt(C) * (1.0 + 0.01 * rng.uniform(-1.0, 1.0)));
        for (int i = 0; i < 6; ++i) col.push_back(std::sqrt(C) * (1.0 + 0.01 * rng.uniform(-1.0, 1.0)));
        col[0] = row[0];
        const auto s = cyclic2_stack(C, row, col, 6);
        c.value = std::max(c.value, cyclic2_residual(s.layer(0), s.layer(1)).g.max_abs());
        chain = std::max(chain, max_toda_residual(s));
    }
    c.details = {{"trivial_residual", trivial_res}, {"trivial_tol", 1e-14}, {"stack_toda_residual", chain}};
    detail::finish(c, trivial_res <= 1e-14 && chain < 1e-10);
    return c;
}

// 9. Trivalent tree factorization.
inline Criterion trivalent(Rng& rng) {
    Criterion c{9, "trivalent tree factorization", 0.0, 1e-12};
    const auto t = trivalent_tree(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto q = random_first_order(t, rng);
        std::vector<double> u;
        for (int p = 0; p < t.vertex_count(); ++p) u.push_back(rng.uniform(-2.0, 2.0));
        PairMap leaves;
        for (int p = 0; p < t.vertex_count(); ++p) {
            if (t.leaf(p)) leaves[{p, t.neighbors(p)[0]}] = q.dd(p, t.neighbors(p)[0]);
        }
        const auto f = trivalent_factorize(assemble_trivalent(q, u), q.v[0], 0, leaves);
        for (const auto& [k, d] : q.d) c.value = std::max(c.value, std::abs(f.q.d.at(k) - d));
        for (std::size_t p = 0; p < u.size(); ++p) {
            c.value = std::max({c.value, std::abs(f.q.v[p] - q.v[p]), std::abs(f.u[p] - u[p])});
        }
    }
    const auto l = assemble_trivalent(random_first_order(t, rng), std::vector<double>(22, 1.0));
    const auto f1 = trivalent_factorize(l, 1.0);
    const auto f2 = trivalent_factorize(l, 2.0);
    double spread = 0.0;
    for (std::size_t p = 0; p < f1.q.v.size(); ++p) spread = std::max(spread, std::abs(f1.q.v[p] - f2.q.v[p]));
    c.value = std::max({c.value, f1.residual, f2.residual});
    c.details = {{"round_trips", 10}, {"family_residuals", {f1.residual, f2.residual}}, {"family_v_spread", spread}};
    detail::finish(c, spread > 0.5);
    return c;
}

// 10. Face balance agrees with the SL2 verdict.
inline Criterion face_balance(Rng& rng) {
    Criterion c{10, "face balance matches SL2 verdict", 0.0, 0.5};
    const auto cx = detail::share(torus_grid(4, 4));
    int agree = 0;
    int balanced = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Connection conn = Connection::random(cx, rng);
        if (trial % 3 == 1) {
            conn = build_from_edge_weights(cx, random_edge_weights(*cx, rng));
        } else if (trial % 3 == 2) {
            const auto base = build_from_edge_weights(cx, random_edge_weights(*cx, rng));
            auto values = loop_invariants(base);
            values[0] *= rng.positive(1.2, 2.0);
            conn = reconstruct_connection_from_invariants(cx, extract_rho(base), values).connection;
        }
        const bool found = sl_n_face_balance(conn).has_value();
        balanced += found;
        agree += found == is_sl2(conn).sl2_pm();
    }
    bool canonical = true;
    for (int n : {2, 3}) {
        const auto f = sl_n_face_balance(ConnectionN::canonical(ComplexN::simplex_boundary(n)));
        canonical = canonical && f && std::all_of(f->begin(), f->end(), [](double x) { return x == 1.0; });
    }
    const auto f2 = sl_n_face_balance(Connection::canonical(cx));
    canonical = canonical && f2 && std::all_of(f2->begin(), f2->end(), [](double x) { return x == 1.0; });
    c.value = 100 - agree;
    c.details = {{"connections", 100}, {"agreements", agree}, {"balanced", balanced}, {"canonical_ones", canonical}};
    detail::finish(c, canonical && agree == 100);
    return c;
}

// 11. Star-triangle factorization of electric networks.
inline Criterion network_factorization(Rng& rng) {
    Criterion c{11, "black triangle factorization", 0.0, 1e-12};
    double ident = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto net = trial % 2 ? octahedron_network(rng) : network_from_complex(torus_grid(4, 4), rng);
        const auto f = black_factorization(net);
        ident = std::max(ident, f.triangle_identity);
        c.value = std::max({c.value, f.residual, f.triangle_identity});
    }
    const auto a = star_triangle_single(1, 1, 1);
    const auto b = star_triangle_single(1, 2, 3);
    const bool exact = a == std::array<double, 3>{3, 3, 3} && b[0] == 11.0 && b[1] == 5.5 && b[2] == 11.0 / 3.0;
    c.details = {{"networks", 100}, {"max_triangle_identity", ident}, {"hand_values_exact", exact}};
    detail::finish(c, exact);
    return c;
}

// 12. Kernel vectors transport through the star-triangle Laplace image.
inline Criterion network_kernel(Rng& rng) {
    Criterion c{12, "kernel transport to triangles", 0.0, 1e-10};
    int inverse = 0;
    double other = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = octahedron_network(rng);
        Eigen::VectorXd bd = Eigen::VectorXd::Zero(6);
        for (int p : {1, 3, 5}) bd(p) = rng.uniform(-1.0, 1.0);
        const std::vector<int> free{0, 2, 4};
        const auto img = laplace_image(net, dirichlet_solve(net, free, bd), free);
        inverse += img.normalization == UPrimeNormalization::c_prime_inverse_q_u;
        c.value = std::max(c.value, img.kernel_residual);
        other = std::max(other, img.residual_c_prime);
    }
    c.details = {{"networks", 20},
                 {"u_prime", inverse == 20 ? to_string(UPrimeNormalization::c_prime_inverse_q_u)
                                           : inverse == 0 ? to_string(UPrimeNormalization::c_prime_q_u) : "mixed"},
                 {"rejected_candidate_residual", other}};
    detail::finish(c, inverse == 20 || inverse == 0);
    return c;
}

/// Criteria 1..12, each on its own generator seeded from `seed`.
inline std::vector<Criterion> run_all(std::uint64_t seed) {
    const std::vector<std::function<Criterion(Rng&)>> all{
        edge_weights_are_sl2, rho_cocycle, lemma_one, operator_connection_sl2, six_directions, toda_chain,
        hirota, cyclic2, trivalent, face_balance, network_factorization, network_kernel};
    std::vector<Criterion> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        Rng rng(seed * 1000 + i + 1);
        try {
            out.push_back(all[i](rng));
        } catch (const Error& e) {
            Criterion c{static_cast<int>(i) + 1, "error", 0.0, 0.0, false, {{"error", e.what()}}};
            out.push_back(std::move(c));
        }
    }
    return out;
}

inline json report(std::uint64_t seed, const std::vector<Criterion>& results) {
    json j;
    j["seed"] = seed;
    j["criteria"] = json::array();
    bool all = true;
    for (const auto& c : results) {
        all = all && c.pass;
        j["criteria"].push_back(
            {{"id", c.id}, {"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}, {"details", c.details}});
    }
    j["all_pass"] = all;
    return j;
}

} // namespace dsl2::verify
