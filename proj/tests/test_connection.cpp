#include "dsl2/connection.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace dsl2;

namespace {

std::shared_ptr<const Complex2D> share(Complex2D c) { return std::make_shared<const Complex2D>(std::move(c)); }

std::vector<std::shared_ptr<const Complex2D>> closed_surfaces() {
    return {share(octahedron()), share(icosahedron()), share(torus_grid(2, 2)), share(torus_grid(3, 4)),
            share(torus_grid(6, 6)), share(genus_two())};
}

// Closed framed loops: the link of every interior vertex, read inside the star.
std::vector<FramedPath> link_loops(const Complex2D& c) {
    std::vector<FramedPath> out;
    for (int p = 0; p < c.vertex_count(); ++p) {
        if (c.is_boundary_vertex(p)) continue;
        out.push_back(left_boundary(c, vertex_star(c, p)));
    }
    return out;
}

GaugePair random_gauge(const Complex2D& c, Rng& rng) {
    GaugePair gp;
    for (int t = 0; t < c.triangle_count(); ++t) gp.g.push_back(rng.positive(0.25, 4.0));
    for (int p = 0; p < c.vertex_count(); ++p) gp.h.push_back(rng.positive(0.25, 4.0));
    return gp;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST(Connection, RejectsNonPositive) {
    auto c = share(octahedron());
    std::vector<std::array<double, 3>> u(8, {1.0, 1.0, 1.0});
    u[3][1] = 0.0;
    try {
        Connection bad(c, u);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveCoefficient);
    }
}

TEST(Connection, IdentityGauge) {
    Rng rng(1);
    auto c = share(torus_grid(3, 3));
    const auto conn = Connection::random(c, rng);
    GaugePair gp{std::vector<double>(18, 1.0), std::vector<double>(9, 1.0)};
    EXPECT_EQ(gauge_transform(conn, gp).coeffs(), conn.coeffs());
}

TEST(Connection, ConstantTriangleGauge) {
    auto c = share(octahedron());
    GaugePair gp{std::vector<double>(8, 2.0), std::vector<double>(6, 1.0)};
    const auto g = gauge_transform(Connection::canonical(c), gp);
    for (int t = 0; t < 8; ++t) {
        for (int i = 0; i < 3; ++i) EXPECT_EQ(g.u_local(t, i), 2.0);
        EXPECT_EQ(mu_ratio(g, t, c->vertex_at(t, 0), c->vertex_at(t, 1)), 1.0);
    }
}

TEST(Connection, GaugeInvarianceOfFramedHolonomy) {
    Rng rng(7);
    for (const auto& c : closed_surfaces()) {
        const auto conn = Connection::random(c, rng);
        const auto moved = gauge_transform(conn, random_gauge(*c, rng));
        auto loops = link_loops(*c);
        if (c->euler_characteristic() <= 0) {
            for (const auto& l : homology_generator_loops(*c)) loops.push_back(left_boundary(*c, l));
        }
        for (const auto& l : loops) {
            EXPECT_LT(rel(framed_holonomy(moved, l), framed_holonomy(conn, l)), 1e-12);
        }
        for (int t = 0; t < c->triangle_count(); ++t) {
            EXPECT_LT(rel(rho_triangle(moved, t), rho_triangle(conn, t)), 1e-12);
        }
    }
}

TEST(Connection, MuRatio) {
    auto c = share(octahedron());
    auto u = std::vector<std::array<double, 3>>(8, {1.0, 1.0, 1.0});
    u[0] = {2.0, 4.0, 5.0};  // triangle (0,2,4)
    const Connection conn(c, u);
    EXPECT_EQ(mu_ratio(conn, 0, 0, 2), 0.5);
    EXPECT_EQ(mu_ratio(conn, 2, 1, 3), 1.0);
    EXPECT_THROW(mu_ratio(conn, 0, 0, 1), Error);

    Rng rng(3);
    const auto r = Connection::random(c, rng);
    for (int t = 0; t < 8; ++t) {
        const auto& v = c->triangle(t);
        const double cyc = mu_ratio(r, t, v[0], v[1]) * mu_ratio(r, t, v[1], v[2]) * mu_ratio(r, t, v[2], v[0]);
        EXPECT_NEAR(cyc, 1.0, 1e-14);
        EXPECT_NEAR(mu_ratio(r, t, v[0], v[1]) * mu_ratio(r, t, v[1], v[0]), 1.0, 1e-15);
    }
}

TEST(Connection, RhoFromEdgeWeights) {
    Rng rng(11);
    auto c = share(torus_grid(4, 3));
    const auto conn = build_from_edge_weights(c, random_edge_weights(*c, rng));
    for (int e = 0; e < c->edge_count(); ++e) {
        const auto& edge = c->edge(e);
        // T is the triangle where a -> b is a positive side.
        const HalfEdge pos = c->vertex_at(edge.halves[0].tri, edge.halves[0].side) == edge.a ? edge.halves[0]
                                                                                             : edge.halves[1];
        const HalfEdge neg = pos.tri == edge.halves[0].tri && pos.side == edge.halves[0].side ? edge.halves[1]
                                                                                              : edge.halves[0];
        const double expected = std::pow(conn.u(pos.tri, edge.a) / conn.u(neg.tri, edge.a), 2);
        EXPECT_LT(rel(rho_edge(conn, e, edge.a, edge.b), expected), 1e-12);
    }
}

TEST(Connection, RhoAntisymmetry) {
    Rng rng(12);
    for (const auto& c : closed_surfaces()) {
        const auto conn = Connection::random(c, rng);
        for (int t = 0; t < c->triangle_count(); ++t) {
            for (int s = 0; s < 3; ++s) {
                const int p = c->vertex_at(t, s);
                const int q = c->vertex_at(t, s + 1);
                EXPECT_NEAR(rho(conn, t, p, q) * rho(conn, t, q, p), 1.0, 1e-12);
            }
        }
    }
}

TEST(Connection, RhoBoundaryEdge) {
    auto c = share(disk_patch(2, 2));
    const auto conn = Connection::canonical(c);
    try {
        rho_triangle(conn, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BoundaryEdge);
    }
}

TEST(Connection, RhoOnDoubledTriangleByHand) {
    auto c = share(Complex2D::from_triangles(3, {{0, 1, 2}, {0, 2, 1}}));
    const Connection conn(c, {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
    // u_{T1:0} = 4, u_{T1:2} = 5, u_{T1:1} = 6.
    EXPECT_NEAR(rho(conn, 0, 0, 1), (1.0 / 2.0) * (6.0 / 4.0), 1e-15);
    EXPECT_NEAR(rho(conn, 0, 1, 2), (2.0 / 3.0) * (5.0 / 6.0), 1e-15);
    EXPECT_NEAR(rho(conn, 0, 2, 0), (3.0 / 1.0) * (4.0 / 5.0), 1e-15);
    EXPECT_NEAR(rho_triangle(conn, 0), 1.0, 1e-15);
}

TEST(Connection, RhoTriangleHandProductOnOctahedron) {
    Rng rng(5);
    auto c = share(octahedron());
    const auto conn = Connection::random(c, rng);
    const auto& u = conn.coeffs();
    // Triangle 0 = (0,2,4); neighbours across (0,2), (2,4), (4,0).
    double hand = 1.0;
    const auto& v = c->triangle(0);
    for (int s = 0; s < 3; ++s) {
        const int p = v[static_cast<std::size_t>(s)];
        const int q = v[static_cast<std::size_t>((s + 1) % 3)];
        const int nb = c->twin(0, s).tri;
        hand *= oracle::coeff(*c, u, 0, p) / oracle::coeff(*c, u, 0, q);
        hand *= oracle::coeff(*c, u, nb, q) / oracle::coeff(*c, u, nb, p);
    }
    EXPECT_LT(rel(rho_triangle(conn, 0), hand), 1e-14);
}

TEST(Connection, RhoCocycleOnClosedSurfaces) {
    Rng rng(13);
    for (const auto& c : closed_surfaces()) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto conn = Connection::random(c, rng);
            double log_prod = 0.0;
            for (int t = 0; t < c->triangle_count(); ++t) log_prod += std::log(rho_triangle(conn, t));
            EXPECT_NEAR(std::exp(log_prod), 1.0, 1e-10);
        }
        EXPECT_EQ(rho_triangle(Connection::canonical(c), 0), 1.0);
    }
}

TEST(Connection, FramedHolonomyBasics) {
    Rng rng(17);
    auto c = share(torus_grid(4, 4));
    const auto conn = Connection::random(c, rng);
    EXPECT_EQ(framed_holonomy(conn, FramedPath{{3}, {}}), 1.0);
    const auto loops = homology_generator_loops(*c);
    const FramedPath path = left_boundary(*c, loops[0]);
    FramedPath back{{path.vertices.rbegin(), path.vertices.rend()}, {path.triangles.rbegin(), path.triangles.rend()}};
    EXPECT_NEAR(framed_holonomy(conn, path) * framed_holonomy(conn, back), 1.0, 1e-12);
    EXPECT_EQ(framed_holonomy(Connection::canonical(c), path), 1.0);
    FramedPath bad{{0, 5}, {0}};
    EXPECT_THROW(framed_holonomy(conn, bad), Error);
}

TEST(Connection, ThickHolonomyEmptyIsIdentity) {
    auto c = share(octahedron());
    const auto k = thick_holonomy(Connection::canonical(c), ThickPath{}, 0);
    EXPECT_EQ(k.at(0, 0), 1.0);
    EXPECT_EQ(k.at(0, 1), 0.0);
    EXPECT_EQ(k.at(1, 0), 0.0);
    EXPECT_EQ(k.at(1, 1), 1.0);
}

TEST(Connection, ThickHolonomyMatchesVertexPropagation) {
    Rng rng(19);
    for (const auto& c : closed_surfaces()) {
        const auto conn = Connection::random(c, rng);
        std::vector<ThickPath> paths;
        for (int p = 0; p < c->vertex_count(); ++p) paths.push_back(vertex_star(*c, p));
        if (c->euler_characteristic() <= 0) {
            for (const auto& l : homology_generator_loops(*c)) paths.push_back(l);
        }
        for (const auto& path : paths) {
            const auto k = loop_holonomy(conn, path);
            const auto o = oracle::thick_holonomy(*c, conn.coeffs(), path, path.faces.back());
            for (int i = 0; i < 4; ++i) {
                EXPECT_LT(std::abs(k.at(i / 2, i % 2) - o[static_cast<std::size_t>(i)]),
                          1e-11 * std::max(1.0, std::abs(o[static_cast<std::size_t>(i)])));
            }
        }
    }
}

TEST(Connection, CanonicalEvenStarHasUnitDeterminant) {
    auto c = share(octahedron());
    const auto conn = Connection::canonical(c);
    for (int p = 0; p < 6; ++p) {
        const auto star = vertex_star(*c, p);
        const auto o = oracle::thick_holonomy(*c, conn.coeffs(), star, star.faces.back());
        EXPECT_NEAR(o[0] * o[3] - o[1] * o[2], 1.0, 1e-12);
        EXPECT_NEAR(loop_holonomy(conn, star).determinant(), 1.0, 1e-12);
    }
}

TEST(Connection, ThickHolonomySeedErrors) {
    auto c = share(octahedron());
    const auto conn = Connection::canonical(c);
    const auto star = vertex_star(*c, 4);
    try {
        thick_holonomy(conn, star, c->edge_of(1, 0) == star.faces.back() ? c->edge_of(1, 1) : c->edge_of(1, 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::SeedNotInFirstTriangle || e.code() == ErrorCode::InvalidPath);
    }
    // A side of the first triangle that is not the closing face.
    const int t1 = star.triangles.front();
    for (int s = 0; s < 3; ++s) {
        const int e = c->edge_of(t1, s);
        if (e != star.faces.back()) {
            EXPECT_THROW(thick_holonomy(conn, star, e), Error);
        }
    }
}

TEST(Connection, EdgeWeightLoopsHaveUnitDeterminant) {
    Rng rng(23);
    for (const auto& c : {share(torus_grid(3, 3)), share(torus_grid(5, 7)), share(genus_two())}) {
        const auto conn = build_from_edge_weights(c, random_edge_weights(*c, rng));
        for (const auto& l : homology_generator_loops(*c)) {
            EXPECT_NEAR(std::abs(loop_holonomy(conn, l).determinant()), 1.0, 1e-10);
        }
    }
}

TEST(Connection, LongLoopRenormalizes) {
    Rng rng(29);
    auto c = share(torus_grid(40, 3));
    const auto conn = Connection::random(c, rng, 0.01, 100.0);
    for (const auto& l : homology_generator_loops(*c)) {
        const auto k = loop_holonomy(conn, l);
        EXPECT_TRUE(std::isfinite(k.log_scale));
        EXPECT_LE(std::abs(k.scaled[0]), 1.0);
    }
}

TEST(Connection, CurvatureCanonicalAndEdgeWeights) {
    Rng rng(31);
    auto c = share(icosahedron());
    for (int p = 0; p < c->vertex_count(); ++p) {
        const auto k = vertex_curvature(Connection::canonical(c), p);
        EXPECT_NEAR(k.mu_matrix, 1.0, 1e-12);
        EXPECT_EQ(k.mu_lemma, 1.0);
    }
    const auto conn = build_from_edge_weights(c, random_edge_weights(*c, rng));
    for (int p = 0; p < c->vertex_count(); ++p) {
        const auto k = vertex_curvature(conn, p);
        EXPECT_NEAR(k.mu_matrix, 1.0, 1e-10);
        EXPECT_NEAR(k.mu_lemma, 1.0, 1e-10);
    }
}

TEST(Connection, CurvatureIsLowerTriangular) {
    Rng rng(37);
    auto c = share(torus_grid(4, 5));
    const auto conn = Connection::random(c, rng);
    for (int p = 0; p < c->vertex_count(); ++p) {
        const auto k = vertex_curvature(conn, p);
        EXPECT_NEAR(k.matrix.at(0, 0), 1.0, 1e-12);
        EXPECT_NEAR(k.matrix.at(0, 1), 0.0, 1e-12);
        EXPECT_NEAR(k.matrix.at(1, 0), k.alpha, 1e-12 * std::max(1.0, std::abs(k.alpha)));
        // Six triangles in the star: the sign is (-1)^6.
        EXPECT_GT(k.matrix.at(1, 1), 0.0);
    }
}

TEST(Connection, CurvatureOctahedronHandProduct) {
    Rng rng(41);
    auto c = share(octahedron());
    const auto conn = Connection::random(c, rng);
    const int p = 4;
    const auto star = vertex_star(*c, p);
    double hand = 1.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& e = c->edge(star.faces[i]);
        const int q = e.a == p ? e.b : e.a;
        const int before = star.triangles[i];
        const int after = star.triangles[(i + 1) % 4];
        hand *= (oracle::coeff(*c, conn.coeffs(), before, p) / oracle::coeff(*c, conn.coeffs(), before, q)) *
                (oracle::coeff(*c, conn.coeffs(), after, q) / oracle::coeff(*c, conn.coeffs(), after, p));
    }
    const auto k = vertex_curvature(conn, p);
    EXPECT_LT(rel(k.mu_matrix, hand), 1e-10);
    EXPECT_LT(rel(k.mu_lemma, hand), 1e-12);
}

TEST(Connection, LemmaOneOnRandomConnections) {
    Rng rng(43);
    for (const auto& c : closed_surfaces()) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto conn = Connection::random(c, rng);
            for (int p = 0; p < c->vertex_count(); ++p) {
                const auto k = vertex_curvature(conn, p);
                EXPECT_LT(rel(k.mu_matrix, k.mu_lemma), 1e-10);
                EXPECT_EQ(k.sign, vertex_star(*c, p).size() % 2 == 0 ? 1 : -1);
            }
        }
    }
}

TEST(Connection, CurvatureNeedsInteriorVertex) {
    auto c = share(disk_patch(2, 2));
    try {
        vertex_curvature(Connection::canonical(c), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BoundaryVertex);
    }
}

TEST(Connection, Sl2Verdicts) {
    Rng rng(47);
    const auto canon = is_sl2(Connection::canonical(share(octahedron())));
    EXPECT_TRUE(canon.local);
    EXPECT_TRUE(canon.global);
    EXPECT_EQ(canon.verdict, Sl2Verdict::sl2);

    auto t = share(torus_grid(6, 6));
    const auto ew = is_sl2(build_from_edge_weights(t, random_edge_weights(*t, rng)));
    EXPECT_TRUE(ew.sl2_pm());
    EXPECT_EQ(ew.loops.size(), 2u);

    const auto rnd = is_sl2(Connection::random(t, rng));
    EXPECT_FALSE(rnd.local);
    EXPECT_EQ(rnd.verdict, Sl2Verdict::gl2);

    // Odd stars: SL2 +- but never SL2.
    auto ico = share(icosahedron());
    const auto odd = is_sl2(build_from_edge_weights(ico, random_edge_weights(*ico, rng)));
    EXPECT_TRUE(odd.sl2_pm());
    EXPECT_FALSE(odd.colorable);
    EXPECT_EQ(odd.verdict, Sl2Verdict::sl2_pm);
}

TEST(Connection, BuildFromEdgeWeightsHandValues) {
    auto c = share(Complex2D::from_triangles(3, {{0, 1, 2}}));
    // Edge ids sorted by vertex pair: (0,1), (0,2), (1,2).
    const auto conn = build_from_edge_weights(c, EdgeWeights{{1.0, 9.0, 4.0}});
    EXPECT_NEAR(conn.u(0, 0), 1.5, 1e-15);
    EXPECT_NEAR(conn.u(0, 1), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(conn.u(0, 2), 6.0, 1e-15);

    auto o = share(octahedron());
    const auto canon = build_from_edge_weights(o, EdgeWeights{std::vector<double>(12, 1.0)});
    EXPECT_EQ(canon.coeffs(), Connection::canonical(o).coeffs());
    EXPECT_THROW(build_from_edge_weights(o, EdgeWeights{std::vector<double>(12, -1.0)}), Error);
}

TEST(Connection, EdgeWeightProductsReproduced) {
    Rng rng(53);
    auto c = share(genus_two());
    const auto a = random_edge_weights(*c, rng);
    const auto conn = build_from_edge_weights(c, a);
    for (int t = 0; t < c->triangle_count(); ++t) {
        for (int s = 0; s < 3; ++s) {
            EXPECT_LT(rel(conn.u_local(t, s) * conn.u_local(t, s + 1), a.values[static_cast<std::size_t>(c->edge_of(t, s))]),
                      1e-14);
        }
    }
}

TEST(Connection, ReconstructEdgeWeights) {
    Rng rng(59);
    auto c = share(torus_grid(5, 4));
    EXPECT_EQ(reconstruct_edge_weights(Connection::canonical(c), 0, 1.0).values, std::vector<double>(60, 1.0));

    const auto a = random_edge_weights(*c, rng);
    const auto conn = build_from_edge_weights(c, a);
    const auto back = reconstruct_edge_weights(conn, 7, a.values[7]);
    for (std::size_t e = 0; e < a.values.size(); ++e) EXPECT_LT(rel(back.values[e], a.values[e]), 1e-10);

    // Doubling the seed doubles every weight; the rebuilt connection is a
    // triangle gauge of the original.
    const auto twice = reconstruct_edge_weights(conn, 7, 2.0 * a.values[7]);
    for (std::size_t e = 0; e < a.values.size(); ++e) EXPECT_LT(rel(twice.values[e], 2.0 * a.values[e]), 1e-10);
    const auto rebuilt = build_from_edge_weights(c, twice);
    EXPECT_TRUE(is_sl2(rebuilt).sl2_pm());
    EXPECT_LT(oracle::gauge_distance(*c, conn.coeffs(), rebuilt.coeffs()), 1e-10);
}

TEST(Connection, ReconstructEdgeWeightsRejectsGl2) {
    Rng rng(61);
    auto c = share(octahedron());
    try {
        reconstruct_edge_weights(Connection::random(c, rng), 0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotSL2);
    }
}

TEST(Connection, ReconstructEdgeWeightsFromGaugedConnection) {
    // Part 2 proper: an SL2 connection not literally built from weights.
    Rng rng(67);
    auto c = share(torus_grid(4, 4));
    const auto conn = build_from_edge_weights(c, random_edge_weights(*c, rng));
    GaugePair gp = random_gauge(*c, rng);
    std::fill(gp.h.begin(), gp.h.end(), 1.0);
    const auto moved = gauge_transform(conn, gp);
    const auto a = reconstruct_edge_weights(moved, 0, 1.0);
    EXPECT_LT(oracle::gauge_distance(*c, moved.coeffs(), build_from_edge_weights(c, a).coeffs()), 1e-10);
}

TEST(Connection, InvariantReconstructionCanonical) {
    auto c = share(torus_grid(3, 3));
    RhoData ones{std::vector<std::array<double, 3>>(18, {1.0, 1.0, 1.0})};
    const auto r = reconstruct_connection_from_invariants(c, ones, {1.0, 1.0});
    for (int t = 0; t < 18; ++t) {
        for (int s = 0; s < 3; ++s) {
            EXPECT_NEAR(mu_ratio(r.connection, t, c->vertex_at(t, s), c->vertex_at(t, s + 1)), 1.0, 1e-12);
        }
    }
}

TEST(Connection, InvariantReconstructionSphereRoundTrip) {
    Rng rng(71);
    for (const auto& c : {share(octahedron()), share(icosahedron())}) {
        const auto conn = build_from_edge_weights(c, random_edge_weights(*c, rng));
        const auto r = reconstruct_connection_from_invariants(c, extract_rho(conn), {});
        EXPECT_LT(oracle::gauge_distance(*c, conn.coeffs(), r.connection.coeffs()), 1e-10);
    }
}

TEST(Connection, InvariantReconstructionGeneralGl2RoundTrip) {
    Rng rng(73);
    for (const auto& c : {share(torus_grid(4, 3)), share(genus_two())}) {
        const auto conn = Connection::random(c, rng);
        const auto r = reconstruct_connection_from_invariants(c, extract_rho(conn), loop_invariants(conn));
        EXPECT_LT(oracle::gauge_distance(*c, conn.coeffs(), r.connection.coeffs()), 1e-10);
    }
}

TEST(Connection, InvariantReconstructionDoubledLoop) {
    Rng rng(79);
    auto c = share(torus_grid(5, 5));
    const auto conn = build_from_edge_weights(c, random_edge_weights(*c, rng));
    auto values = loop_invariants(conn);
    values[1] *= 2.0;
    const auto r = reconstruct_connection_from_invariants(c, extract_rho(conn), values);
    const auto loops = homology_generator_loops(*c);
    const auto l0 = left_boundary(*c, loops[0]);
    const auto l1 = left_boundary(*c, loops[1]);
    EXPECT_LT(rel(framed_holonomy(r.connection, l0) / framed_holonomy(conn, l0), 1.0), 1e-10);
    EXPECT_LT(rel(framed_holonomy(r.connection, l1) / framed_holonomy(conn, l1), 2.0), 1e-10);
    // Same rho, so still locally SL2; globally the determinant picks up 4.
    const auto rep = is_sl2(r.connection);
    EXPECT_TRUE(rep.local);
    EXPECT_FALSE(rep.global);
}

TEST(Connection, InvariantReconstructionErrors) {
    auto c = share(torus_grid(3, 3));
    RhoData ones{std::vector<std::array<double, 3>>(18, {1.0, 1.0, 1.0})};
    try {
        reconstruct_connection_from_invariants(c, ones, {1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsatisfiableLoopValues);
    }
    // Scale rho on one edge consistently from both sides: the total product breaks.
    RhoData bad = ones;
    const HalfEdge tw = c->twin(0, 0);
    bad.side[0][0] = 3.0;
    bad.side[static_cast<std::size_t>(tw.tri)][static_cast<std::size_t>(tw.side)] = 3.0;
    try {
        reconstruct_connection_from_invariants(c, bad, {1.0, 1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InconsistentRho);
    }
    try {
        reconstruct_connection_from_invariants(share(disk_patch(2, 2)), RhoData{}, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotClosed);
    }
}
