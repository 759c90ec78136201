#include "dsl2/electric.hpp"

#include <gtest/gtest.h>

using namespace dsl2;

namespace {

ElectricNetwork single_triangle(double c1, double c2, double c3) {
    // c_i on the side opposite vertex i
    return {3, {{1, 2, c1}, {0, 2, c2}, {0, 1, c3}}, std::vector<std::array<int, 3>>{{0, 1, 2}}};
}

// Schur complement of the star center: 3x3 Laplacian seen from the corners.
Eigen::Matrix3d eliminate_center(const std::array<double, 3>& y) {
    Eigen::Matrix4d l = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 3; ++i) {
        l(i, 3) = l(3, i) = y[static_cast<std::size_t>(i)];
        l(i, i) -= y[static_cast<std::size_t>(i)];
        l(3, 3) -= y[static_cast<std::size_t>(i)];
    }
    return l.topLeftCorner<3, 3>() - l.topRightCorner<3, 1>() * l.bottomLeftCorner<1, 3>() / l(3, 3);
}

// Effective conductance between p and q: ground q, inject unit current at p.
double effective(const Eigen::MatrixXd& lap, int p, int q) {
    const int n = static_cast<int>(lap.rows());
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (i != q) keep.push_back(i);
    Eigen::MatrixXd a(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j) a(i, j) = -lap(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
    const int pi = static_cast<int>(std::find(keep.begin(), keep.end(), p) - keep.begin());
    rhs(pi) = 1.0;
    return 1.0 / a.fullPivLu().solve(rhs)(pi);
}

} // namespace

TEST(Electric, TotalCurrentExamples) {
    const ElectricNetwork path(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    const Eigen::Vector3d u(0.0, 0.0, 1.0);
    const Eigen::VectorXd lu = total_current(path, u);
    EXPECT_EQ(lu(0), 0.0);
    EXPECT_EQ(lu(1), 1.0);
    EXPECT_EQ(lu(2), -1.0);
    EXPECT_EQ(total_current(path, Eigen::Vector3d::Constant(2.5)).cwiseAbs().maxCoeff(), 0.0);
    // agrees with the dense Laplacian
    EXPECT_LT((path.laplacian() * u - lu).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Electric, CurrentConservation) {
    Rng rng(1);
    const auto net = network_from_complex(torus_grid(4, 5), rng);
    Eigen::VectorXd u(net.vertex_count());
    for (int p = 0; p < u.size(); ++p) u(p) = rng.uniform(-1.0, 1.0);
    EXPECT_LT(std::abs(total_current(net, u).sum()), 1e-12);
}

TEST(Electric, FreeVertex) {
    const ElectricNetwork a(3, {{0, 1, 1.0}, {0, 2, 1.0}});
    Eigen::Vector3d u(9.0, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(free_vertex_value(a, u, 0), 0.5);
    const ElectricNetwork b(3, {{0, 1, 1.0}, {0, 2, 3.0}});
    EXPECT_DOUBLE_EQ(free_vertex_value(b, u, 0), 0.75);
    u(0) = free_vertex_value(b, u, 0);
    EXPECT_LE(std::abs(total_current(b, u)(0)), 1e-15);
    const ElectricNetwork lonely(3, {{0, 1, 1.0}});
    try {
        free_vertex_value(lonely, u, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IsolatedVertex);
    }
}

TEST(Electric, StarTriangleValues) {
    EXPECT_EQ(star_triangle_single(1, 1, 1), (std::array<double, 3>{3, 3, 3}));
    const auto s = star_triangle_single(1, 2, 3);
    EXPECT_EQ(s[0], 11.0);
    EXPECT_EQ(s[1], 5.5);
    EXPECT_EQ(s[2], 11.0 / 3.0);
    EXPECT_THROW(star_triangle_single(1, 0, 1), Error);
}

TEST(Electric, StarTriangleSchurOracle) {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::array<double, 3> c{rng.positive(0.1, 10.0), rng.positive(0.1, 10.0), rng.positive(0.1, 10.0)};
        const auto tri = eliminate_center(star_triangle_single(c[0], c[1], c[2]));
        EXPECT_NEAR(tri(1, 2), c[0], 1e-12 * c[0]);
        EXPECT_NEAR(tri(0, 2), c[1], 1e-12 * c[1]);
        EXPECT_NEAR(tri(0, 1), c[2], 1e-12 * c[2]);
        const auto net = single_triangle(c[0], c[1], c[2]);
        Eigen::MatrixXd t = tri;
        EXPECT_NEAR(effective(t, 0, 1), effective(net.laplacian(), 0, 1), 1e-11);
    }
}

TEST(Electric, StarTriangleNetworkSingle) {
    const auto net = single_triangle(1, 1, 1);
    const auto r = star_triangle_network(net, Eigen::Vector3d(0, 0, 1));
    EXPECT_EQ(r.network.vertex_count(), 4);
    EXPECT_NEAR(r.u(3), 1.0 / 3.0, 1e-15);
    EXPECT_LT(r.current_residual, 1e-15);
}

TEST(Electric, StarTriangleNetworkOctahedron) {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto net = octahedron_network(rng);
        Eigen::VectorXd u(6);
        for (int p = 0; p < 6; ++p) u(p) = rng.uniform(-1.0, 1.0);
        const auto r = star_triangle_network(net, u);
        // direct current comparison
        const Eigen::VectorXd before = net.laplacian() * u;
        const Eigen::VectorXd after = r.network.laplacian() * r.u;
        EXPECT_LT((after.head(6) - before).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(after.tail(4).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Electric, InvalidK) {
    EXPECT_THROW(ElectricNetwork(4, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {2, 3, 1}}, std::vector<std::array<int, 3>>{{0, 1, 2}}),
                 Error);
    try {
        ElectricNetwork(3, {{0, 1, 1}, {1, 2, 1}}, std::vector<std::array<int, 3>>{{0, 1, 2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidKStructure);
    }
    try {
        ElectricNetwork(2, {{0, 1, -1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveConductivity);
    }
}

TEST(Electric, BlackFactorizationHand) {
    const auto f = black_factorization(single_triangle(1, 1, 1));
    EXPECT_EQ(f.Q(0, 0), 3.0);
    EXPECT_EQ(f.sigma(0), 9.0);
    for (int p = 0; p < 3; ++p) EXPECT_NEAR(f.W(p), 3.0, 1e-15);
    EXPECT_LT(f.residual, 1e-15);
    const auto g = black_factorization(single_triangle(1, 2, 3));
    EXPECT_NEAR(g.sigma(0), 121.0 / 6.0, 1e-13);
    EXPECT_LT(g.triangle_identity, 1e-14);
    EXPECT_LT(g.residual, 1e-13);
}

TEST(Electric, BlackFactorizationRandom) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = trial % 2 ? octahedron_network(rng) : network_from_complex(torus_grid(4, 4), rng);
        const auto f = black_factorization(net);
        EXPECT_LT(f.triangle_identity, 1e-12);
        // dense assembly oracle, built from conductivities directly
        Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(net.vertex_count(), net.vertex_count());
        for (std::size_t k = 0; k < net.black().size(); ++k) {
            const auto& t = net.black()[k];
            const double s = net.conductivity(t[0], t[1]) * net.conductivity(t[1], t[2]) +
                             net.conductivity(t[0], t[1]) * net.conductivity(t[0], t[2]) +
                             net.conductivity(t[1], t[2]) * net.conductivity(t[0], t[2]);
            Eigen::Vector3d cp(s / net.conductivity(t[1], t[2]), s / net.conductivity(t[0], t[2]),
                               s / net.conductivity(t[0], t[1]));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) expect(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]) += cp(i) * cp(j) / cp.sum();
        }
        expect -= Eigen::MatrixXd(f.W.asDiagonal());
        EXPECT_LT((expect - net.laplacian()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(f.residual, 1e-12);
    }
}

TEST(Electric, KernelTransportOctahedron) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = octahedron_network(rng);
        Eigen::VectorXd bd = Eigen::VectorXd::Zero(6);
        for (int p : {1, 3, 5}) bd(p) = rng.uniform(-1.0, 1.0);
        const std::vector<int> free{0, 2, 4};
        const Eigen::VectorXd u = dirichlet_solve(net, free, bd);
        const Eigen::VectorXd lu = net.laplacian() * u;
        for (int p : free) ASSERT_LT(std::abs(lu(p)), 1e-13);
        const auto img = laplace_image(net, u, free);
        EXPECT_EQ(img.asserted_triangles, std::vector<int>{0});
        EXPECT_EQ(img.normalization, UPrimeNormalization::c_prime_inverse_q_u);
        EXPECT_LT(img.kernel_residual, 1e-10);
        EXPECT_GT(img.residual_c_prime, 1e-6);
    }
}

TEST(Electric, KernelTransportTorus) {
    Rng rng(6);
    const auto net = network_from_complex(torus_grid(5, 5), rng);
    Eigen::VectorXd bd = Eigen::VectorXd::Zero(net.vertex_count());
    std::vector<int> free;
    for (int p = 0; p < net.vertex_count(); ++p) {
        if (p / 5 == 0) {
            bd(p) = rng.uniform(-1.0, 1.0);
        } else {
            free.push_back(p);
        }
    }
    const auto img = laplace_image(net, dirichlet_solve(net, free, bd), free);
    EXPECT_GT(img.asserted_triangles.size(), 5u);
    EXPECT_EQ(img.normalization, UPrimeNormalization::c_prime_inverse_q_u);
    EXPECT_LT(img.kernel_residual, 1e-10);
}

TEST(Electric, ConstantU) {
    Rng rng(7);
    const auto net = octahedron_network(rng);
    const auto img = laplace_image(net, Eigen::VectorXd::Constant(6, 2.0));
    const auto f = black_factorization(net);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(img.u(k), 2.0, 1e-13); // (C')^{-1} sigma * 2
    EXPECT_NEAR((f.Q * Eigen::VectorXd::Constant(6, 2.0))(1), 2.0 * f.sigma(1), 1e-12);
}

TEST(Electric, NoKernelVector) {
    Rng rng(8);
    const auto net = octahedron_network(rng);
    Eigen::VectorXd u(6);
    for (int p = 0; p < 6; ++p) u(p) = rng.uniform(-1.0, 1.0);
    try {
        laplace_image(net, u);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoKernelVector);
    }
}
