#include "dsl2/trivalent.hpp"

#include <gtest/gtest.h>

using namespace dsl2;

namespace {

std::vector<double> ones(const Tree& t) { return std::vector<double>(static_cast<std::size_t>(t.vertex_count()), 1.0); }

TrivalentFirstOrder unit_first_order(const Tree& t) {
    TrivalentFirstOrder q{t, {}, ones(t)};
    for (const auto& [p, r] : t.edges()) q.d[{p, r}] = q.d[{r, p}] = 1.0;
    return q;
}

std::vector<double> random_u(const Tree& t, Rng& rng) {
    std::vector<double> u;
    for (int p = 0; p < t.vertex_count(); ++p) u.push_back(rng.positive(0.5, 2.0) * (p % 2 ? 1.0 : -1.0));
    return u;
}

PairMap leaf_values(const TrivalentFirstOrder& q) {
    PairMap out;
    for (int p = 0; p < q.tree.vertex_count(); ++p) {
        if (q.tree.leaf(p)) out[{p, q.tree.neighbors(p)[0]}] = q.dd(p, q.tree.neighbors(p)[0]);
    }
    return out;
}

Eigen::MatrixXd diag(const std::vector<double>& x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())).asDiagonal();
}

} // namespace

TEST(Trivalent, TreeShape) {
    const auto t = trivalent_tree(3);
    EXPECT_EQ(t.vertex_count(), 22);
    EXPECT_EQ(t.degree(0), 3);
    EXPECT_EQ(t.degree(1), 3);
    EXPECT_TRUE(t.leaf(21));
    EXPECT_THROW(Tree(3, {{0, 1}, {1, 2}}), Error); // degree 2
    try {
        Tree(4, {{0, 1}, {0, 2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TreeNotConnected);
    }
}

TEST(Trivalent, AssembleMatchesDenseProduct) {
    Rng rng(1);
    const auto t = trivalent_tree(3);
    const auto q = random_first_order(t, rng);
    const auto u = random_u(t, rng);
    const Eigen::MatrixXd Q = q.dense();
    const Eigen::MatrixXd expect = Q.transpose() * Q + diag(u);
    EXPECT_LT((assemble_trivalent(q, u).dense() - expect).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Trivalent, StarRecoversUnitFactors) {
    const auto t = trivalent_tree(1);
    const auto l = assemble_trivalent(unit_first_order(t), ones(t));
    for (const auto& [k, a] : l.a) EXPECT_EQ(a, 1.0);
    const auto f = trivalent_factorize(l, 1.0);
    for (const auto& [k, d] : f.q.d) EXPECT_NEAR(d, 1.0, 1e-15);
    for (double v : f.q.v) EXPECT_NEAR(v, 1.0, 1e-15);
    for (double u : f.u) EXPECT_NEAR(u, 1.0, 1e-15);
    EXPECT_LT(f.residual, 1e-12);
}

TEST(Trivalent, OneParameterFamily) {
    const auto t = trivalent_tree(1);
    const auto l = assemble_trivalent(unit_first_order(t), ones(t));
    const auto f1 = trivalent_factorize(l, 1.0);
    const auto f2 = trivalent_factorize(l, 2.0);
    EXPECT_LT(f1.residual, 1e-12);
    EXPECT_LT(f2.residual, 1e-12);
    double diff = 0.0;
    for (std::size_t p = 0; p < f1.q.v.size(); ++p) diff = std::max(diff, std::abs(f1.q.v[p] - f2.q.v[p]));
    EXPECT_GT(diff, 0.5);
    // both reproduce L through the dense product too
    for (const auto* f : {&f1, &f2}) {
        const Eigen::MatrixXd Q = f->q.dense();
        EXPECT_LT((Q.transpose() * Q + diag(f->u) - l.dense()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Trivalent, RoundTripDepthThree) {
    Rng rng(2);
    const auto t = trivalent_tree(3);
    for (int trial = 0; trial < 5; ++trial) {
        const auto q = random_first_order(t, rng);
        const auto u = random_u(t, rng);
        const auto l = assemble_trivalent(q, u);
        const auto f = trivalent_factorize(l, q.v[0], 0, leaf_values(q));
        double worst = 0.0;
        for (const auto& [k, d] : q.d) worst = std::max(worst, std::abs(f.q.d.at(k) - d));
        for (std::size_t p = 0; p < u.size(); ++p) {
            worst = std::max({worst, std::abs(f.q.v[p] - q.v[p]), std::abs(f.u[p] - u[p])});
        }
        EXPECT_LT(worst, 1e-12);
        EXPECT_LT(f.residual, 1e-12);
    }
}

TEST(Trivalent, FactorizeRejectsBadA) {
    const auto t = trivalent_tree(1);
    auto l = assemble_trivalent(unit_first_order(t), ones(t));
    l.a.begin()->second = -1.0;
    try {
        trivalent_factorize(l, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InconsistentA);
    }
}

TEST(Trivalent, LaplaceMatchesDenseProduct) {
    Rng rng(3);
    const auto t = trivalent_tree(2);
    for (int trial = 0; trial < 2; ++trial) {
        const auto q = trial == 0 ? unit_first_order(t) : random_first_order(t, rng);
        const auto u = trial == 0 ? ones(t) : random_u(t, rng);
        std::vector<double> inv;
        for (double x : u) inv.push_back(1.0 / x);
        const Eigen::MatrixXd Q = q.dense();
        const Eigen::MatrixXd expect =
            Q * diag(inv) * Q.transpose() + Eigen::MatrixXd::Identity(t.vertex_count(), t.vertex_count());
        const auto lt = trivalent_laplace(q, u);
        EXPECT_LT((lt.op.dense() - expect).cwiseAbs().maxCoeff(), 1e-13);
        EXPECT_LT(lt.asymmetry, 1e-12);
    }
}

TEST(Trivalent, DarbouxCase) {
    Rng rng(4);
    const auto t = trivalent_tree(2);
    const auto q = random_first_order(t, rng);
    const Eigen::MatrixXd Q = q.dense();
    const Eigen::MatrixXd expect = Q * Q.transpose() + Eigen::MatrixXd::Identity(t.vertex_count(), t.vertex_count());
    EXPECT_LT((trivalent_laplace(q, ones(t)).op.dense() - expect).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Trivalent, ZeroPotential) {
    const auto t = trivalent_tree(1);
    auto u = ones(t);
    u[2] = 0.0;
    try {
        trivalent_laplace(unit_first_order(t), u);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroPotential);
    }
}

TEST(Trivalent, KernelIsTransported) {
    Rng rng(5);
    const auto t = trivalent_tree(3);
    const auto q = random_first_order(t, rng);
    const auto u = random_u(t, rng);
    const auto l = assemble_trivalent(q, u);
    const auto dist = t.distances(0);
    std::vector<int> interior;
    Eigen::VectorXd outside = Eigen::VectorXd::Zero(t.vertex_count());
    for (int p = 0; p < t.vertex_count(); ++p) {
        if (dist[static_cast<std::size_t>(p)] <= 2) {
            interior.push_back(p);
        } else {
            outside(p) = rng.uniform(-1.0, 1.0);
        }
    }
    const Eigen::VectorXd psi = dirichlet_kernel(l, interior, outside);
    const Eigen::VectorXd lpsi = l.dense() * psi;
    for (int p : interior) EXPECT_LT(std::abs(lpsi(p)), 1e-10);
    const Eigen::VectorXd tilde = q.dense() * psi;
    const Eigen::VectorXd image = trivalent_laplace(q, u).op.dense() * tilde;
    int checked = 0;
    for (int p = 0; p < t.vertex_count(); ++p) {
        if (dist[static_cast<std::size_t>(p)] > 1) continue;
        EXPECT_LT(std::abs(image(p)), 1e-10) << p;
        ++checked;
    }
    EXPECT_EQ(checked, 4);
    EXPECT_GT(tilde.cwiseAbs().maxCoeff(), 1e-3);
}
