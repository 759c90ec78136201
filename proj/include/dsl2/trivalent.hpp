#pragma once

#include "dsl2/error.hpp"
#include "dsl2/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace dsl2 {

/// Finite tree with vertices of degree 1 (leaves) or 3.
class Tree {
public:
    Tree(int vertex_count, std::vector<std::pair<int, int>> edges) : n_(vertex_count), edges_(std::move(edges)) {
        if (n_ < 2 || static_cast<int>(edges_.size()) != n_ - 1) {
            throw Error(ErrorCode::TreeNotConnected, "a tree on n vertices has n - 1 edges");
        }
        adj_.resize(static_cast<std::size_t>(n_));
        for (const auto& [a, b] : edges_) {
            if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b) {
                throw Error(ErrorCode::InvalidInput, "bad edge");
            }
            adj_[static_cast<std::size_t>(a)].push_back(b);
            adj_[static_cast<std::size_t>(b)].push_back(a);
        }
        if (static_cast<int>(bfs_order(0).size()) != n_) {
            throw Error(ErrorCode::TreeNotConnected, "tree is not connected");
        }
        for (int p = 0; p < n_; ++p) {
            const auto deg = degree(p);
            if (deg != 1 && deg != 3) {
                throw Error(ErrorCode::InvalidInput, "vertex " + std::to_string(p) + " has degree " + std::to_string(deg));
            }
        }
    }

    [[nodiscard]] int vertex_count() const noexcept { return n_; }
    [[nodiscard]] const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<int>& neighbors(int p) const { return adj_.at(static_cast<std::size_t>(p)); }
    [[nodiscard]] int degree(int p) const { return static_cast<int>(neighbors(p).size()); }
    [[nodiscard]] bool leaf(int p) const { return degree(p) == 1; }

    [[nodiscard]] std::vector<int> bfs_order(int root) const {
        std::vector<int> order{root};
        std::vector<char> seen(static_cast<std::size_t>(n_), 0);
        seen[static_cast<std::size_t>(root)] = 1;
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (int q : neighbors(order[i])) {
                if (!seen[static_cast<std::size_t>(q)]) {
                    seen[static_cast<std::size_t>(q)] = 1;
                    order.push_back(q);
                }
            }
        }
        return order;
    }

    /// Graph distance from p to every vertex.
    [[nodiscard]] std::vector<int> distances(int p) const {
        std::vector<int> dist(static_cast<std::size_t>(n_), -1);
        dist[static_cast<std::size_t>(p)] = 0;
        for (int x : bfs_order(p)) {
            for (int q : neighbors(x)) {
                if (dist[static_cast<std::size_t>(q)] < 0) dist[static_cast<std::size_t>(q)] = dist[static_cast<std::size_t>(x)] + 1;
            }
        }
        return dist;
    }

private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

/// Root of degree 3, every other interior vertex has two children; leaves at `depth`.
inline Tree trivalent_tree(int depth) {
    if (depth < 1) {
        throw Error(ErrorCode::InvalidInput, "depth must be at least 1");
    }
    std::vector<std::pair<int, int>> edges;
    std::vector<int> frontier{0};
    int next = 1;
    for (int level = 0; level < depth; ++level) {
        std::vector<int> grown;
        for (int p : frontier) {
            for (int k = 0; k < (level == 0 ? 3 : 2); ++k) {
                edges.emplace_back(p, next);
                grown.push_back(next++);
            }
        }
        frontier = std::move(grown);
    }
    return Tree(next, std::move(edges));
}

using PairMap = std::map<std::pair<int, int>, double>;

inline std::pair<int, int> unordered_key(int p, int q) { return {std::min(p, q), std::max(p, q)}; }

/// L psi_P = sum a_{PP''} psi_{P''} + sum b_{PP'} psi_{P'} + W_P psi_P.
/// a keyed by the unordered distance-2 pair, b by the unordered edge.
struct TrivalentOperator {
    Tree tree;
    PairMap a;
    PairMap b;
    std::vector<double> W;

    [[nodiscard]] Eigen::MatrixXd dense() const {
        const int n = tree.vertex_count();
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [k, x] : a) m(k.first, k.second) = m(k.second, k.first) = x;
        for (const auto& [k, x] : b) m(k.first, k.second) = m(k.second, k.first) = x;
        for (int p = 0; p < n; ++p) m(p, p) = W[static_cast<std::size_t>(p)];
        return m;
    }
};

/// Q psi_P = sum d_{PP'} psi_{P'} + v_P psi_P; d keyed by the ordered pair (P, P').
struct TrivalentFirstOrder {
    Tree tree;
    PairMap d;
    std::vector<double> v;

    [[nodiscard]] double dd(int p, int q) const { return d.at({p, q}); }

    [[nodiscard]] Eigen::MatrixXd dense() const {
        const int n = tree.vertex_count();
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [k, x] : d) m(k.first, k.second) = x;
        for (int p = 0; p < n; ++p) m(p, p) = v[static_cast<std::size_t>(p)];
        return m;
    }
};

inline TrivalentFirstOrder random_first_order(const Tree& t, Rng& rng) {
    TrivalentFirstOrder q{t, {}, {}};
    for (const auto& [p, r] : t.edges()) {
        q.d[{p, r}] = rng.positive();
        q.d[{r, p}] = rng.positive();
    }
    for (int p = 0; p < t.vertex_count(); ++p) q.v.push_back(rng.uniform(-1.0, 1.0));
    return q;
}

/// Q^+ Q + u written out coefficientwise.
inline TrivalentOperator assemble_trivalent(const TrivalentFirstOrder& q, const std::vector<double>& u) {
    const Tree& t = q.tree;
    TrivalentOperator l{t, {}, {}, std::vector<double>(static_cast<std::size_t>(t.vertex_count()), 0.0)};
    for (int x = 0; x < t.vertex_count(); ++x) {
        const auto& nb = t.neighbors(x);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                l.a[unordered_key(nb[i], nb[j])] = q.dd(x, nb[i]) * q.dd(x, nb[j]);
            }
        }
    }
    for (const auto& [p, r] : t.edges()) {
        l.b[unordered_key(p, r)] = q.dd(r, p) * q.v[static_cast<std::size_t>(r)] + q.dd(p, r) * q.v[static_cast<std::size_t>(p)];
    }
    for (int p = 0; p < t.vertex_count(); ++p) {
        const auto sp = static_cast<std::size_t>(p);
        double w = q.v[sp] * q.v[sp] + u.at(sp);
        for (int r : t.neighbors(p)) w += q.dd(r, p) * q.dd(r, p);
        l.W[sp] = w;
    }
    return l;
}

struct TrivalentFactorization {
    TrivalentFirstOrder q;
    std::vector<double> u;
    double residual = 0.0; ///< max |Q^+ Q + u - L| over coefficients
};

inline double coefficient_distance(const TrivalentOperator& x, const TrivalentOperator& y) {
    return (x.dense() - y.dense()).cwiseAbs().maxCoeff();
}

/// L = Q^+ Q + u with v_{root} = v0. Around an interior vertex X with
/// neighbours A, B, C: a_{AB} = d_{XA} d_{XB}, so d_{XA} = sqrt(a_{AB} a_{AC} / a_{BC}).
/// A leaf sees no distance-2 pair, so d_{leaf, X} is boundary data (`leaf_d`, default 1).
inline TrivalentFactorization trivalent_factorize(const TrivalentOperator& l, double v0, int root = 0,
                                                  const PairMap& leaf_d = {}) {
    const Tree& t = l.tree;
    const int n = t.vertex_count();
    if (static_cast<int>(l.W.size()) != n) {
        throw Error(ErrorCode::InvalidInput, "W needs one value per vertex");
    }
    auto a_at = [&](int p, int r) {
        const auto it = l.a.find(unordered_key(p, r));
        if (it == l.a.end() || !(it->second > 0.0)) {
            throw Error(ErrorCode::InconsistentA, "a missing or non-positive on " + std::to_string(p) + "-" +
                                                      std::to_string(r));
        }
        return it->second;
    };
    TrivalentFactorization out{{t, {}, std::vector<double>(static_cast<std::size_t>(n), 0.0)}, {}, 0.0};
    for (int x = 0; x < n; ++x) {
        const auto& nb = t.neighbors(x);
        if (t.leaf(x)) {
            const auto it = leaf_d.find({x, nb[0]});
            out.q.d[{x, nb[0]}] = it == leaf_d.end() ? 1.0 : it->second;
            continue;
        }
        for (int i = 0; i < 3; ++i) {
            const int A = nb[static_cast<std::size_t>(i)];
            const int B = nb[static_cast<std::size_t>((i + 1) % 3)];
            const int C = nb[static_cast<std::size_t>((i + 2) % 3)];
            out.q.d[{x, A}] = std::sqrt(a_at(A, B) * a_at(A, C) / a_at(B, C));
        }
    }
    auto b_at = [&](int p, int r) {
        const auto it = l.b.find(unordered_key(p, r));
        return it == l.b.end() ? 0.0 : it->second;
    };
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    out.q.v[static_cast<std::size_t>(root)] = v0;
    done[static_cast<std::size_t>(root)] = 1;
    for (int p : t.bfs_order(root)) {
        for (int r : t.neighbors(p)) {
            if (done[static_cast<std::size_t>(r)]) continue;
            // b_{PR} = d_{RP} v_R + d_{PR} v_P
            out.q.v[static_cast<std::size_t>(r)] = (b_at(p, r) - out.q.dd(p, r) * out.q.v[static_cast<std::size_t>(p)]) /
                                                   out.q.dd(r, p);
            done[static_cast<std::size_t>(r)] = 1;
        }
    }
    out.u.resize(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        const auto sp = static_cast<std::size_t>(p);
        double u = l.W[sp] - out.q.v[sp] * out.q.v[sp];
        for (int r : t.neighbors(p)) u -= out.q.dd(r, p) * out.q.dd(r, p);
        out.u[sp] = u;
    }
    out.residual = coefficient_distance(assemble_trivalent(out.q, out.u), l);
    return out;
}

struct TrivalentLaplace {
    TrivalentOperator op;
    double asymmetry = 0.0; ///< max |L~_{PR} - L~_{RP}| over the two expansions
};

/// L~ = Q u^{-1} Q^+ + 1, expanded entry by entry.
inline TrivalentLaplace trivalent_laplace(const TrivalentFirstOrder& q, const std::vector<double>& u) {
    const Tree& t = q.tree;
    const int n = t.vertex_count();
    for (int p = 0; p < n; ++p) {
        if (u.at(static_cast<std::size_t>(p)) == 0.0) {
            throw Error(ErrorCode::ZeroPotential, "u vanishes at vertex " + std::to_string(p));
        }
    }
    auto inv = [&](int p) { return 1.0 / u[static_cast<std::size_t>(p)]; };
    auto vv = [&](int p) { return q.v[static_cast<std::size_t>(p)]; };
    // (Q u^{-1} Q^+)_{PR} = sum_X Q_{PX} Q_{RX} / u_X
    TrivalentLaplace out{{t, {}, {}, std::vector<double>(static_cast<std::size_t>(n), 0.0)}, 0.0};
    for (int x = 0; x < n; ++x) {
        const auto& nb = t.neighbors(x);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                const double pr = q.dd(nb[i], x) * q.dd(nb[j], x) * inv(x);
                const double rp = q.dd(nb[j], x) * q.dd(nb[i], x) * inv(x);
                out.op.a[unordered_key(nb[i], nb[j])] = pr;
                out.asymmetry = std::max(out.asymmetry, std::abs(pr - rp));
            }
        }
    }
    for (const auto& [p, r] : t.edges()) {
        const double pr = vv(p) * q.dd(r, p) * inv(p) + q.dd(p, r) * vv(r) * inv(r);
        const double rp = vv(r) * q.dd(p, r) * inv(r) + q.dd(r, p) * vv(p) * inv(p);
        out.op.b[unordered_key(p, r)] = pr;
        out.asymmetry = std::max(out.asymmetry, std::abs(pr - rp));
    }
    for (int p = 0; p < n; ++p) {
        double w = vv(p) * vv(p) * inv(p) + 1.0;
        for (int x : t.neighbors(p)) w += q.dd(p, x) * q.dd(p, x) * inv(x);
        out.op.W[static_cast<std::size_t>(p)] = w;
    }
    return out;
}

/// psi with (L psi)_P = 0 for every P in `interior`; psi is `outside` elsewhere.
inline Eigen::VectorXd dirichlet_kernel(const TrivalentOperator& l, const std::vector<int>& interior,
                                        const Eigen::VectorXd& outside) {
    const Eigen::MatrixXd m = l.dense();
    const int n = static_cast<int>(m.rows());
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    for (int p : interior) in[static_cast<std::size_t>(p)] = 1;
    const int k = static_cast<int>(interior.size());
    Eigen::MatrixXd a(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) a(i, j) = m(interior[static_cast<std::size_t>(i)], interior[static_cast<std::size_t>(j)]);
        for (int r = 0; r < n; ++r) {
            if (!in[static_cast<std::size_t>(r)]) rhs(i) -= m(interior[static_cast<std::size_t>(i)], r) * outside(r);
        }
    }
    const Eigen::VectorXd inner = a.fullPivLu().solve(rhs);
    Eigen::VectorXd psi = outside;
    for (int i = 0; i < k; ++i) psi(interior[static_cast<std::size_t>(i)]) = inner(i);
    return psi;
}

} // namespace dsl2
