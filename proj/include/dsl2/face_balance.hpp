#pragma once

#include "dsl2/complex.hpp"
#include "dsl2/connection.hpp"
#include "dsl2/error.hpp"
#include "dsl2/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <vector>

namespace dsl2 {

/// Pure n-dimensional simplicial complex: every simplex lists n + 1 distinct
/// vertices. Orientation is not needed here.
class ComplexN {
public:
    ComplexN(int dimension, int vertex_count, std::vector<std::vector<int>> simplices)
        : dim_(dimension), vertex_count_(vertex_count), simplices_(std::move(simplices)) {
        if (dim_ < 1) {
            throw Error(ErrorCode::InvalidInput, "dimension must be at least 1");
        }
        for (const auto& s : simplices_) {
            if (static_cast<int>(s.size()) != dim_ + 1) {
                throw Error(ErrorCode::InvalidInput, "simplex has the wrong number of vertices");
            }
            std::vector<int> sorted(s);
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 ||
                sorted.back() >= vertex_count_) {
                throw Error(ErrorCode::InvalidInput, "simplex vertices must be distinct and in range");
            }
        }
    }

    /// Boundary of the (n+1)-simplex: an n-sphere with n + 2 simplices.
    static ComplexN simplex_boundary(int n) {
        std::vector<std::vector<int>> simplices;
        for (int skip = 0; skip <= n + 1; ++skip) {
            std::vector<int> s;
            for (int v = 0; v <= n + 1; ++v) {
                if (v != skip) s.push_back(v);
            }
            simplices.push_back(std::move(s));
        }
        return {n, n + 2, std::move(simplices)};
    }

    [[nodiscard]] int dimension() const noexcept { return dim_; }
    [[nodiscard]] int vertex_count() const noexcept { return vertex_count_; }
    [[nodiscard]] int simplex_count() const noexcept { return static_cast<int>(simplices_.size()); }
    [[nodiscard]] const std::vector<int>& simplex(int t) const { return simplices_.at(static_cast<std::size_t>(t)); }

private:
    int dim_;
    int vertex_count_;
    std::vector<std::vector<int>> simplices_;
};

/// GLn connection on a ComplexN: u_{T:P} per simplex, by local vertex index.
struct ConnectionN {
    ComplexN complex;
    std::vector<std::vector<double>> coeffs;

    static ConnectionN canonical(ComplexN c) {
        const std::size_t k = static_cast<std::size_t>(c.dimension() + 1);
        std::vector<std::vector<double>> u(static_cast<std::size_t>(c.simplex_count()), std::vector<double>(k, 1.0));
        return {std::move(c), std::move(u)};
    }
    static ConnectionN random(ComplexN c, Rng& rng, double lo = 0.5, double hi = 2.0) {
        ConnectionN out = canonical(std::move(c));
        for (auto& s : out.coeffs) {
            for (double& u : s) u = rng.positive(lo, hi);
        }
        return out;
    }
};

namespace detail {

struct FaceIncidence {
    int t;
    double log_a; ///< log A(T:F), the product of u_{T:P} over P in F
};

// f on simplices with A(T':F) f(T')^n = A(T'':F) f(T'')^n on every face shared
// by two simplices; BFS on the dual graph, then checks the remaining faces.
inline std::optional<std::vector<double>> balance_faces(int simplex_count, int n,
                                                        const std::vector<std::vector<FaceIncidence>>& faces,
                                                        double tol) {
    std::vector<std::vector<std::pair<int, std::size_t>>> adj(static_cast<std::size_t>(simplex_count));
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (faces[f].size() > 2) {
            throw Error(ErrorCode::NonManifold, "face shared by more than two simplices");
        }
        if (faces[f].size() == 2) {
            adj[static_cast<std::size_t>(faces[f][0].t)].push_back({faces[f][1].t, f});
            adj[static_cast<std::size_t>(faces[f][1].t)].push_back({faces[f][0].t, f});
        }
    }
    const double nd = static_cast<double>(n);
    std::vector<double> log_f(static_cast<std::size_t>(simplex_count), std::nan(""));
    for (int root = 0; root < simplex_count; ++root) {
        if (!std::isnan(log_f[static_cast<std::size_t>(root)])) continue;
        log_f[static_cast<std::size_t>(root)] = 0.0;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int t = q.front();
            q.pop();
            for (const auto& [other, f] : adj[static_cast<std::size_t>(t)]) {
                const auto& inc = faces[f];
                const double a_here = inc[0].t == t ? inc[0].log_a : inc[1].log_a;
                const double a_there = inc[0].t == t ? inc[1].log_a : inc[0].log_a;
                const double want = log_f[static_cast<std::size_t>(t)] + (a_here - a_there) / nd;
                double& slot = log_f[static_cast<std::size_t>(other)];
                if (std::isnan(slot)) {
                    slot = want;
                    q.push(other);
                } else if (std::abs(slot - want) > tol) {
                    return std::nullopt;
                }
            }
        }
    }
    std::vector<double> f(log_f.size());
    std::transform(log_f.begin(), log_f.end(), f.begin(), [](double x) { return std::exp(x); });
    return f;
}

} // namespace detail

/// Appendix-style SLn test: a simplex gauge f equalizing A(T:F) f(T)^n across
/// every interior face, normalized by f(T_0) = 1; absent if none exists.
inline std::optional<std::vector<double>> sl_n_face_balance(const ConnectionN& conn, double tol = 1e-10) {
    const auto& c = conn.complex;
    std::map<std::vector<int>, std::vector<detail::FaceIncidence>> by_face;
    for (int t = 0; t < c.simplex_count(); ++t) {
        const auto& s = c.simplex(t);
        for (std::size_t skip = 0; skip < s.size(); ++skip) {
            std::vector<int> face;
            double log_a = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (i == skip) continue;
                face.push_back(s[i]);
                log_a += std::log(conn.coeffs.at(static_cast<std::size_t>(t)).at(i));
            }
            std::sort(face.begin(), face.end());
            by_face[face].push_back({t, log_a});
        }
    }
    std::vector<std::vector<detail::FaceIncidence>> faces;
    faces.reserve(by_face.size());
    for (auto& [key, inc] : by_face) faces.push_back(std::move(inc));
    return detail::balance_faces(c.simplex_count(), c.dimension(), faces, tol);
}

/// n = 2 on a Complex2D, faces taken from the gluing (so parallel edges stay apart).
inline std::optional<std::vector<double>> sl_n_face_balance(const Connection& conn, double tol = 1e-10) {
    const auto& c = conn.complex();
    std::vector<std::vector<detail::FaceIncidence>> faces;
    faces.reserve(static_cast<std::size_t>(c.edge_count()));
    for (const auto& e : c.edges()) {
        std::vector<detail::FaceIncidence> inc;
        for (const HalfEdge& h : e.halves) {
            if (!h.valid()) continue;
            inc.push_back({h.tri, std::log(conn.u_local(h.tri, h.side)) + std::log(conn.u_local(h.tri, h.side + 1))});
        }
        faces.push_back(std::move(inc));
    }
    return detail::balance_faces(c.triangle_count(), 2, faces, tol);
}

} // namespace dsl2
