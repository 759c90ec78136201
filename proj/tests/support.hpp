#pragma once

// Independent oracles shared by the unit and acceptance tests. Nothing here
// calls into the library's holonomy or reconstruction code.

#include "dsl2/complex.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <queue>
#include <vector>

namespace oracle {

using Coeffs = std::vector<std::array<double, 3>>;

inline double coeff(const dsl2::Complex2D& c, const Coeffs& u, int t, int p) {
    const auto& tri = c.triangle(t);
    for (std::size_t i = 0; i < 3; ++i) {
        if (tri[i] == p) {
            return u[static_cast<std::size_t>(t)][i];
        }
    }
    return std::nan("");
}

// Thick holonomy by propagating two basis solutions vertex by vertex.
// Returns K with rows = final face vertices (ascending), cols = seed vertices (ascending).
inline std::array<double, 4> thick_holonomy(const dsl2::Complex2D& c, const Coeffs& u,
                                            const dsl2::ThickPath& path, int seed) {
    std::map<int, std::array<double, 2>> psi;
    psi[c.edge(seed).a] = {1.0, 0.0};
    psi[c.edge(seed).b] = {0.0, 1.0};
    const std::size_t steps = path.closed ? path.size() : path.faces.size();
    int last = seed;
    for (std::size_t i = 0; i < steps; ++i) {
        const int t = path.triangles[i];
        const auto& in = c.edge(last);
        int s = -1;
        for (int v : c.triangle(t)) {
            if (v != in.a && v != in.b) s = v;
        }
        std::array<double, 2> val{};
        for (int k = 0; k < 2; ++k) {
            val[static_cast<std::size_t>(k)] =
                -(coeff(c, u, t, in.a) * psi[in.a][static_cast<std::size_t>(k)] +
                  coeff(c, u, t, in.b) * psi[in.b][static_cast<std::size_t>(k)]) /
                coeff(c, u, t, s);
        }
        // Keep only the face we leave through; the dropped vertex may recur later.
        const auto& out = c.edge(path.faces[i]);
        std::map<int, std::array<double, 2>> next;
        for (int v : {out.a, out.b}) {
            next[v] = (v == s) ? val : psi[v];
        }
        psi = std::move(next);
        last = path.faces[i];
    }
    const auto& f = c.edge(last);
    return {psi[f.a][0], psi[f.a][1], psi[f.b][0], psi[f.b][1]};
}

// Finds h on vertices with mu'^T_{PQ} = mu^T_{PQ} h_Q / h_P for every
// triangle side, i.e. the two connections differ by an abelian gauge.
// Returns the worst relative mismatch (0 when exactly gauge equivalent).
inline double gauge_distance(const dsl2::Complex2D& c, const Coeffs& a, const Coeffs& b) {
    auto ratio = [&](int t, int p) {
        return coeff(c, b, t, p) / coeff(c, a, t, p);
    };
    // u'_{T:P} / u_{T:P} = g_T / h_P; fix g on triangle 0 and walk.
    std::vector<double> log_h(static_cast<std::size_t>(c.vertex_count()), std::nan(""));
    std::vector<double> log_g(static_cast<std::size_t>(c.triangle_count()), std::nan(""));
    double worst = 0.0;
    for (int root = 0; root < c.triangle_count(); ++root) {
        if (!std::isnan(log_g[static_cast<std::size_t>(root)])) continue;
        log_g[static_cast<std::size_t>(root)] = 0.0;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int t = q.front();
            q.pop();
            for (int p : c.triangle(t)) {
                const double lh = log_g[static_cast<std::size_t>(t)] - std::log(ratio(t, p));
                double& slot = log_h[static_cast<std::size_t>(p)];
                if (std::isnan(slot)) {
                    slot = lh;
                    for (const auto& [tt, li] : c.corners(p)) {
                        (void)li;
                        if (std::isnan(log_g[static_cast<std::size_t>(tt)])) {
                            log_g[static_cast<std::size_t>(tt)] = slot + std::log(ratio(tt, p));
                            q.push(tt);
                        }
                    }
                } else {
                    worst = std::max(worst, std::abs(std::expm1(lh - slot)));
                }
            }
        }
    }
    return worst;
}

} // namespace oracle
