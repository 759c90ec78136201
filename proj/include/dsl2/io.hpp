#pragma once

#include "dsl2/complex.hpp"
#include "dsl2/connection.hpp"
#include "dsl2/electric.hpp"
#include "dsl2/error.hpp"
#include "dsl2/laplace_toda.hpp"
#include "dsl2/schrodinger.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace dsl2::io {

using json = nlohmann::json;

// Complexes

namespace detail {

inline bool pairing_is_implicit(const Complex2D& c) {
    try {
        const auto rebuilt = Complex2D::from_triangles(c.vertex_count(), c.triangles());
        for (int t = 0; t < c.triangle_count(); ++t) {
            for (int s = 0; s < 3; ++s) {
                if (!(rebuilt.twin(t, s) == c.twin(t, s))) return false;
            }
        }
        return true;
    } catch (const Error&) {
        return false;
    }
}

template <typename T>
T get_or_throw(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw Error(ErrorCode::InvalidInput, std::string("missing key \"") + key + "\"");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("bad value for \"") + key + "\": " + e.what());
    }
}

// Edges sharing a vertex pair (small tori) are matched in id order.
class EdgeLookup {
public:
    explicit EdgeLookup(const std::vector<std::pair<int, int>>& pairs) {
        for (int e = 0; e < static_cast<int>(pairs.size()); ++e) {
            const auto [a, b] = pairs[static_cast<std::size_t>(e)];
            ids_[{std::min(a, b), std::max(a, b)}].push_back(e);
        }
    }
    int take(int i, int j) {
        auto it = ids_.find({std::min(i, j), std::max(i, j)});
        auto& used = used_[{std::min(i, j), std::max(i, j)}];
        if (it == ids_.end() || used >= it->second.size()) {
            throw Error(ErrorCode::InvalidInput, "no unused edge " + std::to_string(i) + "-" + std::to_string(j));
        }
        return it->second[used++];
    }

private:
    std::map<std::pair<int, int>, std::vector<int>> ids_;
    std::map<std::pair<int, int>, std::size_t> used_;
};

inline std::vector<std::pair<int, int>> edge_pairs(const Complex2D& c) {
    std::vector<std::pair<int, int>> out;
    for (const auto& e : c.edges()) out.emplace_back(e.a, e.b);
    return out;
}

} // namespace detail

/// {"vertices", "triangles", "coloring"?}; "twins" ([t, side, t', side'])
/// is added only when the gluing cannot be read off the vertex pairs.
inline json to_json(const Complex2D& c) {
    json j;
    j["vertices"] = c.vertex_count();
    j["triangles"] = json::array();
    for (const auto& t : c.triangles()) j["triangles"].push_back({t[0], t[1], t[2]});
    if (c.coloring()) {
        j["coloring"] = json::array();
        for (Color col : *c.coloring()) j["coloring"].push_back(col == Color::black ? "b" : "w");
    }
    if (!detail::pairing_is_implicit(c)) {
        j["twins"] = json::array();
        for (int t = 0; t < c.triangle_count(); ++t) {
            for (int s = 0; s < 3; ++s) {
                const auto tw = c.twin(t, s);
                if (tw.valid() && std::pair(t, s) < std::pair(tw.tri, tw.side)) {
                    j["twins"].push_back({t, s, tw.tri, tw.side});
                }
            }
        }
    }
    return j;
}

inline Complex2D complex_from_json(const json& j) {
    const int n = detail::get_or_throw<int>(j, "vertices");
    const auto raw = detail::get_or_throw<std::vector<std::array<int, 3>>>(j, "triangles");
    std::vector<Complex2D::Triangle> tris(raw.begin(), raw.end());
    std::optional<std::vector<Color>> coloring;
    if (j.contains("coloring")) {
        coloring.emplace();
        for (const auto& s : detail::get_or_throw<std::vector<std::string>>(j, "coloring")) {
            if (s != "b" && s != "w") throw Error(ErrorCode::InvalidInput, "coloring entries must be \"b\" or \"w\"");
            coloring->push_back(s == "b" ? Color::black : Color::white);
        }
    }
    if (!j.contains("twins")) return Complex2D::from_triangles(n, std::move(tris), std::move(coloring));
    std::vector<std::array<HalfEdge, 3>> twins(tris.size());
    for (const auto& g : detail::get_or_throw<std::vector<std::array<int, 4>>>(j, "twins")) {
        if (g[0] < 0 || g[2] < 0 || g[0] >= static_cast<int>(tris.size()) || g[2] >= static_cast<int>(tris.size()) ||
            g[1] < 0 || g[1] > 2 || g[3] < 0 || g[3] > 2) {
            throw Error(ErrorCode::InvalidInput, "twin entry out of range");
        }
        twins[static_cast<std::size_t>(g[0])][static_cast<std::size_t>(g[1])] = {g[2], g[3]};
        twins[static_cast<std::size_t>(g[2])][static_cast<std::size_t>(g[3])] = {g[0], g[1]};
    }
    return Complex2D::from_glued(n, std::move(tris), twins, std::move(coloring));
}

// Connections

inline json to_json(const Connection& conn) {
    json j;
    j["complex"] = to_json(conn.complex());
    j["coeffs"] = json::array();
    for (int t = 0; t < conn.complex().triangle_count(); ++t) {
        for (int i = 0; i < 3; ++i) j["coeffs"].push_back({t, i, conn.u_local(t, i)});
    }
    return j;
}

inline Connection connection_from_json(const json& j) {
    auto c = std::make_shared<const Complex2D>(complex_from_json(detail::get_or_throw<json>(j, "complex")));
    std::vector<std::array<double, 3>> coeffs(static_cast<std::size_t>(c->triangle_count()), {0.0, 0.0, 0.0});
    std::vector<int> seen(coeffs.size() * 3, 0);
    for (const auto& e : detail::get_or_throw<json>(j, "coeffs")) {
        const int t = e.at(0).get<int>();
        const int i = e.at(1).get<int>();
        if (t < 0 || t >= c->triangle_count() || i < 0 || i > 2) {
            throw Error(ErrorCode::InvalidInput, "coefficient index out of range");
        }
        coeffs[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = e.at(2).get<double>();
        ++seen[static_cast<std::size_t>(3 * t + i)];
    }
    for (int s : seen) {
        if (s != 1) throw Error(ErrorCode::InvalidInput, "every (triangle, vertex) needs exactly one coefficient");
    }
    return {std::move(c), std::move(coeffs)};
}

inline json to_json(const Complex2D& c, const EdgeWeights& w) {
    json j;
    j["weights"] = json::array();
    for (int e = 0; e < c.edge_count(); ++e) {
        j["weights"].push_back({c.edge(e).a, c.edge(e).b, w.values.at(static_cast<std::size_t>(e))});
    }
    return j;
}

inline EdgeWeights edge_weights_from_json(const Complex2D& c, const json& j) {
    detail::EdgeLookup lookup(detail::edge_pairs(c));
    EdgeWeights w{std::vector<double>(static_cast<std::size_t>(c.edge_count()), 0.0)};
    std::vector<char> seen(w.values.size(), 0);
    for (const auto& e : detail::get_or_throw<json>(j, "weights")) {
        const int id = lookup.take(e.at(0).get<int>(), e.at(1).get<int>());
        w.values[static_cast<std::size_t>(id)] = e.at(2).get<double>();
        seen[static_cast<std::size_t>(id)] = 1;
    }
    for (char s : seen) {
        if (!s) throw Error(ErrorCode::InvalidInput, "every edge needs a weight");
    }
    return w;
}

// Self-adjoint operators

inline json to_json(const SelfAdjointOperator& l) {
    json j;
    j["complex"] = to_json(*l.complex);
    j["offdiag"] = json::array();
    for (int e = 0; e < l.complex->edge_count(); ++e) {
        j["offdiag"].push_back({l.complex->edge(e).a, l.complex->edge(e).b, l.offdiag[static_cast<std::size_t>(e)]});
    }
    j["potential"] = l.potential;
    return j;
}

inline SelfAdjointOperator operator_from_json(const json& j) {
    auto c = std::make_shared<const Complex2D>(complex_from_json(detail::get_or_throw<json>(j, "complex")));
    SelfAdjointOperator l;
    json weights;
    weights["weights"] = detail::get_or_throw<json>(j, "offdiag");
    l.offdiag = edge_weights_from_json(*c, weights).values;
    l.potential = detail::get_or_throw<std::vector<double>>(j, "potential");
    l.complex = std::move(c);
    l.check();
    return l;
}

// Networks

inline json to_json(const ElectricNetwork& net) {
    json j;
    j["vertices"] = net.vertex_count();
    j["edges"] = json::array();
    for (const auto& e : net.edges()) j["edges"].push_back({e.i, e.j, e.c});
    if (net.has_k()) {
        j["black_triangles"] = json::array();
        for (const auto& t : net.black()) j["black_triangles"].push_back({t[0], t[1], t[2]});
    }
    return j;
}

inline ElectricNetwork network_from_json(const json& j) {
    const int n = detail::get_or_throw<int>(j, "vertices");
    std::vector<NetEdge> edges;
    for (const auto& e : detail::get_or_throw<json>(j, "edges")) {
        edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    }
    std::optional<std::vector<std::array<int, 3>>> black;
    if (j.contains("black_triangles")) black = detail::get_or_throw<std::vector<std::array<int, 3>>>(j, "black_triangles");
    return {n, std::move(edges), std::move(black)};
}

// CSV field dumps

/// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

/// Header m,n,value; m outer, n inner.
inline std::string field_csv(const LatticeField& f) {
    std::ostringstream out;
    out << "m,n,value\n";
    for (int m = 0; m < f.rows(); ++m) {
        for (int n = 0; n < f.cols(); ++n) out << m << ',' << n << ',' << format_double(f(m, n)) << '\n';
    }
    return out.str();
}

/// Header k,m,n,value.
inline std::string stack_csv(const TodaStack& s) {
    std::ostringstream out;
    out << "k,m,n,value\n";
    for (int k = s.k0; k <= s.k1(); ++k) {
        const auto& f = s.layer(k);
        for (int m = 0; m < f.rows(); ++m) {
            for (int n = 0; n < f.cols(); ++n) out << k << ',' << m << ',' << n << ',' << format_double(f(m, n)) << '\n';
        }
    }
    return out.str();
}

namespace detail {

inline std::vector<std::vector<double>> csv_rows(const std::string& text, const std::string& header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw Error(ErrorCode::InvalidInput, "expected CSV header " + header);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidInput, "bad CSV cell \"" + cell + "\"");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

inline LatticeField field_from_csv(const std::string& text, Boundary boundary = Boundary::periodic) {
    const auto rows = detail::csv_rows(text, "m,n,value");
    int r = 0;
    int c = 0;
    for (const auto& row : rows) {
        if (row.size() != 3) throw Error(ErrorCode::InvalidInput, "CSV rows need three cells");
        r = std::max(r, static_cast<int>(row[0]) + 1);
        c = std::max(c, static_cast<int>(row[1]) + 1);
    }
    if (static_cast<std::size_t>(r) * static_cast<std::size_t>(c) != rows.size()) {
        throw Error(ErrorCode::InvalidInput, "CSV does not cover a full window");
    }
    LatticeField f(r, c, 0.0, boundary);
    for (const auto& row : rows) f.set(static_cast<int>(row[0]), static_cast<int>(row[1]), row[2]);
    return f;
}

inline TodaStack stack_from_csv(const std::string& text, Boundary boundary = Boundary::periodic) {
    const auto rows = detail::csv_rows(text, "k,m,n,value");
    std::map<int, std::string> layers;
    for (const auto& row : rows) {
        if (row.size() != 4) throw Error(ErrorCode::InvalidInput, "CSV rows need four cells");
        auto& s = layers[static_cast<int>(row[0])];
        if (s.empty()) s = "m,n,value\n";
        s += std::to_string(static_cast<int>(row[1])) + "," + std::to_string(static_cast<int>(row[2])) + "," +
             format_double(row[3]) + "\n";
    }
    TodaStack out;
    if (layers.empty()) return out;
    out.k0 = layers.begin()->first;
    for (const auto& [k, s] : layers) {
        if (k != out.k0 + static_cast<int>(out.layers.size())) throw Error(ErrorCode::InvalidInput, "layers must be consecutive");
        out.layers.push_back(field_from_csv(s, boundary));
    }
    return out;
}

// Files

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
    out << text;
}

inline json read_json(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
    }
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

} // namespace dsl2::io
