#include "dsl2/io.hpp"

#include <gtest/gtest.h>

using namespace dsl2;

namespace {

std::shared_ptr<const Complex2D> share(Complex2D c) { return std::make_shared<const Complex2D>(std::move(c)); }

void expect_same_complex(const Complex2D& a, const Complex2D& b) {
    ASSERT_EQ(a.triangle_count(), b.triangle_count());
    ASSERT_EQ(a.edge_count(), b.edge_count());
    EXPECT_EQ(a.triangles(), b.triangles());
    for (int t = 0; t < a.triangle_count(); ++t)
        for (int s = 0; s < 3; ++s) {
            EXPECT_EQ(a.twin(t, s), b.twin(t, s));
            EXPECT_EQ(a.edge_of(t, s), b.edge_of(t, s));
        }
    EXPECT_EQ(a.coloring(), b.coloring());
}

} // namespace

TEST(Io, ComplexRoundTrip) {
    for (const auto& c : {octahedron(), torus_grid(4, 3), torus_grid(2, 2), disk_patch(2, 2), genus_two()}) {
        const auto j = io::to_json(c);
        expect_same_complex(io::complex_from_json(j), c);
        // parse back from text too
        expect_same_complex(io::complex_from_json(io::json::parse(j.dump())), c);
    }
    EXPECT_FALSE(io::to_json(octahedron()).contains("twins"));
    EXPECT_TRUE(io::to_json(torus_grid(2, 2)).contains("twins"));
}

TEST(Io, ComplexErrors) {
    EXPECT_THROW(io::complex_from_json(io::json::parse(R"({"triangles": []})")), Error);
    EXPECT_THROW(io::complex_from_json(io::json::parse(R"({"vertices": 3, "triangles": [[0,1,2]], "coloring": ["x"]})")),
                 Error);
}

TEST(Io, ConnectionAndWeightsRoundTrip) {
    Rng rng(1);
    for (const auto& c : {share(torus_grid(2, 2)), share(octahedron())}) {
        const auto conn = Connection::random(c, rng);
        const auto back = io::connection_from_json(io::json::parse(io::to_json(conn).dump()));
        EXPECT_EQ(back.coeffs(), conn.coeffs());
        const auto w = random_edge_weights(*c, rng);
        EXPECT_EQ(io::edge_weights_from_json(*c, io::json::parse(io::to_json(*c, w).dump())).values, w.values);
    }
}

TEST(Io, OperatorAndNetworkRoundTrip) {
    Rng rng(2);
    const auto l = random_operator(share(torus_grid(3, 3)), rng);
    const auto back = io::operator_from_json(io::to_json(l));
    EXPECT_EQ(back.offdiag, l.offdiag);
    EXPECT_EQ(back.potential, l.potential);
    const auto net = octahedron_network(rng);
    const auto nb = io::network_from_json(io::json::parse(io::to_json(net).dump()));
    EXPECT_EQ(nb.black(), net.black());
    EXPECT_EQ(nb.laplacian(), net.laplacian());
}

TEST(Io, CsvRoundTrip) {
    Rng rng(3);
    const auto f = LatticeField::generate(3, 4, [&](int, int) { return rng.uniform(-1.0, 1.0); });
    const auto text = io::field_csv(f);
    EXPECT_EQ(text.substr(0, 10), "m,n,value\n");
    EXPECT_EQ(io::field_from_csv(text).values(), f.values());
    TodaStack s{2, {f, f}};
    const auto back = io::stack_from_csv(io::stack_csv(s));
    EXPECT_EQ(back.k0, 2);
    EXPECT_EQ(back.layer(3).values(), f.values());
    EXPECT_THROW(io::field_from_csv("a,b\n"), Error);
}

TEST(Io, FormatDoubleIsShortAndExact) {
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(1.0), "1");
    const double x = 1.0 / 3.0;
    EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
}
