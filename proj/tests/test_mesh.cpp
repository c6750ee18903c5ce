#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "prns/error.hpp"
#include "prns/mesh.hpp"

using namespace prns;

namespace {

Mesh unit_square(int n) {
    DomainSpec s;
    s.nx = s.ny = n;
    return generate_structured(s);
}

int euler(const Mesh& m) {
    return static_cast<int>(m.num_vertices()) - static_cast<int>(m.num_edges()) + static_cast<int>(m.num_triangles());
}

}  // namespace

TEST(Mesh, SingleCellCounts) {
    const Mesh m = unit_square(1);
    EXPECT_EQ(m.num_vertices(), 4u);
    EXPECT_EQ(m.num_triangles(), 2u);
    EXPECT_EQ(m.num_edges(), 5u);
    int boundary = 0;
    for (std::size_t e = 0; e < m.num_edges(); ++e) boundary += m.is_boundary_edge(static_cast<int>(e));
    EXPECT_EQ(boundary, 4);
}

TEST(Mesh, EightByEightCounts) {
    const Mesh m = unit_square(8);
    EXPECT_EQ(m.num_triangles(), 128u);
    EXPECT_EQ(m.num_vertices(), 81u);
    EXPECT_EQ(euler(m), 1);
}

TEST(Mesh, KovasznayDomain) {
    DomainSpec s;
    s.x_range = {-0.5, 1.5};
    s.y_range = {0.0, 2.0};
    s.nx = s.ny = 16;
    const Mesh m = generate_structured(s);
    EXPECT_NEAR(m.total_area(), 4.0, 1e-12);
    EXPECT_NEAR(m.max_edge_length(), 2.0 * std::sqrt(2.0) / 16.0, 1e-14);
}

TEST(Mesh, Invariants) {
    DomainSpec s;
    s.x_range = {0.0, 3.0};
    s.y_range = {-1.0, 1.0};
    s.nx = 5;
    s.ny = 3;
    const Mesh m = generate_structured(s);
    EXPECT_NEAR(m.total_area(), 6.0, 6e-12);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.area(static_cast<int>(t)), 0.0);
    // Each interior edge is shared by two triangles with opposite signs.
    std::vector<int> sign_sum(m.num_edges(), 0), uses(m.num_edges(), 0);
    for (std::size_t t = 0; t < m.num_triangles(); ++t)
        for (int i = 0; i < 3; ++i) {
            const int e = m.triangle_edge(static_cast<int>(t), i);
            sign_sum[e] += m.edge_sign(static_cast<int>(t), i);
            ++uses[e];
        }
    std::size_t tagged = 0;
    for (const auto& tag : m.tags()) tagged += m.tagged_edges(tag).size();
    std::size_t boundary = 0;
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
        const int ei = static_cast<int>(e);
        if (m.is_boundary_edge(ei)) {
            ++boundary;
            EXPECT_EQ(uses[e], 1);
            EXPECT_FALSE(m.edge_tag(ei).empty());
        } else {
            EXPECT_EQ(uses[e], 2);
            EXPECT_EQ(sign_sum[e], 0);
        }
        EXPECT_LT(m.edge(ei)[0], m.edge(ei)[1]);
    }
    EXPECT_EQ(tagged, boundary);
    EXPECT_EQ(m.tagged_edges("left").size(), 3u);
    EXPECT_EQ(m.tagged_edges("top").size(), 5u);
}

TEST(Mesh, DegenerateRangeRejected) {
    DomainSpec s;
    s.x_range = {1.0, 1.0};
    EXPECT_THROW(generate_structured(s), InvalidDomain);
    DomainSpec t;
    t.nx = 0;
    EXPECT_THROW(generate_structured(t), InvalidDomain);
}

TEST(Mesh, StretchingMap) {
    EXPECT_DOUBLE_EQ(tanh_stretch(0.5, 2.5), 0.5);
    EXPECT_DOUBLE_EQ(tanh_stretch(0.0, 2.5), 0.0);
    EXPECT_DOUBLE_EQ(tanh_stretch(1.0, 2.5), 1.0);
    EXPECT_NEAR(tanh_stretch(0.25, 2.5), 0.0701037165451081569, 1e-15);
    EXPECT_THROW(tanh_stretch(0.3, 0.0), InvalidArgument);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double x = tanh_stretch(i / 100.0, 2.5);
        EXPECT_GT(x, prev);
        prev = x;
    }
}

TEST(Mesh, StretchedMeshIsMonotone) {
    const Mesh base = unit_square(10);
    const Mesh m = apply_tanh_stretching(base, 2.5);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
    std::vector<std::size_t> order(base.num_vertices());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return base.vertex(static_cast<int>(a)).x() < base.vertex(static_cast<int>(b)).x();
    });
    for (std::size_t i = 1; i < order.size(); ++i)
        EXPECT_LE(m.vertex(static_cast<int>(order[i - 1])).x(), m.vertex(static_cast<int>(order[i])).x());
    EXPECT_THROW(apply_tanh_stretching(base, -1.0), InvalidArgument);
}

TEST(Mesh, UniformRefinement) {
    const Mesh m = unit_square(1);
    const Mesh r = refine_uniform(m);
    EXPECT_EQ(r.num_triangles(), 8u);
    EXPECT_EQ(r.num_vertices(), 9u);
    EXPECT_EQ(euler(r), 1);
    EXPECT_DOUBLE_EQ(r.max_edge_length(), 0.5 * m.max_edge_length());
    const Mesh rr = refine_uniform(r);
    EXPECT_EQ(rr.num_triangles(), 4 * r.num_triangles());
    EXPECT_EQ(rr.tagged_edges("bottom").size(), 4u);
    EXPECT_NEAR(shape_regularity(rr), shape_regularity(m), 1e-12);
}

TEST(Mesh, ShapeRegularityOracles) {
    const double s3 = std::sqrt(3.0);
    const Mesh eq({Vec2(0, 0), Vec2(1, 0), Vec2(0.5, s3 / 2)}, {{0, 1, 2}}, {{0, 1, "b"}, {1, 2, "b"}, {2, 0, "b"}});
    EXPECT_NEAR(shape_regularity(eq), 3.46410161513775458705, 1e-13);
    EXPECT_NEAR(shape_regularity(unit_square(3)), 4.82842712474619009760, 1e-13);
}

TEST(Mesh, ClockwiseTriangleRejected) {
    EXPECT_THROW(Mesh({Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)}, {{0, 1, 2}}, {}), ValidationError);
}

TEST(Mesh, RoundTrip) {
    const Mesh m = apply_tanh_stretching(unit_square(4), 1.7);
    std::stringstream ss;
    write_mesh(m, ss);
    const Mesh r = read_mesh(ss);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_triangles(), m.num_triangles());
    for (std::size_t v = 0; v < m.num_vertices(); ++v)
        EXPECT_EQ(r.vertex(static_cast<int>(v)), m.vertex(static_cast<int>(v)));
    for (std::size_t t = 0; t < m.num_triangles(); ++t)
        EXPECT_EQ(r.triangle(static_cast<int>(t)), m.triangle(static_cast<int>(t)));
    EXPECT_EQ(r.tags(), m.tags());
    for (const auto& tag : m.tags()) EXPECT_EQ(r.tagged_edges(tag), m.tagged_edges(tag));
}

TEST(Mesh, ParseErrorsCarryLineNumbers) {
    std::istringstream bad_header("mesh v2\n");
    EXPECT_THROW(read_mesh(bad_header), ParseError);
    std::istringstream bad_vertex("ns-mesh v1\nvertices 2\n0 0\n1 x\n");
    try {
        read_mesh(bad_vertex);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(Mesh, MissingVertexRejected) {
    std::istringstream in("ns-mesh v1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 5\nboundary 0\n");
    EXPECT_THROW(read_mesh(in), ValidationError);
}

TEST(Mesh, CylinderFixture) {
    const Mesh m = import_mesh(std::string(PRNS_DATA_DIR) + "/cylinder_channel.mesh");
    EXPECT_EQ(m.tags(), (std::vector<std::string>{"inlet", "outlet", "wall"}));
    EXPECT_EQ(euler(m), 0);  // one hole
    const auto [lo, hi] = m.bounding_box();
    EXPECT_NEAR(lo.x(), 0.0, 1e-14);
    EXPECT_NEAR(hi.x(), 2.2, 1e-14);
    EXPECT_NEAR(hi.y(), 0.41, 1e-14);
    for (int e : m.tagged_edges("inlet")) EXPECT_NEAR(m.vertex(m.edge(e)[0]).x(), 0.0, 1e-14);
    for (int e : m.tagged_edges("outlet")) EXPECT_NEAR(m.vertex(m.edge(e)[1]).x(), 2.2, 1e-14);
    EXPECT_LT(shape_regularity(m), 15.0);
}

TEST(Mesh, PointLocation) {
    const Mesh m = apply_tanh_stretching(unit_square(7), 2.0);
    const PointLocator loc(m);
    for (const Vec2& x : {Vec2(0.3, 0.71), Vec2(0.0, 0.0), Vec2(1.0, 0.5), Vec2(0.999, 0.001)}) {
        const auto hit = loc.locate(x);
        ASSERT_TRUE(hit.has_value());
        const auto& tri = m.triangle(hit->first);
        const Vec2& a = m.vertex(tri[0]);
        const Vec2 back = a + hit->second.x() * (m.vertex(tri[1]) - a) + hit->second.y() * (m.vertex(tri[2]) - a);
        EXPECT_NEAR((back - x).norm(), 0.0, 1e-12);
    }
    EXPECT_FALSE(loc.locate(Vec2(1.2, 0.5)).has_value());
}
