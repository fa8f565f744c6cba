#include <dtpred/delaunay.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

using namespace dtpred;
using dtpred::test::brute_force_dt;
using dtpred::test::brute_force_edges;
using dtpred::test::random_points;

TEST(Delaunay, SingleTriangle)
{
    auto ps = make_point_set({{0, 0}, {1, 0}, {0, 1}});
    auto dt = delaunay(ps, 1);
    dt.validate(true);
    EXPECT_EQ(dt.num_triangles(), 1u);
    EXPECT_EQ(dt.edges().size(), 3u);
}

TEST(Delaunay, TooFewPoints)
{
    try {
        delaunay(make_point_set({{0, 0}, {1, 0}}), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooFewPoints);
    }
}

TEST(Delaunay, RectangleDiagonalFromTieBreak)
{
    // cocircular: the perturbed incircle puts 3 outside circle(0,1,2)
    auto ps = make_point_set({{0, 0}, {3, 0}, {3, 1}, {0, 1}});
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto dt = delaunay(ps, seed);
        const std::vector<EdgeKey> want = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}};
        EXPECT_EQ(dt.edges(), want);
    }
}

TEST(Delaunay, SeedIndependent)
{
    auto ps = random_points(100, 3);
    auto a = delaunay(ps, 1), b = delaunay(ps, 2);
    EXPECT_EQ(a.edges(), b.edges());
    a.validate(true);
}

TEST(Delaunay, MatchesBruteForceSmall)
{
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t n = 3 + s % 7;
        auto ps = s % 2 ? random_points(n, s) : dtpred::test::grid_points(n, s);
        auto dt = delaunay(ps, s);
        auto tris = dt.triangles();
        std::vector<TriangleKey> got;
        for (auto t : tris)
            got.push_back(make_triangle_key(t[0], t[1], t[2]));
        std::sort(got.begin(), got.end());
        ASSERT_EQ(got, brute_force_dt(*ps)) << "seed " << s;
    }
}

TEST(Delaunay, AllEdgesLocallyDelaunay)
{
    auto ps = dtpred::test::grid_points(400, 9);
    auto dt = delaunay(ps, 4);
    dt.validate();
    for (const auto& e : dt.edges())
        ASSERT_TRUE(dt.is_locally_delaunay(e));
}

TEST(Locate, CentroidOutsideAndVertex)
{
    auto ps = make_point_set({{0, 0}, {4, 0}, {0, 4}, {4, 4}, {1, 1}, {10, 10}, {2, 2.5}});
    Triangulation dt(ps, true);
    for (VertexId v : {0u, 1u, 2u, 3u, 4u})
        dt.insert(v);
    // centroid of triangle (0,1,4)
    const Point q{(0 + 4 + 1) / 3.0, (0 + 0 + 1) / 3.0, 5};
    const TriId t = dt.locate(q);
    EXPECT_FALSE(dt.is_ghost(t));
    EXPECT_EQ(make_triangle_key(dt.corner(t, 0), dt.corner(t, 1), dt.corner(t, 2)),
              make_triangle_key(0, 1, 4));
    EXPECT_TRUE(dt.is_ghost(dt.locate((*ps)[5])));
    const TriId tv = dt.locate((*ps)[4]);
    EXPECT_TRUE(dt.has_vertex(tv, 4));
    // frozen: the first child incident to the vertex in history order
    EXPECT_EQ(make_triangle_key(dt.corner(tv, 0), dt.corner(tv, 1), dt.corner(tv, 2)),
              make_triangle_key(0, 2, 4));
}

TEST(InsertSeeded, CentroidAndHullExtension)
{
    auto ps = make_point_set({{0, 0}, {3, 0}, {0, 3}, {1, 1}, {5, 5}});
    Triangulation t(ps);
    t.insert(0), t.insert(1), t.insert(2);
    insert_seeded(t, 3, t.any_live_triangle());
    EXPECT_EQ(t.num_triangles(), 3u);
    insert_seeded(t, 4, kNoTri);
    t.validate(true);
    EXPECT_EQ(t.num_hull_vertices(), 4u);
    EXPECT_THROW(insert_seeded(t, 4, kNoTri), Error);
}

TEST(InsertSeeded, OrderIndependent)
{
    auto ps = random_points(200, 17);
    auto ref = delaunay(ps, 0).edges();
    std::vector<VertexId> ids(ps->size());
    std::iota(ids.begin(), ids.end(), 0u);
    std::reverse(ids.begin(), ids.end());
    Triangulation t(ps);
    TriId hint = kNoTri;
    for (VertexId v : ids)
        hint = insert_seeded(t, v, hint);
    EXPECT_EQ(t.edges(), ref);
}

TEST(Merge, HalvesEqualWhole)
{
    auto ps = random_points(50, 23);
    std::vector<VertexId> left, right;
    for (VertexId v = 0; v < ps->size(); ++v)
        ((*ps)[v].x < 0.5 ? left : right).push_back(v);
    auto a = delaunay_subset(ps, left, 1), b = delaunay_subset(ps, right, 2);
    auto m = merge_dt(a, b);
    m.validate(true);
    EXPECT_EQ(m.edges(), delaunay(ps, 3).edges());
}

TEST(Merge, EmptyAndCollision)
{
    auto ps = random_points(30, 2);
    auto whole = delaunay(ps, 1);
    Triangulation empty(ps);
    EXPECT_EQ(merge_dt(whole, empty).edges(), whole.edges());
    try {
        merge_dt(whole, delaunay_subset(ps, {0, 1, 2}, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IdCollision);
    }
}

TEST(Merge, TwoTriangles)
{
    auto ps = make_point_set({{0, 0}, {1, 0}, {0, 1}, {3, 3}, {4, 3}, {3.5, 5}});
    auto m = merge_dt(delaunay_subset(ps, {0, 1, 2}, 1), delaunay_subset(ps, {3, 4, 5}, 1));
    EXPECT_EQ(m.edges(), brute_force_edges(*ps));
}

TEST(Legalize, DelaunayNeedsNoFlips)
{
    auto ps = random_points(80, 4);
    auto [g, flips] = greedy_legalize(delaunay(ps, 0));
    EXPECT_EQ(flips, 0u);
}

TEST(Legalize, OneFlipUndone)
{
    auto ps = make_point_set({{0, 0}, {3, 0}, {3, 1}, {0, 1}});
    auto dt = delaunay(ps, 0);
    auto g = dt;
    g.flip({0, 2});
    auto [h, flips] = greedy_legalize(g);
    EXPECT_EQ(flips, 1u);
    EXPECT_EQ(h.edges(), dt.edges());
}

TEST(Legalize, RandomTriangulationReachesDelaunay)
{
    auto ps = random_points(50, 8);
    auto dt = delaunay(ps, 0);
    auto g = dtpred::test::sweep_triangulation(ps);
    auto [h, flips] = greedy_legalize(g);
    EXPECT_EQ(h.edges(), dt.edges());
    std::vector<EdgeKey> diff;
    auto ge = g.edges(), de = dt.edges();
    std::set_difference(ge.begin(), ge.end(), de.begin(), de.end(), std::back_inserter(diff));
    EXPECT_GE(flips, diff.size());
}

TEST(PlanarMst, ThreePoints)
{
    auto ps = make_point_set({{0, 0}, {1, 0}, {0, 2}});
    auto t = planar_mst(delaunay(ps, 0));
    const std::vector<EdgeKey> want = {{0, 1}, {0, 2}};
    EXPECT_EQ(t.edges, want);
}

TEST(PlanarMst, MatchesExhaustiveWeight)
{
    for (std::uint64_t s = 0; s < 60; ++s) {
        const std::size_t n = 3 + s % 6;
        auto ps = random_points(n, 100 + s);
        auto t = planar_mst(delaunay(ps, s));
        ASSERT_EQ(t.edges.size(), n - 1);
        ASSERT_NEAR(dtpred::test::tree_weight(*ps, t.edges), dtpred::test::exhaustive_mst_weight(*ps),
                    1e-12);
    }
}

TEST(PlanarMst, CollinearChainIsPath)
{
    auto ps = make_point_set({{0, 0}, {1, 0.01}, {2, 0}, {3, 0.01}, {4, 0}, {5, 0.01}});
    auto t = planar_mst(delaunay(ps, 0));
    const std::vector<EdgeKey> want = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};
    EXPECT_EQ(t.edges, want);
}
