#include <dtpred/metrics.hpp>
#include <dtpred/predict_gen.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

using namespace dtpred;

namespace {

Triangulation flipped_once(const Triangulation& dt)
{
    Triangulation g = dt;
    g.drop_history();
    for (const auto& e : g.edges())
        if (g.is_flippable(g.find_halfedge(e.a, e.b))) {
            g.flip(e);
            break;
        }
    return g;
}

} // namespace

TEST(Metrics, DelaunayAgainstItselfIsZero)
{
    auto ps = test::random_points(400, 2);
    auto dt = delaunay(ps, 0);
    auto r = report_against(dt, dt, 0);
    EXPECT_TRUE(r.all_zero()) << r.csv_row();
    EXPECT_EQ(r.n, 400u);
}

TEST(Metrics, SingleFlip)
{
    auto ps = test::random_points(200, 4);
    auto dt = delaunay(ps, 0);
    auto g = flipped_once(dt);
    auto r = report_against(g, dt, 0);
    EXPECT_EQ(r.D, 1u);
    EXPECT_EQ(r.D_local, 1u);
    EXPECT_EQ(r.D_cross, 1u);
    EXPECT_EQ(r.d_cross, 1u);
    EXPECT_EQ(r.flip_upper, 1u);
    EXPECT_GE(r.D_vio, 2u); // both new triangles see the far corner
}

TEST(Metrics, RectangleNonDelaunayDiagonal)
{
    auto rect = make_point_set({{0, 0}, {3, 0}, {3, 1}, {0, 1}});
    auto g = Triangulation::from_triangles(rect, std::vector<TriangleKey>{{0, 1, 3}, {1, 2, 3}});
    auto r = full_report(g, 0);
    EXPECT_EQ(r.D, 1u);
    EXPECT_EQ(r.D_local, 1u);
    EXPECT_EQ(r.D_cross, 1u);
    EXPECT_EQ(r.D_vio, 2u);
    EXPECT_EQ(r.d_vio, 1u);
}

TEST(Metrics, VertexMismatch)
{
    auto a = delaunay(test::random_points(30, 1), 0);
    auto b = delaunay(test::random_points(30, 2), 0);
    try {
        metric_D(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::VertexMismatch);
    }
}

TEST(Metrics, GridMatchesNaive)
{
    for (std::uint64_t s = 0; s < 12; ++s) {
        auto ps = s % 3 == 0 ? test::grid_points(150, s) : test::random_points(150, s);
        auto dt = delaunay(ps, s);
        Triangulation g = s % 2 ? test::sweep_triangulation(ps) : flip_model(dt, 300, s).g;
        const auto fast = metric_crossings(g, dt);
        const auto slow = metric_crossings_naive(*ps, g.edges(), dt.edges());
        EXPECT_EQ(fast.total, slow.total) << s;
        EXPECT_EQ(fast.max_per_edge, slow.max_per_edge) << s;
        const auto v = metric_violations(g);
        const auto vn = metric_violations_naive(g);
        EXPECT_EQ(v.total, vn.total) << s;
        EXPECT_EQ(v.max_per_triangle, vn.max_per_triangle) << s;
    }
}

TEST(Metrics, ChainInequalities)
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto ps = test::random_points(300, 100 + s);
        auto dt = delaunay(ps, s);
        auto g = flip_model(dt, 50 * (s + 1), s).g;
        auto r = report_against(g, dt, s);
        EXPECT_LE(r.D_local, r.D);
        EXPECT_LE(r.D, r.D_cross);
        EXPECT_LE(r.D, r.flip_upper);
        EXPECT_LE(circle0_max(g, dt), r.d_vio);
        EXPECT_TRUE(vio_relation_holds(r.d_cross, r.d_vio));
        EXPECT_EQ(r.D == 0, r.D_local == 0);
    }
}

TEST(Metrics, ViolationsOverDelaunayAreZero)
{
    auto ps = test::grid_points(200, 9);
    auto dt = delaunay(ps, 0);
    auto g = flip_model(dt, 100, 1).g;
    EXPECT_EQ(metric_violations(g, dt, ViolationBasis::DT).total, 0u);
    EXPECT_GT(metric_violations(g, dt, ViolationBasis::G).total, 0u);
}

TEST(Metrics, CsvShape)
{
    ClosenessReport r;
    EXPECT_EQ(ClosenessReport::csv_header(), "n,D,D_local,D_cross,d_cross,D_vio,d_vio,flip_upper,seed");
    EXPECT_EQ(r.csv_row(), "0,0,0,0,0,0,0,0,0");
}

TEST(Generators, Reproducible)
{
    for (auto d : {Distribution::UniformSquare, Distribution::GaussianClusters, Distribution::GridJitter}) {
        auto a = gen_points(500, d, 7);
        auto b = gen_points(500, d, 7);
        EXPECT_TRUE(*a == *b) << to_string(d);
        EXPECT_EQ(a->size(), 500u);
    }
    auto exact_grid = gen_points(100, Distribution::GridJitter, 1, 0.0);
    EXPECT_EQ(exact_grid->size(), 100u);
    EXPECT_NO_THROW(delaunay(exact_grid, 0).validate(true));
}

TEST(FlipModel, LabelsAndDeterminism)
{
    auto ps = test::random_points(300, 8);
    auto dt = delaunay(ps, 0);
    auto a = flip_model(dt, 400, 5);
    auto b = flip_model(dt, 400, 5);
    EXPECT_EQ(a.picked_labels, b.picked_labels);
    EXPECT_EQ(a.g.edges(), b.g.edges());
    EXPECT_EQ(a.picked_labels.size(), 400u);
    EXPECT_GT(a.flips, 0u);
    a.g.validate(true);
    EXPECT_LE(metric_D(a.g, dt), a.flips);
    EXPECT_EQ(flip_model(dt, 0, 1).g.edges(), dt.edges());

    auto non_dt = flipped_once(dt);
    EXPECT_THROW(flip_model(non_dt, 10, 1), Error);
}

TEST(EdgeSampleModel, KeepsSampleAndTriangulates)
{
    auto ps = test::random_points(400, 21);
    auto dt = delaunay(ps, 0);
    for (auto c : {Completion::Random, Completion::LongestFirst})
        for (double rho : {0.1, 0.5, 0.9}) {
            auto m = edge_sample_model(dt, rho, c, 3);
            m.g.validate(true);
            const auto ge = m.g.edges();
            for (const auto& e : m.kept)
                EXPECT_TRUE(std::binary_search(ge.begin(), ge.end(), e));
            EXPECT_EQ(ge.size(), dt.edges().size());
        }
    auto all = edge_sample_model(dt, 1.0, Completion::LongestFirst, 0);
    EXPECT_EQ(all.g.edges(), dt.edges());
    auto lf = edge_sample_model(dt, 0.2, Completion::LongestFirst, 0);
    EXPECT_GT(metric_D(lf.g, dt), 0u);
}

TEST(PerturbModel, ZeroEpsilonIsDelaunay)
{
    auto ps = test::random_points(300, 30);
    auto dt = delaunay(ps, 0);
    auto g = perturb_model(ps, 0.0, 4);
    EXPECT_FALSE(g.self_crossing);
    EXPECT_EQ(g.edges, dt.edges());
    auto t = g.as_triangulation();
    ASSERT_TRUE(t.has_value());
    EXPECT_EQ(t->edges(), dt.edges());
}

TEST(PerturbModel, LargeEpsilonCanCross)
{
    auto ps = test::random_points(300, 31);
    bool any = false;
    for (std::uint64_t s = 0; s < 5 && !any; ++s)
        any = perturb_model(ps, 0.05, s).self_crossing;
    EXPECT_TRUE(any);
    auto small = perturb_model(ps, 1e-9, 1);
    if (!small.self_crossing) {
        auto t = small.as_triangulation();
        ASSERT_TRUE(t.has_value());
        t->validate(true);
    }
}

TEST(PerturbModel, OffsetsIndependentOfPointSeed)
{
    // same seed for points and model: the offsets must not be a function of the coordinates
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto ps = gen_points(300, Distribution::UniformSquare, s);
        EXPECT_TRUE(perturb_model(ps, 0.2, s).self_crossing) << s;
    }
}
