#include <dtpred/predict_gen.hpp>
#include <dtpred/verify.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

using namespace dtpred;

namespace {

std::vector<EdgeKey> without(std::vector<EdgeKey> es, std::initializer_list<EdgeKey> drop)
{
    for (const auto& d : drop)
        std::erase(es, d);
    return es;
}

// An interior DT edge whose two triangles each have another interior edge.
std::optional<std::array<EdgeKey, 3>> interior_triple(const Triangulation& dt)
{
    for (const auto& e : dt.edges()) {
        const HalfEdge h = dt.find_halfedge(e.a, e.b);
        if (dt.is_hull_halfedge(h) || dt.is_hull_halfedge(dt.twin(h)))
            continue;
        const HalfEdge f = Triangulation::next(h), g = Triangulation::next(dt.twin(h));
        if (dt.is_hull_halfedge(f) || dt.is_hull_halfedge(dt.twin(f)) || dt.is_hull_halfedge(g) ||
            dt.is_hull_halfedge(dt.twin(g)))
            continue;
        return std::array<EdgeKey, 3>{e, EdgeKey(dt.origin(f), dt.dest(f)), EdgeKey(dt.origin(g), dt.dest(g))};
    }
    return std::nullopt;
}

} // namespace

TEST(IsDelaunay, Examples)
{
    auto ps = test::random_points(200, 1);
    auto dt = delaunay(ps, 0);
    EXPECT_TRUE(is_delaunay(dt));
    auto g = flip_model(dt, 1, 0).g;
    for (std::uint64_t s = 1; g.edges() == dt.edges(); ++s)
        g = flip_model(dt, 1, s).g;
    EXPECT_FALSE(is_delaunay(g));
    EXPECT_TRUE(is_delaunay(delaunay(make_point_set({{0, 0}, {1, 0}, {0, 1}}), 0)));
}

TEST(IsDelaunay, AgreesWithRecomputation)
{
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto ps = test::random_points(80, s);
        auto dt = delaunay(ps, s);
        auto g = flip_model(dt, s % 4, s).g;
        EXPECT_EQ(is_delaunay(g), dt_equal(g, dt)) << s;
    }
}

TEST(DtEqual, Examples)
{
    auto ps = test::random_points(100, 4);
    auto a = delaunay(ps, 1), b = delaunay(ps, 2);
    EXPECT_TRUE(dt_equal(a, a));
    EXPECT_TRUE(dt_equal(a, b));
    EXPECT_FALSE(dt_equal(a, flip_model(a, 50, 3).g));
}

TEST(Certify, DelaunayAndDelaunayMinusEdge)
{
    auto ps = test::random_points(150, 7);
    auto dt = delaunay(ps, 0);
    EXPECT_TRUE(certify_subgraph(Pslg::build(ps, dt.edges())).certified);
    auto t = interior_triple(dt);
    ASSERT_TRUE(t.has_value());
    auto r = certify_subgraph(Pslg::build(ps, without(dt.edges(), {(*t)[0]})));
    EXPECT_TRUE(r.certified);
}

TEST(Certify, FlippedDiagonalHasWitness)
{
    auto rect = make_point_set({{0, 0}, {3, 0}, {3, 1}, {0, 1}});
    auto r = certify_subgraph(Pslg::build(rect, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 3}}));
    EXPECT_FALSE(r.certified);
    ASSERT_TRUE(r.witness.has_value());
    const auto& w = *r.witness;
    EXPECT_EQ(incircle((*rect)[w.triangle[0]], (*rect)[w.triangle[1]], (*rect)[w.triangle[2]], (*rect)[w.point]),
              InsideOutside::Inside);

    auto ps = test::random_points(150, 8);
    auto dt = delaunay(ps, 0);
    auto g = flip_model(dt, 1, 0).g;
    for (std::uint64_t s = 1; g.edges() == dt.edges(); ++s)
        g = flip_model(dt, 1, s).g;
    auto rr = certify_subgraph(Pslg::build(ps, g.edges()));
    EXPECT_FALSE(rr.certified);
    EXPECT_TRUE(rr.witness.has_value());
}

TEST(Certify, HypothesisFailureReportsEdge)
{
    auto ps = test::random_points(150, 9);
    auto dt = delaunay(ps, 0);
    auto t = interior_triple(dt);
    ASSERT_TRUE(t.has_value());
    auto r = certify_subgraph(Pslg::build(ps, without(dt.edges(), {(*t)[1], (*t)[2]})));
    EXPECT_FALSE(r.certified);
    ASSERT_TRUE(r.offending_edge.has_value());
    EXPECT_EQ(*r.offending_edge, (*t)[0]);
    EXPECT_FALSE(r.witness.has_value());
}

TEST(Certify, SoundOnFuzzedSubgraphs)
{
    std::size_t certified = 0, with_foreign = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        auto ps = test::random_points(25 + s % 20, s);
        auto dt = delaunay(ps, s);
        auto g = flip_model(dt, s % 7, s).g; // s % 7 flips bring non-DT edges in
        std::mt19937_64 rng(s);
        std::vector<EdgeKey> es;
        const double keep = 0.6 + 0.4 * static_cast<double>(s % 5) / 4.0;
        std::bernoulli_distribution coin(keep);
        for (const auto& e : g.edges())
            if (coin(rng))
                es.push_back(e);
        const auto dte = dt.edges();
        const bool foreign = std::any_of(es.begin(), es.end(), [&](const EdgeKey& e) {
            return !std::binary_search(dte.begin(), dte.end(), e);
        });
        auto r = certify_subgraph(Pslg::build(ps, es));
        if (!r.certified)
            continue;
        ++certified;
        with_foreign += foreign ? 1 : 0;
        for (const auto& e : es)
            EXPECT_TRUE(std::binary_search(dte.begin(), dte.end(), e)) << s;
    }
    EXPECT_GT(certified, 50u);
    EXPECT_EQ(with_foreign, 0u);
}

TEST(Cascade, RemovesLinearlyManyEdges)
{
    double worst = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        auto ps = test::random_points(60, s);
        auto dt = delaunay(ps, s);
        auto g = s % 2 ? flip_model(dt, 100, s).g : test::sweep_triangulation(ps);
        std::mt19937_64 rng(s);
        auto es = g.edges();
        std::shuffle(es.begin(), es.end(), rng);
        const std::size_t k = 1 + s % 12;
        es.resize(k);
        const auto r = cascade_removal(g, es);
        ASSERT_GT(r.initial, 0u);
        worst = std::max(worst, static_cast<double>(r.initial + r.cascaded) / static_cast<double>(r.initial));
    }
    RecordProperty("worst_ratio", std::to_string(worst));
    std::cout << "cascade worst ratio " << worst << "\n";
    EXPECT_LE(worst, 3.0);
}
