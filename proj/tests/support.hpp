#pragma once

// Test-side generators and brute-force oracles.

#include <dtpred/delaunay.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace dtpred::test {

inline PointSetPtr random_points(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::set<std::pair<double, double>> seen;
    std::vector<std::pair<double, double>> c;
    while (c.size() < n) {
        std::pair<double, double> p{u(rng), u(rng)};
        if (seen.insert(p).second)
            c.push_back(p);
    }
    return make_point_set(c);
}

/// Distinct points on a small integer grid: heavy collinearity and
/// cocircularity.
inline PointSetPtr grid_points(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 1;
    std::uniform_int_distribution<int> d(0, side - 1);
    std::set<std::pair<double, double>> seen;
    std::vector<std::pair<double, double>> c;
    while (c.size() < n) {
        std::pair<double, double> p{static_cast<double>(d(rng)), static_cast<double>(d(rng))};
        if (seen.insert(p).second)
            c.push_back(p);
    }
    return make_point_set(c);
}

/// Triangles whose circumcircle holds no other point (perturbed world).
inline std::vector<TriangleKey> brute_force_dt(const PointSet& ps)
{
    std::vector<TriangleKey> out;
    const auto n = static_cast<VertexId>(ps.size());
    for (VertexId a = 0; a < n; ++a)
        for (VertexId b = a + 1; b < n; ++b)
            for (VertexId c = b + 1; c < n; ++c) {
                bool empty = true;
                for (VertexId d = 0; d < n && empty; ++d)
                    if (d != a && d != b && d != c)
                        empty = incircle(ps[a], ps[b], ps[c], ps[d]) == InsideOutside::Outside;
                if (empty)
                    out.push_back({a, b, c});
            }
    return out;
}

inline std::vector<EdgeKey> brute_force_edges(const PointSet& ps)
{
    std::set<EdgeKey> s;
    for (const auto& t : brute_force_dt(ps)) {
        s.emplace(t[0], t[1]);
        s.emplace(t[1], t[2]);
        s.emplace(t[0], t[2]);
    }
    return {s.begin(), s.end()};
}

/// A (generally non-Delaunay) triangulation from a left-to-right sweep.
inline Triangulation sweep_triangulation(const PointSetPtr& ps)
{
    const PointSet& P = *ps;
    std::vector<VertexId> order(P.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
        return std::pair(P[a].x, P[a].y) < std::pair(P[b].x, P[b].y);
    });
    std::vector<TriangleKey> tris;
    std::vector<VertexId> hull = {order[0], order[1], order[2]};
    if (!is_ccw(P[hull[0]], P[hull[1]], P[hull[2]]))
        std::swap(hull[1], hull[2]);
    tris.push_back({hull[0], hull[1], hull[2]});
    for (std::size_t k = 3; k < order.size(); ++k) {
        const VertexId p = order[k];
        const std::size_t h = hull.size();
        std::vector<bool> vis(h);
        for (std::size_t i = 0; i < h; ++i)
            vis[i] = !is_ccw(P[hull[i]], P[hull[(i + 1) % h]], P[p]);
        std::size_t first = 0;
        while (!(vis[first] && !vis[(first + h - 1) % h]))
            ++first;
        std::vector<VertexId> next = {p};
        std::size_t i = first;
        while (vis[i]) {
            tris.push_back({hull[i], hull[(i + 1) % h], p});
            i = (i + 1) % h;
        }
        // hull[first] ... hull[i] stay, the visible interior chain goes
        for (std::size_t j = i;; j = (j + 1) % h) {
            next.push_back(hull[j]);
            if (j == first)
                break;
        }
        hull = next;
    }
    return Triangulation::from_triangles(ps, tris);
}

inline double tree_weight(const PointSet& ps, const std::vector<EdgeKey>& es)
{
    double w = 0;
    for (const auto& e : es)
        w += std::hypot(ps[e.a].x - ps[e.b].x, ps[e.a].y - ps[e.b].y);
    return w;
}

/// Minimum over all labelled spanning trees of the complete graph
/// (Pruefer sequences).
inline double exhaustive_mst_weight(const PointSet& ps)
{
    const std::size_t n = ps.size();
    if (n == 2)
        return tree_weight(ps, {{0, 1}});
    std::vector<VertexId> seq(n - 2, 0);
    double best = INFINITY;
    for (;;) {
        std::vector<int> deg(n, 1);
        for (VertexId v : seq)
            ++deg[v];
        std::vector<EdgeKey> es;
        for (VertexId v : seq) {
            VertexId leaf = 0;
            while (deg[leaf] != 1)
                ++leaf;
            es.emplace_back(leaf, v);
            --deg[leaf];
            --deg[v];
        }
        VertexId u = 0, w = 0;
        bool first = true;
        for (VertexId v = 0; v < n; ++v)
            if (deg[v] == 1) {
                (first ? u : w) = v;
                first = false;
            }
        es.emplace_back(u, w);
        best = std::min(best, tree_weight(ps, es));
        std::size_t i = 0;
        while (i < seq.size() && ++seq[i] == n)
            seq[i++] = 0;
        if (i == seq.size())
            break;
    }
    return best;
}

struct LemmaConflictTally {
    std::size_t checked = 0;      // DT edges pq crossing the triangle of the other three
    std::size_t violations = 0;   // ... with neither p nor q inside its circumcircle
    std::size_t non_dt_fails = 0; // same failure for non-DT segments (shows the check can fail)
};

/// One random 5-point configuration: every segment pq against the triangle
/// formed by the remaining three points.
inline void lemma_conflict_trial(std::mt19937_64& rng, LemmaConflictTally& tally)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<double, double>> c;
    for (int i = 0; i < 5; ++i)
        c.emplace_back(u(rng), u(rng));
    auto ps = make_point_set(c);
    const auto& P = *ps;
    const auto dte = delaunay(ps, 0, false).edges();
    for (VertexId i = 0; i < 5; ++i)
        for (VertexId j = i + 1; j < 5; ++j) {
            const EdgeKey e(i, j);
            std::vector<VertexId> rest;
            for (VertexId v = 0; v < 5; ++v)
                if (v != i && v != j)
                    rest.push_back(v);
            VertexId a = rest[0], b = rest[1], cc = rest[2];
            if (!is_ccw(P[a], P[b], P[cc]))
                std::swap(b, cc);
            auto inside = [&](const Point& x) {
                return is_ccw(P[a], P[b], x) && is_ccw(P[b], P[cc], x) && is_ccw(P[cc], P[a], x);
            };
            const bool hits = inside(P[i]) || inside(P[j]) || segments_properly_cross(P[i], P[j], P[a], P[b]) ||
                              segments_properly_cross(P[i], P[j], P[b], P[cc]) ||
                              segments_properly_cross(P[i], P[j], P[cc], P[a]);
            if (!hits)
                continue;
            const bool holds = inside_ccw_circle(P[a], P[b], P[cc], P[i]) || inside_ccw_circle(P[a], P[b], P[cc], P[j]);
            if (std::binary_search(dte.begin(), dte.end(), e)) {
                ++tally.checked;
                tally.violations += holds ? 0 : 1;
            } else {
                tally.non_dt_fails += holds ? 0 : 1;
            }
        }
}

} // namespace dtpred::test
