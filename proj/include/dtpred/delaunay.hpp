#pragma once

// Baseline Delaunay construction and the building blocks shared by the
// repair algorithms: seeded insertion, merging, Lawson legalization and the
// planar minimum spanning tree.

#include <dtpred/triangulation.hpp>

#include <numeric>
#include <random>

namespace dtpred {

/// Randomized incremental Delaunay triangulation of the given vertex subset.
/// Fewer than three ids leaves the vertices pending (no triangles).
inline Triangulation delaunay_subset(const PointSetPtr& ps, std::vector<VertexId> ids,
                                     std::uint64_t seed, bool keep_history = true)
{
    Triangulation tri(ps, true);
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    for (VertexId v : ids)
        tri.insert(v);
    if (!keep_history)
        tri.drop_history();
    return tri;
}

inline Triangulation delaunay(const PointSetPtr& ps, std::uint64_t seed = 0, bool keep_history = true)
{
    if (ps->size() < 3)
        throw Error(ErrorKind::TooFewPoints, "need at least 3 points, got " + std::to_string(ps->size()));
    std::vector<VertexId> ids(ps->size());
    std::iota(ids.begin(), ids.end(), VertexId{0});
    return delaunay_subset(ps, std::move(ids), seed, keep_history);
}

inline TriId insert_seeded(Triangulation& tri, VertexId p, TriId hint)
{
    return tri.insert(p, hint);
}

/// Delaunay triangulation of the union of two vertex-disjoint Delaunay
/// triangulations: the smaller side is inserted into a copy of the larger.
inline Triangulation merge_dt(const Triangulation& a, const Triangulation& b)
{
    if (a.point_set() != b.point_set() && !(a.points() == b.points()))
        throw Error(ErrorKind::InvalidInput, "merge_dt over different point sets");
    const Triangulation& big = a.num_vertices() >= b.num_vertices() ? a : b;
    const Triangulation& small = &big == &a ? b : a;
    for (VertexId v : small.vertices())
        if (big.contains_vertex(v))
            throw Error(ErrorKind::IdCollision, "vertex " + std::to_string(v) + " in both triangulations");

    Triangulation out = big;
    out.drop_history();
    if (small.num_vertices() == 0)
        return out;

    // BFS order over the smaller triangulation keeps consecutive insertions
    // close, so each walk starts near its target.
    std::vector<VertexId> order;
    const auto small_vertices = small.vertices();
    if (small.any_live_triangle() == kNoTri) {
        order = small_vertices;
    } else {
        std::vector<std::uint8_t> seen(small.points().size(), 0);
        order.reserve(small_vertices.size());
        const VertexId start = small_vertices.front();
        seen[start] = 1;
        order.push_back(start);
        for (std::size_t i = 0; i < order.size(); ++i)
            for (HalfEdge h : small.outgoing(order[i])) {
                const VertexId w = small.dest(h);
                if (w != kInfinite && !seen[w]) {
                    seen[w] = 1;
                    order.push_back(w);
                }
            }
    }
    TriId hint = kNoTri;
    for (VertexId v : order)
        hint = out.insert(v, hint);
    return out;
}

/// Lawson flipping until every interior edge is locally Delaunay. Returns
/// the number of flips (an upper bound on the flip distance to the DT).
inline std::size_t greedy_legalize_in_place(Triangulation& g)
{
    std::vector<EdgeKey> stack = g.edges();
    std::size_t flips = 0;
    while (!stack.empty()) {
        const EdgeKey e = stack.back();
        stack.pop_back();
        const HalfEdge h = g.find_halfedge(e.a, e.b);
        if (h == kNoEdge || g.halfedge_locally_delaunay(h))
            continue;
        const VertexId a = g.origin(h), b = g.dest(h);
        const VertexId c = g.origin(Triangulation::prev(h));
        const VertexId d = g.origin(Triangulation::prev(g.twin(h)));
        g.flip_halfedge(h);
        ++flips;
        stack.emplace_back(a, c);
        stack.emplace_back(c, b);
        stack.emplace_back(b, d);
        stack.emplace_back(d, a);
    }
    return flips;
}

inline std::pair<Triangulation, std::size_t> greedy_legalize(Triangulation g)
{
    const std::size_t flips = greedy_legalize_in_place(g);
    return {std::move(g), flips};
}

/// Spanning tree over the points of a PointSet with angularly sorted rings.
struct SpanningTree {
    PointSetPtr ps;
    std::vector<EdgeKey> edges;                 // sorted
    std::vector<std::vector<VertexId>> rings;   // CCW neighbours per vertex
    std::vector<VertexId> parent;               // kNoVertex at the root
    std::vector<VertexId> bfs_order;            // root first
    VertexId root = 0;

    std::size_t size() const { return rings.size(); }
    std::size_t degree(VertexId v) const { return rings[v].size(); }

    /// Builds from an edge list. Rings are sorted geometrically when
    /// `rings_in` is empty, otherwise taken as given.
    static SpanningTree from_edges(PointSetPtr ps, std::vector<EdgeKey> es,
                                   std::vector<std::vector<VertexId>> rings_in = {})
    {
        const std::size_t n = ps->size();
        SpanningTree t;
        t.ps = std::move(ps);
        std::sort(es.begin(), es.end());
        if (es.size() + 1 != n || std::adjacent_find(es.begin(), es.end()) != es.end())
            throw Error(ErrorKind::InvalidInput, "spanning tree needs exactly n-1 distinct edges");
        t.edges = std::move(es);
        if (!rings_in.empty()) {
            t.rings = std::move(rings_in);
        } else {
            t.rings.assign(n, {});
            for (const auto& e : t.edges) {
                t.rings[e.a].push_back(e.b);
                t.rings[e.b].push_back(e.a);
            }
            t.sort_rings();
        }
        t.parent.assign(n, kNoVertex);
        std::vector<std::uint8_t> seen(n, 0);
        t.bfs_order.reserve(n);
        if (n > 0) {
            seen[0] = 1;
            t.bfs_order.push_back(0);
        }
        for (std::size_t i = 0; i < t.bfs_order.size(); ++i) {
            const VertexId v = t.bfs_order[i];
            for (VertexId w : t.rings[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    t.parent[w] = v;
                    t.bfs_order.push_back(w);
                }
        }
        if (t.bfs_order.size() != n)
            throw Error(ErrorKind::InvalidInput, "spanning tree is not connected");
        return t;
    }

    void sort_rings()
    {
        for (VertexId v = 0; v < rings.size(); ++v) {
            auto& r = rings[v];
            const Point& c = (*ps)[v];
            std::sort(r.begin(), r.end(), [&](VertexId a, VertexId b) {
                return angle_less(c, (*ps)[a], (*ps)[b]);
            });
        }
    }
};

/// Minimum spanning tree of the triangulation's edges under exact squared
/// length, ties broken by EdgeKey.
inline SpanningTree planar_mst(const Triangulation& dt)
{
    const PointSet& ps = dt.points();
    auto es = dt.edges();
    std::sort(es.begin(), es.end(), [&](const EdgeKey& l, const EdgeKey& r) {
        const int c = compare_squared_length(ps[l.a], ps[l.b], ps[r.a], ps[r.b]);
        return c != 0 ? c < 0 : l < r;
    });
    std::vector<VertexId> uf(ps.size());
    std::iota(uf.begin(), uf.end(), VertexId{0});
    auto find = [&](VertexId v) {
        while (uf[v] != v)
            v = uf[v] = uf[uf[v]];
        return v;
    };
    std::vector<EdgeKey> tree;
    tree.reserve(ps.size());
    for (const auto& e : es) {
        const VertexId a = find(e.a), b = find(e.b);
        if (a != b) {
            uf[a] = b;
            tree.push_back(e);
        }
    }
    return SpanningTree::from_edges(dt.point_set(), std::move(tree));
}

} // namespace dtpred
