#pragma once

// Randomized repair from a spanning tree: a nested, degree-weighted sample
// ladder R_1 ⊂ R_2 ⊂ ... ⊂ R_l = P. Each DT(R_i) is frozen, every point is
// located in it by walking along tree edges (capped walks, history lookup as
// fallback), and R_{i+1} \ R_i is inserted seeded by those locations.

#include <dtpred/delaunay.hpp>
#include <dtpred/metrics.hpp>

#include <bit>
#include <random>
#include <span>

namespace dtpred {

/// BFS spanning tree of g; tree rings inherit g's angular order.
inline SpanningTree spanning_tree_of(const Triangulation& g)
{
    const std::size_t n = g.points().size();
    if (n < 2)
        throw Error(ErrorKind::TooFewPoints, "need at least 2 points");
    std::vector<std::vector<VertexId>> ring(n);
    for (VertexId v = 0; v < n; ++v) {
        if (!g.contains_vertex(v))
            throw Error(ErrorKind::VertexMismatch, "triangulation misses vertex " + std::to_string(v));
        ring[v] = g.vertex_ring(v);
    }
    std::vector<VertexId> parent(n, kNoVertex);
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<VertexId> order{0};
    seen[0] = 1;
    std::vector<EdgeKey> es;
    es.reserve(n - 1);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (VertexId w : ring[order[i]])
            if (!seen[w]) {
                seen[w] = 1;
                parent[w] = order[i];
                es.emplace_back(order[i], w);
                order.push_back(w);
            }
    std::vector<std::vector<VertexId>> tree_ring(n);
    for (VertexId v = 0; v < n; ++v)
        for (VertexId w : ring[v])
            if (parent[w] == v || parent[v] == w)
                tree_ring[v].push_back(w);
    return SpanningTree::from_edges(g.point_set(), std::move(es), std::move(tree_ring));
}

/// BFS spanning tree of an arbitrary edge list, which may self-cross; rings
/// are sorted geometrically.
inline SpanningTree spanning_tree_of_edges(const PointSetPtr& ps, const std::vector<EdgeKey>& es)
{
    const std::size_t n = ps->size();
    std::vector<std::vector<VertexId>> adj(n);
    for (const auto& e : es) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    for (auto& a : adj)
        std::sort(a.begin(), a.end());
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<VertexId> order{0};
    seen[0] = 1;
    std::vector<EdgeKey> tree;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (VertexId w : adj[order[i]])
            if (!seen[w]) {
                seen[w] = 1;
                tree.emplace_back(order[i], w);
                order.push_back(w);
            }
    if (order.size() != n)
        throw Error(ErrorKind::InvalidInput, "prediction graph is not connected");
    return SpanningTree::from_edges(ps, std::move(tree));
}

/// s_1 = n, s_{i+1} = floor(log2 s_i), ..., s_l = 1.
inline std::vector<std::size_t> ladder_schedule(std::size_t n)
{
    std::vector<std::size_t> s{std::max<std::size_t>(n, 1)};
    while (s.back() > 1)
        s.push_back(static_cast<std::size_t>(std::bit_width(s.back()) - 1));
    return s;
}

struct SampleLadder {
    std::vector<std::size_t> schedule;
    std::vector<VertexId> multiset;            // a random permutation of P̂
    std::vector<std::size_t> prefix;           // |R̂_i|, nondecreasing
    std::vector<std::vector<VertexId>> fresh;  // R_i \ R_{i-1}, in order of first appearance
    std::vector<std::uint32_t> first_level;    // per vertex
    std::uint64_t seed = 0;

    std::size_t levels() const { return schedule.size(); }

    /// Distinct vertices of R_i, sorted.
    std::vector<VertexId> sample(std::size_t i) const
    {
        std::vector<VertexId> out;
        for (std::size_t j = 0; j <= i; ++j)
            out.insert(out.end(), fresh[j].begin(), fresh[j].end());
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Nested samples as prefixes of one random permutation of the multiset P̂
/// (each vertex repeated deg_T times). |R̂_i| = ceil(|P̂| / s_i), except that
/// the first prefix is extended until R_1 holds three distinct points.
inline SampleLadder build_ladder(const SpanningTree& t, std::uint64_t seed)
{
    const std::size_t n = t.size();
    if (n < 3)
        throw Error(ErrorKind::TooFewPoints, "need at least 3 points");
    SampleLadder L;
    L.seed = seed;
    L.schedule = ladder_schedule(n);
    L.multiset.reserve(2 * (n - 1));
    for (VertexId v = 0; v < n; ++v)
        L.multiset.insert(L.multiset.end(), t.degree(v), v);
    std::mt19937_64 rng(seed);
    std::shuffle(L.multiset.begin(), L.multiset.end(), rng);

    const std::size_t total = L.multiset.size();
    L.first_level.assign(n, std::numeric_limits<std::uint32_t>::max());
    L.fresh.assign(L.levels(), {});
    std::size_t taken = 0, distinct = 0;
    for (std::size_t i = 0; i < L.levels(); ++i) {
        std::size_t want = (total + L.schedule[i] - 1) / L.schedule[i];
        want = std::max(want, taken);
        auto take = [&](std::size_t k) {
            const VertexId v = L.multiset[k];
            if (L.first_level[v] == std::numeric_limits<std::uint32_t>::max()) {
                L.first_level[v] = static_cast<std::uint32_t>(i);
                L.fresh[i].push_back(v);
                ++distinct;
            }
        };
        for (; taken < want; ++taken)
            take(taken);
        if (i == 0)
            for (; distinct < 3 && taken < total; ++taken)
                take(taken);
        L.prefix.push_back(taken);
    }
    return L;
}

struct ConflictAssignment {
    std::vector<TriId> delta;                  // per point: triangle of DT(R) covering it
    std::vector<std::vector<VertexId>> lists;  // per triangle slot, sorted (empty unless requested)
    std::size_t walk_steps = 0;                // triangle crossings along tree edges
    std::size_t fallbacks = 0;                 // walks abandoned for a history lookup
    std::size_t total_conflicts = 0;
};

namespace detail {

/// Triangle of p's star whose wedge contains the direction towards q
/// (p a vertex of dt, q != p).
inline TriId star_triangle_towards(const Triangulation& dt, VertexId p, VertexId q)
{
    const PointSet& ps = dt.points();
    TriId ghost = kNoTri;
    for (HalfEdge h : dt.outgoing(p)) {
        const TriId t = Triangulation::tri_of(h);
        if (dt.has_vertex(t, q))
            return t;
        const VertexId a = dt.dest(h), b = dt.origin(Triangulation::prev(h));
        if (a == kInfinite || b == kInfinite) {
            if (ghost == kNoTri || dt.conflicts(t, ps[q]))
                ghost = t;
            continue;
        }
        if (orient_sign(ps[p], ps[a], ps[q]) > 0 && orient_sign(ps[p], ps[b], ps[q]) < 0)
            return t;
    }
    return ghost;
}

inline std::size_t walk_cap(std::size_t n)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::bit_width(n - 1)));
}

} // namespace detail

/// Locates every point of P in the frozen DT(R) by walking along the tree:
/// for tree edge pq with Δ_p known, walk from Δ_p towards q, giving up after
/// ceil(log2 n) crossings in favour of a history lookup. When p ∈ R the walk
/// starts from the triangle of p's star that pq leaves through, and Δ_p is
/// the one hit by p's first tree edge. With `lists`, each point's
/// conflict region is gathered by a graph search from Δ_p.
inline ConflictAssignment conflict_lists(const Triangulation& dt, const SpanningTree& t, bool lists = true)
{
    const PointSet& ps = dt.points();
    const std::size_t n = ps.size();
    if (t.size() != n)
        throw Error(ErrorKind::VertexMismatch, "tree and triangulation over different point sets");
    ConflictAssignment ca;
    ca.delta.assign(n, kNoTri);
    const std::size_t cap = detail::walk_cap(n);

    auto vertex_delta = [&](VertexId p) {
        const VertexId towards = t.rings[p].empty() ? p : t.rings[p].front();
        return towards == p ? Triangulation::tri_of(dt.vertex_edge(p)) : detail::star_triangle_towards(dt, p, towards);
    };
    const VertexId root = t.bfs_order.front();
    ca.delta[root] = dt.contains_vertex(root) ? vertex_delta(root) : dt.locate(ps[root]);
    for (std::size_t i = 1; i < t.bfs_order.size(); ++i) {
        const VertexId q = t.bfs_order[i];
        if (dt.contains_vertex(q)) {
            ca.delta[q] = vertex_delta(q);
            continue;
        }
        std::size_t steps = 0;
        const VertexId p = t.parent[q];
        const TriId start = dt.contains_vertex(p) ? detail::star_triangle_towards(dt, p, q) : ca.delta[p];
        const auto hit = dt.walk(start, ps[q], cap, &steps);
        ca.walk_steps += steps;
        if (hit) {
            ca.delta[q] = *hit;
        } else {
            ++ca.fallbacks;
            ca.delta[q] = dt.locate(ps[q]);
        }
    }
    if (!lists)
        return ca;

    ca.lists.assign(dt.triangle_capacity(), {});
    std::vector<std::uint32_t> stamp(dt.triangle_capacity(), 0);
    std::vector<TriId> stack;
    for (VertexId p = 0; p < n; ++p) {
        if (dt.contains_vertex(p))
            continue;
        const std::uint32_t mark = p + 1;
        stack.assign(1, ca.delta[p]);
        stamp[ca.delta[p]] = mark;
        while (!stack.empty()) {
            const TriId f = stack.back();
            stack.pop_back();
            ca.lists[f].push_back(p);
            ++ca.total_conflicts;
            for (int k = 0; k < 3; ++k) {
                const TriId o = dt.neighbor(f, k);
                if (stamp[o] != mark) {
                    stamp[o] = mark;
                    if (dt.conflicts(o, ps[p]))
                        stack.push_back(o);
                }
            }
        }
    }
    return ca;
}

/// Reference conflict lists: every (point, live triangle) pair.
inline std::vector<std::vector<VertexId>> conflict_lists_naive(const Triangulation& dt)
{
    const PointSet& ps = dt.points();
    std::vector<std::vector<VertexId>> out(dt.triangle_capacity());
    dt.for_each_live_triangle([&](TriId f) {
        for (VertexId p = 0; p < ps.size(); ++p)
            if (!dt.contains_vertex(p) && dt.conflicts(f, ps[p]))
                out[f].push_back(p);
    });
    return out;
}

/// Inserts `ids` into dt (which must keep its history), each seeded by its
/// recorded triangle of the previous level.
inline void refine(Triangulation& dt, const ConflictAssignment& ca, std::span<const VertexId> ids)
{
    for (VertexId v : ids)
        dt.insert(v, ca.delta[v]);
}

struct SamplingOptions {
    bool conflict_lists = false; // also gather full conflict lists at each level
    bool check_levels = false;   // assert each DT(R_i) is Delaunay
};

struct SamplingStats {
    std::vector<std::size_t> schedule;
    std::vector<std::size_t> level_sizes; // |R_i|
    std::size_t walk_steps = 0;
    std::size_t fallbacks = 0;
    std::size_t total_conflicts = 0;
    std::size_t ring_sort_excess = 0; // sum of max(deg_T - 6, 0), emst_repair only
};

inline Triangulation repair_from_tree(const SpanningTree& t, std::uint64_t seed, const SamplingOptions& opt = {},
                                      SamplingStats* stats = nullptr)
{
    const SampleLadder L = build_ladder(t, seed);
    Triangulation dt(t.ps, true);
    for (VertexId v : L.fresh[0])
        dt.insert(v);
    SamplingStats st;
    st.schedule = L.schedule;
    std::size_t have = L.fresh[0].size();
    st.level_sizes.push_back(have);
    for (std::size_t i = 0; i + 1 < L.levels(); ++i) {
        if (opt.check_levels && metric_D_local(dt) != 0)
            throw std::logic_error("level " + std::to_string(i) + " is not Delaunay");
        const auto& next = L.fresh[i + 1];
        have += next.size();
        st.level_sizes.push_back(have);
        if (next.empty())
            continue;
        const ConflictAssignment ca = conflict_lists(dt, t, opt.conflict_lists);
        st.walk_steps += ca.walk_steps;
        st.fallbacks += ca.fallbacks;
        st.total_conflicts += ca.total_conflicts;
        refine(dt, ca, next);
    }
    dt.drop_history();
    if (stats)
        *stats = std::move(st);
    return dt;
}

inline Triangulation repair(const Triangulation& g, std::uint64_t seed, const SamplingOptions& opt = {},
                            SamplingStats* stats = nullptr)
{
    return repair_from_tree(spanning_tree_of(g), seed, opt, stats);
}

/// EMST(P) from an arbitrary spanning tree: rings are re-sorted, DT(P) is
/// rebuilt from the tree and the planar MST taken over it.
inline SpanningTree emst_repair(SpanningTree t, std::uint64_t seed, SamplingStats* stats = nullptr)
{
    t.sort_rings();
    SamplingStats st;
    const Triangulation dt = repair_from_tree(t, seed, {}, &st);
    for (VertexId v = 0; v < t.size(); ++v)
        st.ring_sort_excess += t.degree(v) > 6 ? t.degree(v) - 6 : 0;
    if (stats)
        *stats = std::move(st);
    return planar_mst(dt);
}

} // namespace dtpred
