#pragma once

// Deterministic repair of a triangulation into DT(P) through a t-division of
// its dual graph. Regions whose boundary triangles survive in DT(V_B) and
// whose edges are all locally Delaunay are patched back into DT(V_B) as they
// are; only the vertices of the remaining regions are triangulated again.

#include <dtpred/verify.hpp>

#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_set>

namespace dtpred {

struct RDivision {
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    std::size_t t = 0;
    std::vector<std::vector<TriId>> regions;
    std::vector<std::vector<TriId>> boundary; // B_gamma, a subset of the region
    std::vector<std::uint32_t> region_of;     // by TriId; kNone for ghosts and dead slots
    std::vector<char> is_boundary;            // by TriId
    std::vector<VertexId> boundary_vertices;  // V_B, sorted

    std::vector<VertexId> region_vertices(const Triangulation& g, std::size_t r) const
    {
        std::vector<VertexId> out;
        for (TriId f : regions[r])
            for (int k = 0; k < 3; ++k)
                out.push_back(g.corner(f, k));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

namespace detail {

// Dual neighbours of f among real triangles.
template <typename Fn>
void for_each_dual_neighbor(const Triangulation& g, TriId f, Fn&& fn)
{
    for (int k = 0; k < 3; ++k) {
        const TriId o = g.neighbor(f, k);
        if (!g.is_ghost(o))
            fn(o);
    }
}

// BFS over `part` (marked with `stamp`), returns the visit order and fills level[].
inline std::vector<TriId> dual_bfs(const Triangulation& g, TriId start, const std::vector<std::uint32_t>& mark,
                                   std::uint32_t stamp, std::vector<std::uint32_t>& level,
                                   std::vector<std::uint32_t>& seen, std::uint32_t& seen_round)
{
    ++seen_round;
    std::vector<TriId> order{start};
    seen[start] = seen_round;
    level[start] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const TriId f = order[i];
        for_each_dual_neighbor(g, f, [&](TriId o) {
            if (mark[o] == stamp && seen[o] != seen_round) {
                seen[o] = seen_round;
                level[o] = level[f] + 1;
                order.push_back(o);
            }
        });
    }
    return order;
}

} // namespace detail

enum class DivisionMethod { Geometric, BfsLevels };

/// Splits the real triangles of g into edge-connected regions of at most
/// `max_region` triangles by recursive cuts of the dual graph, either at the
/// median centroid coordinate or between BFS levels from a pseudo-peripheral
/// triangle. Each cut side is split into its connected components; small
/// leftovers are merged into neighbours. A triangle is a boundary triangle
/// when it shares an edge with another region or with the outer face.
inline RDivision t_division(const Triangulation& g, std::size_t t, std::size_t max_region = 0,
                            DivisionMethod method = DivisionMethod::Geometric)
{
    if (t < 4)
        throw Error(ErrorKind::InvalidInput, "t must be at least 4");
    if (max_region == 0)
        max_region = t;
    const std::size_t cap = g.triangle_capacity();
    RDivision rd;
    rd.t = t;
    rd.region_of.assign(cap, RDivision::kNone);
    rd.is_boundary.assign(cap, 0);

    std::vector<std::uint32_t> mark(cap, 0), level(cap, 0), seen(cap, 0);
    std::uint32_t next_stamp = 1, seen_round = 0;
    std::vector<TriId> all;
    g.for_each_live_triangle([&](TriId f) {
        if (!g.is_ghost(f))
            all.push_back(f);
    });
    if (all.empty())
        return rd;

    // Work items: connected triangle sets, each carrying its own stamp in mark[].
    std::vector<std::pair<std::vector<TriId>, std::uint32_t>> work;
    auto push_components = [&](const std::vector<TriId>& part) {
        const std::uint32_t stamp = next_stamp++;
        for (TriId f : part)
            mark[f] = stamp;
        std::vector<std::vector<TriId>> comps;
        ++seen_round;
        const std::uint32_t comp_round = seen_round;
        for (TriId f : part) {
            if (seen[f] == comp_round)
                continue;
            std::vector<TriId> comp{f};
            seen[f] = comp_round;
            for (std::size_t i = 0; i < comp.size(); ++i)
                detail::for_each_dual_neighbor(g, comp[i], [&](TriId o) {
                    if (mark[o] == stamp && seen[o] != comp_round) {
                        seen[o] = comp_round;
                        comp.push_back(o);
                    }
                });
            comps.push_back(std::move(comp));
        }
        for (auto& c : comps) {
            const std::uint32_t s = next_stamp++;
            for (TriId f : c)
                mark[f] = s;
            work.emplace_back(std::move(c), s);
        }
    };
    push_components(all);

    while (!work.empty()) {
        auto [part, stamp] = std::move(work.back());
        work.pop_back();
        if (part.size() <= max_region) {
            const auto r = static_cast<std::uint32_t>(rd.regions.size());
            for (TriId f : part)
                rd.region_of[f] = r;
            rd.regions.push_back(std::move(part));
            continue;
        }
        const std::size_t pieces = (part.size() + max_region - 1) / max_region;
        const std::size_t half = part.size() * (pieces / 2) / pieces;
        std::vector<TriId> near, far;
        if (method == DivisionMethod::Geometric) {
            // Dual nodes sit at triangle centroids (scaled by 3); split at the
            // order statistic along the wider axis.
            auto cx = [&](TriId f) { return g.pt(g.corner(f, 0)).x + g.pt(g.corner(f, 1)).x + g.pt(g.corner(f, 2)).x; };
            auto cy = [&](TriId f) { return g.pt(g.corner(f, 0)).y + g.pt(g.corner(f, 1)).y + g.pt(g.corner(f, 2)).y; };
            double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
            for (TriId f : part) {
                xlo = std::min(xlo, cx(f));
                xhi = std::max(xhi, cx(f));
                ylo = std::min(ylo, cy(f));
                yhi = std::max(yhi, cy(f));
            }
            const bool by_x = xhi - xlo >= yhi - ylo;
            std::nth_element(part.begin(), part.begin() + static_cast<std::ptrdiff_t>(half), part.end(),
                             [&](TriId l, TriId r) {
                                 const double a = by_x ? cx(l) : cy(l), b = by_x ? cx(r) : cy(r);
                                 return a < b || (a == b && l < r);
                             });
            near.assign(part.begin(), part.begin() + static_cast<std::ptrdiff_t>(half));
            far.assign(part.begin() + static_cast<std::ptrdiff_t>(half), part.end());
        } else {
            // Pseudo-peripheral start: the last triangle of a BFS from an arbitrary one.
            auto order = detail::dual_bfs(g, part.front(), mark, stamp, level, seen, seen_round);
            order = detail::dual_bfs(g, order.back(), mark, stamp, level, seen, seen_round);
            const std::uint32_t cut = level[order[half]];
            for (TriId f : order)
                (level[f] < cut ? near : far).push_back(f);
            if (near.empty()) {
                near.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
                far.assign(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
            }
        }
        push_components(near);
        push_components(far);
    }

    // Fold small fragments into an adjacent region when the result still fits.
    {
        std::vector<std::size_t> order(rd.regions.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rd.regions[a].size() < rd.regions[b].size(); });
        for (std::size_t r : order) {
            auto& reg = rd.regions[r];
            if (reg.empty() || reg.size() >= max_region / 4)
                continue;
            std::size_t best = RDivision::kNone;
            for (TriId f : reg)
                detail::for_each_dual_neighbor(g, f, [&](TriId o) {
                    const std::size_t q = rd.region_of[o];
                    if (q != r && rd.regions[q].size() + reg.size() <= max_region &&
                        (best == RDivision::kNone || rd.regions[q].size() < rd.regions[best].size()))
                        best = q;
                });
            if (best == RDivision::kNone)
                continue;
            for (TriId f : reg)
                rd.region_of[f] = static_cast<std::uint32_t>(best);
            rd.regions[best].insert(rd.regions[best].end(), reg.begin(), reg.end());
            reg.clear();
        }
        std::vector<std::vector<TriId>> kept;
        for (auto& reg : rd.regions)
            if (!reg.empty()) {
                const auto r = static_cast<std::uint32_t>(kept.size());
                for (TriId f : reg)
                    rd.region_of[f] = r;
                kept.push_back(std::move(reg));
            }
        rd.regions = std::move(kept);
    }

    rd.boundary.resize(rd.regions.size());
    std::vector<char> in_vb(g.points().size(), 0);
    for (std::size_t r = 0; r < rd.regions.size(); ++r)
        for (TriId f : rd.regions[r]) {
            bool b = false;
            for (int k = 0; k < 3 && !b; ++k) {
                const TriId o = g.neighbor(f, k);
                b = g.is_ghost(o) || rd.region_of[o] != r;
            }
            if (!b)
                continue;
            rd.is_boundary[f] = 1;
            rd.boundary[r].push_back(f);
            for (int k = 0; k < 3; ++k)
                in_vb[g.corner(f, k)] = 1;
        }
    for (VertexId v = 0; v < in_vb.size(); ++v)
        if (in_vb[v])
            rd.boundary_vertices.push_back(v);
    return rd;
}

/// Per-interior-edge local Delaunay flags, one incircle test per edge.
/// Indexed by the smaller half-edge of each pair; hull edges count as Delaunay.
inline std::vector<char> local_delaunay_flags(const Triangulation& g)
{
    std::vector<char> ok(3 * g.triangle_capacity(), 1);
    g.for_each_live_triangle([&](TriId f) {
        if (g.is_ghost(f))
            return;
        for (int k = 0; k < 3; ++k) {
            const HalfEdge h = 3 * f + k;
            const HalfEdge o = g.twin(h);
            if (o < h && !g.is_ghost(Triangulation::tri_of(o)))
                continue;
            if (!g.is_ghost(Triangulation::tri_of(o)))
                ok[h] = g.halfedge_locally_delaunay(h) ? 1 : 0;
        }
    });
    return ok;
}

/// Good iff (i) every boundary triangle of the region is a triangle of dt_B
/// and (ii) every edge with an incident triangle in the region is locally
/// Delaunay in g. Pairs where both triangles are boundary triangles count.
inline std::vector<char> classify_regions(const Triangulation& g, const RDivision& rd, const Triangulation& dt_B,
                                          const std::vector<char>* flags = nullptr)
{
    std::vector<char> local;
    if (!flags) {
        local = local_delaunay_flags(g);
        flags = &local;
    }
    std::unordered_set<TriangleKey, TriangleKeyHash> in_dtb;
    for (const auto& t : dt_B.triangles())
        in_dtb.insert(make_triangle_key(t[0], t[1], t[2]));

    std::vector<char> good(rd.regions.size(), 1);
    for (std::size_t r = 0; r < rd.regions.size(); ++r) {
        for (TriId f : rd.boundary[r])
            if (!in_dtb.count(make_triangle_key(g.corner(f, 0), g.corner(f, 1), g.corner(f, 2)))) {
                good[r] = 0;
                break;
            }
        if (!good[r])
            continue;
        for (TriId f : rd.regions[r]) {
            for (int k = 0; k < 3; ++k) {
                const HalfEdge h = 3 * f + k;
                if (!(*flags)[std::min(h, g.twin(h))]) {
                    good[r] = 0;
                    break;
                }
            }
            if (!good[r])
                break;
        }
    }
    return good;
}

struct SeparatorStats {
    std::size_t t = 0;
    std::size_t regions = 0;
    std::size_t bad_regions = 0;
    std::size_t boundary_vertices = 0; // |V_B|
    std::size_t good_vertices = 0;
    std::size_t bad_vertices = 0;
    std::size_t max_region = 0;
    std::size_t max_boundary = 0;
};

struct SeparatorOptions {
    std::size_t t = 0;             // 0: max(4, ceil(log2 n)^2)
    std::size_t region_factor = 4; // regions hold at most region_factor * t triangles
    DivisionMethod method = DivisionMethod::Geometric;
    bool certify_patch = false;    // check the patched complex is locally Delaunay
    std::uint64_t seed = 0;
};

inline std::size_t default_t(std::size_t n)
{
    const auto l = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(n, 2)))));
    return std::max<std::size_t>(4, l * l);
}

/// Replaces, for each good region, the part of DT(V_B) enclosed by its
/// boundary triangles with the region's interior triangles.
inline Triangulation patch_good_regions(const Triangulation& g, const RDivision& rd, const std::vector<char>& good,
                                        const Triangulation& dt_B)
{
    std::vector<char> removed(dt_B.triangle_capacity(), 0);
    std::vector<TriangleKey> tris;
    std::unordered_set<EdgeKey, EdgeKeyHash> frontier;
    std::vector<TriId> stack;
    for (std::size_t r = 0; r < rd.regions.size(); ++r) {
        if (!good[r])
            continue;
        frontier.clear();
        std::vector<std::pair<VertexId, VertexId>> entries; // boundary-side half-edges
        for (TriId f : rd.regions[r]) {
            if (rd.is_boundary[f])
                continue;
            tris.push_back({g.corner(f, 0), g.corner(f, 1), g.corner(f, 2)});
            for (int k = 0; k < 3; ++k) {
                const HalfEdge h = 3 * f + k;
                const TriId o = Triangulation::tri_of(g.twin(h));
                if (rd.is_boundary[o]) {
                    frontier.insert(EdgeKey(g.origin(h), g.dest(h)));
                    entries.emplace_back(g.origin(h), g.dest(h));
                }
            }
        }
        for (auto [a, b] : entries) {
            // In dt_B the interior side of a->b is the triangle left of a->b.
            const HalfEdge h = dt_B.find_halfedge(a, b);
            if (h == kNoEdge)
                throw std::logic_error("boundary edge missing from DT(V_B)");
            const TriId start = Triangulation::tri_of(h);
            if (removed[start])
                continue;
            removed[start] = 1;
            stack.push_back(start);
            while (!stack.empty()) {
                const TriId f = stack.back();
                stack.pop_back();
                if (dt_B.is_ghost(f))
                    throw std::logic_error("patch region leaked to the outer face");
                for (int k = 0; k < 3; ++k) {
                    const HalfEdge e = 3 * f + k;
                    if (frontier.count(EdgeKey(dt_B.origin(e), dt_B.dest(e))))
                        continue;
                    const TriId o = Triangulation::tri_of(dt_B.twin(e));
                    if (!removed[o]) {
                        removed[o] = 1;
                        stack.push_back(o);
                    }
                }
            }
        }
    }
    dt_B.for_each_live_triangle([&](TriId f) {
        if (!dt_B.is_ghost(f) && !removed[f])
            tris.push_back({dt_B.corner(f, 0), dt_B.corner(f, 1), dt_B.corner(f, 2)});
    });
    return Triangulation::from_triangles(g.point_set(), tris);
}

inline Triangulation repair_separator(const Triangulation& g, const SeparatorOptions& opt = {},
                                      SeparatorStats* stats = nullptr)
{
    const PointSetPtr& ps = g.point_set();
    const std::size_t n = g.num_vertices();
    SeparatorStats st;
    st.t = opt.t ? opt.t : default_t(n);

    // 1. t-division of the dual graph.
    const RDivision rd = t_division(g, st.t, opt.region_factor * st.t, opt.method);
    st.regions = rd.regions.size();
    st.boundary_vertices = rd.boundary_vertices.size();
    for (std::size_t r = 0; r < rd.regions.size(); ++r) {
        st.max_region = std::max(st.max_region, rd.regions[r].size());
        st.max_boundary = std::max(st.max_boundary, rd.boundary[r].size());
    }

    // 2. DT(V_B).
    const Triangulation dt_B = delaunay_subset(ps, rd.boundary_vertices, opt.seed, false);

    // 3. Good and bad regions.
    const auto good = classify_regions(g, rd, dt_B);
    std::vector<char> in_vb(ps->size(), 0), placed(ps->size(), 0);
    for (VertexId v : rd.boundary_vertices)
        in_vb[v] = 1;
    std::vector<VertexId> bad_vertices;
    for (std::size_t r = 0; r < rd.regions.size(); ++r) {
        if (good[r])
            continue;
        ++st.bad_regions;
        for (TriId f : rd.regions[r])
            for (int k = 0; k < 3; ++k) {
                const VertexId v = g.corner(f, k);
                if (!in_vb[v] && !placed[v]) {
                    placed[v] = 1;
                    bad_vertices.push_back(v);
                }
            }
    }
    st.bad_vertices = bad_vertices.size();
    st.good_vertices = n - st.boundary_vertices - st.bad_vertices;

    // 4. DT(V_B + V_good) by patching.
    Triangulation merged = st.bad_regions == rd.regions.size() ? dt_B : patch_good_regions(g, rd, good, dt_B);
    if (opt.certify_patch && metric_D_local(merged) != 0)
        throw std::logic_error("patched triangulation is not locally Delaunay");

    // 5. DT(V_bad) from scratch, 6. merge.
    if (!bad_vertices.empty()) {
        std::sort(bad_vertices.begin(), bad_vertices.end());
        if (bad_vertices.size() >= 3) {
            merged = merge_dt(merged, delaunay_subset(ps, bad_vertices, opt.seed + 1, false));
        } else {
            TriId hint = kNoTri;
            for (VertexId v : bad_vertices)
                hint = merged.insert(v, hint);
        }
    }
    if (stats)
        *stats = st;
    return merged;
}

} // namespace dtpred
