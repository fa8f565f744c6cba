#pragma once

// Closeness parameters between a predicted triangulation G and DT(P).

#include <dtpred/delaunay.hpp>
#include <dtpred/spatial.hpp>

#include <cmath>
#include <sstream>

namespace dtpred {

struct ClosenessReport {
    std::size_t n = 0;
    std::size_t D = 0;
    std::size_t D_local = 0;
    std::size_t D_cross = 0;
    std::size_t d_cross = 0;
    std::size_t D_vio = 0;
    std::size_t d_vio = 0;
    std::size_t flip_upper = 0;
    std::uint64_t seed = 0;

    bool all_zero() const
    {
        return D == 0 && D_local == 0 && D_cross == 0 && d_cross == 0 && D_vio == 0 && d_vio == 0 &&
               flip_upper == 0;
    }

    static std::string csv_header() { return "n,D,D_local,D_cross,d_cross,D_vio,d_vio,flip_upper,seed"; }

    std::string csv_row() const
    {
        std::ostringstream o;
        o << n << ',' << D << ',' << D_local << ',' << D_cross << ',' << d_cross << ',' << D_vio << ','
          << d_vio << ',' << flip_upper << ',' << seed;
        return o.str();
    }
};

namespace detail {

inline void require_same_vertices(const Triangulation& g, const Triangulation& dt)
{
    if (!(g.points() == dt.points()) || g.vertices() != dt.vertices())
        throw Error(ErrorKind::VertexMismatch, "triangulations span different vertex sets");
}

} // namespace detail

/// |E(G) \ E(DT)| for sorted canonical edge lists.
inline std::size_t edge_difference(const std::vector<EdgeKey>& g, const std::vector<EdgeKey>& dt)
{
    std::size_t d = 0;
    auto j = dt.begin();
    for (const auto& e : g) {
        while (j != dt.end() && *j < e)
            ++j;
        if (j == dt.end() || *j != e)
            ++d;
    }
    return d;
}

inline std::size_t metric_D(const Triangulation& g, const Triangulation& dt)
{
    detail::require_same_vertices(g, dt);
    const auto ge = g.edges(), de = dt.edges();
    const std::size_t d = edge_difference(ge, de);
    if (d != edge_difference(de, ge))
        throw std::logic_error("edge differences disagree for triangulations of one point set");
    return d;
}

/// Interior edges of g that are not locally Delaunay.
inline std::size_t metric_D_local(const Triangulation& g)
{
    std::size_t count = 0;
    g.for_each_live_triangle([&](TriId t) {
        if (g.is_ghost(t))
            return;
        for (int k = 0; k < 3; ++k) {
            const HalfEdge h = 3 * t + k;
            const HalfEdge o = g.twin(h);
            if (o < h || g.is_ghost(Triangulation::tri_of(o)))
                continue;
            count += g.halfedge_locally_delaunay(h) ? 0 : 1;
        }
    });
    return count;
}

struct CrossingCounts {
    std::size_t total = 0;   // D_cross
    std::size_t max_per_edge = 0; // d_cross
};

/// Proper crossings between the edges of G and those of DT (grid pruned).
inline CrossingCounts metric_crossings(const PointSet& ps, const std::vector<EdgeKey>& g,
                                       const std::vector<EdgeKey>& dt)
{
    std::vector<std::size_t> per(g.size(), 0);
    CrossingCounts c;
    for_each_crossing(ps, std::span<const EdgeKey>(g), std::span<const EdgeKey>(dt),
                      [&](std::uint32_t i, std::uint32_t) {
                          ++per[i];
                          ++c.total;
                      });
    for (auto v : per)
        c.max_per_edge = std::max(c.max_per_edge, v);
    return c;
}

inline CrossingCounts metric_crossings(const Triangulation& g, const Triangulation& dt)
{
    return metric_crossings(g.points(), g.edges(), dt.edges());
}

/// O(|G| |DT|) reference loop.
inline CrossingCounts metric_crossings_naive(const PointSet& ps, const std::vector<EdgeKey>& g,
                                             const std::vector<EdgeKey>& dt)
{
    CrossingCounts c;
    for (const auto& e : g) {
        std::size_t k = 0;
        for (const auto& f : dt)
            k += segments_properly_cross(ps[e.a], ps[e.b], ps[f.a], ps[f.b]) ? 1 : 0;
        c.total += k;
        c.max_per_edge = std::max(c.max_per_edge, k);
    }
    return c;
}

struct ViolationCounts {
    std::size_t total = 0;          // D_vio
    std::size_t max_per_triangle = 0; // d_vio
};

/// Number of points strictly inside the circumcircle of CCW triangle abc.
/// Candidates come from the grid inside a conservatively padded bounding box
/// of the float circumcircle; each is confirmed by the exact predicate.
inline std::size_t points_in_circumcircle(const PointSet& ps, const PointGrid& grid, VertexId ia,
                                          VertexId ib, VertexId ic)
{
    const Point &a = ps[ia], &b = ps[ib], &c = ps[ic];
    std::size_t count = 0;
    auto test = [&](VertexId v) {
        if (v != ia && v != ib && v != ic && inside_ccw_circle(a, b, c, ps[v]))
            ++count;
    };
    const double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
    const double det = bx * cy - by * cx;
    const double det_err = 4.0 * detail::kEps * (std::fabs(bx * cy) + std::fabs(by * cx));
    if (!(std::fabs(det) > 1e3 * det_err)) {
        for (const auto& p : ps.points())
            test(p.id);
        return count;
    }
    const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const double d = 2.0 * det;
    const double ux = (cy * b2 - by * c2) / d;
    const double uy = (bx * c2 - cx * b2) / d;
    const double rel = det_err / std::fabs(det);
    const double ex = 8.0 * detail::kEps * (std::fabs(cy * b2) + std::fabs(by * c2)) / std::fabs(d) +
                      4.0 * rel * std::fabs(ux);
    const double ey = 8.0 * detail::kEps * (std::fabs(bx * c2) + std::fabs(cx * b2)) / std::fabs(d) +
                      4.0 * rel * std::fabs(uy);
    const double r = std::hypot(ux, uy);
    const double pad = 4.0 * (ex + ey) + 1e-12 * (r + std::fabs(a.x) + std::fabs(a.y));
    const double ox = a.x + ux, oy = a.y + uy;
    if (!std::isfinite(ox) || !std::isfinite(oy) || !std::isfinite(r + pad)) {
        for (const auto& p : ps.points())
            test(p.id);
        return count;
    }
    grid.for_each_in_box(ox - r - pad, oy - r - pad, ox + r + pad, oy + r + pad, test);
    return count;
}

enum class ViolationBasis { G, DT };

/// Point-in-circumcircle tallies over the real triangles of `tri`.
inline ViolationCounts metric_violations(const Triangulation& tri)
{
    const PointSet& ps = tri.points();
    PointGrid grid(ps);
    ViolationCounts v;
    for (const auto& t : tri.triangles()) {
        const std::size_t k = points_in_circumcircle(ps, grid, t[0], t[1], t[2]);
        v.total += k;
        v.max_per_triangle = std::max(v.max_per_triangle, k);
    }
    return v;
}

/// Tallies over G's triangles (default) or over DT's triangles.
inline ViolationCounts metric_violations(const Triangulation& g, const Triangulation& dt,
                                         ViolationBasis basis)
{
    return metric_violations(basis == ViolationBasis::G ? g : dt);
}

inline ViolationCounts metric_violations_naive(const Triangulation& tri)
{
    const PointSet& ps = tri.points();
    ViolationCounts v;
    for (const auto& t : tri.triangles()) {
        std::size_t k = 0;
        for (const auto& p : ps.points())
            if (p.id != t[0] && p.id != t[1] && p.id != t[2] &&
                incircle(ps[t[0]], ps[t[1]], ps[t[2]], p) == InsideOutside::Inside)
                ++k;
        v.total += k;
        v.max_per_triangle = std::max(v.max_per_triangle, k);
    }
    return v;
}

/// Largest number, over triangles q q2 q3 of G and their corners q, of DT
/// edges at q crossing the opposite side q2 q3. Bounded by d_vio.
inline std::size_t circle0_max(const Triangulation& g, const Triangulation& dt)
{
    const PointSet& ps = g.points();
    std::size_t worst = 0;
    for (const auto& t : g.triangles())
        for (int k = 0; k < 3; ++k) {
            const VertexId q = t[k], u = t[(k + 1) % 3], w = t[(k + 2) % 3];
            std::size_t cnt = 0;
            for (HalfEdge h : dt.outgoing(q)) {
                const VertexId z = dt.dest(h);
                if (z != kInfinite && segments_properly_cross(ps[q], ps[z], ps[u], ps[w]))
                    ++cnt;
            }
            worst = std::max(worst, cnt);
        }
    return worst;
}

inline constexpr std::size_t kVioCrossConstant = 32;

/// d_cross <= 32 max(1, d_vio^2).
inline bool vio_relation_holds(std::size_t d_cross, std::size_t d_vio)
{
    return d_cross <= kVioCrossConstant * std::max<std::size_t>(1, d_vio * d_vio);
}

inline ClosenessReport report_against(const Triangulation& g, const Triangulation& dt, std::uint64_t seed)
{
    ClosenessReport r;
    r.n = g.points().size();
    r.seed = seed;
    r.D = metric_D(g, dt);
    r.D_local = metric_D_local(g);
    const auto c = metric_crossings(g, dt);
    r.D_cross = c.total;
    r.d_cross = c.max_per_edge;
    const auto v = metric_violations(g);
    r.D_vio = v.total;
    r.d_vio = v.max_per_triangle;
    Triangulation copy = g;
    copy.drop_history();
    r.flip_upper = greedy_legalize_in_place(copy);
    return r;
}

inline ClosenessReport full_report(const Triangulation& g, std::uint64_t seed)
{
    const auto dt = delaunay(g.point_set(), seed, false);
    return report_against(g, dt, seed);
}

} // namespace dtpred
