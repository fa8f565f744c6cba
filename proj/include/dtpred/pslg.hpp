#pragma once

// Plane straight-line graph built from a bare edge list. Rotation order is
// recomputed geometrically; faces come from the half-edge cycles, holes and
// isolated vertices are attached to the innermost enclosing face.

#include <dtpred/spatial.hpp>
#include <dtpred/triangulation.hpp>

#include <map>
#include <numeric>

namespace dtpred {

namespace detail {

/// Sign of twice the signed area of a closed vertex cycle (perturbed world;
/// 0 only for cycles that retrace every edge, e.g. trees).
inline int cycle_area_sign(const PointSet& ps, const std::vector<VertexId>& cyc)
{
    const Point& o = ps[cyc[0]];
    double sum = 0, mag = 0;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
        const Point& a = ps[cyc[i]];
        const Point& b = ps[cyc[(i + 1) % cyc.size()]];
        const double t1 = (a.x - o.x) * (b.y - o.y);
        const double t2 = (a.y - o.y) * (b.x - o.x);
        sum += t1 - t2;
        mag += std::fabs(t1) + std::fabs(t2);
    }
    const double bound = (2.0 * static_cast<double>(cyc.size()) + 8.0) * kEps * mag;
    if (sum > bound)
        return 1;
    if (sum < -bound)
        return -1;
    ++counters().exact_fallbacks;
    mpq_class exact = 0;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
        const Point& a = ps[cyc[i]];
        const Point& b = ps[cyc[(i + 1) % cyc.size()]];
        exact += mpq_class(a.x) * mpq_class(b.y) - mpq_class(a.y) * mpq_class(b.x);
    }
    if (int s = sgn(exact); s != 0)
        return s;
    // Perturbed area is linear plus bilinear in the perturbation variables.
    // Scan variables in dominance order: the linear term of e_v first, then
    // e_u e_v for u < v in increasing u.
    const std::size_t k = cyc.size();
    std::map<VertexId, std::pair<mpq_class, mpq_class>> lin; // coefficients of e_x, e_y
    std::map<std::pair<VertexId, VertexId>, int> directed;
    for (std::size_t i = 0; i < k; ++i) {
        const Point& prev = ps[cyc[(i + k - 1) % k]];
        const Point& next = ps[cyc[(i + 1) % k]];
        auto& c = lin[cyc[i]];
        c.first += mpq_class(next.y) - mpq_class(prev.y);
        c.second += mpq_class(prev.x) - mpq_class(next.x);
        ++directed[{cyc[i], cyc[(i + 1) % k]}];
    }
    // coefficient of e_x(i) e_y(j)
    auto bilinear = [&](VertexId i, VertexId j) {
        auto count = [&](VertexId u, VertexId v) {
            auto it = directed.find({u, v});
            return it == directed.end() ? 0 : it->second;
        };
        return count(i, j) - count(j, i);
    };
    std::vector<VertexId> ids;
    for (const auto& [v, c] : lin)
        ids.push_back(v);
    for (VertexId v : ids) {
        if (int s = sgn(lin[v].first); s != 0)
            return s;
        for (VertexId j : ids) {
            if (j >= v)
                break;
            if (int s = bilinear(v, j); s != 0)
                return s > 0 ? 1 : -1;
        }
        if (int s = sgn(lin[v].second); s != 0)
            return s;
        for (VertexId i : ids) {
            if (i > v)
                break;
            if (int s = bilinear(i, v); s != 0)
                return s > 0 ? 1 : -1;
        }
    }
    return 0;
}

/// Winding number of a closed cycle around point q (q not on the cycle).
inline int winding_number(const PointSet& ps, const std::vector<VertexId>& cyc, const Point& q)
{
    int wn = 0;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
        const Point& a = ps[cyc[i]];
        const Point& b = ps[cyc[(i + 1) % cyc.size()]];
        const bool a_up = perturbed_dy_sign(q, a) > 0;
        const bool b_up = perturbed_dy_sign(q, b) > 0;
        if (!a_up && b_up && orient_sign(a, b, q) > 0)
            ++wn;
        else if (a_up && !b_up && orient_sign(a, b, q) < 0)
            --wn;
    }
    return wn;
}

/// Number of convex hull vertices in the perturbed world.
/// Convex hull vertices of ps in counterclockwise order (perturbed world).
inline std::vector<VertexId> hull_ids(const PointSet& ps)
{
    std::vector<VertexId> order(ps.size());
    std::iota(order.begin(), order.end(), VertexId{0});
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
        if (ps[a].x != ps[b].x)
            return ps[a].x < ps[b].x;
        return a > b;
    });
    if (order.size() < 3)
        return order;
    std::vector<VertexId> h(2 * order.size());
    std::size_t k = 0;
    for (VertexId v : order) {
        while (k >= 2 && orient_sign(ps[h[k - 2]], ps[h[k - 1]], ps[v]) <= 0)
            --k;
        h[k++] = v;
    }
    for (std::size_t i = order.size() - 1, lower = k + 1; i-- > 0;) {
        const VertexId v = order[i];
        while (k >= lower && orient_sign(ps[h[k - 2]], ps[h[k - 1]], ps[v]) <= 0)
            --k;
        h[k++] = v;
    }
    h.resize(k - 1);
    return h;
}

inline std::size_t hull_size(const PointSet& ps) { return hull_ids(ps).size(); }

} // namespace detail

class Pslg {
public:
    struct Face {
        std::vector<VertexId> boundary;            // CCW; empty for the unbounded face
        std::vector<std::vector<VertexId>> holes;  // clockwise cycles inside the face
        std::vector<VertexId> isolated;
    };

    static constexpr std::size_t kUnbounded = 0;

    /// Builds and validates the graph. Throws DuplicateEdge, NotPlanar or
    /// InvalidInput (bad ids, self loops).
    static Pslg build(PointSetPtr ps, std::vector<EdgeKey> edges)
    {
        Pslg g;
        g.ps_ = std::move(ps);
        const PointSet& P = *g.ps_;
        for (const auto& e : edges) {
            if (e.a >= P.size() || e.b >= P.size())
                throw Error(ErrorKind::InvalidInput, "edge references unknown vertex");
            if (e.a == e.b)
                throw Error(ErrorKind::InvalidInput, "self loop at " + std::to_string(e.a));
        }
        std::sort(edges.begin(), edges.end());
        if (auto it = std::adjacent_find(edges.begin(), edges.end()); it != edges.end())
            throw Error(ErrorKind::DuplicateEdge,
                        "edge " + std::to_string(it->a) + "-" + std::to_string(it->b));
        g.edges_ = std::move(edges);
        g.check_planar();
        g.build_rings();
        g.build_faces();
        return g;
    }

    const PointSet& points() const { return *ps_; }
    const PointSetPtr& point_set() const { return ps_; }

    const std::vector<EdgeKey>& canonical_edge_set() const { return edges_; }

    std::size_t num_halfedges() const { return 2 * edges_.size(); }
    VertexId origin(HalfEdge h) const { return h & 1 ? edges_[h >> 1].b : edges_[h >> 1].a; }
    VertexId dest(HalfEdge h) const { return origin(h ^ 1); }
    static HalfEdge twin(HalfEdge h) { return h ^ 1; }

    /// Next half-edge along the face to the left of h.
    HalfEdge next(HalfEdge h) const
    {
        const HalfEdge t = h ^ 1;
        const auto& ring = rings_[origin(t)];
        const std::size_t i = ring_pos_[t];
        return ring[(i + ring.size() - 1) % ring.size()];
    }

    /// Neighbours of v counterclockwise, starting at the positive x axis.
    std::vector<VertexId> vertex_ring(VertexId v) const
    {
        std::vector<VertexId> out;
        for (HalfEdge h : rings_.at(v))
            out.push_back(dest(h));
        return out;
    }

    const std::vector<HalfEdge>& outgoing(VertexId v) const { return rings_.at(v); }

    const std::vector<Face>& faces() const { return faces_; }
    std::size_t face_left_of(HalfEdge h) const { return face_of_[h]; }

    std::vector<std::vector<VertexId>> bounded_faces() const
    {
        std::vector<std::vector<VertexId>> out;
        for (std::size_t f = 1; f < faces_.size(); ++f)
            out.push_back(faces_[f].boundary);
        return out;
    }

    /// Edge count equals 3n - 3 - h: a plane graph with that many edges on
    /// all n points is a triangulation of their convex hull.
    bool is_triangulation() const
    {
        const std::size_t n = ps_->size();
        if (n < 3)
            return false;
        return edges_.size() == 3 * n - 3 - detail::hull_size(*ps_);
    }

    Triangulation to_triangulation() const
    {
        if (!is_triangulation())
            throw Error(ErrorKind::NotTriangulation, "edge set is not a triangulation");
        std::vector<TriangleKey> tris;
        tris.reserve(faces_.size());
        for (std::size_t f = 1; f < faces_.size(); ++f) {
            const auto& b = faces_[f].boundary;
            if (b.size() != 3)
                throw Error(ErrorKind::NotTriangulation, "non-triangular face");
            tris.push_back({b[0], b[1], b[2]});
        }
        return Triangulation::from_triangles(ps_, tris);
    }

private:
    void check_planar() const
    {
        struct Found {
            std::uint32_t i, j;
        };
        try {
            for_each_crossing(*ps_, std::span<const EdgeKey>(edges_), std::span<const EdgeKey>(edges_),
                              [](std::uint32_t i, std::uint32_t j) { throw Found{i, j}; });
        } catch (const Found& f) {
            const auto& a = edges_[f.i];
            const auto& b = edges_[f.j];
            throw Error(ErrorKind::NotPlanar, "edges " + std::to_string(a.a) + "-" + std::to_string(a.b) +
                                                  " and " + std::to_string(b.a) + "-" +
                                                  std::to_string(b.b) + " cross");
        }
    }

    void build_rings()
    {
        const PointSet& P = *ps_;
        rings_.assign(P.size(), {});
        for (HalfEdge h = 0; h < num_halfedges(); ++h)
            rings_[origin(h)].push_back(h);
        ring_pos_.assign(num_halfedges(), 0);
        for (VertexId v = 0; v < P.size(); ++v) {
            auto& r = rings_[v];
            std::sort(r.begin(), r.end(),
                      [&](HalfEdge a, HalfEdge b) { return angle_less(P[v], P[dest(a)], P[dest(b)]); });
            for (std::size_t i = 0; i < r.size(); ++i)
                ring_pos_[r[i]] = static_cast<std::uint32_t>(i);
        }
    }

    void build_faces()
    {
        const PointSet& P = *ps_;
        const std::size_t nh = num_halfedges();
        std::vector<std::uint32_t> cycle_of(nh, std::numeric_limits<std::uint32_t>::max());
        std::vector<std::vector<VertexId>> cycles;
        for (HalfEdge s = 0; s < nh; ++s) {
            if (cycle_of[s] != std::numeric_limits<std::uint32_t>::max())
                continue;
            const auto c = static_cast<std::uint32_t>(cycles.size());
            cycles.emplace_back();
            HalfEdge h = s;
            do {
                cycle_of[h] = c;
                cycles.back().push_back(origin(h));
                h = next(h);
            } while (h != s);
        }

        // connected components
        std::vector<VertexId> comp(P.size());
        std::iota(comp.begin(), comp.end(), VertexId{0});
        auto find = [&](VertexId v) {
            while (comp[v] != v)
                v = comp[v] = comp[comp[v]];
            return v;
        };
        for (const auto& e : edges_)
            comp[find(e.a)] = find(e.b);

        faces_.assign(1, Face{});
        std::vector<std::size_t> face_of_cycle(cycles.size(), kUnbounded);
        std::vector<std::size_t> outer_cycles;
        for (std::size_t c = 0; c < cycles.size(); ++c) {
            if (detail::cycle_area_sign(P, cycles[c]) > 0) {
                face_of_cycle[c] = faces_.size();
                faces_.push_back(Face{cycles[c], {}, {}});
            } else {
                outer_cycles.push_back(c);
            }
        }

        // innermost bounded face of another component containing q
        auto enclosing = [&](const Point& q) {
            const VertexId cq = find(q.id);
            std::size_t best = kUnbounded;
            for (std::size_t f = 1; f < faces_.size(); ++f) {
                const auto& b = faces_[f].boundary;
                if (find(b[0]) == cq || detail::winding_number(P, b, q) == 0)
                    continue;
                if (best == kUnbounded || detail::winding_number(P, faces_[best].boundary, P[b[0]]) != 0)
                    best = f;
            }
            return best;
        };

        for (std::size_t c : outer_cycles) {
            const std::size_t f = enclosing(P[cycles[c][0]]);
            face_of_cycle[c] = f;
            faces_[f].holes.push_back(cycles[c]);
        }
        for (VertexId v = 0; v < P.size(); ++v)
            if (rings_[v].empty())
                faces_[enclosing(P[v])].isolated.push_back(v);

        face_of_.resize(nh);
        for (HalfEdge h = 0; h < nh; ++h)
            face_of_[h] = face_of_cycle[cycle_of[h]];
    }

    PointSetPtr ps_;
    std::vector<EdgeKey> edges_;
    std::vector<std::vector<HalfEdge>> rings_;
    std::vector<std::uint32_t> ring_pos_;
    std::vector<Face> faces_;
    std::vector<std::size_t> face_of_;
};

} // namespace dtpred
