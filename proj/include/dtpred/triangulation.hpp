#pragma once

// Half-edge triangulation over a shared PointSet.
//
// Triangles are stored as three consecutive half-edges (3t, 3t+1, 3t+2) in
// counterclockwise order; half-edge h runs from vertex(h) to vertex(next(h)).
// The outer face is closed by ghost triangles incident to the symbolic vertex
// kInfinite, one per convex hull edge, so every half-edge has a twin.
//
// A ghost triangle (u, v, inf) represents the open half-plane to the left of
// u->v (outside the hull). A point "conflicts" with a real triangle when it is
// strictly inside its circumcircle, and with a ghost when it lies in that
// half-plane; these are the only limit rules for the infinite vertex.
//
// With history recording on, insertions never reuse triangle slots: each dead
// triangle keeps the contiguous range of triangles created by the insertion
// that destroyed it, which forms the point-location DAG.

#include <dtpred/pointset.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dtpred {

using TriId = std::uint32_t;
using HalfEdge = std::uint32_t;

inline constexpr TriId kNoTri = std::numeric_limits<TriId>::max();
inline constexpr HalfEdge kNoEdge = std::numeric_limits<HalfEdge>::max();

using TriangleKey = std::array<VertexId, 3>;

/// Sorted vertex triple; kInfinite sorts last.
inline TriangleKey make_triangle_key(VertexId a, VertexId b, VertexId c)
{
    TriangleKey k{a, b, c};
    std::sort(k.begin(), k.end());
    return k;
}

struct TriangleKeyHash {
    std::size_t operator()(const TriangleKey& k) const noexcept
    {
        std::uint64_t h = 1469598103934665603ull;
        for (VertexId v : k) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

class Triangulation {
public:
    Triangulation() = default;

    explicit Triangulation(PointSetPtr ps, bool record_history = false)
        : ps_(std::move(ps))
        , vertex_edge_(ps_->size(), kNoEdge)
        , record_history_(record_history)
        , history_valid_(record_history)
    {}

    /// Builds from real triangles (any orientation). Hull edges receive ghosts.
    static Triangulation from_triangles(PointSetPtr ps, std::span<const TriangleKey> tris)
    {
        Triangulation t(std::move(ps));
        for (const auto& tri : tris) {
            auto [a, b, c] = tri;
            if (a >= t.ps_->size() || b >= t.ps_->size() || c >= t.ps_->size())
                throw Error(ErrorKind::InvalidInput, "triangle references unknown vertex");
            if (a == b || b == c || a == c)
                throw Error(ErrorKind::NotTriangulation, "degenerate triangle");
            if (!is_ccw(t.pt(a), t.pt(b), t.pt(c)))
                std::swap(b, c);
            t.new_triangle(a, b, c);
        }
        t.link_twins_by_map();
        t.attach_ghosts();
        t.rebuild_vertex_edges();
        return t;
    }

    const PointSet& points() const { return *ps_; }
    const PointSetPtr& point_set() const { return ps_; }

    // --- topology accessors ------------------------------------------------

    static TriId tri_of(HalfEdge h) { return h / 3; }
    static HalfEdge next(HalfEdge h) { return h % 3 == 2 ? h - 2 : h + 1; }
    static HalfEdge prev(HalfEdge h) { return h % 3 == 0 ? h + 2 : h - 1; }
    HalfEdge twin(HalfEdge h) const { return twin_[h]; }
    VertexId origin(HalfEdge h) const { return vert_[h]; }
    VertexId dest(HalfEdge h) const { return vert_[next(h)]; }
    VertexId corner(TriId t, int k) const { return vert_[3 * t + k]; }
    TriId neighbor(TriId t, int k) const { return tri_of(twin_[3 * t + k]); }

    std::size_t triangle_capacity() const { return alive_.size(); }
    bool alive(TriId t) const { return t < alive_.size() && alive_[t] != 0; }

    int infinite_corner(TriId t) const
    {
        for (int k = 0; k < 3; ++k)
            if (vert_[3 * t + k] == kInfinite)
                return k;
        return -1;
    }
    bool is_ghost(TriId t) const { return infinite_corner(t) >= 0; }
    bool has_vertex(TriId t, VertexId v) const
    {
        return vert_[3 * t] == v || vert_[3 * t + 1] == v || vert_[3 * t + 2] == v;
    }

    bool contains_vertex(VertexId v) const
    {
        return v < vertex_edge_.size() && (vertex_edge_[v] != kNoEdge || is_pending(v));
    }
    std::size_t num_vertices() const { return num_vertices_; }

    std::vector<VertexId> vertices() const
    {
        std::vector<VertexId> out;
        out.reserve(num_vertices_);
        for (VertexId v = 0; v < vertex_edge_.size(); ++v)
            if (contains_vertex(v))
                out.push_back(v);
        return out;
    }

    HalfEdge vertex_edge(VertexId v) const
    {
        return v == kInfinite ? infinite_edge_ : vertex_edge_[v];
    }

    template <typename Fn>
    void for_each_live_triangle(Fn&& fn) const
    {
        for (TriId t = 0; t < alive_.size(); ++t)
            if (alive_[t])
                fn(t);
    }

    /// Real (finite) triangles as CCW vertex triples.
    std::vector<TriangleKey> triangles() const
    {
        std::vector<TriangleKey> out;
        for_each_live_triangle([&](TriId t) {
            if (!is_ghost(t))
                out.push_back({corner(t, 0), corner(t, 1), corner(t, 2)});
        });
        return out;
    }

    std::size_t num_triangles() const
    {
        std::size_t n = 0;
        for_each_live_triangle([&](TriId t) { n += is_ghost(t) ? 0 : 1; });
        return n;
    }

    std::size_t num_hull_vertices() const
    {
        std::size_t n = 0;
        for_each_live_triangle([&](TriId t) { n += is_ghost(t) ? 1 : 0; });
        return n;
    }

    /// Sorted canonical edge list of finite edges.
    std::vector<EdgeKey> edges() const
    {
        std::vector<EdgeKey> out;
        for_each_live_triangle([&](TriId t) {
            for (int k = 0; k < 3; ++k) {
                const HalfEdge h = 3 * t + k;
                const VertexId u = vert_[h], v = dest(h);
                if (u != kInfinite && v != kInfinite && u < v)
                    out.emplace_back(u, v);
            }
        });
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Half-edge u->v, or kNoEdge.
    HalfEdge find_halfedge(VertexId u, VertexId v) const
    {
        const HalfEdge start = vertex_edge(u);
        if (start == kNoEdge)
            return kNoEdge;
        HalfEdge h = start;
        do {
            if (dest(h) == v)
                return h;
            h = twin_[prev(h)];
        } while (h != start);
        return kNoEdge;
    }

    /// Outgoing half-edges of v in counterclockwise order.
    std::vector<HalfEdge> outgoing(VertexId v) const
    {
        std::vector<HalfEdge> out;
        const HalfEdge start = vertex_edge(v);
        if (start == kNoEdge)
            return out;
        HalfEdge h = start;
        do {
            out.push_back(h);
            h = twin_[prev(h)];
        } while (h != start);
        return out;
    }

    /// Finite neighbours of v in counterclockwise order, starting from the
    /// first direction at or after the positive x axis.
    std::vector<VertexId> vertex_ring(VertexId v) const
    {
        std::vector<VertexId> ring;
        for (HalfEdge h : outgoing(v))
            if (dest(h) != kInfinite)
                ring.push_back(dest(h));
        if (ring.size() > 1) {
            const Point& c = pt(v);
            std::size_t first = 0;
            for (std::size_t i = 1; i < ring.size(); ++i)
                if (angle_less(c, pt(ring[i]), pt(ring[first])))
                    first = i;
            std::rotate(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(first), ring.end());
        }
        return ring;
    }

    bool is_hull_halfedge(HalfEdge h) const
    {
        return is_ghost(tri_of(h)) || is_ghost(tri_of(twin_[h]));
    }

    // --- local Delaunay and flips --------------------------------------------

    /// Hull edges (and edges touching the infinite vertex) are locally
    /// Delaunay by convention.
    bool halfedge_locally_delaunay(HalfEdge h) const
    {
        const TriId t = tri_of(h);
        const HalfEdge g = twin_[h];
        if (is_ghost(t) || is_ghost(tri_of(g)))
            return true;
        const VertexId a = vert_[h], b = vert_[next(h)], c = vert_[prev(h)];
        const VertexId d = vert_[prev(g)];
        return !inside_ccw_circle(pt(a), pt(b), pt(c), pt(d));
    }

    bool is_locally_delaunay(const EdgeKey& e) const
    {
        const HalfEdge h = require_edge(e);
        return halfedge_locally_delaunay(h);
    }

    bool is_flippable(HalfEdge h) const
    {
        const HalfEdge g = twin_[h];
        if (is_ghost(tri_of(h)) || is_ghost(tri_of(g)))
            return false;
        const VertexId a = vert_[h], b = vert_[next(h)], c = vert_[prev(h)];
        const VertexId d = vert_[prev(g)];
        return detail::orient_sign(pt(c), pt(a), pt(d)) > 0 &&
               detail::orient_sign(pt(d), pt(b), pt(c)) > 0;
    }

    /// Replaces the diagonal of the quadrilateral around h. Returns the new
    /// half-edge c->d.
    HalfEdge flip_halfedge(HalfEdge h)
    {
        if (!is_flippable(h))
            throw Error(ErrorKind::NotFlippable,
                        "edge " + std::to_string(vert_[h]) + "-" + std::to_string(dest(h)));
        const HalfEdge g = twin_[h];
        const TriId t0 = tri_of(h), t1 = tri_of(g);
        const VertexId a = vert_[h], b = vert_[next(h)], c = vert_[prev(h)];
        const VertexId d = vert_[prev(g)];
        const HalfEdge tw_bc = twin_[next(h)], tw_ca = twin_[prev(h)];
        const HalfEdge tw_ad = twin_[next(g)], tw_db = twin_[prev(g)];

        const HalfEdge s = 3 * t0, r = 3 * t1;
        vert_[s] = c, vert_[s + 1] = a, vert_[s + 2] = d;
        vert_[r] = d, vert_[r + 1] = b, vert_[r + 2] = c;
        set_twin(s, tw_ca);
        set_twin(s + 1, tw_ad);
        set_twin(s + 2, r + 2);
        set_twin(r, tw_db);
        set_twin(r + 1, tw_bc);
        set_vertex_edge(a, s + 1);
        set_vertex_edge(b, r + 1);
        set_vertex_edge(c, s);
        set_vertex_edge(d, r);
        history_valid_ = false;
        ++counters().flips;
        return r + 2;
    }

    void flip(const EdgeKey& e) { flip_halfedge(require_edge(e)); }

    HalfEdge require_edge(const EdgeKey& e) const
    {
        if (e.a >= vertex_edge_.size() || e.b >= vertex_edge_.size())
            throw Error(ErrorKind::InvalidInput, "edge references unknown vertex");
        const HalfEdge h = find_halfedge(e.a, e.b);
        if (h == kNoEdge)
            throw Error(ErrorKind::InvalidInput,
                        "no edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
        return h;
    }

    // --- conflicts, walking and point location -----------------------------

    /// Whether p conflicts with triangle t (see file comment).
    bool conflicts(TriId t, const Point& p) const
    {
        const int k = infinite_corner(t);
        const HalfEdge base = 3 * t;
        if (k < 0)
            return inside_ccw_circle(pt(vert_[base]), pt(vert_[base + 1]), pt(vert_[base + 2]), p);
        const VertexId u = vert_[base + (k + 1) % 3], v = vert_[base + (k + 2) % 3];
        return detail::orient_sign(pt(u), pt(v), p) > 0;
    }

    /// Real triangle containing p (or incident to p when p is one of its
    /// vertices), or ghost in conflict with p.
    bool covers(TriId t, const Point& p) const
    {
        if (has_vertex(t, p.id))
            return true;
        const int k = infinite_corner(t);
        const HalfEdge base = 3 * t;
        if (k >= 0) {
            const VertexId u = vert_[base + (k + 1) % 3], v = vert_[base + (k + 2) % 3];
            return detail::orient_sign(pt(u), pt(v), p) > 0;
        }
        for (int j = 0; j < 3; ++j)
            if (detail::orient_sign(pt(vert_[base + j]), pt(vert_[base + (j + 1) % 3]), p) < 0)
                return false;
        return true;
    }

    /// Visibility walk from `start` towards p. Returns the covering triangle,
    /// or nullopt once more than `max_steps` triangles have been crossed.
    /// `steps` receives the number of crossings performed.
    std::optional<TriId> walk(TriId start, const Point& p,
                              std::size_t max_steps = std::numeric_limits<std::size_t>::max(),
                              std::size_t* steps = nullptr) const
    {
        TriId t = start;
        std::size_t n = 0;
        std::uint32_t rng = p.id * 2654435761u + 1u;
        std::optional<TriId> result;
        for (;;) {
            if (has_vertex(t, p.id)) {
                result = t;
                break;
            }
            const int k = infinite_corner(t);
            HalfEdge exit = kNoEdge;
            if (k >= 0) {
                const HalfEdge h = 3 * t + (k + 1) % 3;
                if (detail::orient_sign(pt(vert_[h]), pt(dest(h)), p) > 0) {
                    result = t;
                    break;
                }
                exit = h;
            } else {
                rng = rng * 1664525u + 1013904223u;
                const std::uint32_t rot = (rng >> 16) % 3;
                for (std::uint32_t j = 0; j < 3 && exit == kNoEdge; ++j) {
                    const HalfEdge h = 3 * t + (j + rot) % 3;
                    if (detail::orient_sign(pt(vert_[h]), pt(dest(h)), p) < 0)
                        exit = h;
                }
                if (exit == kNoEdge) {
                    result = t;
                    break;
                }
            }
            if (n >= max_steps)
                break;
            t = tri_of(twin_[exit]);
            ++n;
        }
        counters().walk_steps += n;
        if (steps)
            *steps = n;
        return result;
    }

    bool has_history() const { return record_history_ && history_valid_; }

    /// Forgets the insertion history; dead slots become reusable.
    void drop_history()
    {
        record_history_ = false;
        history_valid_ = false;
        child_begin_.clear();
        child_end_.clear();
        child_begin_.shrink_to_fit();
        child_end_.shrink_to_fit();
        free_.clear();
        for (TriId t = 0; t < alive_.size(); ++t)
            if (!alive_[t])
                free_.push_back(t);
    }

    /// Point location through the insertion history DAG.
    TriId locate(const Point& p) const
    {
        if (!has_history())
            throw std::logic_error("locate requires an intact insertion history");
        ++counters().locate_queries;
        TriId cur = pick_child(history_root_begin_, history_root_end_, p);
        if (cur == kNoTri)
            return fallback_walk(p);
        return descend(cur, p);
    }

    /// Continues a history descent from a (possibly dead) triangle that
    /// covered p when it was alive.
    TriId descend(TriId cur, const Point& p) const
    {
        while (!alive_[cur]) {
            const TriId child = pick_child(child_begin_[cur], child_end_[cur], p);
            if (child == kNoTri)
                return fallback_walk(p);
            cur = child;
        }
        return cur;
    }

    TriId any_live_triangle() const
    {
        if (infinite_edge_ != kNoEdge)
            return tri_of(infinite_edge_);
        for (TriId t = 0; t < alive_.size(); ++t)
            if (alive_[t])
                return t;
        return kNoTri;
    }

    // --- construction ------------------------------------------------------

    /// Seeds the triangulation with three vertices (any order).
    void init_triangle(VertexId a, VertexId b, VertexId c)
    {
        if (!alive_.empty() && any_live_triangle() != kNoTri)
            throw std::logic_error("init_triangle on non-empty triangulation");
        if (!is_ccw(pt(a), pt(b), pt(c)))
            std::swap(b, c);
        const TriId first = static_cast<TriId>(alive_.size());
        const TriId t = new_triangle(a, b, c);
        (void)t;
        attach_ghosts();
        rebuild_vertex_edges_for({a, b, c});
        num_vertices_ = 3;
        history_root_begin_ = first;
        history_root_end_ = static_cast<TriId>(alive_.size());
        pending_.clear();
    }

    /// Inserts vertex p (Bowyer-Watson). `hint` may be kNoTri, a live
    /// triangle near p, or (with history) a dead triangle that covered p.
    /// Returns a live triangle incident to p.
    TriId insert(VertexId pid, TriId hint = kNoTri)
    {
        if (pid >= vertex_edge_.size())
            throw Error(ErrorKind::InvalidInput, "vertex id out of range");
        if (contains_vertex(pid))
            throw Error(ErrorKind::DuplicatePoint, "vertex " + std::to_string(pid) + " already present");
        if (any_live_triangle() == kNoTri) {
            pending_.push_back(pid);
            ++num_vertices_;
            if (pending_.size() == 3) {
                const auto pend = pending_;
                pending_.clear();
                init_triangle(pend[0], pend[1], pend[2]);
                return any_live_triangle();
            }
            return kNoTri;
        }
        const Point& p = pt(pid);
        const TriId start = find_conflicting(p, hint);
        return insert_from(pid, start);
    }

    /// Triangle whose conflict region contains p, reached from `hint`.
    TriId find_conflicting(const Point& p, TriId hint) const
    {
        if (hint != kNoTri && hint < alive_.size()) {
            if (alive_[hint]) {
                if (conflicts(hint, p))
                    return hint;
                return *walk(hint, p);
            }
            if (has_history())
                return descend(hint, p);
        }
        if (has_history())
            return locate(p);
        return *walk(any_live_triangle(), p);
    }

    // --- validation -----------------------------------------------------------

    /// Throws NotTriangulation when a structural invariant fails. With
    /// `check_crossings` also runs the O(m^2) pairwise crossing test.
    void validate(bool check_crossings = false) const
    {
        auto fail = [](const std::string& msg) { throw Error(ErrorKind::NotTriangulation, msg); };
        std::size_t real = 0, ghosts = 0;
        for (TriId t = 0; t < alive_.size(); ++t) {
            if (!alive_[t])
                continue;
            for (int k = 0; k < 3; ++k) {
                const HalfEdge h = 3 * t + k;
                const HalfEdge g = twin_[h];
                if (g == kNoEdge || !alive_[tri_of(g)] || twin_[g] != h)
                    fail("inconsistent twin at triangle " + std::to_string(t));
                if (vert_[g] != dest(h) || dest(g) != vert_[h])
                    fail("twin endpoints mismatch at triangle " + std::to_string(t));
            }
            const int k = infinite_corner(t);
            if (k < 0) {
                ++real;
                if (detail::orient_sign(pt(corner(t, 0)), pt(corner(t, 1)), pt(corner(t, 2))) < 0)
                    fail("clockwise triangle " + std::to_string(t));
            } else {
                ++ghosts;
                // hull turn: u->v followed by v->w must turn left
                const HalfEdge h = 3 * t + (k + 1) % 3;
                const VertexId u = vert_[h], v = dest(h);
                const HalfEdge on = twin_[next(h)];            // inf->v side of next ghost
                const VertexId w = dest(next(on));               // the ghost (v, w, inf)
                (void)u;
                if (w != kInfinite && w != vert_[h] &&
                    detail::orient_sign(pt(w), pt(v), pt(u)) < 0)
                    fail("hull not convex at vertex " + std::to_string(v));
            }
        }
        const std::size_t n = num_vertices_;
        if (n >= 3) {
            const std::size_t h = ghosts;
            if (real != 2 * n - 2 - h)
                fail("face count violates Euler relation");
            if (edges().size() != 3 * n - 3 - h)
                fail("edge count violates Euler relation");
        }
        for (VertexId v = 0; v < vertex_edge_.size(); ++v) {
            const HalfEdge e = vertex_edge_[v];
            if (e != kNoEdge && (!alive_[tri_of(e)] || vert_[e] != v))
                fail("stale vertex edge for " + std::to_string(v));
        }
        if (check_crossings) {
            const auto es = edges();
            for (std::size_t i = 0; i < es.size(); ++i)
                for (std::size_t j = i + 1; j < es.size(); ++j)
                    if (segments_properly_cross(pt(es[i].a), pt(es[i].b), pt(es[j].a), pt(es[j].b)))
                        fail("edges cross");
        }
    }

    const Point& pt(VertexId v) const { return (*ps_)[v]; }

    // --- low-level editing (used by the repair algorithms) ------------------

    TriId new_triangle(VertexId a, VertexId b, VertexId c)
    {
        TriId t;
        if (!record_history_ && !free_.empty()) {
            t = free_.back();
            free_.pop_back();
            alive_[t] = 1;
        } else {
            t = static_cast<TriId>(alive_.size());
            alive_.push_back(1);
            vert_.resize(vert_.size() + 3);
            twin_.resize(twin_.size() + 3, kNoEdge);
            if (record_history_) {
                child_begin_.push_back(0);
                child_end_.push_back(0);
            }
        }
        vert_[3 * t] = a, vert_[3 * t + 1] = b, vert_[3 * t + 2] = c;
        twin_[3 * t] = twin_[3 * t + 1] = twin_[3 * t + 2] = kNoEdge;
        return t;
    }

    void kill_triangle(TriId t)
    {
        alive_[t] = 0;
        if (!record_history_)
            free_.push_back(t);
    }

    void set_twin(HalfEdge a, HalfEdge b)
    {
        twin_[a] = b;
        twin_[b] = a;
    }

    void set_vertex_edge(VertexId v, HalfEdge h)
    {
        if (v == kInfinite)
            infinite_edge_ = h;
        else
            vertex_edge_[v] = h;
    }

    void clear_vertex(VertexId v) { vertex_edge_[v] = kNoEdge; }

    /// Recomputes the vertex->edge map and vertex count from live triangles.
    void rebuild_vertex_edges()
    {
        std::fill(vertex_edge_.begin(), vertex_edge_.end(), kNoEdge);
        infinite_edge_ = kNoEdge;
        for (TriId t = 0; t < alive_.size(); ++t)
            if (alive_[t])
                for (int k = 0; k < 3; ++k)
                    set_vertex_edge(vert_[3 * t + k], 3 * t + k);
        num_vertices_ = 0;
        for (HalfEdge e : vertex_edge_)
            num_vertices_ += e != kNoEdge ? 1 : 0;
        num_vertices_ += pending_.size();
    }

    void set_num_vertices(std::size_t n) { num_vertices_ = n; }

    /// Pairs up half-edges by endpoints; unmatched ones stay kNoEdge.
    void link_twins_by_map()
    {
        std::unordered_map<std::uint64_t, HalfEdge> open;
        open.reserve(vert_.size());
        auto key = [](VertexId u, VertexId v) { return (std::uint64_t(u) << 32) | v; };
        for (TriId t = 0; t < alive_.size(); ++t) {
            if (!alive_[t])
                continue;
            for (int k = 0; k < 3; ++k) {
                const HalfEdge h = 3 * t + k;
                if (twin_[h] != kNoEdge)
                    continue;
                const VertexId u = vert_[h], v = dest(h);
                if (auto it = open.find(key(v, u)); it != open.end()) {
                    set_twin(h, it->second);
                    open.erase(it);
                } else if (!open.emplace(key(u, v), h).second) {
                    throw Error(ErrorKind::NotTriangulation,
                                "edge " + std::to_string(u) + "-" + std::to_string(v) +
                                    " used twice in the same direction");
                }
            }
        }
    }

    /// Creates a ghost triangle for every real half-edge without a twin and
    /// links the ghosts around the infinite vertex.
    void attach_ghosts()
    {
        std::vector<TriId> ghosts;
        for (TriId t = 0; t < alive_.size(); ++t) {
            if (!alive_[t] || infinite_corner(t) >= 0)
                continue;
            for (int k = 0; k < 3; ++k) {
                const HalfEdge h = 3 * t + k;
                if (twin_[h] != kNoEdge)
                    continue;
                const TriId g = new_triangle(dest(h), vert_[h], kInfinite);
                set_twin(3 * g, h);
                ghosts.push_back(g);
            }
        }
        // ghost (b, a, inf): half-edge a->inf pairs with inf->a of ghost (a, z, inf)
        std::unordered_map<VertexId, TriId> by_first;
        by_first.reserve(ghosts.size());
        for (TriId g : ghosts)
            if (!by_first.emplace(vert_[3 * g], g).second)
                throw Error(ErrorKind::NotTriangulation,
                            "boundary is not a simple cycle at vertex " + std::to_string(vert_[3 * g]));
        for (TriId g : ghosts) {
            const VertexId a = vert_[3 * g + 1];
            auto it = by_first.find(a);
            if (it == by_first.end())
                throw Error(ErrorKind::NotTriangulation, "open boundary at vertex " + std::to_string(a));
            set_twin(3 * g + 1, 3 * it->second + 2);
        }
    }

private:
    bool is_pending(VertexId v) const
    {
        return std::find(pending_.begin(), pending_.end(), v) != pending_.end();
    }

    void rebuild_vertex_edges_for(std::initializer_list<VertexId> vs)
    {
        for (VertexId v : vs) {
            for (TriId t = 0; t < alive_.size(); ++t) {
                if (!alive_[t])
                    continue;
                for (int k = 0; k < 3; ++k)
                    if (vert_[3 * t + k] == v)
                        set_vertex_edge(v, 3 * t + k);
            }
        }
        for (TriId t = 0; t < alive_.size(); ++t)
            if (alive_[t])
                for (int k = 0; k < 3; ++k)
                    if (vert_[3 * t + k] == kInfinite)
                        infinite_edge_ = 3 * t + k;
    }

    TriId pick_child(TriId begin, TriId end, const Point& p) const
    {
        for (TriId c = begin; c < end; ++c)
            if (!is_ghost(c) && covers(c, p))
                return c;
        for (TriId c = begin; c < end; ++c)
            if (is_ghost(c) && covers(c, p))
                return c;
        return kNoTri;
    }

    TriId fallback_walk(const Point& p) const { return *walk(any_live_triangle(), p); }

    TriId insert_from(VertexId pid, TriId start)
    {
        const Point& p = pt(pid);
        if (mark_.size() < alive_.size())
            mark_.resize(alive_.size() + alive_.size() / 2 + 16, 0);
        round_ += 2;
        if (round_ < 2) { // wrapped
            std::fill(mark_.begin(), mark_.end(), 0);
            round_ = 2;
        }
        const std::uint32_t in = round_, out = round_ + 1;

        cavity_.clear();
        boundary_.clear();
        stack_.clear();
        stack_.push_back(start);
        mark_[start] = in;
        while (!stack_.empty()) {
            const TriId t = stack_.back();
            stack_.pop_back();
            cavity_.push_back(t);
            for (int k = 0; k < 3; ++k) {
                const HalfEdge h = 3 * t + k;
                const HalfEdge o = twin_[h];
                const TriId n = tri_of(o);
                if (mark_[n] == in)
                    continue;
                if (mark_[n] != out) {
                    if (conflicts(n, p)) {
                        mark_[n] = in;
                        stack_.push_back(n);
                        continue;
                    }
                    mark_[n] = out;
                }
                boundary_.push_back({vert_[h], dest(h), o});
            }
        }

        for (TriId t : cavity_)
            kill_triangle(t);
        const TriId first_new = static_cast<TriId>(alive_.size());
        new_tris_.clear();
        for (const auto& b : boundary_) {
            const TriId t = new_triangle(b.u, b.v, pid);
            set_twin(3 * t, b.outside);
            new_tris_.push_back(t);
        }
        // triangle (u, v, p) has v->p at +1 and p->u at +2; p->u pairs with
        // u->p of the triangle whose second vertex is u.
        if (new_tris_.size() <= 32) {
            for (std::size_t i = 0; i < new_tris_.size(); ++i) {
                const TriId t = new_tris_[i];
                const VertexId u = vert_[3 * t];
                for (std::size_t j = 0; j < new_tris_.size(); ++j) {
                    const TriId s = new_tris_[j];
                    if (vert_[3 * s + 1] == u) {
                        set_twin(3 * t + 2, 3 * s + 1);
                        break;
                    }
                }
            }
        } else {
            std::unordered_map<VertexId, TriId> by_second;
            by_second.reserve(new_tris_.size() * 2);
            for (TriId t : new_tris_)
                by_second.emplace(vert_[3 * t + 1], t);
            for (TriId t : new_tris_)
                set_twin(3 * t + 2, 3 * by_second.at(vert_[3 * t]) + 1);
        }
        for (TriId t : new_tris_)
            set_vertex_edge(vert_[3 * t], 3 * t);
        set_vertex_edge(pid, 3 * new_tris_.front() + 2);
        ++num_vertices_;

        if (record_history_) {
            const TriId last_new = static_cast<TriId>(alive_.size());
            for (TriId t : cavity_) {
                child_begin_[t] = first_new;
                child_end_[t] = last_new;
            }
        }
        return new_tris_.front();
    }

    struct BoundaryEdge {
        VertexId u;
        VertexId v;
        HalfEdge outside;
    };

    PointSetPtr ps_;
    std::vector<VertexId> vert_;
    std::vector<HalfEdge> twin_;
    std::vector<std::uint8_t> alive_;
    std::vector<HalfEdge> vertex_edge_;
    HalfEdge infinite_edge_ = kNoEdge;
    std::size_t num_vertices_ = 0;
    std::vector<VertexId> pending_;
    std::vector<TriId> free_;

    bool record_history_ = false;
    bool history_valid_ = false;
    std::vector<TriId> child_begin_, child_end_;
    TriId history_root_begin_ = 0, history_root_end_ = 0;

    // scratch
    std::vector<std::uint32_t> mark_;
    std::uint32_t round_ = 0;
    std::vector<TriId> cavity_, stack_, new_tris_;
    std::vector<BoundaryEdge> boundary_;
};

} // namespace dtpred
