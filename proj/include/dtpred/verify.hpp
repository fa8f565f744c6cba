#pragma once

// Checks that a triangulation is Delaunay, and a static certificate that the
// edges of a plane graph all belong to DT(P).

#include <dtpred/metrics.hpp>
#include <dtpred/pslg.hpp>

#include <numeric>
#include <optional>

namespace dtpred {

inline bool is_delaunay(const Triangulation& g) { return metric_D_local(g) == 0; }

inline bool dt_equal(const Triangulation& a, const Triangulation& b)
{
    return a.points() == b.points() && a.edges() == b.edges();
}

struct CertWitness {
    TriangleKey triangle; // CCW as it appears in the face
    VertexId point;       // inside the triangle's circumcircle
};

struct CertResult {
    bool certified = false;
    std::optional<CertWitness> witness;
    std::optional<EdgeKey> offending_edge; // hypothesis failure
};

namespace detail {

inline bool is_triangular_face(const Pslg::Face& f)
{
    return f.boundary.size() == 3 && f.holes.empty() && f.isolated.empty();
}

// Every vertex of face f: boundary, hole cycles and isolated vertices.
inline void face_vertices(const Pslg::Face& f, std::vector<VertexId>& out)
{
    out.insert(out.end(), f.boundary.begin(), f.boundary.end());
    for (const auto& h : f.holes)
        out.insert(out.end(), h.begin(), h.end());
    out.insert(out.end(), f.isolated.begin(), f.isolated.end());
}

} // namespace detail

/// If every edge lies on the hull of P or next to a triangular face, and every
/// triangular face has all vertices of its neighbouring faces outside its
/// circumcircle, then every edge of g is a Delaunay edge. The converse is not
/// claimed: an uncertified graph may still be a subgraph of DT(P).
inline CertResult certify_subgraph(const Pslg& g)
{
    const PointSet& ps = g.points();
    const auto& faces = g.faces();
    CertResult r;

    std::unordered_set<EdgeKey, EdgeKeyHash> hull;
    const auto h = detail::hull_ids(ps);
    for (std::size_t i = 0; i < h.size() && h.size() >= 2; ++i)
        hull.insert(EdgeKey(h[i], h[(i + 1) % h.size()]));

    for (HalfEdge e = 0; e < g.num_halfedges(); e += 2) {
        const EdgeKey key(g.origin(e), g.dest(e));
        if (hull.count(key))
            continue;
        if (!detail::is_triangular_face(faces[g.face_left_of(e)]) &&
            !detail::is_triangular_face(faces[g.face_left_of(e ^ 1)])) {
            r.offending_edge = key;
            return r;
        }
    }

    std::vector<HalfEdge> face_edge(faces.size(), kNoEdge);
    for (HalfEdge e = 0; e < g.num_halfedges(); ++e)
        if (face_edge[g.face_left_of(e)] == kNoEdge)
            face_edge[g.face_left_of(e)] = e;

    std::vector<VertexId> nbr;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (!detail::is_triangular_face(faces[f]))
            continue;
        const auto& b = faces[f].boundary;
        const Point &pa = ps[b[0]], &pb = ps[b[1]], &pc = ps[b[2]];
        HalfEdge e = face_edge[f];
        for (int k = 0; k < 3; ++k, e = g.next(e)) {
            nbr.clear();
            detail::face_vertices(faces[g.face_left_of(e ^ 1)], nbr);
            for (VertexId v : nbr) {
                if (v == b[0] || v == b[1] || v == b[2])
                    continue;
                if (inside_ccw_circle(pa, pb, pc, ps[v])) {
                    r.witness = CertWitness{{b[0], b[1], b[2]}, v};
                    return r;
                }
            }
        }
    }
    r.certified = true;
    return r;
}

struct CascadeResult {
    std::size_t initial = 0;  // edges removed up front
    std::size_t cascaded = 0; // further edges with bounded non-triangular faces on both sides
};

/// Removes `removed` from triangulation g, then keeps deleting edges whose two
/// sides are both bounded and non-triangular until none is left.
inline CascadeResult cascade_removal(const Triangulation& g, const std::vector<EdgeKey>& removed)
{
    // Faces are unions of triangles; merging two never yields a triangle again.
    std::vector<TriId> parent(g.triangle_capacity());
    std::iota(parent.begin(), parent.end(), TriId{0});
    std::vector<std::size_t> size(parent.size(), 1);
    std::vector<char> bounded(parent.size(), 1);
    auto find = [&](TriId t) {
        while (parent[t] != t)
            t = parent[t] = parent[parent[t]];
        return t;
    };
    g.for_each_live_triangle([&](TriId t) { bounded[t] = g.is_ghost(t) ? 0 : 1; });
    auto unite = [&](TriId a, TriId b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (size[a] < size[b])
            std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
        bounded[a] = bounded[a] && bounded[b];
    };

    std::unordered_set<EdgeKey, EdgeKeyHash> gone;
    CascadeResult r;
    for (const auto& e : removed) {
        const HalfEdge h = g.find_halfedge(e.a, e.b);
        if (h == kNoEdge || !gone.insert(e).second)
            continue;
        unite(Triangulation::tri_of(h), Triangulation::tri_of(g.twin(h)));
        ++r.initial;
    }
    bool changed = true;
    const auto edges = g.edges();
    while (changed) {
        changed = false;
        for (const auto& e : edges) {
            if (gone.count(e))
                continue;
            const HalfEdge h = g.find_halfedge(e.a, e.b);
            const TriId a = find(Triangulation::tri_of(h)), b = find(Triangulation::tri_of(g.twin(h)));
            if (!bounded[a] || !bounded[b] || size[a] < 2 || size[b] < 2)
                continue;
            gone.insert(e);
            unite(a, b);
            ++r.cascaded;
            changed = true;
        }
    }
    return r;
}

} // namespace dtpred
