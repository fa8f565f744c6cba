#pragma once

// Point generators and prediction models: random flips, edge sampling with a
// completion policy, and DT of perturbed points re-embedded on the originals.

#include <dtpred/metrics.hpp>
#include <dtpred/pslg.hpp>

#include <optional>
#include <random>
#include <set>
#include <unordered_set>

namespace dtpred {

/// Generator for one of several independent streams under the same user seed.
/// Point generation and each prediction model draw from different streams, so
/// `gen --seed s` does not correlate perturbation offsets with coordinates.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

enum class Distribution { UniformSquare, GaussianClusters, GridJitter };

inline Distribution parse_distribution(const std::string& s)
{
    if (s == "uniform-square" || s == "uniform")
        return Distribution::UniformSquare;
    if (s == "gaussian-clusters" || s == "clusters")
        return Distribution::GaussianClusters;
    if (s == "grid-jitter" || s == "grid")
        return Distribution::GridJitter;
    throw Error(ErrorKind::InvalidInput, "unknown distribution '" + s + "'");
}

inline const char* to_string(Distribution d)
{
    switch (d) {
    case Distribution::UniformSquare: return "uniform-square";
    case Distribution::GaussianClusters: return "gaussian-clusters";
    case Distribution::GridJitter: return "grid-jitter";
    }
    return "?";
}

/// Reproducible point set; exact duplicates are redrawn. `jitter` only
/// applies to the grid distribution (fraction of a grid cell, 0 allowed).
inline PointSetPtr gen_points(std::size_t n, Distribution dist, std::uint64_t seed, double jitter = 0.25)
{
    if (n < 3)
        throw Error(ErrorKind::TooFewPoints, "need at least 3 points");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::set<std::pair<double, double>> seen;
    std::vector<std::pair<double, double>> pts;
    pts.reserve(n);
    auto accept = [&](double x, double y) {
        if (seen.emplace(x, y).second)
            pts.emplace_back(x, y);
    };
    switch (dist) {
    case Distribution::UniformSquare:
        while (pts.size() < n)
            accept(u(rng), u(rng));
        break;
    case Distribution::GaussianClusters: {
        const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n)) / 3));
        std::vector<std::pair<double, double>> centres(k);
        for (auto& c : centres)
            c = {u(rng), u(rng)};
        std::normal_distribution<double> g(0.0, 0.03);
        while (pts.size() < n) {
            const auto& c = centres[rng() % k];
            accept(c.first + g(rng), c.second + g(rng));
        }
        break;
    }
    case Distribution::GridJitter: {
        const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
        std::vector<std::size_t> cells(side * side);
        std::iota(cells.begin(), cells.end(), std::size_t{0});
        std::shuffle(cells.begin(), cells.end(), rng);
        std::uniform_real_distribution<double> j(-0.5 * jitter, 0.5 * jitter);
        std::size_t next = 0;
        while (pts.size() < n) {
            const std::size_t c = cells[next++ % cells.size()];
            const double x = (static_cast<double>(c % side) + (jitter > 0 ? j(rng) : 0.0)) / static_cast<double>(side);
            const double y = (static_cast<double>(c / side) + (jitter > 0 ? j(rng) : 0.0)) / static_cast<double>(side);
            accept(x, y);
        }
        break;
    }
    }
    return make_point_set(pts);
}

struct FlipModelResult {
    Triangulation g;
    std::vector<std::uint32_t> picked_labels; // one per iteration
    std::size_t flips = 0;                    // iterations whose edge was flippable
};

/// Random-flip process: each iteration picks a uniformly random edge and
/// flips it if its quadrilateral is convex. Edges carry labels that survive
/// flips.
inline FlipModelResult flip_model(const Triangulation& dt, std::size_t steps, std::uint64_t seed)
{
    if (metric_D_local(dt) != 0)
        throw Error(ErrorKind::InvalidInput, "flip_model expects a Delaunay triangulation");
    FlipModelResult out{dt, {}, 0};
    out.g.drop_history();
    std::vector<EdgeKey> edge_of = out.g.edges();
    auto rng = stream_rng(seed, 1);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(edge_of.size() - 1));
    out.picked_labels.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const std::uint32_t label = pick(rng);
        out.picked_labels.push_back(label);
        const EdgeKey e = edge_of[label];
        const HalfEdge h = out.g.find_halfedge(e.a, e.b);
        if (!out.g.is_flippable(h))
            continue;
        const HalfEdge nh = out.g.flip_halfedge(h);
        edge_of[label] = EdgeKey(out.g.origin(nh), out.g.dest(nh));
        ++out.flips;
    }
    return out;
}

enum class Completion { Random, LongestFirst };

inline Completion parse_completion(const std::string& s)
{
    if (s == "random")
        return Completion::Random;
    if (s == "longest-first" || s == "longest")
        return Completion::LongestFirst;
    throw Error(ErrorKind::InvalidInput, "unknown completion '" + s + "'");
}

struct SampleModelResult {
    Triangulation g;
    std::vector<EdgeKey> kept; // R, sorted
};

/// Keeps each DT edge with probability rho, then completes (P, R) to a
/// triangulation containing R. Completion starts from DT (which contains R)
/// and flips edges outside R: `Random` performs random convex flips,
/// `LongestFirst` keeps replacing diagonals by longer ones until none can be.
inline SampleModelResult edge_sample_model(const Triangulation& dt, double rho, Completion completion,
                                           std::uint64_t seed)
{
    if (!(rho > 0.0 && rho <= 1.0))
        throw Error(ErrorKind::InvalidInput, "rho must lie in (0, 1]");
    auto rng = stream_rng(seed, 2);
    std::bernoulli_distribution keep(rho);
    SampleModelResult out{dt, {}};
    out.g.drop_history();
    for (const auto& e : dt.edges())
        if (keep(rng))
            out.kept.push_back(e);
    std::unordered_set<EdgeKey, EdgeKeyHash> fixed(out.kept.begin(), out.kept.end());
    Triangulation& g = out.g;

    if (completion == Completion::Random) {
        std::vector<EdgeKey> free_edges;
        for (const auto& e : g.edges())
            if (!fixed.count(e))
                free_edges.push_back(e);
        if (free_edges.empty())
            return out;
        const std::size_t attempts = 2 * g.edges().size();
        for (std::size_t i = 0; i < attempts; ++i) {
            const std::size_t k = rng() % free_edges.size();
            const EdgeKey e = free_edges[k];
            const HalfEdge h = g.find_halfedge(e.a, e.b);
            if (!g.is_flippable(h))
                continue;
            const HalfEdge nh = g.flip_halfedge(h);
            free_edges[k] = EdgeKey(g.origin(nh), g.dest(nh));
        }
        return out;
    }

    std::vector<EdgeKey> stack;
    for (const auto& e : g.edges())
        if (!fixed.count(e))
            stack.push_back(e);
    std::shuffle(stack.begin(), stack.end(), rng);
    while (!stack.empty()) {
        const EdgeKey e = stack.back();
        stack.pop_back();
        if (fixed.count(e))
            continue;
        const HalfEdge h = g.find_halfedge(e.a, e.b);
        if (h == kNoEdge || !g.is_flippable(h))
            continue;
        const VertexId a = g.origin(h), b = g.dest(h);
        const VertexId c = g.origin(Triangulation::prev(h));
        const VertexId d = g.origin(Triangulation::prev(g.twin(h)));
        const PointSet& ps = g.points();
        if (compare_squared_length(ps[c], ps[d], ps[a], ps[b]) <= 0)
            continue;
        g.flip_halfedge(h);
        for (EdgeKey f : {EdgeKey(a, c), EdgeKey(c, b), EdgeKey(b, d), EdgeKey(d, a)})
            if (!fixed.count(f))
                stack.push_back(f);
    }
    return out;
}

/// Edge list over P that need not be planar: the combinatorial DT of
/// perturbed points, drawn on the true points.
struct CombinatorialGraph {
    PointSetPtr ps;
    std::vector<EdgeKey> edges;           // sorted
    std::vector<TriangleKey> triangles;   // combinatorial faces
    bool self_crossing = false;

    /// The same structure as a validated triangulation when the re-embedding
    /// happens to be one.
    std::optional<Triangulation> as_triangulation() const
    {
        if (self_crossing)
            return std::nullopt;
        try {
            auto g = Pslg::build(ps, edges);
            if (!g.is_triangulation())
                return std::nullopt;
            return g.to_triangulation();
        } catch (const Error&) {
            return std::nullopt;
        }
    }
};

inline CombinatorialGraph perturb_model(const PointSetPtr& ps, double eps, std::uint64_t seed)
{
    if (!(eps >= 0.0))
        throw Error(ErrorKind::InvalidInput, "eps must be non-negative");
    auto rng = stream_rng(seed, 3);
    std::uniform_real_distribution<double> off(-eps, eps);
    std::set<std::pair<double, double>> seen;
    std::vector<std::pair<double, double>> moved(ps->size());
    for (VertexId v = 0; v < ps->size(); ++v) {
        const Point& p = (*ps)[v];
        std::pair<double, double> q;
        do {
            q = eps > 0 ? std::pair{p.x + off(rng), p.y + off(rng)} : std::pair{p.x, p.y};
        } while (!seen.insert(q).second);
        moved[v] = q;
    }
    const auto est = make_point_set(moved);
    const auto dt = delaunay(est, seed, false);
    CombinatorialGraph out;
    out.ps = ps;
    out.edges = dt.edges();
    out.triangles = dt.triangles();
    bool crossing = false;
    for (const auto& t : out.triangles)
        if (!is_ccw((*ps)[t[0]], (*ps)[t[1]], (*ps)[t[2]])) {
            crossing = true;
            break;
        }
    if (!crossing) {
        for_each_crossing(*ps, std::span<const EdgeKey>(out.edges), std::span<const EdgeKey>(out.edges),
                          [&](std::uint32_t, std::uint32_t) { crossing = true; });
    }
    out.self_crossing = crossing;
    return out;
}

} // namespace dtpred
