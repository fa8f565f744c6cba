#pragma once

// Uniform grid over segments, used to prune candidate pairs for crossing
// tests. Cells touched by a segment are enumerated conservatively (column by
// column, with a small slack), so every exactly-crossing pair shares a cell.

#include <dtpred/pointset.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace dtpred {

class SegmentGrid {
public:
    SegmentGrid(const BoundingBox& box, std::size_t expected_segments)
        : box_(box)
    {
        const double w = std::max(box.xmax - box.xmin, 1e-300);
        const double h = std::max(box.ymax - box.ymin, 1e-300);
        const double cells = std::max<double>(1.0, static_cast<double>(expected_segments));
        const double side = std::sqrt(w * h / cells);
        nx_ = std::clamp<std::size_t>(static_cast<std::size_t>(w / std::max(side, 1e-300)) + 1, 1, 4096);
        ny_ = std::clamp<std::size_t>(static_cast<std::size_t>(h / std::max(side, 1e-300)) + 1, 1, 4096);
        cw_ = w / static_cast<double>(nx_);
        ch_ = h / static_cast<double>(ny_);
        cells_.assign(nx_ * ny_, {});
    }

    /// Calls fn(cell_index) for every cell the segment pq may touch.
    template <typename Fn>
    void for_each_cell(const Point& p, const Point& q, Fn&& fn) const
    {
        const Point& a = p.x <= q.x ? p : q;
        const Point& b = p.x <= q.x ? q : p;
        const std::size_t c0 = col(a.x), c1 = col(b.x);
        const double dx = b.x - a.x;
        const double slack = 1e-9 * (std::fabs(ch_) + std::fabs(a.y) + std::fabs(b.y));
        for (std::size_t c = c0; c <= c1; ++c) {
            double ylo, yhi;
            if (c0 == c1 || dx <= 0.0) {
                ylo = std::min(a.y, b.y);
                yhi = std::max(a.y, b.y);
            } else {
                const double xl = std::max(a.x, box_.xmin + cw_ * static_cast<double>(c));
                const double xr = std::min(b.x, box_.xmin + cw_ * static_cast<double>(c + 1));
                const double t0 = (xl - a.x) / dx;
                const double t1 = (xr - a.x) / dx;
                const double y0 = a.y + (b.y - a.y) * std::clamp(t0, 0.0, 1.0);
                const double y1 = a.y + (b.y - a.y) * std::clamp(t1, 0.0, 1.0);
                ylo = std::min(y0, y1);
                yhi = std::max(y0, y1);
            }
            const std::size_t r0 = row(ylo - slack), r1 = row(yhi + slack);
            for (std::size_t r = r0; r <= r1; ++r)
                fn(r * nx_ + c);
        }
    }

    void insert(std::uint32_t segment, const Point& p, const Point& q)
    {
        for_each_cell(p, q, [&](std::size_t cell) { cells_[cell].push_back(segment); });
    }

    std::span<const std::uint32_t> cell(std::size_t index) const { return cells_[index]; }

private:
    std::size_t col(double x) const
    {
        const double f = (x - box_.xmin) / cw_;
        if (!(f > 0.0))
            return 0;
        return std::min<std::size_t>(static_cast<std::size_t>(std::min(f, 1e18)), nx_ - 1);
    }
    std::size_t row(double y) const
    {
        const double f = (y - box_.ymin) / ch_;
        if (!(f > 0.0))
            return 0;
        return std::min<std::size_t>(static_cast<std::size_t>(std::min(f, 1e18)), ny_ - 1);
    }

    BoundingBox box_;
    std::size_t nx_ = 1, ny_ = 1;
    double cw_ = 1, ch_ = 1;
    std::vector<std::vector<std::uint32_t>> cells_;
};

/// Bucket grid over the points of a PointSet, about one point per cell.
class PointGrid {
public:
    explicit PointGrid(const PointSet& ps)
        : box_(ps.bbox())
    {
        const double w = std::max(box_.xmax - box_.xmin, 1e-300);
        const double h = std::max(box_.ymax - box_.ymin, 1e-300);
        const double side = std::sqrt(w * h / std::max<double>(1.0, static_cast<double>(ps.size())));
        nx_ = std::clamp<std::size_t>(static_cast<std::size_t>(w / std::max(side, 1e-300)) + 1, 1, 4096);
        ny_ = std::clamp<std::size_t>(static_cast<std::size_t>(h / std::max(side, 1e-300)) + 1, 1, 4096);
        cw_ = w / static_cast<double>(nx_);
        ch_ = h / static_cast<double>(ny_);
        start_.assign(nx_ * ny_ + 1, 0);
        for (const auto& p : ps.points())
            ++start_[cell_of(p.x, p.y) + 1];
        for (std::size_t i = 1; i < start_.size(); ++i)
            start_[i] += start_[i - 1];
        ids_.resize(ps.size());
        auto fill = start_;
        for (const auto& p : ps.points())
            ids_[fill[cell_of(p.x, p.y)]++] = p.id;
    }

    /// Calls fn(id) for every point whose cell meets the box.
    template <typename Fn>
    void for_each_in_box(double xlo, double ylo, double xhi, double yhi, Fn&& fn) const
    {
        if (xhi < box_.xmin || xlo > box_.xmax || yhi < box_.ymin || ylo > box_.ymax)
            return;
        const std::size_t c0 = col(xlo), c1 = col(xhi), r0 = row(ylo), r1 = row(yhi);
        for (std::size_t r = r0; r <= r1; ++r)
            for (std::size_t c = c0; c <= c1; ++c) {
                const std::size_t k = r * nx_ + c;
                for (std::size_t i = start_[k]; i < start_[k + 1]; ++i)
                    fn(ids_[i]);
            }
    }

private:
    std::size_t col(double x) const
    {
        const double f = (x - box_.xmin) / cw_;
        if (!(f > 0.0))
            return 0;
        return std::min<std::size_t>(static_cast<std::size_t>(std::min(f, 1e18)), nx_ - 1);
    }
    std::size_t row(double y) const
    {
        const double f = (y - box_.ymin) / ch_;
        if (!(f > 0.0))
            return 0;
        return std::min<std::size_t>(static_cast<std::size_t>(std::min(f, 1e18)), ny_ - 1);
    }
    std::size_t cell_of(double x, double y) const { return row(y) * nx_ + col(x); }

    BoundingBox box_;
    std::size_t nx_ = 1, ny_ = 1;
    double cw_ = 1, ch_ = 1;
    std::vector<std::size_t> start_;
    std::vector<VertexId> ids_;
};

/// Calls fn(i, j) once for each pair (i in `queries`, j in `indexed`) of
/// properly crossing segments. Segments are index pairs into `ps`.
template <typename Fn>
void for_each_crossing(const PointSet& ps, std::span<const EdgeKey> queries,
                       std::span<const EdgeKey> indexed, Fn&& fn)
{
    if (queries.empty() || indexed.empty())
        return;
    SegmentGrid grid(ps.bbox(), indexed.size());
    for (std::uint32_t j = 0; j < indexed.size(); ++j)
        grid.insert(j, ps[indexed[j].a], ps[indexed[j].b]);
    std::vector<std::uint32_t> stamp(indexed.size(), 0);
    std::uint32_t round = 0;
    for (std::uint32_t i = 0; i < queries.size(); ++i) {
        ++round;
        const Point& p = ps[queries[i].a];
        const Point& q = ps[queries[i].b];
        grid.for_each_cell(p, q, [&](std::size_t c) {
            for (std::uint32_t j : grid.cell(c)) {
                if (stamp[j] == round)
                    continue;
                stamp[j] = round;
                if (segments_properly_cross(p, q, ps[indexed[j].a], ps[indexed[j].b]))
                    fn(i, j);
            }
        });
    }
}

} // namespace dtpred
