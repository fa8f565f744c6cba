#pragma once

#include <dtpred/geom.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dtpred {

/// Unordered vertex pair with canonical ordering a < b.
struct EdgeKey {
    VertexId a = 0;
    VertexId b = 0;

    EdgeKey() = default;
    EdgeKey(VertexId u, VertexId v)
        : a(std::min(u, v))
        , b(std::max(u, v))
    {}

    auto operator<=>(const EdgeKey&) const = default;
};

struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& e) const noexcept
    {
        return std::hash<std::uint64_t>{}((std::uint64_t(e.a) << 32) | e.b);
    }
};

struct BoundingBox {
    double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};

/// Immutable planar point set. Point i carries id i.
class PointSet {
public:
    PointSet() = default;

    explicit PointSet(const std::vector<std::pair<double, double>>& coords)
    {
        points_.reserve(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) {
            const auto [x, y] = coords[i];
            if (!std::isfinite(x) || !std::isfinite(y))
                throw Error(ErrorKind::InvalidInput, "non-finite coordinate at point " +
                                                         std::to_string(i));
            points_.push_back({x, y, static_cast<VertexId>(i)});
        }
        std::vector<VertexId> order(points_.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = static_cast<VertexId>(i);
        std::sort(order.begin(), order.end(), [&](VertexId l, VertexId r) {
            return std::pair(points_[l].x, points_[l].y) < std::pair(points_[r].x, points_[r].y);
        });
        for (std::size_t i = 1; i < order.size(); ++i) {
            const Point& p = points_[order[i - 1]];
            const Point& q = points_[order[i]];
            if (p.x == q.x && p.y == q.y)
                throw Error(ErrorKind::DuplicatePoint, "points " + std::to_string(p.id) + " and " +
                                                           std::to_string(q.id) + " coincide");
        }
        if (!points_.empty()) {
            bbox_ = {points_[0].x, points_[0].y, points_[0].x, points_[0].y};
            for (const auto& p : points_) {
                bbox_.xmin = std::min(bbox_.xmin, p.x);
                bbox_.xmax = std::max(bbox_.xmax, p.x);
                bbox_.ymin = std::min(bbox_.ymin, p.y);
                bbox_.ymax = std::max(bbox_.ymax, p.y);
            }
        }
    }

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const Point& operator[](VertexId id) const { return points_[id]; }
    std::span<const Point> points() const noexcept { return points_; }
    const BoundingBox& bbox() const noexcept { return bbox_; }

    bool operator==(const PointSet& o) const
    {
        if (points_.size() != o.points_.size())
            return false;
        for (std::size_t i = 0; i < points_.size(); ++i)
            if (points_[i].x != o.points_[i].x || points_[i].y != o.points_[i].y)
                return false;
        return true;
    }

private:
    std::vector<Point> points_;
    BoundingBox bbox_;
};

using PointSetPtr = std::shared_ptr<const PointSet>;

inline PointSetPtr make_point_set(const std::vector<std::pair<double, double>>& coords)
{
    return std::make_shared<const PointSet>(coords);
}

// --- text formats ------------------------------------------------------------
//
// points file: first line n, then n lines "x y".
// edges file: one "i j" pair per line, 0-based ids.
// Doubles are written in shortest round-trip form.

namespace detail {

inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& tok, std::size_t line)
{
    T value{};
    const char* begin = tok.data();
    const char* end = tok.data() + tok.size();
    if (!tok.empty() && *begin == '+')
        ++begin;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": bad number '" + tok + "'");
    return value;
}

inline std::vector<std::string> split_ws(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

} // namespace detail

inline std::vector<std::pair<double, double>> read_points(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    std::size_t n = 0;
    bool have_n = false;
    std::vector<std::pair<double, double>> coords;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = detail::trim(line);
        if (t.empty())
            continue;
        const auto toks = detail::split_ws(t);
        if (!have_n) {
            if (toks.size() != 1)
                throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected point count");
            n = detail::parse_number<std::size_t>(toks[0], lineno);
            coords.reserve(n);
            have_n = true;
            continue;
        }
        if (toks.size() != 2)
            throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected 'x y'");
        coords.emplace_back(detail::parse_number<double>(toks[0], lineno),
                            detail::parse_number<double>(toks[1], lineno));
    }
    if (!have_n)
        throw Error(ErrorKind::Parse, "empty points file");
    if (coords.size() != n)
        throw Error(ErrorKind::Parse, "expected " + std::to_string(n) + " points, found " +
                                          std::to_string(coords.size()));
    return coords;
}

inline void write_points(std::ostream& out, const PointSet& ps)
{
    out << ps.size() << '\n';
    for (const auto& p : ps.points())
        out << detail::format_double(p.x) << ' ' << detail::format_double(p.y) << '\n';
}

inline std::vector<EdgeKey> read_edges(std::istream& in, std::size_t num_points)
{
    std::string line;
    std::size_t lineno = 0;
    std::vector<EdgeKey> edges;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = detail::trim(line);
        if (t.empty())
            continue;
        const auto toks = detail::split_ws(t);
        if (toks.size() != 2)
            throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected 'i j'");
        const auto i = detail::parse_number<std::uint64_t>(toks[0], lineno);
        const auto j = detail::parse_number<std::uint64_t>(toks[1], lineno);
        if (i >= num_points || j >= num_points || i == j)
            throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": invalid vertex id");
        edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>(j));
    }
    return edges;
}

inline void write_edges(std::ostream& out, std::span<const EdgeKey> edges)
{
    for (const auto& e : edges)
        out << e.a << ' ' << e.b << '\n';
}

inline PointSetPtr load_points_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    return make_point_set(read_points(in));
}

inline std::vector<EdgeKey> load_edges_file(const std::string& path, std::size_t num_points)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    return read_edges(in, num_points);
}

} // namespace dtpred
