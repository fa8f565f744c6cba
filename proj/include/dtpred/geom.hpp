#pragma once

// Exact orientation and in-circle predicates.
//
// Every predicate runs a floating-point filter first and falls back to exact
// integer arithmetic (coordinates scaled by a common power of two; 128- or
// 256-bit when the spread allows, GMP otherwise). Exact zeros are resolved by
// simulation of simplicity: point with id i is treated as
// (x_i + e_{2i}, y_i + e_{2i+1}) with infinitesimals e_0 >> e_1 >> ..., each
// infinitely larger than any power of the next, and the lifted coordinate is
// computed from the perturbed position. Lower ids dominate.

#include <dtpred/error.hpp>

#include <boost/multiprecision/cpp_int.hpp>
#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <initializer_list>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

namespace dtpred {

using VertexId = std::uint32_t;

inline constexpr VertexId kInfinite = std::numeric_limits<VertexId>::max();
inline constexpr VertexId kNoVertex = kInfinite - 1;

struct Point {
    double x = 0.0;
    double y = 0.0;
    VertexId id = 0;
};

enum class Orientation { CounterClockwise, Clockwise };
enum class InsideOutside { Inside, Outside };

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0; // 2^-53
inline constexpr double kOrientErrBound = (3.0 + 16.0 * kEps) * kEps;
inline constexpr double kInCircleErrBound = (10.0 + 96.0 * kEps) * kEps;

// --- exact integer arithmetic ---------------------------------------------

// Coordinates of a few points scaled by a common power of two so that they
// become integers. Signs of homogeneous determinants are unaffected.
struct Scaled {
    int emin = std::numeric_limits<int>::max();
    int emax = std::numeric_limits<int>::min();

    void add(double v)
    {
        if (v == 0.0)
            return;
        int e = 0;
        const double m = std::frexp(v, &e);
        const auto mant = static_cast<std::int64_t>(std::ldexp(std::fabs(m), 53));
        emin = std::min(emin, e - 53 + std::countr_zero(static_cast<std::uint64_t>(mant)));
        emax = std::max(emax, e);
    }

    // Scaled magnitudes stay below 2^bits; degree-4 determinants then need
    // about 4 * bits + 5 bits.
    int bits() const { return emax == std::numeric_limits<int>::min() ? 0 : emax - emin; }

    template <typename Int>
    Int get(double v) const
    {
        if (v == 0.0)
            return Int(0);
        int e = 0;
        const double m = std::frexp(v, &e);
        const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
        const int shift = e - 53 - emin;
        if constexpr (std::is_same_v<Int, mpz_class>) {
            mpz_class r(static_cast<long>(mant));
            if (shift >= 0)
                mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
            else
                mpz_divexact_ui(r.get_mpz_t(), r.get_mpz_t(), 1ul << -shift);
            return r;
        } else {
            return shift >= 0 ? Int(mant) * (Int(1) << shift) : Int(mant / (std::int64_t{1} << -shift));
        }
    }
};

inline int sign_of(const mpz_class& v) { return sgn(v); }
inline int sign_of(__int128 v) { return (v > 0) - (v < 0); }
inline int sign_of(const boost::multiprecision::int256_t& v) { return v.sign(); }

// Runs fn.template operator()<Int>() with the narrowest integer type that is
// exact for the scaled coordinates.
template <typename Fn>
int with_exact_int(const Scaled& sc, Fn&& fn)
{
    if (sc.bits() <= 28)
        return fn.template operator()<__int128>();
    if (sc.bits() <= 61)
        return fn.template operator()<boost::multiprecision::int256_t>();
    return fn.template operator()<mpz_class>();
}

// --- symbolic perturbation -------------------------------------------------
//
// Both predicates are determinants whose rows depend on one point each:
// (X, Y, 1) for orientation and (X, Y, X^2 + Y^2, 1) for the lifted in-circle
// test. Expanding a row in its point's perturbation gives coefficient rows
// per monomial, and by multilinearity the coefficient of a product of
// per-point monomials is the determinant of the chosen coefficient rows.
// Monomials are visited in dominance order (points from highest id down, and
// per point 1 > e_x > e_x^2 > e_y > e_y^2); the first nonzero one decides.

template <typename Int>
Int det3(const std::array<std::array<Int, 3>, 3>& m)
{
    return Int(m[0][0] * Int(m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * Int(m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * Int(m[1][0] * m[2][1] - m[1][1] * m[2][0]));
}

template <typename Int>
Int det4(const std::array<std::array<Int, 4>, 4>& m)
{
    // 2x2 minors of the top two rows against the bottom two.
    auto lo = [&](int i, int j) { return Int(m[0][i] * m[1][j] - m[0][j] * m[1][i]); };
    auto hi = [&](int i, int j) { return Int(m[2][i] * m[3][j] - m[2][j] * m[3][i]); };
    return Int(lo(0, 1) * hi(2, 3) - lo(0, 2) * hi(1, 3) + lo(0, 3) * hi(1, 2) + lo(1, 2) * hi(0, 3) -
               lo(1, 3) * hi(0, 2) + lo(2, 3) * hi(0, 1));
}

template <std::size_t K>
std::array<std::size_t, K> id_ranks(const std::array<const Point*, K>& pts)
{
    std::array<std::size_t, K> order;
    for (std::size_t i = 0; i < K; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return pts[l]->id < pts[r]->id; });
    return order; // order[rank] = position
}

template <typename Int>
int symbolic_orient_sign_impl(const Point& a, const Point& b, const Point& c, const Scaled& sc)
{
    const std::array<const Point*, 3> pts{&a, &b, &c};
    std::array<std::array<std::array<Int, 3>, 3>, 3> rows; // rows[pos][choice]
    for (std::size_t i = 0; i < 3; ++i) {
        rows[i][0] = {sc.get<Int>(pts[i]->x), sc.get<Int>(pts[i]->y), Int(1)};
        rows[i][1] = {Int(1), Int(0), Int(0)};
        rows[i][2] = {Int(0), Int(1), Int(0)};
    }
    const auto order = id_ranks(pts);
    constexpr int kPow[3] = {1, 3, 9};
    for (int code = 0; code < 27; ++code) {
        std::array<std::array<Int, 3>, 3> m;
        for (int rank = 0; rank < 3; ++rank)
            m[order[rank]] = rows[order[rank]][(code / kPow[rank]) % 3];
        if (int s = sign_of(det3(m)); s != 0)
            return s;
    }
    throw std::logic_error("symbolic perturbation produced an identically zero determinant");
}

template <typename Int>
int symbolic_incircle_sign_impl(const Point& a, const Point& b, const Point& c, const Point& d,
                                const Scaled& sc)
{
    const std::array<const Point*, 4> pts{&a, &b, &c, &d};
    std::array<std::array<std::array<Int, 4>, 5>, 4> rows;
    for (std::size_t i = 0; i < 4; ++i) {
        const Int x = sc.get<Int>(pts[i]->x), y = sc.get<Int>(pts[i]->y);
        rows[i][0] = {x, y, Int(x * x + y * y), Int(1)};
        rows[i][1] = {Int(1), Int(0), Int(2 * x), Int(0)};
        rows[i][2] = {Int(0), Int(0), Int(1), Int(0)};
        rows[i][3] = {Int(0), Int(1), Int(2 * y), Int(0)};
        rows[i][4] = {Int(0), Int(0), Int(1), Int(0)};
    }
    const auto order = id_ranks(pts);
    constexpr int kPow[4] = {1, 5, 25, 125};
    for (int code = 0; code < 625; ++code) {
        std::array<std::array<Int, 4>, 4> m;
        for (int rank = 0; rank < 4; ++rank)
            m[order[rank]] = rows[order[rank]][(code / kPow[rank]) % 5];
        if (int s = sign_of(det4(m)); s != 0)
            return s;
    }
    throw std::logic_error("symbolic perturbation produced an identically zero determinant");
}

inline Scaled scale_of(std::initializer_list<const Point*> pts)
{
    Scaled sc;
    for (const Point* p : pts) {
        sc.add(p->x);
        sc.add(p->y);
    }
    return sc;
}

inline int symbolic_orient_sign(const Point& a, const Point& b, const Point& c)
{
    const Scaled sc = scale_of({&a, &b, &c});
    return with_exact_int(sc, [&]<typename Int>() { return symbolic_orient_sign_impl<Int>(a, b, c, sc); });
}

inline int symbolic_incircle_sign(const Point& a, const Point& b, const Point& c, const Point& d)
{
    const Scaled sc = scale_of({&a, &b, &c, &d});
    return with_exact_int(sc, [&]<typename Int>() { return symbolic_incircle_sign_impl<Int>(a, b, c, d, sc); });
}

// --- filtered and exact stages ---------------------------------------------

/// Sign of the orientation determinant when the float filter can certify it.
inline std::optional<int> orient_filtered(const Point& a, const Point& b, const Point& c)
{
    const double detleft = (a.x - c.x) * (b.y - c.y);
    const double detright = (a.y - c.y) * (b.x - c.x);
    const double det = detleft - detright;
    const double bound = kOrientErrBound * (std::fabs(detleft) + std::fabs(detright));
    if (det > bound)
        return 1;
    if (-det > bound)
        return -1;
    return std::nullopt;
}

template <typename Int>
int orient_exact_impl(const Point& a, const Point& b, const Point& c, const Scaled& sc)
{
    const Int cx = sc.get<Int>(c.x), cy = sc.get<Int>(c.y);
    const Int acx = sc.get<Int>(a.x) - cx, acy = sc.get<Int>(a.y) - cy;
    const Int bcx = sc.get<Int>(b.x) - cx, bcy = sc.get<Int>(b.y) - cy;
    return sign_of(Int(acx * bcy - acy * bcx));
}

/// Exact sign of the unperturbed orientation determinant (may be 0).
inline int orient_exact(const Point& a, const Point& b, const Point& c)
{
    const Scaled sc = scale_of({&a, &b, &c});
    return with_exact_int(sc, [&]<typename Int>() { return orient_exact_impl<Int>(a, b, c, sc); });
}

inline std::optional<int> incircle_filtered(const Point& a, const Point& b, const Point& c,
                                            const Point& d)
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double clift = cdx * cdx + cdy * cdy;

    const double det =
        alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                             (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                             (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    const double bound = kInCircleErrBound * permanent;
    if (det > bound)
        return 1;
    if (-det > bound)
        return -1;
    return std::nullopt;
}

template <typename Int>
int incircle_exact_impl(const Point& a, const Point& b, const Point& c, const Point& d, const Scaled& sc)
{
    const Int dx = sc.get<Int>(d.x), dy = sc.get<Int>(d.y);
    const Int adx = sc.get<Int>(a.x) - dx, ady = sc.get<Int>(a.y) - dy;
    const Int bdx = sc.get<Int>(b.x) - dx, bdy = sc.get<Int>(b.y) - dy;
    const Int cdx = sc.get<Int>(c.x) - dx, cdy = sc.get<Int>(c.y) - dy;
    const Int alift = adx * adx + ady * ady;
    const Int blift = bdx * bdx + bdy * bdy;
    const Int clift = cdx * cdx + cdy * cdy;
    return sign_of(Int(alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
                       clift * (adx * bdy - ady * bdx)));
}

inline int incircle_exact(const Point& a, const Point& b, const Point& c, const Point& d)
{
    const Scaled sc = scale_of({&a, &b, &c, &d});
    return with_exact_int(sc, [&]<typename Int>() { return incircle_exact_impl<Int>(a, b, c, d, sc); });
}

inline void require_distinct(const Point& a, const Point& b, const Point& c)
{
    if (a.id == b.id || b.id == c.id || a.id == c.id)
        throw Error(ErrorKind::DuplicatePoint, "predicate called with repeated point id");
}

/// Perturbed orientation sign in {-1, +1}.
inline int orient_sign(const Point& a, const Point& b, const Point& c)
{
    ++counters().orient;
    if (auto s = orient_filtered(a, b, c))
        return *s;
    ++counters().exact_fallbacks;
    if (int s = orient_exact(a, b, c); s != 0)
        return s;
    return symbolic_orient_sign(a, b, c);
}

/// Perturbed sign of the lifted determinant (positive: d inside when abc is CCW).
inline int incircle_det_sign(const Point& a, const Point& b, const Point& c, const Point& d)
{
    ++counters().incircle;
    if (auto s = incircle_filtered(a, b, c, d))
        return *s;
    ++counters().exact_fallbacks;
    if (int s = incircle_exact(a, b, c, d); s != 0)
        return s;
    return symbolic_incircle_sign(a, b, c, d);
}

} // namespace detail

inline Orientation orient2d(const Point& a, const Point& b, const Point& c)
{
    detail::require_distinct(a, b, c);
    return detail::orient_sign(a, b, c) > 0 ? Orientation::CounterClockwise
                                            : Orientation::Clockwise;
}

inline bool is_ccw(const Point& a, const Point& b, const Point& c)
{
    return orient2d(a, b, c) == Orientation::CounterClockwise;
}

/// Whether d lies strictly inside the circle through a, b, c in the perturbed
/// world. Independent of the orientation in which abc is given.
inline InsideOutside incircle(const Point& a, const Point& b, const Point& c, const Point& d)
{
    detail::require_distinct(a, b, c);
    if (d.id == a.id || d.id == b.id || d.id == c.id)
        throw Error(ErrorKind::DuplicatePoint, "incircle query point repeats a circle point");
    int s = detail::incircle_det_sign(a, b, c, d);
    if (detail::orient_sign(a, b, c) < 0)
        s = -s;
    return s > 0 ? InsideOutside::Inside : InsideOutside::Outside;
}

/// Incircle against a triangle already known to be CCW (skips the orientation
/// normalisation).
inline bool inside_ccw_circle(const Point& a, const Point& b, const Point& c, const Point& d)
{
    return detail::incircle_det_sign(a, b, c, d) > 0;
}

/// True iff the open segments pq and rs meet in a single point interior to
/// both. Segments sharing an endpoint never cross.
inline bool segments_properly_cross(const Point& p, const Point& q, const Point& r, const Point& s)
{
    if (p.id == r.id || p.id == s.id || q.id == r.id || q.id == s.id)
        return false;
    // Cheap reject on bounding boxes before touching the predicates.
    if (std::max(p.x, q.x) < std::min(r.x, s.x) || std::max(r.x, s.x) < std::min(p.x, q.x) ||
        std::max(p.y, q.y) < std::min(r.y, s.y) || std::max(r.y, s.y) < std::min(p.y, q.y))
        return false;
    const int o1 = detail::orient_sign(p, q, r);
    const int o2 = detail::orient_sign(p, q, s);
    if (o1 == o2)
        return false;
    const int o3 = detail::orient_sign(r, s, p);
    const int o4 = detail::orient_sign(r, s, q);
    return o3 != o4;
}

/// Perturbed sign of a.y - c.y; never zero for distinct ids.
inline int perturbed_dy_sign(const Point& c, const Point& a)
{
    if (a.y > c.y)
        return 1;
    if (a.y < c.y)
        return -1;
    return a.id < c.id ? 1 : -1;
}

/// Counterclockwise angular order of the directions c->a and c->b, measured
/// from the positive x axis.
inline bool angle_less(const Point& c, const Point& a, const Point& b)
{
    const bool upper_a = perturbed_dy_sign(c, a) > 0;
    const bool upper_b = perturbed_dy_sign(c, b) > 0;
    if (upper_a != upper_b)
        return upper_a;
    return detail::orient_sign(c, a, b) > 0;
}

/// Exact comparison of |ab|^2 against |cd|^2: -1, 0 or +1.
inline int compare_squared_length(const Point& a, const Point& b, const Point& c, const Point& d)
{
    const double abx = a.x - b.x, aby = a.y - b.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double l1 = abx * abx + aby * aby;
    const double l2 = cdx * cdx + cdy * cdy;
    const double bound = 8.0 * detail::kEps * (l1 + l2);
    if (l1 - l2 > bound)
        return 1;
    if (l2 - l1 > bound)
        return -1;
    const mpq_class ex = mpq_class(a.x) - mpq_class(b.x), ey = mpq_class(a.y) - mpq_class(b.y);
    const mpq_class fx = mpq_class(c.x) - mpq_class(d.x), fy = mpq_class(c.y) - mpq_class(d.y);
    return sgn(ex * ex + ey * ey - (fx * fx + fy * fy));
}

} // namespace dtpred
