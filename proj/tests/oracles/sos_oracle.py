"""Independent evaluation of the perturbed predicates.

Point i is moved to (x + e**(3**(2i)), y + e**(3**(2i+1))). Determinants are
expanded as sparse polynomials in e (exponent -> exact coefficient); the sign
is the sign of the lowest-order nonzero coefficient. Distinct monomials have
distinct exponents, since every variable appears with degree at most 2.
"""
from fractions import Fraction


class P(dict):
    @staticmethod
    def const(c):
        return P({0: Fraction(c)}) if c else P()

    def __add__(self, o):
        r = P(self)
        for k, v in o.items():
            r[k] = r.get(k, 0) + v
            if r[k] == 0:
                del r[k]
        return r

    def __neg__(self):
        return P({k: -v for k, v in self.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        r = P()
        for k1, v1 in self.items():
            for k2, v2 in o.items():
                k = k1 + k2
                r[k] = r.get(k, 0) + v1 * v2
                if r[k] == 0:
                    del r[k]
        return r


def pert(p, i):
    x, y = p
    return (P.const(x) + P({3 ** (2 * i): Fraction(1)}),
            P.const(y) + P({3 ** (2 * i + 1): Fraction(1)}))


def sign(poly):
    if not poly:
        return 0
    v = poly[min(poly)]
    return (v > 0) - (v < 0)


def orient(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def orient_sign(pts, ids):
    a, b, c = (pert(pts[i], i) for i in ids)
    return sign(orient(a, b, c))


def incircle_sign(pts, ids):
    """+1 if ids[3] is inside the circle through ids[0..2] (orientation-normalised)."""
    a, b, c, d = (pert(pts[i], i) for i in ids)
    rows = []
    for p in (a, b, c):
        dx, dy = p[0] - d[0], p[1] - d[1]
        rows.append((dx, dy, dx * dx + dy * dy))
    (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = rows
    det = a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0)
    return sign(det) * sign(orient(a, b, c))


if __name__ == "__main__":
    col = [(0, 0), (1, 1), (2, 2)]
    print("orient collinear 0,1,2:", orient_sign(col, (0, 1, 2)))
    cc = [(0, 0), (2, 0), (1, 1), (1, -1)]
    for perm in [(0, 1, 2, 3), (1, 2, 0, 3), (2, 1, 0, 3)]:
        print("incircle cocircular", perm, incircle_sign(cc, perm))
    rect = [(0, 0), (3, 0), (3, 1), (0, 1)]
    print("rect: 3 in circle(0,1,2):", incircle_sign(rect, (0, 1, 2, 3)))
    print("rect: 0 in circle(1,2,3):", incircle_sign(rect, (1, 2, 3, 0)))
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    print("unit square: 3 in circle(0,1,2):", incircle_sign(sq, (0, 1, 2, 3)))
    kite = [(0, 0), (2, 0), (1, 2), (1, -2)]
    print("kite: 3 in circle(0,1,2):", incircle_sign(kite, (0, 1, 2, 3)))
