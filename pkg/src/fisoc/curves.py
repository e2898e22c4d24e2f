"""Curves over finite fields: point counts, zeta data, closed points.

Three models are supported: the projective line, elliptic curves in short
Weierstrass form y^2 = x^3 + a x + b (odd characteristic), and
hyperelliptic y^2 = f(x) with squarefree f (odd characteristic).  Counting
is plain enumeration with a size guard; everything downstream of the
counts is exact integer arithmetic.

The zeta numerator is recovered from N_1..N_g by Newton's identities and
completed by the functional equation; the redundant counts N_{g+1}..N_{2g}
are enumerated too (when affordable) and cross-checked, so a counting bug
cannot survive construction.  Counts in degrees beyond 2g come from the
Weil power-sum recurrence, which is exact for curves.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import BudgetError, ConfigError, InconsistencyError
from .gf import FiniteField

DEFAULT_BUDGET = 10 ** 7


# -- small polynomial helpers over a packed finite field -----------------


def poly_eval(field, coeffs, x):
    acc = field.zero
    for c in reversed(coeffs):
        acc = field.add(field.mul(acc, x), c)
    return acc


def poly_deriv(field, coeffs):
    out = []
    for k in range(1, len(coeffs)):
        c = coeffs[k]
        acc = field.zero
        for _ in range(k % field.p):
            acc = field.add(acc, c)
        out.append(acc)
    return out


def _poly_trim(field, c):
    c = list(c)
    while c and c[-1] == field.zero:
        c.pop()
    return c


def poly_gcd(field, a, b):
    a, b = _poly_trim(field, a), _poly_trim(field, b)
    while b:
        inv = field.inv(b[-1])
        r = list(a)
        while len(r) >= len(b):
            if r[-1] == field.zero:
                r.pop()
                continue
            k = len(r) - len(b)
            c = field.mul(r[-1], inv)
            for i, bc in enumerate(b):
                r[k + i] = field.sub(r[k + i], field.mul(c, bc))
            r = _poly_trim(field, r)
        a, b = b, r
    return a


@lru_cache(maxsize=None)
def _field(p, n):
    return FiniteField(p, n)


@lru_cache(maxsize=None)
def _embedding(p, n_small, n_big):
    """Packed-element embedding F_{p^n_small} -> F_{p^n_big} as a power table."""
    small, big = _field(p, n_small), _field(p, n_big)
    if n_big % n_small:
        raise ConfigError("m", "no embedding between these fields")
    if n_small == 1:
        return tuple(c % p for c in range(p))
    mod = small.modulus
    root = None
    for a in range(big.order):
        if poly_eval(big, tuple(c % p for c in mod), a) == big.zero:
            root = a
            break
    powers = [big.one]
    for _ in range(n_small - 1):
        powers.append(big.mul(powers[-1], root))
    table = []
    for packed in range(small.order):
        digs = small.unpack(packed)
        acc = big.zero
        for d, w in zip(digs, powers):
            for _ in range(d):
                acc = big.add(acc, w)
        table.append(acc)
    return tuple(table)


def embed_element(p, n_small, n_big, packed):
    if n_small == n_big:
        return packed
    return _embedding(p, n_small, n_big)[packed]


# -- curve models ----------------------------------------------------------


class CurveModel:
    """A smooth projective model, presented by an affine equation."""

    def __init__(self, kind, field, coeffs=()):
        self.kind = kind
        self.field = field
        self.q = field.order
        self.p = field.p
        self.coeffs = tuple(coeffs)
        if kind == "projective-line":
            self.genus = 0
        elif kind == "elliptic":
            if field.p in (2, 3):
                raise ConfigError("q", "short Weierstrass model needs p >= 5")
            a, b = coeffs
            disc = field.add(
                field.mul(field.from_int(4), field.pow(a, 3)),
                field.mul(field.from_int(27), field.mul(b, b)),
            )
            if disc == field.zero:
                raise ConfigError("coefficients", "singular Weierstrass equation")
            self.genus = 1
        elif kind == "hyperelliptic":
            if field.p == 2:
                raise ConfigError("q", "hyperelliptic model needs odd characteristic")
            f = _poly_trim(field, coeffs)
            if len(f) - 1 < 3:
                raise ConfigError("coefficients", "need degree >= 3")
            g = poly_gcd(field, f, poly_deriv(field, f))
            if len(g) > 1:
                raise ConfigError("coefficients", "f must be squarefree")
            deg = len(f) - 1
            self.genus = (deg - 1) // 2 if deg % 2 else deg // 2 - 1
            self.coeffs = tuple(f)
        else:
            raise ConfigError("kind", f"unknown curve kind {kind!r}")
        if self.genus > 4:
            raise ConfigError("coefficients", "genus > 4 is out of scope")

    @classmethod
    def projective_line(cls, p, n=1):
        return cls("projective-line", _field(p, n))

    @classmethod
    def elliptic(cls, p, a, b, n=1):
        F = _field(p, n)
        return cls("elliptic", F, (F.from_int(a) if isinstance(a, int) else a,
                                   F.from_int(b) if isinstance(b, int) else b))

    @classmethod
    def hyperelliptic(cls, p, coeffs, n=1):
        F = _field(p, n)
        cs = [F.from_int(c) if isinstance(c, int) else c for c in coeffs]
        return cls("hyperelliptic", F, cs)

    def __repr__(self):
        return f"CurveModel({self.kind}, q={self.q}, genus={self.genus})"

    def _rhs_coeffs(self):
        if self.kind == "elliptic":
            a, b = self.coeffs
            return (b, a, self.field.zero, self.field.one)
        return self.coeffs

    def extension_field(self, m, budget=DEFAULT_BUDGET):
        n = self.field.n * m
        if self.p ** n > budget:
            raise BudgetError(self.p ** n, budget, what=f"enumeration of F_q^{m}")
        return _field(self.p, n)

    def _embedded_rhs(self, big):
        return tuple(
            embed_element(self.p, self.field.n, big.n, c) for c in self._rhs_coeffs()
        )

    def points_at_infinity(self, m=1, budget=DEFAULT_BUDGET):
        """Number of rational points at infinity of the smooth model over F_{q^m}."""
        if self.kind == "projective-line":
            return 1
        if self.kind == "elliptic":
            return 1
        deg = len(self.coeffs) - 1
        if deg % 2:
            return 1
        big = self.extension_field(m, budget)
        lc = embed_element(self.p, self.field.n, big.n, self.coeffs[-1])
        return 2 if big.is_square(lc) else 0

    def count_points(self, m, budget=DEFAULT_BUDGET):
        """Exact number of points of the smooth model over F_{q^m}."""
        if m < 1:
            raise ConfigError("m", "extension degree must be >= 1")
        if self.kind == "projective-line":
            if self.q ** m > budget:
                raise BudgetError(self.q ** m, budget, what=f"enumeration of F_q^{m}")
            return self.q ** m + 1
        big = self.extension_field(m, budget)
        rhs = self._embedded_rhs(big)
        chi = big.character_table()
        n = self.points_at_infinity(m, budget)
        for x in big.elements():
            n += 1 + int(chi[poly_eval(big, rhs, x)])
        return n


@dataclass(frozen=True)
class PointCounts:
    curve: CurveModel
    counts: tuple  # N_1 .. N_{2g}

    def __post_init__(self):
        q = self.curve.q
        g = self.curve.genus
        for m, N in enumerate(self.counts, start=1):
            a = N - (q ** m + 1)
            if a * a > 4 * g * g * q ** m:
                raise InconsistencyError(
                    f"N_{m} = {N} violates the Weil bound |N - q^m - 1| <= 2g sqrt(q^m)"
                )


@dataclass(frozen=True)
class ZetaData:
    """Zeta numerator P(t) with integer coefficients, plus derived invariants."""

    numerator: tuple  # 1 + c_1 t + ... + c_2g t^2g
    p_rank: int
    genus: int
    q: int

    def power_sum(self, m):
        """Sum of m-th powers of the inverse roots of P."""
        c = self.numerator
        deg = len(c) - 1
        s = {}
        for k in range(1, m + 1):
            acc = -k * c[k] if k <= deg else 0
            for i in range(1, min(k, deg + 1)):
                if k - i >= 1 and i <= deg:
                    acc -= c[i] * s[k - i]
            s[k] = acc
        return s[m]

    def count(self, m):
        """N_m derived from the zeta function (exact for any m)."""
        return self.q ** m + 1 - self.power_sum(m)


def point_counts(curve, budget=DEFAULT_BUDGET):
    g = curve.genus
    return PointCounts(curve, tuple(curve.count_points(m, budget) for m in range(1, 2 * g + 1)))


def zeta(curve, budget=DEFAULT_BUDGET):
    """Zeta numerator from point counts; checks the functional equation.

    Only N_1..N_g are strictly needed; the enumerated N_{g+1}..N_{2g} are
    compared against the reconstruction as an integrity check.
    """
    g = curve.genus
    q = curve.q
    if g == 0:
        return ZetaData((1,), 0, 0, q)
    pc = point_counts(curve, budget)
    s = [q ** m + 1 - pc.counts[m - 1] for m in range(1, 2 * g + 1)]
    c = [Fraction(1)]
    for k in range(1, g + 1):
        acc = Fraction(s[k - 1])
        for i in range(1, k):
            acc += c[i] * s[k - i - 1]
        c.append(-acc / k)
    coeffs = [Fraction(1)] * (2 * g + 1)
    for i in range(g + 1):
        coeffs[i] = c[i]
    for i in range(g):
        coeffs[2 * g - i] = c[i] * q ** (g - i)
    out = []
    for x in coeffs:
        if x.denominator != 1:
            raise InconsistencyError("zeta numerator is not integral; counting bug")
        out.append(int(x))
    data = ZetaData(tuple(out), _p_rank(out, curve.p), g, q)
    for m in range(1, 2 * g + 1):
        if data.count(m) != pc.counts[m - 1]:
            raise InconsistencyError(
                f"functional equation reconstruction disagrees with N_{m}"
            )
    return data


def _p_rank(coeffs, p):
    e = 0
    for i, c in enumerate(coeffs):
        if c % p:
            e = i
    return e


def orbit_counts(curve, D, zdata=None, budget=DEFAULT_BUDGET):
    """Number a_d of closed points of each degree d <= D, from zeta data."""
    zdata = zdata or zeta(curve, budget)
    N = {m: zdata.count(m) for m in range(1, D + 1)}
    out = {}
    for d in range(1, D + 1):
        acc = 0
        for e in _divisors(d):
            acc += _moebius(d // e) * N[e]
        if acc % d:
            raise InconsistencyError(f"non-integral orbit count in degree {d}")
        out[d] = acc // d
    return out


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _moebius(n):
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    if n > 1:
        out = -out
    return out


@dataclass(frozen=True)
class ClosedPoint:
    """A Galois orbit of geometric points, with a representative."""

    orbit_id: str
    degree: int
    rep: tuple  # ("aff", x, y) or ("inf", i), coordinates packed in F_{q^degree}


def closed_points(curve, D, budget=DEFAULT_BUDGET):
    """All closed points of degree <= D, with orbit representatives."""
    out = []
    for d in range(1, D + 1):
        big = curve.extension_field(d, budget)
        fdeg = curve.field.n
        if curve.kind == "projective-line":
            pts = [("aff", x) for x in big.elements()]
        else:
            rhs = curve._embedded_rhs(big)
            sqrtmap = {}
            for y in big.elements():
                sqrtmap.setdefault(big.mul(y, y), y)
            pts = []
            for x in big.elements():
                t = poly_eval(big, rhs, x)
                if t == big.zero:
                    pts.append(("aff", x, big.zero))
                elif t in sqrtmap:
                    y = sqrtmap[t]
                    pts.append(("aff", x, y))
                    pts.append(("aff", x, big.sub(big.zero, y)))
        seen = set()
        idx = 0
        for pt in pts:
            if pt in seen:
                continue
            orbit = []
            cur = pt
            while cur not in seen:
                seen.add(cur)
                orbit.append(cur)
                cur = tuple(
                    [cur[0]] + [big.frobenius(c, fdeg) for c in cur[1:]]
                )
            if len(orbit) == d:
                rep = min(orbit, key=lambda t: t[1:])
                out.append(ClosedPoint(f"d{d}o{idx}", d, rep))
                idx += 1
        if d == 1:
            inf = curve.points_at_infinity(1, budget)
            for i in range(inf):
                out.append(ClosedPoint(f"d1inf{i}", 1, ("inf", i)))
        if d == 2 and curve.kind == "hyperelliptic":
            deg = len(curve.coeffs) - 1
            if deg % 2 == 0 and curve.points_at_infinity(1, budget) == 0:
                out.append(ClosedPoint("d2inf0", 2, ("inf", 0)))
    return out


def check_point_partition(curve, D, budget=DEFAULT_BUDGET):
    """sum_{d | m} d a_d == N_m for all m <= D, with a_d enumerated."""
    pts = closed_points(curve, D, budget)
    by_deg = {}
    for pt in pts:
        by_deg[pt.degree] = by_deg.get(pt.degree, 0) + 1
    for m in range(1, D + 1):
        total = sum(d * a for d, a in by_deg.items() if m % d == 0)
        if total != curve.count_points(m, budget):
            raise InconsistencyError(f"closed-point partition fails at degree {m}")
    return by_deg


# -- elliptic group law ----------------------------------------------------


class EllipticGroup:
    """The group E(F_{q^m}) for a short Weierstrass curve."""

    def __init__(self, curve, m=1, budget=DEFAULT_BUDGET):
        if curve.kind != "elliptic":
            raise ConfigError("kind", "group law needs an elliptic model")
        self.curve = curve
        self.m = m
        self.field = curve.extension_field(m, budget)
        self.a = embed_element(curve.p, curve.field.n, self.field.n, curve.coeffs[0])
        self.b = embed_element(curve.p, curve.field.n, self.field.n, curve.coeffs[1])

    def points(self):
        F = self.field
        rhs = (self.b, self.a, F.zero, F.one)
        sqrtmap = {}
        for y in F.elements():
            sqrtmap.setdefault(F.mul(y, y), y)
        pts = [None]
        for x in F.elements():
            t = poly_eval(F, rhs, x)
            if t == F.zero:
                pts.append((x, F.zero))
            elif t in sqrtmap:
                y = sqrtmap[t]
                pts.append((x, y))
                pts.append((x, F.sub(F.zero, y)))
        return pts

    def add(self, P, Q):
        F = self.field
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2 and F.add(y1, y2) == F.zero:
            return None
        if P == Q:
            num = F.add(F.mul(F.from_int(3), F.mul(x1, x1)), self.a)
            den = F.mul(F.from_int(2), y1)
        else:
            num = F.sub(y2, y1)
            den = F.sub(x2, x1)
        lam = F.mul(num, F.inv(den))
        x3 = F.sub(F.sub(F.mul(lam, lam), x1), x2)
        y3 = F.sub(F.mul(lam, F.sub(x1, x3)), y1)
        return (x3, y3)

    def scalar(self, n, P):
        if n < 0:
            P = None if P is None else (P[0], self.field.sub(self.field.zero, P[1]))
            n = -n
        R = None
        B = P
        while n:
            if n & 1:
                R = self.add(R, B)
            B = self.add(B, B)
            n >>= 1
        return R

    def torsion_count(self, n):
        """Number of points killed by n (the size of the n-torsion subgroup)."""
        return sum(1 for P in self.points() if self.scalar(n, P) is None)


def mult_n_preimages(curve, n, P, m, budget=DEFAULT_BUDGET):
    """#{Q in E(F_{q^m}) : nQ = P} by direct group enumeration.

    P is either None (the origin) or an affine pair packed in F_{q^m}.
    Equals n^2 exactly when the full n-torsion is rational over F_{q^m}
    and P is in the image of multiplication by n.
    """
    from math import gcd

    if gcd(n, curve.p) != 1:
        raise ConfigError("n", "multiplication degree must be prime to p")
    G = EllipticGroup(curve, m, budget)
    return sum(1 for Q in G.points() if G.scalar(n, Q) == P)
