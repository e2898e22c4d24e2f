"""Newton polygons as exact rational lower convex hulls.

A polygon is stored by its vertices (x integer, y rational), starting at
(0, 0) with strictly increasing x and nondecreasing slopes left to right.
Slopes carry multiplicities: the slope multiset of a polygon of rank r has
exactly r entries.  Everything is exact Fraction arithmetic; there is no
floating point anywhere, so dominance and equality are decidable.

Valuation input uses ``None`` as the sentinel "at least the working
precision": such points are treated as lying arbitrarily high, and the
construction fails loudly if the hull could depend on one of them.
"""

import json
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import BudgetError, ConfigError, PrecisionError

_EXTERIOR_BUDGET = 200_000


class NewtonPolygon:
    """Lower convex hull with rational slopes and integer breakpoints."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        vs = [(int(x), Fraction(y)) for x, y in vertices]
        if not vs or vs[0] != (0, Fraction(0)):
            raise ConfigError("vertices", "polygon must start at (0, 0)")
        for (x0, _), (x1, _) in zip(vs, vs[1:]):
            if x1 <= x0:
                raise ConfigError("vertices", "abscissas must strictly increase")
        slopes = [
            (y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(vs, vs[1:])
        ]
        for s0, s1 in zip(slopes, slopes[1:]):
            if s1 <= s0:
                raise ConfigError("vertices", "slopes must strictly increase at vertices")
        self.vertices = tuple(vs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_slopes(cls, slopes):
        """Polygon of a slope multiset (any order)."""
        sl = sorted(Fraction(s) for s in slopes)
        vs = [(0, Fraction(0))]
        x, y = 0, Fraction(0)
        i = 0
        while i < len(sl):
            j = i
            while j < len(sl) and sl[j] == sl[i]:
                j += 1
            x += j - i
            y += sl[i] * (j - i)
            vs.append((x, y))
            i = j
        return cls(vs)

    @classmethod
    def from_valuations(cls, points, rank, normalizer, precision=None):
        """Lower hull of (index, valuation) pairs, y scaled by 1/normalizer.

        ``points`` may repeat indices; valuations are integers or
        Fractions, with ``None`` the precision sentinel.  The points must
        include (0, 0) and a finite value at ``rank``.  Raises
        PrecisionError when a sentinel point could lie on or below the
        hull computed from the finite points (that is, when the hull at
        its abscissa reaches the precision bound).
        """
        normalizer = Fraction(normalizer)
        if normalizer <= 0:
            raise ConfigError("normalizer", "must be positive")
        finite = {}
        sentinels = set()
        for x, v in points:
            x = int(x)
            if v is None:
                sentinels.add(x)
                continue
            v = Fraction(v)
            if x not in finite or v < finite[x]:
                finite[x] = v
        if finite.get(0) != 0:
            raise ConfigError("points", "need the point (0, 0)")
        if rank not in finite:
            raise PrecisionError(
                "final coefficient valuation exceeds the working precision; "
                "the polygon endpoint cannot be certified"
            )
        pts = sorted((x, v) for x, v in finite.items() if x <= rank)
        hull = _lower_hull(pts)
        if precision is not None:
            for x in sentinels:
                if 0 < x < rank and _hull_value(hull, x) > precision:
                    raise PrecisionError(
                        f"hull at abscissa {x} exceeds precision {precision} but the "
                        f"coefficient there is only known to be >= {precision}"
                    )
        return cls([(x, v / normalizer) for x, v in hull])

    # -- basic data ---------------------------------------------------------

    @property
    def rank(self):
        return self.vertices[-1][0]

    @property
    def height(self):
        return self.vertices[-1][1]

    def slope_multiplicities(self):
        """List of (slope, multiplicity), slopes strictly increasing."""
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out.append(((y1 - y0) / (x1 - x0), x1 - x0))
        return out

    def slopes(self):
        """The full slope multiset, ascending, length = rank."""
        out = []
        for s, m in self.slope_multiplicities():
            out.extend([s] * m)
        return tuple(out)

    def initial_slope(self):
        if self.rank == 0:
            raise ConfigError("rank", "empty polygon has no slopes")
        return self.slope_multiplicities()[0][0]

    def initial_multiplicity(self):
        return self.slope_multiplicities()[0][1]

    def value_at(self, x):
        """Height of the polygon above abscissa x (piecewise linear)."""
        x = Fraction(x)
        if x < 0 or x > self.rank:
            raise ConfigError("x", "outside the polygon support")
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return self.vertices[-1][1]

    # -- order and calculus ---------------------------------------------------

    def dominates(self, other):
        """True iff both endpoints agree and self lies on or above other
        at every integer abscissa."""
        if self.rank != other.rank or self.height != other.height:
            return False
        return all(self.value_at(x) >= other.value_at(x) for x in range(self.rank + 1))

    def shift(self, delta):
        """Add a constant to every slope."""
        delta = Fraction(delta)
        return NewtonPolygon([(x, y + delta * x) for x, y in self.vertices])

    def scale(self, c):
        """Multiply every slope by a positive rational."""
        c = Fraction(c)
        if c <= 0:
            raise ConfigError("c", "scale factor must be positive")
        return NewtonPolygon([(x, y * c) for x, y in self.vertices])

    def reflect(self):
        """Negate all slopes (the polygon of the dual)."""
        return NewtonPolygon.from_slopes([-s for s in self.slopes()])

    def direct_sum(self, other):
        return NewtonPolygon.from_slopes(self.slopes() + other.slopes())

    def tensor(self, other):
        return NewtonPolygon.from_slopes(
            [a + b for a in self.slopes() for b in other.slopes()]
        )

    def exterior_power(self, k):
        """Polygon of all sums of k distinct slope slots."""
        r = self.rank
        if not 1 <= k <= r:
            raise ConfigError("k", f"exterior power index must be in 1..{r}")
        if comb(r, k) > _EXTERIOR_BUDGET:
            raise BudgetError(comb(r, k), _EXTERIOR_BUDGET, what="exterior power")
        sl = self.slopes()
        return NewtonPolygon.from_slopes(
            [sum(c) for c in combinations(sl, k)]
        )

    # -- misc ------------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, NewtonPolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        parts = []
        for s, m in self.slope_multiplicities():
            parts.append(f"{s}" if m == 1 else f"{s}^{m}")
        return "NP{" + ", ".join(parts) + "}"

    def to_json(self):
        return {"vertices": [[x, f"{y.numerator}/{y.denominator}"] for x, y in self.vertices]}

    @classmethod
    def from_json(cls, data):
        return cls([(x, Fraction(y)) for x, y in data["vertices"]])

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _lower_hull(points):
    """Monotone-chain lower hull of sorted (x, y); keeps collinear points off."""
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above segment hull[-2] -> pt
            if (y1 - y0) * (pt[0] - x0) >= (pt[1] - y0) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _hull_value(hull, x):
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x0 <= x <= x1:
            return y0 + Fraction(y1 - y0, 1) * (x - x0) / (x1 - x0)
    raise AssertionError  # pragma: no cover


def dominance_minimum(polygons):
    """The polygon dominated by all others, or None when there is none.

    This is the sampled stand-in for a generic polygon: by specialization
    every sampled polygon must dominate the generic one, so when a sampled
    polygon achieves the minimum it is comparable to all the rest.
    """
    polys = list(polygons)
    if not polys:
        return None
    best = polys[0]
    for p in polys[1:]:
        if best.dominates(p):
            best = p
    if all(p.dominates(best) for p in polys):
        return best
    return None
