"""Truncated power series over an arbitrary coefficient ring.

A TruncSeries is a vector of D coefficients a_0..a_{D-1}, understood mod
t^D.  The coefficient ring is any linalg-style ring adapter (plain
integers via ZZ, residue rings via ModRing, Witt rings via RingSpec);
elements only need the usual arithmetic dunders.

SeriesRing wraps a coefficient ring into a ring adapter whose elements
are TruncSeries, so series matrices feed the same generic linear algebra
as everything else.  Truncated series rings over local coefficient rings
are local: a series is a unit exactly when its constant term is.
"""

from math import gcd

from .errors import PrecisionError


class ZZ:
    """Exact integer coefficients."""

    zero = 0
    one = 1

    @staticmethod
    def is_unit(x):
        return x in (1, -1)

    @staticmethod
    def inv(x):
        if x not in (1, -1):
            raise PrecisionError("integer inverse of a non-unit")
        return x


class IntMod:
    """A self-reducing element of Z/m."""

    __slots__ = ("m", "v")

    def __init__(self, m, v):
        self.m = m
        self.v = v % m

    def _lift(self, other):
        if isinstance(other, int):
            return IntMod(self.m, other)
        if isinstance(other, IntMod) and other.m == self.m:
            return other
        return None

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else IntMod(self.m, self.v + o.v)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else IntMod(self.m, self.v - o.v)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else IntMod(self.m, o.v - self.v)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else IntMod(self.m, self.v * o.v)

    __rmul__ = __mul__

    def __neg__(self):
        return IntMod(self.m, -self.v)

    def __eq__(self, other):
        o = self._lift(other)
        return o is not None and self.v == o.v

    def __hash__(self):
        return hash((self.m, self.v))

    def __repr__(self):
        return f"{self.v}(mod {self.m})"


class ModRing:
    """Z/m ring adapter over IntMod elements."""

    def __init__(self, m):
        self.m = m
        self.zero = IntMod(m, 0)
        self.one = IntMod(m, 1)

    def of_int(self, c):
        return IntMod(self.m, c)

    def is_unit(self, x):
        return gcd(x.v, self.m) == 1

    def inv(self, x):
        return IntMod(self.m, pow(x.v, -1, self.m))


class TruncSeries:
    """Power series mod t^D over a fixed coefficient ring."""

    __slots__ = ("ring", "D", "coeffs")

    def __init__(self, ring, D, coeffs=()):
        self.ring = ring
        self.D = D
        cs = list(coeffs)[:D]
        cs += [ring.zero] * (D - len(cs))
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, ring, D, c):
        return cls(ring, D, [c])

    @classmethod
    def t_power(cls, ring, D, k, c=None):
        cs = [ring.zero] * D
        if k < D:
            cs[k] = ring.one if c is None else c
        return cls(ring, D, cs)

    def __repr__(self):
        return f"Series{list(self.coeffs)}"

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries)
            and self.D == other.D
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.D, self.coeffs))

    def _check(self, other):
        if isinstance(other, TruncSeries):
            if other.D != self.D:
                raise PrecisionError("mixing truncation orders")
            return other
        return None

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return TruncSeries(self.ring, self.D, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return TruncSeries(self.ring, self.D, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __neg__(self):
        return TruncSeries(self.ring, self.D, [-a for a in self.coeffs])

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        D = self.D
        z = self.ring.zero
        out = [z] * D
        for i, a in enumerate(self.coeffs):
            if a == z:
                continue
            for j in range(D - i):
                b = o.coeffs[j]
                if b == z:
                    continue
                out[i + j] = out[i + j] + a * b
        return TruncSeries(self.ring, D, out)

    def scale(self, c):
        return TruncSeries(self.ring, self.D, [c * a for a in self.coeffs])

    def is_zero(self):
        z = self.ring.zero
        return all(c == z for c in self.coeffs)

    def constant_term(self):
        return self.coeffs[0]

    def t_order(self):
        """Order of vanishing in t, or None for the zero truncation."""
        z = self.ring.zero
        for k, c in enumerate(self.coeffs):
            if c != z:
                return k
        return None

    def is_unit(self):
        return self.ring.is_unit(self.coeffs[0])

    def inverse(self):
        if not self.is_unit():
            raise PrecisionError("series inverse needs a unit constant term")
        D, ring = self.D, self.ring
        inv0 = ring.inv(self.coeffs[0])
        out = [ring.zero] * D
        out[0] = inv0
        for k in range(1, D):
            s = ring.zero
            for i in range(1, k + 1):
                s = s + self.coeffs[i] * out[k - i]
            out[k] = -(inv0 * s)
        return TruncSeries(ring, D, out)

    def derivative(self):
        """d/dt; honestly truncated to order D-1."""
        if self.D < 2:
            raise PrecisionError("no t-precision left to differentiate")
        cs = [k * self.coeffs[k] for k in range(1, self.D)]
        return TruncSeries(self.ring, self.D - 1, cs)

    def truncate(self, D2):
        if D2 > self.D:
            raise PrecisionError("cannot extend a truncated series")
        return TruncSeries(self.ring, D2, self.coeffs[:D2])

    def compose(self, inner):
        """self(inner(t)) for inner with zero constant term."""
        if inner.coeffs[0] != inner.ring.zero:
            raise PrecisionError("composition needs a positive-order inner series")
        D = min(self.D, inner.D)
        inn = inner.truncate(D)
        acc = TruncSeries(inner.ring, D, [])
        for c in reversed(self.coeffs[:D]):
            acc = acc * inn
            acc = acc + TruncSeries.constant(inner.ring, D, c)
        return acc

    def map_coeffs(self, fn, ring=None):
        return TruncSeries(ring or self.ring, self.D, [fn(c) for c in self.coeffs])

    def evaluate(self, x, ring):
        """Horner evaluation at a point of a ring with matching arithmetic."""
        acc = ring.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


class SeriesRing:
    """Ring adapter whose elements are TruncSeries over ``coeff_ring``."""

    def __init__(self, coeff_ring, D):
        self.coeff_ring = coeff_ring
        self.D = D
        self.zero = TruncSeries(coeff_ring, D, [])
        self.one = TruncSeries.constant(coeff_ring, D, coeff_ring.one)

    def constant(self, c):
        return TruncSeries.constant(self.coeff_ring, self.D, c)

    def is_unit(self, x):
        return x.is_unit()

    def inv(self, x):
        return x.inverse()
