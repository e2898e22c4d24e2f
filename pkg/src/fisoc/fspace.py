"""Frobenius spaces over a point of a finite field.

An FSpace is a free module over W(F_{q^d})/p^M with a sigma-linear
bijection F, presented by the matrix ``phi`` of F in a fixed basis
(F(x) = phi . sigma(x) on coordinates), together with an integer
``shift``: the actual Frobenius is p^(-shift) . phi . sigma.  The shift
keeps matrices integral while allowing negative-slope objects such as
duals and the standard simple modules with negative exponent.

The Newton polygon is computed through the d-fold linearization
phi . sigma(phi) ... sigma^(d-1)(phi), which is an honest linear operator
over the point ring because sigma has order d there; its characteristic
polynomial valuations are exact, and slopes are normalized by
ord_p(q^d) = f*d.  This matches the local Euler factors
det(1 - F^d t^d) used by the L-series machinery.
"""

from fractions import Fraction
from itertools import combinations
from math import comb, gcd

from . import linalg
from .errors import ConfigError, PrecisionError
from .padic import RingSpec, WittElement, WittMatrix
from .polygon import NewtonPolygon


class FSpace:
    """A sigma-linear Frobenius module over a point, F = p^(-shift) phi sigma."""

    __slots__ = ("ring", "phi", "shift")

    def __init__(self, ring, phi, shift=0):
        if not isinstance(phi, WittMatrix):
            phi = WittMatrix(ring, phi)
        if not phi.is_square():
            raise ConfigError("phi", "Frobenius matrix must be square")
        self.ring = ring
        self.phi = phi
        self.shift = int(shift)
        if phi.nrows and phi.det().valuation() is None:
            raise PrecisionError(
                "det(phi) vanishes to the working precision; F is not certified bijective"
            )

    @property
    def rank(self):
        return self.phi.nrows

    def __repr__(self):
        return f"FSpace(rank={self.rank}, ring={self.ring!r}, shift={self.shift})"

    # -- the basic operators -------------------------------------------------

    def linearize(self):
        """Matrix of F^d over W(F_{q^d}): phi sigma(phi) ... sigma^(d-1)(phi)."""
        out = self.phi
        cur = self.phi
        for _ in range(self.ring.d - 1):
            cur = cur.frobenius()
            out = out * cur
        return out

    def newton_polygon(self):
        """Slopes of Frobenius, normalized so rank-1 F = a sigma has slope
        ord_p(a)/ord_p(q)."""
        ring = self.ring
        cp = self.linearize().charpoly()
        points = [(i, c.valuation()) for i, c in enumerate(cp)]
        poly = NewtonPolygon.from_valuations(
            points, self.rank, normalizer=ring.f * ring.d, precision=ring.M
        )
        if self.shift:
            poly = poly.shift(Fraction(-self.shift, ring.f))
        return poly

    def local_factor(self):
        """Coefficients of det(1 - F^d s) over the ring, constant term 1.

        Only available at shift 0 (integral Frobenius)."""
        if self.shift:
            raise ConfigError("shift", "local factor needs an integral presentation")
        # det(1 - A s) = 1 + c_1 s + ... + c_r s^r for charpoly t^r + c_1 t^(r-1) + ...
        return list(self.linearize().charpoly())

    # -- constructions ---------------------------------------------------------

    def twist(self, c):
        """Multiply F by a scalar c (a WittElement or integer)."""
        if isinstance(c, int):
            c = self.ring.of_int(c)
        if c.is_zero():
            raise ConfigError("c", "twist by zero")
        return FSpace(self.ring, self.phi * c, self.shift)

    def twist_p_power(self, j):
        """Multiply F by p^j (j may be negative)."""
        if j >= 0:
            return FSpace(self.ring, self.phi * self.ring.of_int(self.ring.p ** j), self.shift)
        return FSpace(self.ring, self.phi, self.shift - j)

    def dual(self):
        """The dual space; slopes negate."""
        det = self.phi.det()
        v = det.valuation()
        if v is None:
            raise PrecisionError("dual needs det(phi) certified nonzero")
        unit = det.div_p(v) if v else det
        ring2 = unit.ring
        adj = _adjugate(self.phi).transpose()
        if v:
            adj = adj.map_entries(lambda x: x.map_to(ring2), ring=ring2)
        inv_unit = unit.inverse()
        return FSpace(ring2, adj * inv_unit, v - self.shift)

    def tensor(self, other):
        _same_ring(self, other)
        A, B = self.phi.entries, other.phi.entries
        n, m = self.rank, other.rank
        rows = []
        for i in range(n):
            for k in range(m):
                rows.append([A[i][j] * B[k][l] for j in range(n) for l in range(m)])
        return FSpace(self.ring, WittMatrix(self.ring, rows), self.shift + other.shift)

    def exterior(self, k):
        """Compound-matrix realization of the k-th exterior power."""
        r = self.rank
        if not 1 <= k <= r:
            raise ConfigError("k", f"exterior index must be in 1..{r}")
        if comb(r, k) > 3000:
            raise ConfigError("k", "exterior power too large to materialize")
        subsets = list(combinations(range(r), k))
        A = self.phi.entries
        rows = []
        for S in subsets:
            row = []
            for T in subsets:
                minor = [[A[i][j] for j in T] for i in S]
                row.append(linalg.det(minor, self.ring))
            rows.append(row)
        return FSpace(self.ring, WittMatrix(self.ring, rows), self.shift * k)

    def basis_change(self, U):
        """Matrix of the same F in the basis given by the columns of U:
        U^(-1) . phi . sigma(U)."""
        if not isinstance(U, WittMatrix):
            U = WittMatrix(self.ring, U)
        return FSpace(self.ring, U.inverse() * self.phi * U.frobenius(), self.shift)

    def direct_sum(self, other):
        _same_ring(self, other)
        if self.shift != other.shift:
            raise ConfigError("shift", "align shifts before taking a direct sum")
        n, m = self.rank, other.rank
        z = self.ring.zero
        rows = []
        for i in range(n):
            rows.append(list(self.phi.entries[i]) + [z] * m)
        for i in range(m):
            rows.append([z] * n + list(other.phi.entries[i]))
        return FSpace(self.ring, WittMatrix(self.ring, rows), self.shift)

    # -- unit-root lattice -------------------------------------------------------

    def unit_root_basis(self):
        """Columns spanning the unit-root sublattice, or None when the
        initial slope is positive.

        Computed by stabilizing the column span of the twisted products
        phi sigma(phi) ... sigma^(n-1)(phi); the positive-slope directions
        contract p-adically and drop out of the span mod p^M.
        """
        if self.shift:
            raise ConfigError("shift", "twist to an integral presentation first")
        poly = self.newton_polygon()
        if poly.initial_slope() > 0:
            return None
        r0 = poly.initial_multiplicity()
        slopes = [s for s in poly.slopes() if s > 0]
        min_pos = min(slopes) if slopes else None
        cap = _iteration_cap(self.ring, self.rank, min_pos)
        A = self.phi
        prev = None
        step = self.phi
        for n in range(1, cap + 1):
            pivots, basis, residual = linalg.unit_echelon(
                list(zip(*A.entries)), self.rank, self.ring
            )
            if len(pivots) == r0 and not residual:
                cur = (tuple(pivots), tuple(basis))
                if prev is not None and cur == prev:
                    cols = [[basis[j][i] for j in range(r0)] for i in range(self.rank)]
                    return WittMatrix(self.ring, cols)
                prev = cur
            else:
                prev = None
            step = step.frobenius()
            A = A * step
        raise PrecisionError(
            f"unit-root span did not stabilize within {cap} iterations"
        )


def _iteration_cap(ring, rank, min_pos_slope):
    if min_pos_slope is None:
        return 3
    contraction = min_pos_slope * ring.f  # p-adic valuation gained per application
    return int(Fraction(ring.M, 1) * rank / contraction) + rank + 3


def _same_ring(a, b):
    if a.ring != b.ring:
        raise ConfigError("ring", "operands live over different rings")


def _adjugate(mat):
    """Adjugate via cofactors (small matrices only)."""
    n = mat.nrows
    ring = mat.ring
    if n == 1:
        return WittMatrix(ring, [[ring.one]])
    A = mat.entries
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [
                [A[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            cof = linalg.det(minor, ring)
            row.append(cof if (i + j) % 2 == 0 else -cof)
        rows.append(row)
    # adj(A)[j][i] = cofactor(i, j)
    return WittMatrix(ring, rows).transpose()


def standard_module(s, r, ring):
    """The simple module with F^r = p^s, gcd(r, s) = 1.

    Realized by a companion matrix, twisted to keep entries integral when
    s is negative; Newton polygon is the single slope s/(r*f) with
    multiplicity r.
    """
    if r < 1:
        raise ConfigError("r", "rank must be positive")
    if gcd(r, s) != 1:
        raise ConfigError("(r, s)", "exponent and rank must be coprime")
    j = 0
    while s + j * r < 0:
        j += 1
    power = s + j * r
    z = ring.zero
    rows = [[z] * r for _ in range(r)]
    for i in range(1, r):
        rows[i][i - 1] = ring.one
    rows[0][r - 1] = ring.of_int(ring.p ** power)
    return FSpace(ring, WittMatrix(ring, rows), shift=j)


def from_json(data):
    ring = RingSpec.from_json(data["ring"])
    phi = WittMatrix(
        ring, [[WittElement(ring, c) for c in row] for row in data["phi"]]
    )
    return FSpace(ring, phi, data.get("shift", 0))


def to_json(space):
    return {
        "ring": space.ring.to_json(),
        "phi": [[x.to_json() for x in row] for row in space.phi.entries],
        "shift": space.shift,
    }
