"""Families of Frobenius spaces over the closed points of a base curve.

A family assigns to each closed point x of the base a local Euler factor
det(1 - F_x^deg(x) s), s = t^deg(x), of fixed rank with constant term 1.
Three providers exist:

* constant -- one Frobenius space pulled back everywhere (the factor at a
  degree-d point is det(1 - Phi^d s), since the Frobenius lift fixes the
  base ring);
* elliptic pencil -- rank-2 factors 1 - a_x s + q^d s^2 from fiber point
  counts of a Weierstrass pencil (the Legendre pencil lives on the
  projective line minus {0, 1, infinity});
* synthetic table -- declared factors per orbit, with a default rule per
  degree; the consistency guards double as the adversarial-input tests.

The generic polygon is estimated as the dominance-minimal sampled polygon
(marked empirical): by specialization every sampled polygon dominates the
true generic one, and the estimate is exact as soon as one sampled point
achieves it, which fails only for the finitely many jump points.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .curves import CurveModel, orbit_counts, zeta
from .errors import BudgetError, ConfigError, InconsistencyError
from .gf import FiniteField
from .polygon import NewtonPolygon, dominance_minimum

DEFAULT_BUDGET = 10 ** 7


@dataclass(frozen=True)
class PointOrbit:
    """One closed point, or a bundle of ``count`` same-degree points for
    providers whose factor depends only on the degree."""

    orbit_id: str
    degree: int
    count: int = 1
    data: object = None


@dataclass(frozen=True)
class LocalFactor:
    """det(1 - F_x^d s) with s = t^d; integer or Witt coefficients."""

    coeffs: tuple
    degree: int

    @property
    def rank(self):
        return len(self.coeffs) - 1

    def valuations(self, p):
        out = []
        for i, c in enumerate(self.coeffs):
            if isinstance(c, int):
                out.append((i, _int_valuation(c, p)))
            else:
                out.append((i, c.valuation()))
        return out

    def polygon(self, p, f, M=None):
        return NewtonPolygon.from_valuations(
            self.valuations(p), self.rank, normalizer=f * self.degree, precision=M
        )


def _int_valuation(c, p):
    if c == 0:
        return None
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


# -- bases -----------------------------------------------------------------


class ProjectiveBase:
    """A projective smooth curve as the base space."""

    def __init__(self, curve, budget=DEFAULT_BUDGET):
        self.curve = curve
        self.q = curve.q
        self.budget = budget
        self.kind = "projective"
        self.zeta = zeta(curve, budget)
        self.genus = curve.genus

    def orbit_counts(self, D):
        return orbit_counts(self.curve, D, self.zeta, self.budget)

    def label(self):
        return f"{self.curve.kind}/F_{self.q}"


class OpenP1Base:
    """The projective line minus {0, 1, infinity} (the Legendre base)."""

    removed_degree = 3

    def __init__(self, p, budget=DEFAULT_BUDGET):
        self.p = p
        self.q = p
        self.budget = budget
        self.kind = "open-p1"
        self.genus = 0

    def orbit_counts(self, D):
        out = {}
        for d in range(1, D + 1):
            if d == 1:
                out[1] = self.q - 2
            else:
                acc = 0
                for e in _divisors(d):
                    acc += _moebius(d // e) * self.q ** e
                out[d] = acc // d
        return out

    def lambda_orbits(self, d):
        """Packed representatives of the degree-d points of the open base."""
        if self.q ** d > self.budget:
            raise BudgetError(self.q ** d, self.budget, what="lambda enumeration")
        F = _field(self.p, d)
        if d == 1:
            return F, [c for c in range(2, F.order)]
        vals = np.arange(F.order, dtype=np.int64)
        proper = np.zeros(F.order, dtype=bool)
        orbit_min = vals.copy()
        cur = F.batch_frobenius(vals)
        for e in range(1, d):
            if d % e == 0:
                proper |= cur == vals
            orbit_min = np.minimum(orbit_min, cur)
            cur = F.batch_frobenius(cur)
        exact = (~proper) & (orbit_min == vals)
        return F, [int(c) for c in vals[exact]]

    def label(self):
        return f"P1 - (0,1,inf)/F_{self.q}"


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


@lru_cache(maxsize=None)
def _field(p, n):
    return FiniteField(p, n)


# -- providers ----------------------------------------------------------------


class ConstantProvider:
    """Pullback of a single Frobenius space to the whole base."""

    degree_uniform = True

    def __init__(self, space):
        if space.ring.d != 1:
            raise ConfigError("fspace", "the pulled-back space must live over F_q itself")
        if space.shift:
            raise ConfigError("fspace", "twist to an integral presentation first")
        self.space = space
        self.rank = space.rank

    def factor_for_degree(self, d):
        power = self.space.phi
        for _ in range(d - 1):
            power = power * self.space.phi
        return LocalFactor(tuple(power.charpoly()), d)


class LegendrePencilProvider:
    """Fibers y^2 = x(x-1)(x-lambda) over the open projective line."""

    degree_uniform = False
    rank = 2

    def __init__(self, p, budget=DEFAULT_BUDGET):
        if p < 5:
            raise ConfigError("p", "the pencil needs p >= 5")
        self.p = p
        self.budget = budget
        self._trace_cache = {}

    def traces_for_degree(self, base, d):
        """a_lambda for every degree-d orbit representative, batched."""
        if d not in self._trace_cache:
            F, reps = base.lambda_orbits(d)
            chi = F.character_table()
            X = np.arange(F.order, dtype=np.int64)
            c_x = F.batch_mul(X, F.batch_sub_scalar(X, F.one))
            chi_c = chi[c_x].astype(np.int64)
            out = {}
            for lam in reps:
                w = chi[F.batch_sub_scalar(X, lam)].astype(np.int64)
                out[lam] = -int(np.dot(chi_c, w))
            self._trace_cache[d] = out
        return self._trace_cache[d]

    def factor_for_orbit(self, base, orbit):
        a = self.traces_for_degree(base, orbit.degree)[orbit.data]
        return LocalFactor((1, -a, self.p ** orbit.degree), orbit.degree)


class SyntheticProvider:
    """Declared local factors: a default rule per degree plus overrides."""

    def __init__(self, rank, default_factor, overrides=None):
        self.rank = rank
        self.default_factor = default_factor  # degree -> coefficient tuple
        self.overrides = dict(overrides or {})
        self.degree_uniform = not self.overrides

    def factor_for_orbit(self, orbit):
        coeffs = self.overrides.get(orbit.orbit_id) or self.default_factor(orbit.degree)
        if len(coeffs) != self.rank + 1:
            raise ConfigError("factor", f"rank mismatch at orbit {orbit.orbit_id}")
        if coeffs[0] != 1:
            raise ConfigError("factor", "constant term must be 1")
        return LocalFactor(tuple(coeffs), orbit.degree)


class CrystalFamily:
    """Local Euler factors attached to the closed points of a base."""

    def __init__(self, base, provider, p, f=1, M=None, name="family"):
        self.base = base
        self.provider = provider
        self.p = p
        self.f = f
        self.M = M
        self.name = name
        self.rank = provider.rank

    # -- orbits ------------------------------------------------------------

    def orbits(self, D):
        """Closed points of degree <= D; bundled per degree whenever the
        provider's factor depends on the degree alone."""
        counts = self.base.orbit_counts(D)
        if isinstance(self.base, OpenP1Base) and not getattr(
            self.provider, "degree_uniform", False
        ):
            out = []
            for d in range(1, D + 1):
                _, reps = self.base.lambda_orbits(d)
                if len(reps) != counts[d]:
                    raise InconsistencyError(f"orbit count mismatch in degree {d}")
                out.extend(
                    PointOrbit(f"d{d}o{i}", d, 1, lam) for i, lam in enumerate(reps)
                )
            return out
        out = []
        for d in range(1, D + 1):
            n = counts[d]
            if n == 0:
                continue
            if getattr(self.provider, "degree_uniform", False):
                out.append(PointOrbit(f"d{d}", d, n))
            else:
                overridden = {
                    oid for oid in getattr(self.provider, "overrides", {}) if oid.startswith(f"d{d}o")
                }
                for oid in sorted(overridden):
                    idx = int(oid.split("o")[1])
                    if idx >= n:
                        raise ConfigError("overrides", f"{oid} exceeds orbit count {n}")
                plain = n - len(overridden)
                for oid in sorted(overridden):
                    out.append(PointOrbit(oid, d, 1))
                if plain:
                    out.append(PointOrbit(f"d{d}", d, plain))
        return out

    def local_factor(self, orbit):
        if isinstance(self.provider, ConstantProvider):
            return self.provider.factor_for_degree(orbit.degree)
        if isinstance(self.provider, LegendrePencilProvider):
            return self.provider.factor_for_orbit(self.base, orbit)
        return self.provider.factor_for_orbit(orbit)

    def polygon_at(self, orbit):
        return self.local_factor(orbit).polygon(self.p, self.f, self.M)


@dataclass(frozen=True)
class JumpReport:
    generic: NewtonPolygon
    jumps: tuple  # (orbit_id, degree, count, polygon)
    reduced_degree: int
    max_degree: int
    family: str
    empirical: bool = True

    def to_json(self):
        return {
            "family": self.family,
            "max_degree": self.max_degree,
            "generic": self.generic.to_json(),
            "generic_status": "empirical" if self.empirical else "certified",
            "jumps": [
                {
                    "orbit": oid,
                    "degree": d,
                    "count": c,
                    "polygon": poly.to_json(),
                }
                for oid, d, c, poly in self.jumps
            ],
            "reduced_degree": self.reduced_degree,
        }

    def csv_rows(self):
        rows = [("orbit", "degree", "count", "slopes", "is_jump")]
        for oid, d, c, poly in self.jumps:
            rows.append((oid, d, c, _slope_str(poly), 1))
        return rows


def _slope_str(poly):
    return " ".join(str(s) for s in poly.slopes())


def newton_polygon_at(family, orbit):
    return family.polygon_at(orbit)


def generic_polygon(family, D):
    """Dominance-minimal polygon among closed points of degree <= D.

    An upper estimate for the true generic polygon, exact whenever any
    sampled point achieves it; reported as empirical by jump_locus.
    """
    orbits = family.orbits(D)
    if not orbits:
        raise ConfigError("D", "no closed point of degree <= D")
    polys = [family.polygon_at(o) for o in orbits]
    best = dominance_minimum(polys)
    if best is None:
        raise InconsistencyError(
            "sampled polygons admit no dominance minimum; impossible family data"
        )
    return best


def jump_locus(family, D):
    """All orbits of degree <= D whose polygon differs from the generic one."""
    orbits = family.orbits(D)
    generic = generic_polygon(family, D)
    jumps = []
    reduced = 0
    for o in orbits:
        poly = family.polygon_at(o)
        if poly == generic:
            continue
        if not poly.dominates(generic):
            raise InconsistencyError(
                f"polygon at {o.orbit_id} neither equals nor dominates the generic one"
            )
        jumps.append((o.orbit_id, o.degree, o.count, poly))
        reduced += o.degree * o.count
    return JumpReport(
        generic=generic,
        jumps=tuple(jumps),
        reduced_degree=reduced,
        max_degree=D,
        family=family.name,
    )


def jump_locus_exterior(family, D):
    """The jump locus detected through exterior-power initial slopes.

    A point jumps exactly when, for some multiplicity prefix k of the
    generic polygon, the sum of the k smallest slopes at the point exceeds
    the generic value.  Returns the same report as jump_locus; the two
    routes are compared in the test suite.
    """
    orbits = family.orbits(D)
    generic = generic_polygon(family, D)
    prefixes = []
    acc = 0
    for _, mult in generic.slope_multiplicities()[:-1]:
        acc += mult
        prefixes.append(acc)
    jumps = []
    reduced = 0
    for o in orbits:
        poly = family.polygon_at(o)
        jumped = False
        for k in prefixes:
            ext_pt = poly.exterior_power(k)
            ext_gen = generic.exterior_power(k)
            if ext_pt.initial_slope() > ext_gen.initial_slope():
                jumped = True
                break
        if jumped:
            jumps.append((o.orbit_id, o.degree, o.count, poly))
            reduced += o.degree * o.count
    return JumpReport(
        generic=generic,
        jumps=tuple(jumps),
        reduced_degree=reduced,
        max_degree=D,
        family=family.name,
    )


def legendre_family(p, budget=DEFAULT_BUDGET):
    base = OpenP1Base(p, budget)
    return CrystalFamily(
        base, LegendrePencilProvider(p, budget), p, f=1, name=f"legendre-{p}"
    )


def constant_family(space, base, name="constant"):
    ring = space.ring
    return CrystalFamily(
        base, ConstantProvider(space), ring.p, f=ring.f, M=ring.M, name=name
    )


def synthetic_family(base, p, rank, default_factor, overrides=None, f=1, name="synthetic"):
    return CrystalFamily(
        base, SyntheticProvider(rank, default_factor, overrides), p, f=f, name=name
    )
