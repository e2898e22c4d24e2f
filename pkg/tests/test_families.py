"""Crystal families: local polygons, generic estimates, jump loci."""

import random
from fractions import Fraction
from math import comb

import pytest

from fisoc.curves import CurveModel
from fisoc.errors import InconsistencyError
from fisoc.families import (
    CrystalFamily,
    LocalFactor,
    OpenP1Base,
    ProjectiveBase,
    SyntheticProvider,
    constant_family,
    generic_polygon,
    jump_locus,
    jump_locus_exterior,
    legendre_family,
    newton_polygon_at,
    synthetic_family,
)
from fisoc.fspace import standard_module
from fisoc.padic import RingSpec
from fisoc.polygon import NewtonPolygon

F = Fraction


def brute_legendre_traces(p, d):
    """Independent oracle: fiber point counts by double loop, no tables."""
    from fisoc.curves import CurveModel as CM

    if d == 1:
        out = {}
        for lam in range(2, p):
            n = 1
            for x in range(p):
                r = (x * (x - 1) * (x - lam)) % p
                if r == 0:
                    n += 1
                elif pow(r, (p - 1) // 2, p) == 1:
                    n += 2
            out[lam] = p + 1 - n
        return out
    raise NotImplementedError


def hasse_polynomial_roots(p):
    """Roots in F_p of sum comb(m, i)^2 lam^i, m = (p-1)/2."""
    m = (p - 1) // 2
    coeffs = [comb(m, i) ** 2 % p for i in range(m + 1)]
    return {
        lam
        for lam in range(p)
        if sum(c * pow(lam, i, p) for i, c in enumerate(coeffs)) % p == 0
    }


def test_local_factor_polygons():
    ss = LocalFactor((1, 0, 7), 1)
    assert ss.polygon(7, 1) == NewtonPolygon.from_slopes([F(1, 2), F(1, 2)])
    ordinary = LocalFactor((1, -3, 7), 1)
    assert ordinary.polygon(7, 1) == NewtonPolygon.from_slopes([0, 1])
    deg2 = LocalFactor((1, -22, 121), 2)
    assert deg2.polygon(11, 1) == NewtonPolygon.from_slopes([F(1, 2), F(1, 2)])


def test_constant_family_is_constant():
    ring = RingSpec(5, M=8)
    V = standard_module(1, 2, ring)
    base = ProjectiveBase(CurveModel.projective_line(5))
    fam = constant_family(V, base)
    polys = {newton_polygon_at(fam, o) for o in fam.orbits(3)}
    assert polys == {NewtonPolygon.from_slopes([F(1, 2), F(1, 2)])}
    rep = jump_locus(fam, 3)
    assert rep.jumps == () and rep.reduced_degree == 0


def test_legendre_traces_match_bruteforce_oracle():
    for p in (7, 11):
        fam = legendre_family(p)
        oracle = brute_legendre_traces(p, 1)
        got = fam.provider.traces_for_degree(fam.base, 1)
        assert got == oracle


def test_legendre_jumps_f7():
    fam = legendre_family(7)
    rep = jump_locus(fam, 2)
    assert rep.generic == NewtonPolygon.from_slopes([0, 1])
    assert rep.reduced_degree == 3
    jump_lams = sorted(
        o.data for o in fam.orbits(2) for j in rep.jumps if j[0] == o.orbit_id
    )
    assert jump_lams == [2, 4, 6]
    assert all(j[3] == NewtonPolygon.from_slopes([F(1, 2), F(1, 2)]) for j in rep.jumps)
    # Hasse-polynomial cross-check: roots within the base and of degree one
    assert hasse_polynomial_roots(7) - {0, 1} == set(jump_lams)


def test_legendre_generic_polygon():
    fam = legendre_family(7)
    assert generic_polygon(fam, 2) == NewtonPolygon.from_slopes([0, 1])
    assert generic_polygon(fam, 1) == NewtonPolygon.from_slopes([0, 1])


def test_exterior_route_agrees():
    fam = legendre_family(7)
    direct = jump_locus(fam, 2)
    ext = jump_locus_exterior(fam, 2)
    assert direct.jumps == ext.jumps
    assert direct.reduced_degree == ext.reduced_degree


def test_synthetic_planted_jump():
    base = ProjectiveBase(CurveModel.elliptic(7, 1, 1))

    def default(d):
        return (1, -(1 + 7 ** d), 7 ** d)

    fam = synthetic_family(
        base, 7, 2, default, overrides={"d2o0": (1, -2 * 7, 7 ** 2)}, name="planted"
    )
    rep = jump_locus(fam, 3)
    assert len(rep.jumps) == 1
    assert rep.jumps[0][0] == "d2o0"
    assert rep.reduced_degree == 2
    assert rep.generic == NewtonPolygon.from_slopes([0, 1])
    assert rep.jumps[0][3] == NewtonPolygon.from_slopes([F(1, 2), F(1, 2)])


def test_inconsistent_synthetic_rejected():
    base = ProjectiveBase(CurveModel.projective_line(7))

    def default(d):
        return (1, -(1 + 7 ** d), 7 ** d)

    # planted polygon {0, 2} neither equals nor dominates generic {0, 1}:
    # wrong endpoint is caught as an impossible family
    fam = synthetic_family(
        base, 7, 2, default, overrides={"d1o0": (1, -1, 7 ** 2)}, name="bad"
    )
    with pytest.raises(InconsistencyError):
        jump_locus(fam, 2)


def test_specialization_dominance_random_synthetics():
    rng = random.Random(31)
    base = ProjectiveBase(CurveModel.projective_line(5))
    for trial in range(60):
        generic_slopes = sorted(rng.choice([0, 0, 1, 2]) for _ in range(2))
        gen_poly = NewtonPolygon.from_slopes(generic_slopes)

        def default(d, gen=generic_slopes):
            out = [1]
            c1 = -sum(5 ** (s * d) for s in gen)
            return (1, c1, 5 ** (sum(gen) * d))

        # plant a dominating polygon at one orbit
        height = sum(generic_slopes)
        dom = (1, -2 * 5 ** ((height + 1) // 2), 5 ** height) if height % 2 == 0 else None
        overrides = {}
        if dom and height > 0:
            overrides["d1o0"] = dom
        fam = synthetic_family(base, 5, 2, default, overrides, name=f"rnd{trial}")
        rep = jump_locus(fam, 2)
        for o in fam.orbits(2):
            assert newton_polygon_at(fam, o).dominates(rep.generic)
