"""Truncated L-series, normalization, congruence, degree identity, bounds."""

import pytest

from fisoc.curves import CurveModel
from fisoc.errors import ConfigError
from fisoc.families import (
    ProjectiveBase,
    constant_family,
    legendre_family,
    synthetic_family,
)
from fisoc.fspace import standard_module
from fisoc.lfunctions import (
    bound,
    check_bound,
    congruence_check,
    degree_identity_check,
    l_series,
    normalize_unit_character,
    reduce_mod_p,
    tensor_power_factor,
)
from fisoc.families import LocalFactor
from fisoc.padic import RingSpec
from fisoc.series import ModRing, TruncSeries


def trivial_family_on(base_curve, p, M=6):
    ring = RingSpec(p, M=M)
    return constant_family(
        standard_module(0, 1, ring), ProjectiveBase(base_curve), name="trivial"
    )


def test_l_series_trivial_on_p1_is_zeta():
    fam = trivial_family_on(CurveModel.projective_line(7), 7)
    D = 6
    S = l_series(fam, D)
    ring = fam.provider.space.ring
    for m in range(D):
        expect = sum(7 ** i for i in range(m + 1))
        assert S.coeffs[m] == ring.of_int(expect)


def test_l_series_scaled_constant_substitution():
    # the slope-1 line pulled back to P^1: L(t) = Zeta(P^1)(pt)
    p = 5
    ring = RingSpec(p, M=8)
    fam = constant_family(
        standard_module(1, 1, ring), ProjectiveBase(CurveModel.projective_line(p))
    )
    D = 5
    S = l_series(fam, D)
    for m in range(D):
        expect = p ** m * sum(p ** i for i in range(m + 1))
        assert S.coeffs[m] == ring.of_int(expect)


def test_l_series_truncation_exactness():
    fam = legendre_family(7)
    s4 = l_series(fam, 4)
    s6 = l_series(fam, 6)
    assert s6.coeffs[:4] == s4.coeffs


def test_l_series_multiplicative_over_direct_sum():
    base = ProjectiveBase(CurveModel.projective_line(5))

    def f1(d):
        return (1, -1, 5 ** d)

    def f2(d):
        return (1, -(2 * 5 ** d), 5 ** (2 * d))

    def fsum(d):
        a = f1(d)
        b = f2(d)
        # product of the two factors, degree 4 in s
        out = [0] * 5
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return tuple(out)

    fa = synthetic_family(base, 5, 2, f1, name="a")
    fb = synthetic_family(base, 5, 2, f2, name="b")
    fc = synthetic_family(base, 5, 4, fsum, name="a+b")
    D = 6
    assert (l_series(fa, D) * l_series(fb, D)).coeffs == l_series(fc, D).coeffs


def test_mod_p_depends_only_on_unit_residues():
    base = ProjectiveBase(CurveModel.projective_line(7))

    def mk(v):
        def fac(d):
            u = 3
            return (1, -(u + 7 * v), 7 * u * v) if d == 1 else (
                1,
                -(u ** d + 7 ** d * v),
                7 ** d * u ** d * v,
            )
        return fac

    fam1 = synthetic_family(base, 7, 2, mk(1), name="v1")
    fam2 = synthetic_family(base, 7, 2, mk(5), name="v5")
    D = 5
    assert reduce_mod_p(l_series(fam1, D), 7).coeffs == reduce_mod_p(l_series(fam2, D), 7).coeffs


def test_tensor_power_factor_bruteforce():
    # rank 2 with integer eigenvalues 2 and 3: tensor square has 4, 6, 6, 9
    fac = LocalFactor((1, -(2 + 3), 6), 1)
    t2 = tensor_power_factor(fac, 2, 4)
    import itertools
    eigs = [a * b for a, b in itertools.product([2, 3], repeat=2)]
    expect = [1]
    for e in eigs:
        out = [0] * (len(expect) + 1)
        for i, c in enumerate(expect):
            out[i] += c
            out[i + 1] -= c * e
        expect = out
    assert list(t2.coeffs) == expect[:5]


def test_normalize_unit_character_legendre():
    fam = legendre_family(7)
    norm = normalize_unit_character(fam, 4)
    for diag in norm.diagnostics:
        assert diag.is_one_after
        if diag.unit_residue is not None:
            assert pow(diag.unit_residue, 6, 7) == 1
            assert 6 % diag.order == 0


def test_normalize_rejects_higher_multiplicity():
    base = ProjectiveBase(CurveModel.projective_line(5))

    def fac(d):
        return (1, -2, 1)  # two unit roots

    fam = synthetic_family(base, 5, 2, fac, name="two-units")
    with pytest.raises(ConfigError):
        normalize_unit_character(fam, 4)


def test_congruence_legendre_small_window():
    fam = legendre_family(7)
    norm = normalize_unit_character(fam, 4)
    rep = congruence_check(norm, 4)
    assert rep.holds, rep.mismatches


def test_congruence_trivial_constant_on_p1():
    fam = trivial_family_on(CurveModel.projective_line(7), 7)
    rep = congruence_check(normalize_unit_character(fam, 5), 5)
    assert rep.holds
    assert rep.projective_identity is True


def test_congruence_detects_planted_nonunit_residue():
    base = ProjectiveBase(CurveModel.projective_line(7))

    def fac(d):
        return (1, -(3 ** d), 7 ** d * 0 + 3 ** d * 7 ** d)

    # raw (un-normalized) family with unit residue 3 != 1: mismatch located
    fam = synthetic_family(base, 7, 2, fac, name="planted")
    rep = congruence_check(fam, 4)
    assert not rep.holds
    assert rep.mismatches and rep.mismatches[0] == 1


def test_degree_identity_ordinary_elliptic():
    fam = trivial_family_on(CurveModel.elliptic(7, 1, 1), 7)
    rep = degree_identity_check(fam, 8)
    assert rep.holds
    assert rep.p_rank == 1 and rep.jump_degree == 0
    assert rep.observed_degree == 1


def test_degree_identity_supersingular_elliptic():
    fam = trivial_family_on(CurveModel.elliptic(7, -1, 0), 7)
    rep = degree_identity_check(fam, 8)
    assert rep.holds and rep.observed_degree == 0


def test_degree_identity_planted_z():
    base = ProjectiveBase(CurveModel.elliptic(7, 1, 1))

    def default(d):
        return (1, -(1 + 7 ** d), 7 ** d)

    fam = synthetic_family(
        base, 7, 2, default, overrides={"d2o0": (1, -2 * 7, 7 ** 2)}, name="plantedZ"
    )
    rep = degree_identity_check(fam, 8)
    assert rep.holds
    assert rep.p_rank == 1 and rep.jump_degree == 2
    assert rep.observed_degree == 3


def test_degree_identity_window_guard():
    fam = trivial_family_on(CurveModel.elliptic(7, 1, 1), 7)
    with pytest.raises(ConfigError):
        degree_identity_check(fam, 1)


def test_bound_formula():
    assert bound(7, 2, 2).B == 8194
    for q, r in [(5, 1), (7, 3), (9, 2)]:
        assert bound(q, 1, r).B == r
    # monotone in each argument
    assert bound(8, 2, 2).B > bound(7, 2, 2).B
    assert bound(7, 3, 2).B > bound(7, 2, 2).B
    assert bound(7, 2, 3).B > bound(7, 2, 2).B


def test_check_bound_legendre():
    fam = legendre_family(7)
    rep = check_bound(fam, 2)
    assert rep.setting == "open-p1"
    assert rep.observed == 3
    assert rep.effective_bound == 3
    assert rep.verdict is True


def test_check_bound_projective_constant():
    fam = trivial_family_on(CurveModel.elliptic(7, 1, 1), 7)
    rep = check_bound(fam, 3)
    assert rep.setting == "projective"
    assert rep.observed == 0 and rep.verdict is True
    assert rep.B == bound(7, 1, 1).B == 1
