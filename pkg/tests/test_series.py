"""Truncated power series over integer, residue, and Witt coefficients."""

import pytest

from fisoc.errors import PrecisionError
from fisoc.padic import RingSpec
from fisoc.series import ModRing, SeriesRing, TruncSeries, ZZ


def S(coeffs, D=6, ring=ZZ):
    return TruncSeries(ring, D, coeffs)


def test_mul_truncates():
    a = S([1, 1])          # 1 + t
    b = S([1, -1])         # 1 - t
    assert (a * b).coeffs == (1, 0, -1, 0, 0, 0)


def test_inverse_geometric():
    a = S([1, -1])
    assert a.inverse().coeffs == (1, 1, 1, 1, 1, 1)
    assert (a * a.inverse()).coeffs == (1, 0, 0, 0, 0, 0)


def test_inverse_needs_unit():
    with pytest.raises(PrecisionError):
        S([0, 1]).inverse()
    with pytest.raises(PrecisionError):
        S([2, 1]).inverse()  # 2 is not an integer unit


def test_inverse_mod_ring():
    ring = ModRing(7 ** 3)
    a = TruncSeries(ring, 4, [ring.of_int(c) for c in (2, 7, 1)])
    prod = a * a.inverse()
    assert prod == TruncSeries(ring, 4, [ring.one])


def test_derivative_truncates_honestly():
    a = S([5, 4, 3, 2, 1, 7])
    d = a.derivative()
    assert d.D == 5
    assert d.coeffs == (4, 6, 6, 4, 35)


def test_compose():
    a = S([0, 1, 1])            # t + t^2
    b = S([0, 0, 1])            # t^2
    assert a.compose(b).coeffs == (0, 0, 1, 0, 1, 0)
    with pytest.raises(PrecisionError):
        a.compose(S([1, 1]))


def test_witt_coefficients():
    ring = RingSpec(5, M=4)
    SR = SeriesRing(ring, 5)
    t = TruncSeries.t_power(ring, 5, 1)
    a = SR.one + t.scale(ring.of_int(5))
    inv = a.inverse()
    assert (a * inv) == SR.one
    assert inv.coeffs[1] == ring.of_int(-5)


def test_evaluate():
    ring = RingSpec(5, M=4)
    s = TruncSeries(ring, 4, [ring.of_int(2), ring.one])
    assert s.evaluate(ring.of_int(3), ring) == ring.of_int(5)
