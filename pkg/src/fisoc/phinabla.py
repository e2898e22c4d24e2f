"""Frobenius-and-connection modules over a truncated power-series ring.

The base is W(F_{q^d})[[t]] modulo (p^M, t^N) with a semilinear Frobenius
phi acting as the Witt-ring lift on coefficients and t |-> frob_t, where
frob_t is congruent to t^q mod p (default t^q).  A module is a square
matrix Phi of truncated series, optionally with a connection matrix
(nabla = d/dt + Nmat), in which case the horizontality identity

    dPhi/dt + Nmat . Phi - Phi . (d frob_t/dt) . phi(Nmat) = 0

must hold modulo (p^M, t^{N-1}).

Three slope readings coexist: the special polygon (the fiber at t = 0),
the Gauss lower bound (the hull of Gauss valuations of the
characteristic-polynomial coefficients of Phi, a lower bound for the
generic polygon when Phi is integral), and sampled polygons at points
where t specializes to compatible Teichmuller lifts.  Exact agreement of
the bound pair certifies the generic polygon; the unit-root extraction
demands that certificate, and additionally re-verifies everything it
returns (stability, unit determinant, positive quotient slopes), so an
uncertified borderline input can never produce a silently wrong summand.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import linalg
from .errors import (
    ConfigError,
    InconsistencyError,
    NonConstantPolygonError,
    NonIntegralSlopeError,
    PrecisionError,
)
from .fspace import FSpace, _iteration_cap
from .padic import RingSpec, WittElement, WittMatrix, embedding_root
from .polygon import NewtonPolygon, dominance_minimum
from .series import SeriesRing, TruncSeries


class TruncSeriesRing:
    """W(F_{q^d})[[t]] / (p^M, t^N) with a fixed Frobenius lift."""

    def __init__(self, base, N, frob_t=None):
        if N < 2:
            raise ConfigError("N", "need at least two t-digits")
        self.base = base
        self.N = N
        self.adapter = SeriesRing(base, N)
        if frob_t is None:
            frob_t = TruncSeries.t_power(base, N, base.q)
        if not isinstance(frob_t, TruncSeries):
            frob_t = TruncSeries(base, N, frob_t)
        self.frob_t = frob_t
        self._check_frobenius_lift()
        self._frob_monomial = frob_t == TruncSeries.t_power(base, N, base.q)

    def _check_frobenius_lift(self):
        diff = self.frob_t - TruncSeries.t_power(self.base, self.N, self.base.q)
        for c in diff.coeffs:
            if c.valuation() == 0:
                raise ConfigError("frob_t", "must be congruent to t^q mod p")
        if not self.frob_t.coeffs[0].is_zero():
            # t = 0 must be fixed exactly, or phi is not well defined on
            # t-truncations and the special fiber loses its meaning
            raise ConfigError("frob_t", "must fix t = 0 exactly")

    def t(self):
        return TruncSeries.t_power(self.base, self.N, 1)

    def constant(self, c):
        if isinstance(c, int):
            c = self.base.of_int(c)
        return TruncSeries.constant(self.base, self.N, c)

    def phi(self, series):
        """The semilinear Frobenius on one series: coefficientwise lift
        followed by t |-> frob_t."""
        twisted = series.map_coeffs(lambda c: c.frobenius())
        if self._frob_monomial:
            q = self.base.q
            out = [self.base.zero] * self.N
            for k, c in enumerate(twisted.coeffs):
                if k * q >= self.N:
                    break
                out[k * q] = c
            return TruncSeries(self.base, self.N, out)
        return twisted.compose(self.frob_t)

    def phi_matrix(self, M):
        return linalg.mat([[self.phi(x) for x in row] for row in M])

    def with_precision(self, M2):
        base2 = self.base.with_precision(M2)
        frob2 = self.frob_t.map_coeffs(lambda c: c.map_to(base2), ring=base2)
        return TruncSeriesRing(base2, self.N, frob2)

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeriesRing)
            and self.base == other.base
            and self.N == other.N
            and self.frob_t == other.frob_t
        )

    def to_json(self):
        out = {"ring": self.base.to_json(), "N": self.N}
        default = TruncSeries.t_power(self.base, self.N, self.base.q)
        if self.frob_t != default:
            out["frob_t"] = [c.to_json() for c in self.frob_t.coeffs]
        return out


@dataclass(frozen=True)
class GenericCertificate:
    lower: NewtonPolygon
    upper: Optional[NewtonPolygon]
    certified: bool
    sample_degree: int
    samples: tuple

    @property
    def generic(self):
        return self.lower if self.certified else None


@dataclass(frozen=True)
class UnitRootData:
    basis: tuple          # r x r0 columns over the series ring
    induced: tuple        # r0 x r0 matrix of Frobenius on the summand
    quotient: tuple       # (r-r0) x (r-r0) induced matrix on the complement
    pivot_rows: tuple
    iterations: int
    quotient_polygon: NewtonPolygon
    connection_stable: Optional[bool]


@dataclass(frozen=True)
class FiltrationStep:
    slope: Fraction
    rank: int
    basis: tuple          # lift of a graded-piece basis, original coordinates


class PhiNablaModule:
    """A free module with semilinear Frobenius and optional connection."""

    def __init__(self, ring, Phi, nabla=None):
        self.ring = ring
        self.Phi = linalg.mat(Phi)
        n = len(self.Phi)
        if any(len(row) != n for row in self.Phi):
            raise ConfigError("phi", "Frobenius matrix must be square")
        self.nabla = linalg.mat(nabla) if nabla is not None else None
        if self.nabla is not None and len(self.nabla) != n:
            raise ConfigError("nabla", "connection matrix size mismatch")
        det = linalg.det(self.Phi, ring.adapter)
        if all(c.valuation() is None for c in det.coeffs):
            raise PrecisionError("det(Phi) vanishes at the working precision")
        self.fiber_at_origin()  # certifies det(Phi(0)) and hence bijectivity
        if self.nabla is not None:
            res = self.horizontality_residual()
            if not all(s.is_zero() for row in res for s in row):
                raise ConfigError("nabla", "Frobenius is not horizontal for the connection")

    @property
    def rank(self):
        return len(self.Phi)

    def horizontality_residual(self):
        """dPhi + N.Phi - Phi.(d frob_t).phi(N), reduced mod (p^M, t^{N-1})."""
        ring = self.ring
        N1 = ring.N - 1
        dphi = [[x.derivative() for x in row] for row in self.Phi]
        lhs = linalg.mat_add(
            dphi,
            _truncate_mat(
                linalg.mat_mul(self.nabla, self.Phi, ring.adapter), N1
            ),
        )
        dfrob = ring.frob_t.derivative()
        phiN = ring.phi_matrix(self.nabla)
        rhs = linalg.mat_mul(
            _truncate_mat(self.Phi, N1),
            [[(x.truncate(N1)) * dfrob for x in row] for row in phiN],
            SeriesRing(ring.base, N1),
        )
        return linalg.mat_sub(lhs, rhs)

    # -- slope readings ------------------------------------------------------

    def fiber_at_origin(self):
        base = self.ring.base
        return FSpace(
            base, WittMatrix(base, [[x.constant_term() for x in row] for row in self.Phi])
        )

    def special_np(self):
        """Newton polygon of the fiber at t = 0."""
        return self.fiber_at_origin().newton_polygon()

    def gauss_lower_bound(self):
        """Hull of Gauss valuations of the characteristic polynomial of Phi.

        For an integral Phi this bounds the generic polygon from below:
        the locus where the polygon equals the generic one misses only
        finitely many closed points, and every specialization can only
        raise coefficient valuations above their Gauss values.
        """
        ring = self.ring
        cp = linalg.charpoly(self.Phi, ring.adapter)
        points = [(i, _gauss_valuation(c)) for i, c in enumerate(cp)]
        return NewtonPolygon.from_valuations(
            points, self.rank, normalizer=ring.base.f, precision=ring.base.M
        )

    def specialize(self, c, degree):
        """The fiber at the Frobenius-compatible Teichmuller point above c.

        ``c`` is a residue element of F_{q^(d*degree)} (packed); the point
        of evaluation is the unique lift tau with frob_t(tau) = sigma(tau)
        and tau = c mod p, which for frob_t = t^q is the Teichmuller lift.
        """
        ext = self.ring.base.extend(degree) if degree > 1 else self.ring.base
        emb = embedding_root(self.ring.base, ext) if degree > 1 else None
        tau = _compatible_point(self.ring, ext, emb, c)
        rows = []
        for row in self.Phi:
            out = []
            for s in row:
                se = s if emb is None else s.map_coeffs(lambda x: x.map_to(ext, emb), ring=ext)
                out.append(se.evaluate(tau, ext))
            rows.append(out)
        return FSpace(ext, WittMatrix(ext, rows))

    def generic_np_certificate(self, sample_degree=1):
        """A (lower bound, sampled upper estimate) pair for the generic polygon.

        The lower bound is the Gauss hull; the upper estimate is the
        dominance-minimal polygon among the fibers at all compatible
        Teichmuller points of degree <= sample_degree.  Equality of the
        two certifies the generic polygon exactly; otherwise the
        certificate is indeterminate and the caller decides.
        """
        lower = self.gauss_lower_bound()
        samples = []
        fdeg = self.ring.base.f * self.ring.base.d
        for e in range(1, sample_degree + 1):
            F = (
                self.ring.base.extend(e).residue_field
                if e > 1
                else self.ring.base.residue_field
            )
            seen = set()
            for c in range(1, F.order):
                if c in seen or F.degree_over(c, fdeg) != e:
                    continue
                seen.update(F.frobenius_orbit(c, fdeg))
                samples.append(self.specialize(c, e))
        polys = tuple(s.newton_polygon() for s in samples)
        upper = dominance_minimum(polys) if polys else None
        certified = upper is not None and upper == lower
        return GenericCertificate(lower, upper, certified, sample_degree, polys)

    # -- unit-root extraction ---------------------------------------------------

    def _require_constant_polygon(self, sample_degree):
        """Certify that the special polygon can be taken as the generic one.

        The mandatory check compares the special polygon with the Gauss
        hull, which is computed from the truncated data itself and is the
        only reading compatible with t-truncation.  With sample_degree >=
        1 the fibers at stored-representative Teichmuller points are also
        compared; that is exact for polynomial entries of degree < N but
        meaningless for entries that wrapped around the truncation order,
        so sampling is opt-in.
        """
        special = self.special_np()
        lower = self.gauss_lower_bound()
        if lower != special:
            raise NonConstantPolygonError(
                f"special polygon {special} differs from the Gauss generic bound "
                f"{lower}: the Newton polygon is not constant (or the presentation "
                f"cannot be certified)"
            )
        if sample_degree >= 1:
            cert = self.generic_np_certificate(sample_degree)
            if any(s != special for s in cert.samples):
                raise NonConstantPolygonError(
                    f"special polygon {special} differs from a sampled fiber polygon; "
                    f"the Newton polygon is not constant"
                )
        return special

    def unit_root_sub(self, sample_degree=0):
        """Basis of the unit-root direct summand under a constant polygon.

        Iterates the twisted products Phi.phi(Phi)...phi^(n-1)(Phi) until
        the unit-pivot column span stabilizes twice in a row, then
        verifies Frobenius stability, a unit determinant on the summand,
        and strictly positive quotient slopes.
        """
        ring = self.ring
        poly = self._require_constant_polygon(sample_degree)
        if poly.initial_slope() != 0:
            raise ConfigError("slope", "initial slope must be 0; twist first")
        r0 = poly.initial_multiplicity()
        r = self.rank
        positive = [s for s in poly.slopes() if s > 0]
        cap = _iteration_cap(ring.base, r, min(positive) if positive else None)
        A = self.Phi
        step = self.Phi
        prev = None
        adapter = ring.adapter
        for n in range(1, cap + 1):
            pivots, basis, residual = linalg.unit_echelon(
                list(zip(*A)), r, adapter
            )
            if len(pivots) == r0 and not residual:
                cur = (tuple(pivots), tuple(basis))
                if prev == cur:
                    return self._finish_unit_root(pivots, basis, n)
                prev = cur
            else:
                prev = None
            step = ring.phi_matrix(step)
            A = linalg.mat_mul(A, step, adapter)
        raise PrecisionError(
            f"unit-root span did not stabilize within {cap} iterations"
        )

    def _finish_unit_root(self, pivots, basis, iterations):
        ring = self.ring
        adapter = ring.adapter
        r, r0 = self.rank, len(pivots)
        B = linalg.mat([[basis[j][i] for j in range(r0)] for i in range(r)])
        phiB = linalg.mat_mul(self.Phi, ring.phi_matrix(B), adapter)
        C = linalg.mat([[phiB[i][j] for j in range(r0)] for i in pivots])
        BC = linalg.mat_mul(B, C, adapter)
        if BC != phiB:
            raise InconsistencyError("extracted span is not Frobenius stable")
        detC = linalg.det(C, adapter)
        if not adapter.is_unit(detC):
            raise InconsistencyError("Frobenius on the summand is not a unit")
        comp = [i for i in range(r) if i not in pivots]
        E = linalg.mat(
            [
                [B[i][j] for j in range(r0)]
                + [adapter.one if i == k else adapter.zero for k in comp]
                for i in range(r)
            ]
        )
        Einv = linalg.inverse(E, adapter)
        conj = linalg.mat_mul(Einv, linalg.mat_mul(self.Phi, ring.phi_matrix(E), adapter), adapter)
        quotient = linalg.mat(
            [[conj[r0 + i][r0 + j] for j in range(r - r0)] for i in range(r - r0)]
        )
        if r0 < r:
            qpoly = FSpace(
                ring.base,
                WittMatrix(ring.base, [[x.constant_term() for x in row] for row in quotient]),
            ).newton_polygon()
            if qpoly.initial_slope() <= 0:
                raise InconsistencyError("quotient carries a non-positive slope")
        else:
            qpoly = NewtonPolygon([(0, 0)])
        stable = None
        if self.nabla is not None:
            stable = self._connection_stable(B, pivots)
        return UnitRootData(
            basis=B,
            induced=C,
            quotient=quotient,
            pivot_rows=tuple(pivots),
            iterations=iterations,
            quotient_polygon=qpoly,
            connection_stable=stable,
        )

    def _connection_stable(self, B, pivots):
        """Whether (d/dt + N) maps the summand into itself mod (p^M, t^{N-1})."""
        ring = self.ring
        N1 = ring.N - 1
        ad1 = SeriesRing(ring.base, N1)
        dB = [[x.derivative() for x in row] for row in B]
        NB = _truncate_mat(linalg.mat_mul(self.nabla, B, ring.adapter), N1)
        target = linalg.mat_add(dB, NB)
        Ctest = linalg.mat([[target[i][j] for j in range(len(B[0]))] for i in pivots])
        span = linalg.mat_mul(_truncate_mat(B, N1), Ctest, ad1)
        return span == linalg.mat(target)

    # -- slope filtration ----------------------------------------------------------

    def slope_filtration(self, sample_degree=0):
        """Increasing Frobenius-stable filtration with isoclinic steps.

        Requires a certified constant polygon whose slopes are integral
        multiples of 1/f.  Returns one step per distinct slope; bases of
        later steps are lifts through the successive quotients, expressed
        in the original coordinates (at the precision remaining after the
        p-power twists).
        """
        poly = self._require_constant_polygon(sample_degree)
        f = self.ring.base.f
        for s, _ in poly.slope_multiplicities():
            if (s * f).denominator != 1:
                raise NonIntegralSlopeError(s, f)
        steps = []
        current = self
        emb_cols = None  # rank x r_cur lift of current coordinates
        offset = Fraction(0)
        while True:
            cur_poly = current._require_constant_polygon(sample_degree)
            mults = cur_poly.slope_multiplicities()
            s0 = mults[0][0]
            if len(mults) == 1:
                ident = linalg.identity(current.rank, current.ring.adapter)
                basis = _apply_lift(emb_cols, ident)
                steps.append(FiltrationStep(offset + s0, current.rank, basis))
                break
            twisted = current._twist_down(int(s0 * f))
            data = twisted.unit_root_sub(sample_degree)
            basis = _apply_lift(emb_cols, data.basis)
            steps.append(FiltrationStep(offset + s0, len(data.pivot_rows), basis))
            comp = [i for i in range(current.rank) if i not in data.pivot_rows]
            lift_next = [[1 if i == k else 0 for k in comp] for i in range(current.rank)]
            emb_cols = _compose_lift(emb_cols, lift_next)
            offset += s0
            current = PhiNablaModule(twisted.ring, data.quotient)
        ranks = sum(st.rank for st in steps)
        if ranks != self.rank:
            raise InconsistencyError("filtration ranks do not add up")
        got = []
        for st in steps:
            got.extend([st.slope] * st.rank)
        if got != list(poly.slopes()):
            raise InconsistencyError("filtration slopes do not concatenate to the polygon")
        return steps

    def _twist_down(self, s):
        """Divide Phi by p^s, dropping to precision M - s."""
        if s == 0:
            return PhiNablaModule(self.ring, self.Phi)
        ring2 = self.ring.with_precision(self.ring.base.M - s)
        base2 = ring2.base

        def div(series):
            cs = []
            for c in series.coeffs:
                cs.append(c.div_p(s) if s else c)
            return TruncSeries(base2, ring2.N, cs)

        try:
            Phi2 = [[div(x) for x in row] for row in self.Phi]
        except PrecisionError as exc:
            raise PrecisionError(
                f"cannot twist by p^-{s}: the presentation lattice is not divisible"
            ) from exc
        return PhiNablaModule(ring2, Phi2)

    # -- serialization ----------------------------------------------------------------

    def to_json(self):
        out = self.ring.to_json()
        out["phi"] = [[list(c.to_json() for c in s.coeffs) for s in row] for row in self.Phi]
        if self.nabla is not None:
            out["nabla"] = [
                [list(c.to_json() for c in s.coeffs) for s in row] for row in self.nabla
            ]
        return out

    @classmethod
    def from_json(cls, data):
        base = RingSpec.from_json(data["ring"])
        N = data["N"]
        frob = None
        if "frob_t" in data:
            frob = TruncSeries(base, N, [WittElement(base, c) for c in data["frob_t"]])
        ring = TruncSeriesRing(base, N, frob)

        def load(rows):
            return [
                [TruncSeries(base, N, [WittElement(base, c) for c in s]) for s in row]
                for row in rows
            ]

        return cls(ring, load(data["phi"]), load(data["nabla"]) if "nabla" in data else None)


def _truncate_mat(M, D):
    return linalg.mat([[x.truncate(D) for x in row] for row in M])


def _gauss_valuation(series):
    vals = [c.valuation() for c in series.coeffs]
    finite = [v for v in vals if v is not None]
    return min(finite) if finite else None


def _compatible_point(ring, ext, emb, c):
    """tau with frob_t(tau) = sigma(tau), tau = c mod p."""
    tau = ext.teichmuller(c)
    frob = ring.frob_t
    if emb is not None:
        frob = frob.map_coeffs(lambda x: x.map_to(ext, emb), ring=ext)
    if ring._frob_monomial:
        return tau
    for _ in range(ext.M + 2):
        err = frob.evaluate(tau, ext) - tau.frobenius()
        v = err.valuation()
        if v is None:
            return tau
        delta = err.div_p(v).map_to(ext)
        corr = delta.frobenius(ext.d - 1)  # sigma^(-1)
        tau = tau + ext.of_int(ext.p ** v) * corr
    raise PrecisionError("no Frobenius-compatible lift of the sample point")


def _apply_lift(emb_cols, basis):
    """Map a basis through the accumulated 0/1 coordinate-lift matrix."""
    if emb_cols is None:
        return linalg.mat(basis)
    zero = basis[0][0] - basis[0][0]
    rows = len(emb_cols)
    out = []
    for i in range(rows):
        row = []
        for j in range(len(basis[0])):
            acc = zero
            for k in range(len(basis)):
                if emb_cols[i][k]:
                    acc = acc + basis[k][j]
            row.append(acc)
        out.append(row)
    return linalg.mat(out)


def _compose_lift(emb_cols, lift_next):
    if emb_cols is None:
        return lift_next
    rows = len(emb_cols)
    cols = len(lift_next[0])
    mid = len(lift_next)
    return [
        [sum(emb_cols[i][k] * lift_next[k][j] for k in range(mid)) for j in range(cols)]
        for i in range(rows)
    ]
