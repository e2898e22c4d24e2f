"""The acceptance suite: one self-contained check per shipped guarantee.

Each criterion is a function returning (passed, detail); the registry is
consumed both by the test suite and by the ``np selftest`` command, so the
command line and CI always agree on what "working" means.  Every check
carries its stated time limit; comparisons are exact (integers, rationals,
polygon equality), never approximate.
"""

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb, gcd

from . import linalg
from .curves import CurveModel, EllipticGroup, check_point_partition, mult_n_preimages, orbit_counts, point_counts, zeta
from .errors import NonConstantPolygonError
from .families import (
    LocalFactor,
    ProjectiveBase,
    constant_family,
    jump_locus,
    legendre_family,
    newton_polygon_at,
    synthetic_family,
)
from .fspace import standard_module
from .lfunctions import (
    bound,
    check_bound,
    congruence_check,
    degree_identity_check,
    normalize_unit_character,
)
from .padic import RingSpec
from .phinabla import PhiNablaModule, TruncSeriesRing
from .polygon import NewtonPolygon
from .series import TruncSeries

F = Fraction


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float


def _run(name, limit, fn):
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure, not an abort
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if passed and dt > limit:
        passed, detail = False, f"{detail} (took {dt:.1f}s > {limit}s)"
    return CriterionResult(name, passed, detail, dt, limit)


# -- 1: the explicit bound ----------------------------------------------------


def crit_bound_formula():
    t0 = time.perf_counter()
    for _ in range(1000):
        value = bound(7, 2, 2).B
    per_call = (time.perf_counter() - t0) / 1000
    if value != 8194:
        return False, f"bound(7,2,2) = {value}"
    for q, r in [(5, 1), (7, 2), (11, 4), (13, 3)]:
        if bound(q, 1, r).B != r:
            return False, f"bound({q},1,{r}) != {r}"
    if per_call > 1e-3:
        return False, f"formula took {per_call * 1e3:.2f} ms per call"
    return True, f"B(7,2,2) = 8194 in {per_call * 1e6:.0f} us; genus-1 collapse checked"


# -- 2: the Legendre jump locus ------------------------------------------------


def _brute_supersingular(p):
    """Oracle: a_lambda = 0 mod p by plain double loops over F_p and F_p^2."""
    rational = set()
    for lam in range(2, p):
        n = 1
        for x in range(p):
            r = (x * (x - 1) * (x - lam)) % p
            if r == 0:
                n += 1
            elif pow(r, (p - 1) // 2, p) == 1:
                n += 2
        if (p + 1 - n) % p == 0:
            rational.add(lam)
    # degree-2 points via the unique quadratic extension F_p[x]/(x^2 - c)
    c = next(c for c in range(2, p) if pow(c, (p - 1) // 2, p) == p - 1)

    def mul(A, B):
        return ((A[0] * B[0] + c * A[1] * B[1]) % p, (A[0] * B[1] + A[1] * B[0]) % p)

    def is_sq(A):
        e = (p * p - 1) // 2
        R, B = (1, 0), A
        while e:
            if e & 1:
                R = mul(R, B)
            B = mul(B, B)
            e >>= 1
        return R == (1, 0)

    deg2 = 0
    for u in range(p):
        for v in range(1, p):  # v = 0 is rational
            lam = (u, v)
            n = 1
            for a in range(p):
                for b in range(p):
                    x = (a, b)
                    t = mul(mul(x, ((a - 1) % p, b)), ((a - lam[0]) % p, (b - lam[1]) % p))
                    if t == (0, 0):
                        n += 1
                    elif is_sq(t):
                        n += 2
            if (p * p + 1 - n) % p == 0:
                deg2 += 1
    return rational, deg2 // 2  # orbits come in conjugate pairs


def crit_legendre_jumps():
    expected_counts = {7: 3, 11: 5, 13: 6}
    detail = []
    for p in (7, 11, 13):
        t0 = time.perf_counter()
        fam = legendre_family(p)
        rep = jump_locus(fam, 2)
        if rep.generic != NewtonPolygon.from_slopes([0, 1]):
            return False, f"p={p}: generic {rep.generic}"
        half = NewtonPolygon.from_slopes([F(1, 2), F(1, 2)])
        if any(j[3] != half for j in rep.jumps):
            return False, f"p={p}: a jump polygon is not half-half"
        if rep.reduced_degree != expected_counts[p]:
            return False, f"p={p}: reduced degree {rep.reduced_degree}"
        if p == 7:
            rational, deg2_orbits = _brute_supersingular(p)
            by_deg = {1: set(), 2: 0}
            lam_of = {o.orbit_id: (o.degree, o.data) for o in fam.orbits(2)}
            for oid, d, _cnt, _poly in rep.jumps:
                if d == 1:
                    by_deg[1].add(lam_of[oid][1])
                else:
                    by_deg[2] += 1
            if by_deg[1] != rational or by_deg[2] != deg2_orbits:
                return False, f"p={p}: oracle mismatch {by_deg} vs {(rational, deg2_orbits)}"
        dt = time.perf_counter() - t0
        if dt > 60:
            return False, f"p={p} took {dt:.1f}s > 60s"
        detail.append(f"p={p}: {rep.reduced_degree}")
    return True, "; ".join(detail) + " (p=7 verified against the brute-force oracle)"


# -- 3: the congruence ---------------------------------------------------------


def crit_congruence_legendre():
    fam = legendre_family(7)
    norm = normalize_unit_character(fam, 6)
    if not all(d.is_one_after for d in norm.diagnostics):
        return False, "a unit residue does not become 1"
    rep = congruence_check(norm, 6)
    if not rep.holds:
        return False, f"coefficient mismatches at {rep.mismatches}"
    return True, "L = prod over ordinary points of (1 - t^d)^-1 mod (7, t^6)"


# -- 4: the degree identity ------------------------------------------------------


def crit_degree_identity():
    def default(d):
        return (1, -(1 + 7 ** d), 7 ** d)

    cases = [
        (
            "ordinary",
            lambda: constant_family(
                standard_module(0, 1, RingSpec(7, M=6)),
                ProjectiveBase(CurveModel.elliptic(7, 1, 1)),
                name="trivial-ordinary",
            ),
            1,
        ),
        (
            "supersingular",
            lambda: constant_family(
                standard_module(0, 1, RingSpec(7, M=6)),
                ProjectiveBase(CurveModel.elliptic(7, -1, 0)),
                name="trivial-ss",
            ),
            0,
        ),
        (
            "planted-Z",
            lambda: synthetic_family(
                ProjectiveBase(CurveModel.elliptic(7, 1, 1)),
                7,
                2,
                default,
                overrides={"d2o0": (1, -2 * 7, 49)},
                name="planted",
            ),
            3,
        ),
    ]
    for label, mk, want in cases:
        t0 = time.perf_counter()
        rep = degree_identity_check(mk(), 8)
        dt = time.perf_counter() - t0
        if not (rep.holds and rep.observed_degree == want):
            return False, f"{label}: {rep.to_json()}"
        if dt > 30:
            return False, f"{label} took {dt:.1f}s > 30s"
    return True, "degrees 1 / 0 / 3 = e + deg Z observed exactly"


# -- 5: the simple slope modules -------------------------------------------------


def crit_standard_modules():
    for f in (1, 2):
        ring = RingSpec(5, f=f, d=1, M=12)
        for r in range(1, 6):
            for s in range(-5, 6):
                if gcd(r, s) != 1:
                    continue
                got = standard_module(s, r, ring).newton_polygon()
                want = NewtonPolygon.from_slopes([F(s, r * f)] * r)
                if got != want:
                    return False, f"(s, r, f) = ({s}, {r}, {f}): {got} != {want}"
    return True, "slope s/(rf) with multiplicity r for all r <= 5, |s| <= 5, f in {1, 2}"


# -- 6: exterior-power initial multiplicity ----------------------------------------


def crit_exterior_multiplicity():
    values = set()
    for den in (1, 2, 3, 4):
        for num in range(0, 3 * den + 1):
            values.add(F(num, den))
    values = sorted(values)
    checked = 0
    for rank in range(1, 7):
        for slopes in combinations_with_replacement(values, rank):
            poly = NewtonPolygon.from_slopes(slopes)
            mults = poly.slope_multiplicities()
            prefix = 0
            for _, m in mults[:-1]:
                prefix += m
                ext = poly.exterior_power(prefix)
                if ext.initial_multiplicity() != 1:
                    return False, f"slopes {slopes}, prefix {prefix}"
                # brute-force subset-sum oracle
                sl = poly.slopes()
                best = sum(sl[:prefix])
                count = sum(
                    1 for c in combinations(sl, prefix) if sum(c) == best
                )
                if count != 1:
                    return False, f"oracle disagrees at {slopes}, prefix {prefix}"
                checked += 1
    return True, f"{checked} prefix exterior powers, all with initial multiplicity 1"


# -- 7: specialization dominance -----------------------------------------------------


def crit_specialization_dominance():
    rng = random.Random(2024)
    families = [legendre_family(7), legendre_family(11)]
    ring = RingSpec(5, M=10)
    base5 = ProjectiveBase(CurveModel.projective_line(5))
    families.append(constant_family(standard_module(1, 2, ring), base5))
    families.append(
        constant_family(standard_module(0, 1, RingSpec(7, M=6)), ProjectiveBase(CurveModel.elliptic(7, 1, 1)))
    )
    checked = 0
    for fam in families:
        rep = jump_locus(fam, 2)
        for o in fam.orbits(2):
            if not newton_polygon_at(fam, o).dominates(rep.generic):
                return False, f"{fam.name}: dominance fails at {o.orbit_id}"
            checked += 1
    for trial in range(500):
        q = rng.choice([5, 7])
        base = ProjectiveBase(CurveModel.projective_line(q))
        slopes = sorted(rng.choice([0, 0, 1, 1, 2]) for _ in range(rng.choice([1, 2])))
        height = sum(slopes)

        def default(d, slopes=slopes, q=q):
            c1 = -sum(q ** (s * d) for s in slopes)
            if len(slopes) == 1:
                return (1, c1)
            return (1, c1, q ** (height * d))

        overrides = {}
        if len(slopes) == 2 and height % 2 == 0 and slopes[0] != slopes[1]:
            overrides["d1o0"] = (1, -2 * q ** (height // 2), q ** height)
        fam = synthetic_family(base, q, len(slopes), default, overrides, name=f"rnd{trial}")
        rep = jump_locus(fam, 2)
        for o in fam.orbits(2):
            if not newton_polygon_at(fam, o).dominates(rep.generic):
                return False, f"random family {trial}: dominance fails"
            checked += 1
    return True, f"{checked} sampled polygons all dominate their generic estimates"


# -- 8: unit-root extraction -----------------------------------------------------------


def _random_unit_series_matrix(ring, n, rng, tdeg=3):
    while True:
        rows = [
            [
                TruncSeries(
                    ring.base, ring.N, [ring.base.random_element(rng) for _ in range(tdeg)]
                )
                for _ in range(n)
            ]
            for _ in range(n)
        ]
        if linalg.det(rows, ring.adapter).is_unit():
            return linalg.mat(rows)


def crit_unit_root_extraction():
    rng = random.Random(77)
    ring = TruncSeriesRing(RingSpec(7, M=6), 8)
    shapes = [[0, 1], [0, 0, 1]]
    done = 0
    for trial in range(100):
        powers = shapes[trial % 2]
        n = len(powers)
        G = _random_unit_series_matrix(ring, n, rng, tdeg=2 + trial % 2)
        D = [
            [ring.constant(7 ** e if i == j else 0) for j, e in enumerate(powers)]
            for i in range(n)
        ]
        Ginv = linalg.inverse(ring.phi_matrix(G), ring.adapter)
        Phi = linalg.mat_mul(linalg.mat_mul(G, D, ring.adapter), Ginv, ring.adapter)
        mod = PhiNablaModule(ring, Phi)
        data = mod.unit_root_sub()
        r0 = n - 1
        if len(data.pivot_rows) != r0:
            return False, f"trial {trial}: wrong unit rank"
        if not ring.adapter.is_unit(linalg.det(data.induced, ring.adapter)):
            return False, f"trial {trial}: induced map not a unit"
        if data.quotient_polygon.initial_slope() < 1:
            return False, f"trial {trial}: quotient slope below 1"
        # t = 0 specialization agrees with the pointwise extraction
        at0 = linalg.mat([[s.constant_term() for s in row] for row in data.basis])
        direct = mod.fiber_at_origin().unit_root_basis()
        base = ring.base
        want = linalg.unit_echelon(list(zip(*direct.entries)), n, base)
        got = linalg.unit_echelon(list(zip(*at0)), n, base)
        if want[:2] != got[:2]:
            return False, f"trial {trial}: specialization mismatch"
        done += 1
    t_jump = PhiNablaModule(
        ring,
        [[TruncSeries.t_power(ring.base, ring.N, 1), ring.constant(7)],
         [ring.constant(1), ring.constant(0)]],
    )
    try:
        t_jump.unit_root_sub()
        return False, "jumping module was not rejected"
    except NonConstantPolygonError:
        pass
    return True, f"{done} random conjugates extracted and verified; jump input rejected"


# -- 9: multiplication-by-n preimage counts -----------------------------------------------


def crit_preimage_scaling():
    cases = [
        (CurveModel.elliptic(7, -1, 0), 2, 1),   # full 2-torsion over F_7
        (CurveModel.elliptic(7, -1, 0), 3, 4),   # full 3-torsion over F_7^4
        (CurveModel.elliptic(7, 0, 1), 2, 1),
        (CurveModel.elliptic(7, 0, 1), 3, 3),    # full 3-torsion over F_7^3
    ]
    for curve, n, m in cases:
        G = EllipticGroup(curve, m)
        if G.torsion_count(n) != n * n:
            return False, f"{curve}: torsion not full at n={n}, m={m}"
        got = mult_n_preimages(curve, n, None, m)
        if got != n * n:
            return False, f"{curve}: preimages of O = {got} != {n * n}"
    if mult_n_preimages(CurveModel.elliptic(7, -1, 0), 1, None, 1) != 1:
        return False, "n = 1 should give a single preimage"
    return True, "kernel sizes 4 and 9 realized on both curves"


# -- 10: zeta integrity ---------------------------------------------------------------------


def crit_zeta_integrity():
    curves = [
        CurveModel.projective_line(5),
        CurveModel.elliptic(5, 1, 1),
        CurveModel.elliptic(7, 1, 1),
        CurveModel.elliptic(7, -1, 0),
        CurveModel.hyperelliptic(7, [1, 0, 0, 0, 0, 1]),
    ]
    for C in curves:
        Z = zeta(C)  # functional equation + Weil bounds checked inside
        if not 0 <= Z.p_rank <= C.genus:
            return False, f"{C}: p-rank {Z.p_rank} outside [0, {C.genus}]"
        if C.genus > 0:
            point_counts(C)
        by_deg = check_point_partition(C, 3)
        if by_deg != orbit_counts(C, 3, Z):
            return False, f"{C}: partition vs derived orbit counts"
    return True, f"{len(curves)} curves: functional equation, Weil bounds, partitions"


CRITERIA = [
    ("bound-formula", 1.0, crit_bound_formula),
    ("legendre-jump-locus", 180.0, crit_legendre_jumps),
    ("l-function-congruence", 120.0, crit_congruence_legendre),
    ("degree-identity", 90.0, crit_degree_identity),
    ("standard-module-polygons", 5.0, crit_standard_modules),
    ("exterior-power-multiplicity", 60.0, crit_exterior_multiplicity),
    ("specialization-dominance", 60.0, crit_specialization_dominance),
    ("unit-root-extraction", 60.0, crit_unit_root_extraction),
    ("preimage-scaling", 30.0, crit_preimage_scaling),
    ("zeta-integrity", 30.0, crit_zeta_integrity),
]


def run_all(names=None):
    out = []
    for name, limit, fn in CRITERIA:
        if names and name not in names:
            continue
        out.append(_run(name, limit, fn))
    return out
