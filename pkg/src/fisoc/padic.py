"""Truncated unramified p-adic arithmetic with a lifted power Frobenius.

``RingSpec(p, f, d, M)`` models W(F_{q^d}) / p^M with q = p^f: the ring of
Witt vectors of the residue field F_{q^d}, truncated at precision M, together
with the lift of the q-power Frobenius.  Elements are represented in the
power basis of (Z/p^M)[x]/(m(x)) where m is the deterministic integer lift
of the least-lexicographic irreducible polynomial of degree f*d over F_p.

The Frobenius lift is computed once per ring by Hensel-lifting the root
x^q of m and caching the induced linear map on the power basis; it is a
ring homomorphism, reduces to the q-power map mod p, fixes the prime ring,
and has exact order d.

All values are immutable after construction; the per-ring caches are
built once and only read afterwards, so everything here is safe to share
across threads.
"""

import json
from fractions import Fraction
from functools import cached_property

from . import linalg
from .errors import ConfigError, PrecisionError
from .gf import FiniteField, irreducible_polynomial


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class RingSpec:
    """Parameters and cached structure of one truncated Witt ring."""

    def __init__(self, p, f=1, d=1, M=8):
        if not _is_prime(p):
            raise ConfigError("p", f"{p} is not prime")
        if M < 1:
            raise ConfigError("M", "precision must be >= 1")
        if f < 1 or d < 1:
            raise ConfigError("f/d", "extension degrees must be >= 1")
        self.p = p
        self.f = f
        self.d = d
        self.M = M
        self.n = f * d
        self.q = p ** f
        self.pM = p ** M
        self.modulus = irreducible_polynomial(p, self.n)

    def __eq__(self, other):
        return (
            isinstance(other, RingSpec)
            and (self.p, self.f, self.d, self.M) == (other.p, other.f, other.d, other.M)
        )

    def __hash__(self):
        return hash((self.p, self.f, self.d, self.M))

    def __repr__(self):
        return f"RingSpec(p={self.p}, f={self.f}, d={self.d}, M={self.M})"

    @cached_property
    def residue_field(self):
        return FiniteField(self.p, self.n)

    # -- coefficient-vector arithmetic (tuples of ints mod p^M) ----------

    @cached_property
    def _reduction_rows(self):
        """x^(n+k) mod (m, p^M) for k = 0..n-2, as coefficient tuples."""
        n, pM = self.n, self.pM
        mod = [c % pM for c in self.modulus]
        rows = []
        # x^n = -sum m_i x^i
        cur = [(-mod[i]) % pM for i in range(n)]
        rows.append(tuple(cur))
        for _ in range(n - 2):
            top = cur[n - 1]
            cur = [0] + cur[: n - 1]
            if top:
                cur = [(c + top * r) % pM for c, r in zip(cur, rows[0])]
            rows.append(tuple(cur))
        return rows

    def _vec_mul(self, a, b):
        n, pM = self.n, self.pM
        if n == 1:
            return ((a[0] * b[0]) % pM,)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        out = [c % pM for c in prod[:n]]
        rows = self._reduction_rows
        for k in range(n - 1):
            c = prod[n + k] % pM
            if c:
                row = rows[k]
                out = [(o + c * r) % pM for o, r in zip(out, row)]
        return tuple(out)

    def _vec_add(self, a, b):
        pM = self.pM
        return tuple((x + y) % pM for x, y in zip(a, b))

    def _vec_neg(self, a):
        pM = self.pM
        return tuple((-x) % pM for x in a)

    # -- Frobenius lift ---------------------------------------------------

    @cached_property
    def _frob_matrix(self):
        """Columns are the coordinates of sigma(x^i); sigma acts linearly."""
        root = self._frob_root
        n = self.n
        cols = [self.one_vec()]
        cur = root
        for _ in range(n - 1):
            cols.append(cur)
            cur = self._vec_mul(cur, root)
        # matrix[i][j] = coords[i] of sigma(x^j)
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    @cached_property
    def _frob_root(self):
        """Hensel lift of x^q as a root of the modulus, mod p^M."""
        n, p = self.n, self.p
        F = self.residue_field
        r0 = F.pow(F.pack([0, 1] + [0] * (n - 2)) if n > 1 else 0, self.q)
        cur = tuple(F.unpack(r0)) if n > 1 else (0,)
        if n == 1:
            return (0,)
        mod_lift = [c for c in self.modulus]
        dmod = [(i * mod_lift[i]) % self.pM for i in range(1, n + 1)]
        for _ in range(self.M.bit_length() + 2):
            val = self._poly_eval_vec(mod_lift, cur)
            if all(c == 0 for c in val):
                return cur
            dval = self._poly_eval_vec(dmod, cur)
            cur = self._vec_add(cur, self._vec_neg(self._vec_mul(val, self._vec_inv(dval))))
        raise PrecisionError("Frobenius root lift did not converge")  # pragma: no cover

    def _poly_eval_vec(self, coeffs, at):
        """Evaluate an integer-coefficient polynomial at a coefficient vector."""
        acc = self.zero_vec()
        for c in reversed(coeffs):
            acc = self._vec_mul(acc, at)
            acc = self._vec_add(acc, self._int_vec(c))
        return acc

    def _vec_inv(self, a):
        res = self.residue_field
        r = res.pack(tuple(c % self.p for c in a)) if self.n > 1 else (a[0] % self.p)
        if self.n == 1:
            if r == 0:
                raise PrecisionError("inverting a non-unit")
            y = (pow(a[0] % self.p, self.p - 2, self.p),)
        else:
            if r == 0:
                raise PrecisionError("inverting a non-unit")
            y = tuple(res.unpack(res.inv(r)))
        # Newton: y <- y(2 - a y), doubling correct digits each pass
        steps = max(1, (self.M - 1).bit_length())
        two = self._int_vec(2)
        for _ in range(steps + 1):
            y = self._vec_mul(y, self._vec_add(two, self._vec_neg(self._vec_mul(a, y))))
        return y

    def zero_vec(self):
        return (0,) * self.n

    def one_vec(self):
        return (1,) + (0,) * (self.n - 1)

    def _int_vec(self, c):
        return (c % self.pM,) + (0,) * (self.n - 1)

    # -- element factories -------------------------------------------------

    @property
    def zero(self):
        return WittElement(self, self.zero_vec())

    @property
    def one(self):
        return WittElement(self, self.one_vec())

    def of_int(self, c):
        return WittElement(self, self._int_vec(c))

    def generator(self):
        """The class of x (a lift of a residue-field generator of the basis)."""
        if self.n == 1:
            return self.one
        return WittElement(self, (0, 1) + (0,) * (self.n - 2))

    def teichmuller(self, residue_packed):
        """Multiplicative lift of a residue-field element."""
        coeffs = (
            tuple(self.residue_field.unpack(residue_packed))
            if self.n > 1
            else (residue_packed % self.p,)
        )
        z = WittElement(self, tuple(c % self.pM for c in coeffs))
        order = self.p ** self.n
        for _ in range(self.M + 1):
            z = z ** order
        return z

    def random_element(self, rng):
        return WittElement(self, tuple(rng.randrange(self.pM) for _ in range(self.n)))

    def random_unit(self, rng):
        while True:
            x = self.random_element(rng)
            if x.is_unit():
                return x

    def with_precision(self, M2):
        """The same ring at a different working precision."""
        return RingSpec(self.p, self.f, self.d, M2)

    def extend(self, e):
        """The ring at an unramified extension of residue degree d*e."""
        return RingSpec(self.p, self.f, self.d * e, self.M)

    # -- ring protocol for linalg ------------------------------------------

    def is_unit(self, x):
        return x.is_unit()

    def inv(self, x):
        return x.inverse()

    def to_json(self):
        return {
            "p": self.p,
            "f": self.f,
            "d": self.d,
            "M": self.M,
            "modulus": list(self.modulus),
        }

    @classmethod
    def from_json(cls, data):
        ring = cls(data["p"], data.get("f", 1), data.get("d", 1), data["M"])
        if "modulus" in data and list(ring.modulus) != list(data["modulus"]):
            raise ConfigError("modulus", "does not match the deterministic choice")
        return ring


class WittElement:
    """An element of W(F_{q^d}) known modulo p^M."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(c % ring.pM for c in coeffs)
        if len(self.coeffs) != ring.n:
            raise ConfigError("coeffs", f"need {ring.n} coordinates, got {len(self.coeffs)}")

    def __repr__(self):
        return f"W{list(self.coeffs)}"

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.of_int(other)
        return (
            isinstance(other, WittElement)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def _coerce(self, other):
        if isinstance(other, int):
            return self.ring.of_int(other)
        if isinstance(other, WittElement):
            if other.ring != self.ring:
                raise TypeError("mixed rings in Witt arithmetic")
            return other
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return WittElement(self.ring, self.ring._vec_add(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return WittElement(self.ring, self.ring._vec_neg(self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return WittElement(self.ring, self.ring._vec_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        r = self.ring.one
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def valuation(self):
        """ord_p as an integer in 0..M-1, or None for the sentinel '>= M'."""
        if self.is_zero():
            return None
        p, M = self.ring.p, self.ring.M
        v = 0
        coeffs = self.coeffs
        while v < M:
            if any(c % (p ** (v + 1)) for c in coeffs):
                return v
            v += 1
        return None  # pragma: no cover

    def residue(self):
        """Image in the residue field, as a packed integer."""
        p = self.ring.p
        digs = [c % p for c in self.coeffs]
        return self.ring.residue_field.pack(digs) if self.ring.n > 1 else digs[0]

    def is_unit(self):
        return self.valuation() == 0

    def inverse(self):
        if not self.is_unit():
            raise PrecisionError("inverting a Witt element of positive valuation")
        return WittElement(self.ring, self.ring._vec_inv(self.coeffs))

    def frobenius(self, e=1):
        """Apply the lifted q-power Frobenius e times."""
        e %= self.ring.d
        cur = self.coeffs
        mat = self.ring._frob_matrix
        pM = self.ring.pM
        for _ in range(e):
            cur = tuple(
                sum(mat[i][j] * cur[j] for j in range(self.ring.n)) % pM
                for i in range(self.ring.n)
            )
        return WittElement(self.ring, cur)

    def div_p(self, j=1):
        """Exact division by p^j, moving to a ring of precision M - j.

        The quotient of a value known mod p^M is only certified mod
        p^(M-j); the returned element lives at that reduced precision.
        """
        if j == 0:
            return self
        pj = self.ring.p ** j
        if any(c % pj for c in self.coeffs):
            raise PrecisionError(f"element not divisible by p^{j}")
        if self.ring.M - j < 1:
            raise PrecisionError("no precision left after division by p")
        ring2 = self.ring.with_precision(self.ring.M - j)
        return WittElement(ring2, tuple((c // pj) % ring2.pM for c in self.coeffs))

    def map_to(self, ring2, embedding=None):
        """Reinterpret in another ring: precision changes and, with an
        embedding vector, unramified extensions."""
        if embedding is None:
            if (ring2.p, ring2.n) != (self.ring.p, self.ring.n):
                raise ConfigError("ring", "need an embedding between different rings")
            return WittElement(ring2, tuple(c % ring2.pM for c in self.coeffs))
        acc = ring2.zero
        for c in reversed(self.coeffs):
            acc = acc * embedding + ring2.of_int(c)
        return acc

    def to_json(self):
        return list(self.coeffs)


def embedding_root(small, big):
    """An image of the power-basis generator of ``small`` inside ``big``.

    Scans the residue field of ``big`` for a root of ``small``'s modulus
    and Hensel-lifts it; deterministic (smallest packed root).
    """
    if big.n % small.n:
        raise ConfigError("d", "no embedding: residue degree does not divide")
    F = big.residue_field
    mod = list(small.modulus)
    root_res = None
    for a in range(F.order):
        acc = 0
        for c in reversed(mod):
            acc = F.add(F.mul(acc, a), c % big.p)
        if acc == 0:
            root_res = a
            break
    if root_res is None:
        raise ConfigError("modulus", "no residue root found for embedding")
    r = big.teichmuller(root_res)
    # Hensel-polish on the lift (teichmuller root is exact only mod p)
    dmod = [i * mod[i] for i in range(1, len(mod))]
    for _ in range(max(1, big.M.bit_length()) + 1):
        val = _eval_int_poly(mod, r)
        if val.is_zero():
            break
        r = r - val * _eval_int_poly(dmod, r).inverse()
    return r


def _eval_int_poly(coeffs, at):
    acc = at.ring.zero
    for c in reversed(coeffs):
        acc = acc * at + at.ring.of_int(c)
    return acc


class WittMatrix:
    """Dense square or rectangular matrix of Witt elements."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring, entries):
        self.ring = ring
        self.entries = linalg.mat(entries)
        width = {len(r) for r in self.entries}
        if len(width) > 1:
            raise ConfigError("entries", "ragged matrix")

    @classmethod
    def from_int_rows(cls, ring, rows):
        return cls(ring, [[ring.of_int(c) for c in row] for row in rows])

    @classmethod
    def identity(cls, ring, n):
        return cls(ring, linalg.identity(n, ring))

    @property
    def nrows(self):
        return len(self.entries)

    @property
    def ncols(self):
        return len(self.entries[0]) if self.entries else 0

    def is_square(self):
        return self.nrows == self.ncols

    def __repr__(self):
        return f"WittMatrix({self.nrows}x{self.ncols})"

    def __eq__(self, other):
        return (
            isinstance(other, WittMatrix)
            and self.ring == other.ring
            and self.entries == other.entries
        )

    def __add__(self, other):
        return WittMatrix(self.ring, linalg.mat_add(self.entries, other.entries))

    def __sub__(self, other):
        return WittMatrix(self.ring, linalg.mat_sub(self.entries, other.entries))

    def __mul__(self, other):
        if isinstance(other, WittMatrix):
            return WittMatrix(self.ring, linalg.mat_mul(self.entries, other.entries, self.ring))
        return WittMatrix(self.ring, linalg.mat_scale(self.entries, other))

    def __rmul__(self, scalar):
        return WittMatrix(self.ring, linalg.mat_scale(self.entries, scalar))

    def frobenius(self, e=1):
        return WittMatrix(self.ring, [[x.frobenius(e) for x in row] for row in self.entries])

    def transpose(self):
        return WittMatrix(self.ring, linalg.transpose(self.entries))

    def charpoly(self):
        """Monic characteristic polynomial, as [1, c_1, ..., c_n]."""
        if not self.is_square():
            raise ConfigError("entries", "charpoly of a non-square matrix")
        return linalg.charpoly(self.entries, self.ring)

    def det(self):
        if not self.is_square():
            raise ConfigError("entries", "determinant of a non-square matrix")
        return linalg.det(self.entries, self.ring)

    def inverse(self):
        return WittMatrix(self.ring, linalg.inverse(self.entries, self.ring))

    def eval_poly(self, coeffs):
        """Evaluate a polynomial (monic-first coefficient list) at the matrix."""
        n = self.nrows
        acc = WittMatrix(self.ring, linalg.zeros(n, n, self.ring))
        ident = WittMatrix.identity(self.ring, n)
        for c in coeffs:
            acc = acc * self + c * ident
        return acc

    def map_entries(self, fn, ring=None):
        return WittMatrix(ring or self.ring, [[fn(x) for x in row] for row in self.entries])

    def to_json(self):
        return {
            "ring": self.ring.to_json(),
            "entries": [[x.to_json() for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data, ring=None):
        ring = ring or RingSpec.from_json(data["ring"])
        return cls(ring, [[WittElement(ring, c) for c in row] for row in data["entries"]])


def dumps(obj):
    """Deterministic JSON for any object with a to_json method."""
    payload = obj.to_json() if hasattr(obj, "to_json") else obj
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))
