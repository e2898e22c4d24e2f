"""Finite fields F_{p^n} with a deterministic choice of defining polynomial.

Elements are packed integers: the element sum(c_i * x^i) with digits
0 <= c_i < p is stored as sum(c_i * p^i).  The defining polynomial is the
least lexicographic monic irreducible of the requested degree (ordered by
the coefficient tuple (c_0, c_1, ..., c_{n-1})), so serialized data is
reproducible across runs and machines.

Scalar arithmetic is table-backed (discrete logs) whenever the field is
small enough, with a polynomial-arithmetic fallback.  A few vectorised
helpers (numpy) support bulk character sums used by point counting.
"""

from functools import lru_cache
from itertools import product

import numpy as np

from .errors import BudgetError

# Fields up to this size get discrete-log tables.
_TABLE_LIMIT = 1 << 21


def _poly_trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mulmod(a, b, mod, p):
    """a*b mod (mod, p); coefficient lists low-to-high, mod monic."""
    n = len(mod) - 1
    r = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                r[i + j] = (r[i + j] + x * y) % p
    for k in range(len(r) - 1, n - 1, -1):
        c = r[k]
        if c:
            r[k] = 0
            for i in range(n):
                r[k - n + i] = (r[k - n + i] - c * mod[i]) % p
    return _poly_trim(r[:n] if len(r) > n else r)


def _poly_powmod(a, e, mod, p):
    r, b = [1], list(a)
    while e:
        if e & 1:
            r = _poly_mulmod(r, b, mod, p)
        b = _poly_mulmod(b, b, mod, p)
        e >>= 1
    return r


def _poly_gcd(a, b, p):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        inv = pow(b[-1], p - 2, p)
        r = list(a)
        while len(r) >= len(b) and _poly_trim(r):
            if r[-1] == 0:
                r.pop()
                continue
            k = len(r) - len(b)
            c = (r[-1] * inv) % p
            for i, bc in enumerate(b):
                r[k + i] = (r[k + i] - c * bc) % p
            r = _poly_trim(r)
        a, b = b, r
    return a


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(coeffs, p):
    """Rabin irreducibility test; coeffs low-to-high, monic, over F_p."""
    n = len(coeffs) - 1
    if n < 1 or coeffs[-1] != 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    # x^(p^n) == x mod f
    t = x
    for _ in range(n):
        t = _poly_powmod(t, p, coeffs, p)
    if _poly_trim(list(t)) != [0, 1]:
        return False
    for ell in _prime_factors(n):
        t = x
        for _ in range(n // ell):
            t = _poly_powmod(t, p, coeffs, p)
        diff = list(t) + [0] * (2 - len(t))
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(coeffs, diff, p)
        if len(g) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_polynomial(p, n):
    """Least lexicographic monic irreducible of degree n over F_p.

    Ordering is by the tuple (c_0, ..., c_{n-1}) of non-leading
    coefficients; the result is returned low-to-high including the
    leading 1.
    """
    if n == 1:
        return (0, 1)
    for tail in product(range(p), repeat=n):
        coeffs = tuple(tail) + (1,)
        if coeffs[0] == 0:
            continue  # reducible: x divides
        if is_irreducible(list(coeffs), p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FiniteField:
    """F_{p^n} with packed-integer elements.

    >>> F = FiniteField(2, 2)
    >>> sorted(F.elements())
    [0, 1, 2, 3]
    """

    def __init__(self, p, n, budget=None):
        self.p = p
        self.n = n
        self.order = p ** n
        if budget is not None and self.order > budget:
            raise BudgetError(self.order, budget, what=f"field F_{p}^{n}")
        self.modulus = irreducible_polynomial(p, n)
        self.zero = 0
        self.one = 1
        self._pp = [p ** i for i in range(n)]
        self._log = None
        self._exp = None
        self._gen = None

    # -- packing ---------------------------------------------------------

    def pack(self, digits):
        return sum(int(c) % self.p * w for c, w in zip(digits, self._pp))

    def unpack(self, a):
        p = self.p
        out = []
        for _ in range(self.n):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def from_int(self, c):
        """Embed an integer through the prime field."""
        return c % self.p

    def elements(self):
        return range(self.order)

    # -- arithmetic ------------------------------------------------------

    def add(self, a, b):
        p = self.p
        out = 0
        for w in self._pp:
            da, db = (a // w) % p, (b // w) % p
            out += ((da + db) % p) * w
        return out

    def neg(self, a):
        p = self.p
        out = 0
        for w in self._pp:
            d = (a // w) % p
            out += ((-d) % p) * w
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        r = _poly_mulmod(self.unpack(a), self.unpack(b), list(self.modulus), self.p)
        return self.pack(r + [0] * (self.n - len(r)))

    def pow(self, a, e):
        if a == 0:
            return 0 if e else 1
        e %= self.order - 1
        if self._log is not None:
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        r = _poly_powmod(self.unpack(a), e, list(self.modulus), self.p)
        return self.pack(r + [0] * (self.n - len(r)))

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in finite field")
        return self.pow(a, self.order - 2)

    def frobenius(self, a, e=1):
        """p^e-power Frobenius."""
        return self.pow(a, self.p ** e)

    def is_square(self, a):
        if self.p == 2:
            return True
        if a == 0:
            return True
        return self.pow(a, (self.order - 1) // 2) == 1

    def sqrt(self, a):
        """Some square root, or None.  Brute over the field (small fields)."""
        if a == 0:
            return 0
        if not self.is_square(a):
            return None
        for y in range(1, self.order):
            if self.mul(y, y) == a:
                return y
        return None  # pragma: no cover

    # -- tables ----------------------------------------------------------

    def _build_tables(self):
        if self._log is not None:
            return
        if self.order > _TABLE_LIMIT:
            raise BudgetError(self.order, _TABLE_LIMIT, what="discrete log table")
        q1 = self.order - 1
        gen = None
        fac = _prime_factors(q1)
        for g in range(2, self.order):
            if all(self.pow(g, q1 // ell) != 1 for ell in fac):
                gen = g
                break
        if gen is None:  # order 2
            gen = 1
        self._gen = gen
        exp = [1] * q1
        cur = 1
        for k in range(1, q1):
            cur = self._mul_notable(cur, gen)
            exp[k] = cur
        log = [0] * self.order
        for k, v in enumerate(exp):
            log[v] = k
        self._exp = exp
        self._log = log

    def _mul_notable(self, a, b):
        r = _poly_mulmod(self.unpack(a), self.unpack(b), list(self.modulus), self.p)
        return self.pack(r + [0] * (self.n - len(r)))

    @property
    def generator(self):
        self._build_tables()
        return self._gen

    def log(self, a):
        self._build_tables()
        if a == 0:
            raise ZeroDivisionError("log of 0")
        return self._log[a]

    # -- degree / orbits -------------------------------------------------

    def degree_over(self, a, f=1):
        """Degree of a over the subfield F_{p^f} (f must divide n)."""
        assert self.n % f == 0
        d = 1
        b = self.frobenius(a, f)
        while b != a:
            b = self.frobenius(b, f)
            d += 1
        return d

    def frobenius_orbit(self, a, f=1):
        orbit = [a]
        b = self.frobenius(a, f)
        while b != a:
            orbit.append(b)
            b = self.frobenius(b, f)
        return orbit

    # -- vectorised helpers ----------------------------------------------

    def _digit_matrix(self):
        """All field elements as an (order, n) digit matrix (int64)."""
        vals = np.arange(self.order, dtype=np.int64)
        digs = np.empty((self.order, self.n), dtype=np.int64)
        for i in range(self.n):
            vals, digs[:, i] = np.divmod(vals, self.p)
        return digs

    def batch_sub_scalar(self, packed_all, b):
        """packed_all - b for a numpy array of packed elements."""
        p = self.p
        nb = self.unpack(self.neg(b))
        vals = packed_all.astype(np.int64).copy()
        out = np.zeros_like(vals)
        for i, w in enumerate(self._pp):
            vals, d = np.divmod(vals, p)
            out += ((d + nb[i]) % p) * w
        return out

    def character_table(self):
        """Quadratic character chi as an int8 array over packed index.

        chi(0) = 0, chi(square) = 1, chi(nonsquare) = -1.  Odd p only.
        """
        if self.p == 2:
            raise ValueError("quadratic character needs odd characteristic")
        self._build_tables()
        tab = np.empty(self.order, dtype=np.int8)
        tab[0] = 0
        exp = np.asarray(self._exp, dtype=np.int64)
        signs = np.where(np.arange(self.order - 1) % 2 == 0, 1, -1).astype(np.int8)
        tab[exp] = signs
        return tab

    def _np_tables(self):
        self._build_tables()
        if not hasattr(self, "_np_exp"):
            self._np_exp = np.asarray(self._exp, dtype=np.int64)
            self._np_log = np.asarray(self._log, dtype=np.int64)
        return self._np_exp, self._np_log

    def batch_mul(self, A, B):
        """Elementwise product of two packed arrays."""
        exp, log = self._np_tables()
        out = np.zeros_like(A)
        mask = (A != 0) & (B != 0)
        out[mask] = exp[(log[A[mask]] + log[B[mask]]) % (self.order - 1)]
        return out

    def batch_frobenius(self, A, e=1):
        """Elementwise p^e-power of a packed array."""
        exp, log = self._np_tables()
        out = np.zeros_like(A)
        mask = A != 0
        out[mask] = exp[(log[A[mask]] * pow(self.p, e, self.order - 1)) % (self.order - 1)]
        return out
