"""Small dense linear algebra over an arbitrary commutative coefficient ring.

Matrices are tuples of tuples of ring elements.  A "ring" here is any
object exposing

    ring.zero, ring.one        -- constants
    ring.is_unit(x) -> bool
    ring.inv(x)     -> element (unit x only)

while the elements themselves implement ``+``, ``-``, ``*``, unary ``-``
and ``==``.  That covers plain integers, truncated Witt elements and
truncated power series alike.

The characteristic polynomial uses the Berkowitz algorithm, which is
division free and therefore exact over rings with zero divisors.
"""

from .errors import PrecisionError


def mat(rows):
    return tuple(tuple(r) for r in rows)


def identity(n, ring):
    return mat(
        [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    )


def zeros(n, m, ring):
    return mat([[ring.zero] * m for _ in range(n)])


def mat_add(A, B):
    return mat([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)])


def mat_sub(A, B):
    return mat([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)])


def mat_mul(A, B, ring):
    n, k, m = len(A), len(B), len(B[0])
    Bt = list(zip(*B))
    out = []
    for i in range(n):
        row = []
        Ai = A[i]
        for j in range(m):
            s = ring.zero
            Bj = Bt[j]
            for t in range(k):
                s = s + Ai[t] * Bj[t]
            row.append(s)
        out.append(row)
    return mat(out)


def mat_scale(A, c):
    return mat([[c * a for a in row] for row in A])


def mat_vec(A, v, ring):
    out = []
    for row in A:
        s = ring.zero
        for a, x in zip(row, v):
            s = s + a * x
        out.append(s)
    return out


def transpose(A):
    return mat(zip(*A))


def dot(u, v, ring):
    s = ring.zero
    for a, b in zip(u, v):
        s = s + a * b
    return s


def charpoly(A, ring):
    """Coefficients [1, c_1, ..., c_n] of det(tI - A) = t^n + c_1 t^{n-1} + ... + c_n.

    Berkowitz's algorithm: division free, O(n^4) ring operations.
    """
    n = len(A)
    if n == 0:
        return [ring.one]
    v = [ring.one, -A[0][0]]
    for r in range(2, n + 1):
        a = A[r - 1][r - 1]
        R = [A[r - 1][j] for j in range(r - 1)]
        S = [A[i][r - 1] for i in range(r - 1)]
        M = [[A[i][j] for j in range(r - 1)] for i in range(r - 1)]
        t = [ring.one, -a]
        vec = S
        for _ in range(2, r + 1):
            t.append(-dot(R, vec, ring))
            vec = mat_vec(M, vec, ring)
        new = []
        for i in range(r + 1):
            s = ring.zero
            for j in range(max(0, i - (len(t) - 1)), min(i, r - 1) + 1):
                s = s + t[i - j] * v[j]
            new.append(s)
        v = new
    return v


def det(A, ring):
    cp = charpoly(A, ring)
    n = len(A)
    d = cp[-1]
    return d if n % 2 == 0 else -d


def inverse(A, ring):
    """Inverse over a local ring by Gauss-Jordan with unit pivots.

    Raises PrecisionError when no unit pivot can be found (the matrix is
    not invertible over the ring at the working precision).
    """
    n = len(A)
    work = [list(row) for row in A]
    inv = [list(row) for row in identity(n, ring)]
    for col in range(n):
        piv = None
        for row in range(col, n):
            if ring.is_unit(work[row][col]):
                piv = row
                break
        if piv is None:
            raise PrecisionError("matrix has no unit pivot; not invertible over the ring")
        work[col], work[piv] = work[piv], work[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        c = ring.inv(work[col][col])
        work[col] = [c * x for x in work[col]]
        inv[col] = [c * x for x in inv[col]]
        for row in range(n):
            if row == col:
                continue
            factor = work[row][col]
            if factor == ring.zero:
                continue
            work[row] = [x - factor * y for x, y in zip(work[row], work[col])]
            inv[row] = [x - factor * y for x, y in zip(inv[row], inv[col])]
    return mat(inv)


def unit_echelon(cols, nrows, ring):
    """Canonical unit-pivot column echelon form of a column span.

    ``cols`` is a list of length-``nrows`` column vectors.  Returns
    ``(pivot_rows, basis, residual)`` where ``basis`` are fully reduced
    columns carrying the identity on ``pivot_rows`` (the canonical basis
    of the largest free direct summand of the span that projects onto
    unit coordinates), and ``residual`` are the remaining columns after
    reduction (all with non-unit entries only).  The span equals the span
    of ``basis`` exactly when every residual column is zero.

    Pivot rows are chosen greedily smallest-first, so the output is a
    canonical invariant of the span itself.
    """
    work = [list(c) for c in cols]
    pivots = []
    basis = []
    for row in range(nrows):
        hit = None
        for idx, c in enumerate(work):
            if ring.is_unit(c[row]):
                hit = idx
                break
        if hit is None:
            continue
        col = work.pop(hit)
        cinv = ring.inv(col[row])
        col = [cinv * x for x in col]
        for other in (basis, work):
            for j, c in enumerate(other):
                factor = c[row]
                if factor == ring.zero:
                    continue
                other[j] = [x - factor * y for x, y in zip(c, col)]
        pivots.append(row)
        basis.append(col)
    residual = [c for c in work if any(x != ring.zero for x in c)]
    return pivots, [tuple(c) for c in basis], [tuple(c) for c in residual]
