"""Integer and p-adic linear algebra on small dense matrices (lists of lists)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


def vp(x, p: int) -> int:
    """p-adic valuation of an integer or Fraction; 0 has valuation +infinity (10**9)."""
    if isinstance(x, Fraction):
        if x == 0:
            return 10 ** 9
        return vp(x.numerator, p) - vp(x.denominator, p)
    if x == 0:
        return 10 ** 9
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank over F_p."""
    A = [[x % p for x in r] for r in rows]
    if not A:
        return 0
    ncols = len(A[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [(x * inv) % p for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[rank])]
        rank += 1
        if rank == len(A):
            break
    return rank


def padic_invariants(rows: Sequence[Sequence[int]], p: int, cap: int) -> list[int]:
    """Valuations of the nonzero Smith invariants of ``rows`` over Z/p^cap.

    Invariants that vanish mod p^cap are omitted, so the list length is the
    rank of the matrix over Z/p^cap.
    """
    mod = p ** cap
    A = [[x % mod for x in r] for r in rows]
    n = len(A)
    out = []
    r = 0
    while r < n:
        best = None
        for i in range(r, n):
            for j, x in enumerate(A[i]):
                if x:
                    v = vp(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        A[r], A[i] = A[i], A[r]
        pv = p ** v
        uinv = pow(A[r][j] // pv, -1, mod)
        pivot_row = A[r]
        for k in range(n):
            if k != r and A[k][j]:
                f = (A[k][j] // pv) * uinv % mod
                A[k] = [(a - f * b) % mod for a, b in zip(A[k], pivot_row)]
        # the pivot has minimal valuation, so column operations clear the rest of its row
        out.append(v)
        A[r] = [0] * len(pivot_row)
        r += 1
    return out


def solution_index(rows: Sequence[Sequence[int]], p: int, cap: int) -> int:
    """log_p of the index in (Z/p^cap)^n of {g : g . rows == 0 mod p^cap}, n = len(rows)."""
    return sum(cap - min(cap, v) for v in padic_invariants(rows, p, cap))


def hnf_from_generators(gens: Sequence[Sequence[int]], n: int, modulus: int) -> Matrix:
    """Row-style upper-triangular HNF of the lattice spanned by gens and modulus*Z^n.

    Off-diagonal entries in column j are reduced modulo the pivot of column j.
    """
    rows = [[x % modulus for x in g] for g in gens]
    H: Matrix = []
    for c in range(n):
        # modulus * e_c lies in the lattice, which also justifies reducing rows mod modulus
        active = [r for r in rows if r[c]] + [[modulus if j == c else 0 for j in range(n)]]
        rows = [r for r in rows if not r[c]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[c]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[c] // piv[c]
                rr = [a - q * b for a, b in zip(r, piv)]
                if rr[c]:
                    nxt.append(rr)
                else:
                    rows.append(rr)
            active = nxt
        piv = active[0]
        if piv[c] < 0:
            piv = [-x for x in piv]
        H.append(piv)
        rows = [[x % modulus for x in r] for r in rows if any(x % modulus for x in r)]
    for c in range(n):
        h = H[c][c]
        for i in range(c):
            q = H[i][c] // h
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[c])]
    return H


def in_row_lattice(H: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership of v in the row span of an upper-triangular HNF H."""
    v = list(v)
    for i, row in enumerate(H):
        if v[i] % row[i]:
            return False
        q = v[i] // row[i]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


def upper_inverse(H: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Inverse of an invertible upper-triangular integer matrix."""
    n = len(H)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for c in range(n):
        x = [Fraction(0)] * n
        for i in reversed(range(n)):
            s = Fraction(1 if i == c else 0) - sum(H[i][k] * x[k] for k in range(i + 1, n))
            x[i] = s / H[i][i]
        for i in range(n):
            inv[i][c] = x[i]
    return inv


def matrix_inverse(B: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Inverse of an invertible square integer matrix by Gauss-Jordan over Q."""
    n = len(B)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(B)]
    for c in range(n):
        piv = next(i for i in range(c, n) if A[i][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        f = A[c][c]
        A[c] = [x / f for x in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                g = A[i][c]
                A[i] = [x - g * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]


def scaled_inverse(B: Sequence[Sequence[int]], p: int) -> tuple[int, Matrix]:
    """(e, Q) with Q = p^e B^{-1} integral and e minimal (B of p-power determinant).

    A row vector v lies in the row span of B iff v Q == 0 mod p^e.
    """
    triangular = all(B[i][j] == 0 for i in range(len(B)) for j in range(i))
    inv = upper_inverse(B) if triangular else matrix_inverse(B)
    e = max([0] + [-vp(x, p) for row in inv for x in row if x])
    scale = p ** e
    Q = []
    for row in inv:
        qrow = []
        for x in row:
            y = x * scale
            if y.denominator != 1:
                raise ValueError("determinant is not a power of p")
            qrow.append(int(y))
        Q.append(qrow)
    return e, Q


def int_det(B: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    A = [list(r) for r in B]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def smith_exponents(B: Sequence[Sequence[int]], p: int) -> list[int]:
    """p-adic Smith exponents of a square integer matrix with nonzero determinant, descending."""
    total = vp(int_det(B), p)
    vals = padic_invariants(B, p, total + 1)
    if len(vals) != len(B):
        raise ValueError("matrix is singular")
    return sorted(vals, reverse=True)
