"""Brute-force counters of ideals of finite index in the Lie ring of a presentation.

Two independent routes at a fixed prime:

* the lattice oracle sums over maximal sublattices of the derived part and
  measures the centralizer index by Smith normal form, then multiplies by the
  abelian and homothety prefactor series;
* the direct oracle enumerates sublattices of the whole ring (or of its two
  layers) and checks the ideal condition on basis brackets.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import prod
from typing import Iterator, Sequence

from . import guards
from .intlinalg import (Matrix, hnf_from_generators, in_row_lattice, padic_invariants,
                        rank_mod_p, scaled_inverse, smith_exponents)
from .polyring import flag_count
from .presentation import GroupPresentation
from .fpgeom import projective_points

log = logging.getLogger(__name__)

Tensor = list[list[list[int]]]


@dataclass(frozen=True)
class SublatticeHNF:
    """Row-style upper-triangular Hermite normal form of a full sublattice of Z^n."""

    n: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return prod(self.basis[i][i] for i in range(self.n))

    def diagonal_exponents(self, p: int) -> list[int]:
        out = []
        for i in range(self.n):
            h, e = self.basis[i][i], 0
            while h % p == 0:
                h //= p
                e += 1
            out.append(e)
        return out

    def contains(self, v: Sequence[int]) -> bool:
        return in_row_lattice(self.basis, v)


@dataclass(frozen=True)
class TypeData:
    """Elementary divisor type: levels I, gaps r_i and the homothety exponent."""

    I: tuple[int, ...]
    r: tuple[int, ...]
    scale: int = 0

    @property
    def maximal(self) -> bool:
        return self.scale == 0


# ---------------------------------------------------------------------------
# sublattice enumeration


def hnf_count(diag: Sequence[int], p: int) -> int:
    """Number of HNFs with the given diagonal exponents."""
    return prod(p ** (j * a) for j, a in enumerate(diag))


def hnfs_with_diagonal(n: int, p: int, diag: Sequence[int]) -> Iterator[Matrix]:
    h = [p ** a for a in diag]
    slots = [(i, j) for j in range(n) for i in range(j)]
    for vals in itertools.product(*(range(h[j]) for _, j in slots)):
        M = [[0] * n for _ in range(n)]
        for i in range(n):
            M[i][i] = h[i]
        for (i, j), v in zip(slots, vals):
            M[i][j] = v
        yield M


def compositions(total: int, parts: int, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    cap = total if cap is None else cap
    if parts == 0:
        if total == 0:
            yield ()
        return
    for a in range(min(total, cap) + 1):
        for rest in compositions(total - a, parts - 1, cap):
            yield (a,) + rest


def enumerate_sublattices(n: int, p: int, j: int, force: bool = False) -> Iterator[SublatticeHNF]:
    """Every sublattice of Z^n of index p^j exactly once."""
    if j < 0:
        raise ValueError("j must be non-negative")
    guards.ensure(p ** (j * (n - 1)), "lattices", force, f"index-{p}^{j} sublattices of Z^{n}")
    for diag in compositions(j, n):
        for M in hnfs_with_diagonal(n, p, diag):
            yield SublatticeHNF(n, tuple(tuple(r) for r in M))


def type_from_exponents(exps: Sequence[int]) -> TypeData:
    """Type of a lattice with Smith exponents ``exps`` (any order)."""
    s = sorted(exps, reverse=True)
    n = len(s)
    scale = s[-1]
    I, r = [], []
    for i in range(1, n):
        gap = s[i - 1] - s[i]
        if gap:
            I.append(i)
            r.append(gap)
    return TypeData(tuple(I), tuple(r), scale)


def elementary_divisor_type(L: SublatticeHNF | Sequence[Sequence[int]], p: int) -> TypeData:
    basis = L.basis if isinstance(L, SublatticeHNF) else L
    return type_from_exponents(smith_exponents([list(r) for r in basis], p))


# ---------------------------------------------------------------------------
# centralizer index


def bracket_tensor(pres: GroupPresentation) -> Tensor:
    """C[i][j]: coefficient vector of [x_{i+1}, x_{j+1}] in the y basis."""
    return [[list(f.coeffs) for f in row] for row in pres.M]


def centralizer_index(pres: GroupPresentation | Tensor, L: SublatticeHNF | Sequence[Sequence[int]],
                      p: int, cap: int | None = None) -> int:
    """log_p |Z^d : {g : [g, x_j] in L for all j}| for a sublattice L of the derived part."""
    C = bracket_tensor(pres) if isinstance(pres, GroupPresentation) else pres
    basis = [list(r) for r in (L.basis if isinstance(L, SublatticeHNF) else L)]
    e, Q = scaled_inverse(basis, p)
    if cap is not None and cap < e:
        raise ValueError(f"cap {cap} below the exponent {e} of the lattice")
    return _wprime(C, len(basis), Q, e, p)


def _wprime(C: Tensor, dp: int, Q: Matrix, e: int, p: int) -> int:
    if e == 0:
        return 0
    d = len(C)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            v = C[i][j]
            for l in range(dp):
                row.append(sum(v[k] * Q[k][l] for k in range(dp)))
        rows.append(row)
    return sum(e - min(e, v) for v in padic_invariants(rows, p, e))


def min_form_rank(pres: GroupPresentation, p: int) -> int:
    """Smallest F_p-rank of M(phi) over nonzero phi in F_p^{d'}."""
    C = bracket_tensor(pres)
    best = pres.d
    for phi in projective_points(pres.dprime, p):
        M = [[sum(c * f for c, f in zip(C[i][j], phi)) for j in range(pres.d)] for i in range(pres.d)]
        best = min(best, rank_mod_p(M, p))
    return best


def bad_prime_reasons(pres: GroupPresentation, p: int) -> list[str]:
    """Degeneracies of the presentation mod p that break the layer decomposition."""
    C = bracket_tensor(pres)
    reasons = []
    stacked = [sum(([C[i][j][l] for j in range(pres.d)] for l in range(pres.dprime)), [])
               for i in range(pres.d)]
    if rank_mod_p(stacked, p) < pres.d:
        reasons.append("centre of the ring mod p is larger than the derived and abelian parts")
    span = [[C[i][j][l] for l in range(pres.dprime)] for i in range(pres.d) for j in range(i + 1, pres.d)]
    if rank_mod_p(span, p) < pres.dprime:
        reasons.append("brackets do not span the derived part mod p")
    return reasons


# ---------------------------------------------------------------------------
# lattice oracle


def _profile_task(args) -> list[int]:
    C, d, dp, m, p, K, diag = args
    out = [0] * (K + 1)
    w = sum(diag)
    for H in hnfs_with_diagonal(dp, p, diag):
        if w and all(x % p == 0 for row in H for x in row):
            continue  # lies in p Z^{d'}, not maximal
        e, Q = scaled_inverse(H, p)
        wp = _wprime(C, dp, Q, e, p)
        if w + wp <= K:
            out[w + wp] += p ** ((d + m) * w)
    return out


def lattice_profiles(dp: int, K: int, rho: int) -> list[tuple[int, ...]]:
    out = []
    for w in range(K + 1):
        cap = (K - w) // rho if rho else w
        out.extend(compositions(w, dp, cap))
    return out


def A_series_lattice(pres: GroupPresentation, p: int, K: int, jobs: int = 1,
                     force: bool = False) -> list[int]:
    """Coefficients of the sum over maximal derived sublattices, up to t^K."""
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    C = bracket_tensor(pres)
    rho = min_form_rank(pres, p)
    profiles = lattice_profiles(pres.dprime, K, rho)
    guards.ensure(sum(hnf_count(dg, p) for dg in profiles), "lattices", force, "lattice oracle")
    tasks = [(C, pres.d, pres.dprime, pres.m, p, K, dg) for dg in profiles]
    A = [0] * (K + 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_profile_task, tasks, chunksize=4))
    else:
        parts = [_profile_task(t) for t in tasks]
    for part in parts:
        A = [a + b for a, b in zip(A, part)]
    return A


def series_mul(a: Sequence[int], b: Sequence[int], K: int) -> list[int]:
    c = [0] * (K + 1)
    for i, x in enumerate(a[:K + 1]):
        if x:
            for j, y in enumerate(b[:K + 1 - i]):
                c[i + j] += x * y
    return c


def geometric_series(a: int, b: int, p: int, K: int) -> list[int]:
    """Coefficients of 1/(1 - p^a t^b)."""
    s = [0] * (K + 1)
    for k in range(K // b + 1):
        s[k * b] = p ** (a * k)
    return s


def prefactor_series(d: int, dprime: int, m: int, p: int, K: int) -> list[int]:
    s = [1] + [0] * K
    for i in range(d + m):
        s = series_mul(s, geometric_series(i, 1, p, K), K)
    return series_mul(s, geometric_series(dprime * (d + m), d + dprime, p, K), K)


def dirichlet_coeffs_lattice(pres: GroupPresentation, p: int, K: int, jobs: int = 1,
                             force: bool = False) -> list[int]:
    """[a_{p^0}, ..., a_{p^K}] of the local normal zeta function."""
    for reason in bad_prime_reasons(pres, p):
        log.warning("p=%d: %s; the layer decomposition may not apply", p, reason)
    A = A_series_lattice(pres, p, K, jobs, force)
    return series_mul(A, prefactor_series(pres.d, pres.dprime, pres.m, p, K), K)


# ---------------------------------------------------------------------------
# direct oracle


def _bracket_vectors(C: Tensor, d: int, m: int, dp: int) -> list[list[list[int]]]:
    """B[j][a] = y-coordinates of [e_j, x_a] for j over x and z generators."""
    out = []
    for j in range(d + m):
        out.append([[-C[a][j][l] if j < d else 0 for l in range(dp)] for a in range(d)])
    return out


def _ideal_condition_exhaustive(C: Tensor, d: int, m: int, dp: int, H: Matrix) -> bool:
    n = d + m + dp
    for row in H:
        for j in range(d):
            br = [0] * n
            for a in range(d):
                if row[a]:
                    for l in range(dp):
                        br[d + m + l] += row[a] * C[j][a][l]
            if any(br) and not in_row_lattice(H, br):
                return False
    return True


def direct_exhaustive(pres: GroupPresentation, p: int, K: int, force: bool = False) -> list[int]:
    """Count ideals by enumerating every HNF of Z^{d+m+d'}; order x, z, y."""
    C = bracket_tensor(pres)
    n = pres.d + pres.m + pres.dprime
    total = sum(hnf_count(dg, p) for k in range(K + 1) for dg in compositions(k, n))
    guards.ensure(total, "lattices", force, "direct oracle (exhaustive)")
    out = []
    for k in range(K + 1):
        cnt = 0
        for diag in compositions(k, n):
            for H in hnfs_with_diagonal(n, p, diag):
                if _ideal_condition_exhaustive(C, pres.d, pres.m, pres.dprime, H):
                    cnt += 1
        out.append(cnt)
    return out


def _row_choices(C: Tensor, d: int, m: int, dp: int, Lp: Matrix, diag: Sequence[int], p: int) -> int:
    """Number of HNFs of Z^{d+m} with this diagonal whose rows all centralize mod Lp."""
    n = d + m
    h = [p ** a for a in diag]
    total = 1
    for i in range(n):
        good = 0
        for tail in itertools.product(*(range(h[j]) for j in range(i + 1, n))):
            row = [0] * i + [h[i]] + list(tail)
            ok = True
            for j in range(d):
                v = [sum(row[a] * C[j][a][l] for a in range(d)) for l in range(dp)]
                if any(v) and not in_row_lattice(Lp, v):
                    ok = False
                    break
            good += ok
        total *= good
        if not total:
            return 0
    return total


def direct_pruned(pres: GroupPresentation, p: int, K: int, force: bool = False) -> list[int]:
    """Count ideals layer by layer: derived part Lambda', then its admissible lifts."""
    C = bracket_tensor(pres)
    d, m, dp = pres.d, pres.m, pres.dprime
    s = span_exponent(C, d, dp, p)
    out = []
    for k in range(K + 1):
        cnt = 0
        for k1 in range(k + 1):
            cap = k - k1 + s
            for diag1 in compositions(k1, dp, cap):
                guards.ensure(hnf_count(diag1, p), "lattices", force, "direct oracle")
                for Lp in hnfs_with_diagonal(dp, p, diag1):
                    lifts = sum(_row_choices(C, d, m, dp, Lp, diag2, p)
                                for diag2 in compositions(k - k1, d + m))
                    cnt += lifts * p ** (k1 * (d + m))
        out.append(cnt)
    return out


def span_exponent(C: Tensor, d: int, dp: int, p: int) -> int:
    """Least s with p^s Z^{d'} inside the p-local span of the basis brackets."""
    gens = [C[i][j] for i in range(d) for j in range(i + 1, d) if any(C[i][j])]
    for N in (4, 8, 16, 32, 64):
        H = hnf_from_generators(gens, dp, p ** N)
        s = max(smith_exponents(H, p))
        if s < N:
            return s
    raise ValueError("brackets do not span a full-rank sublattice of the derived part")


def dirichlet_coeffs_direct(pres: GroupPresentation, p: int, K: int, mode: str = "pruned",
                            force: bool = False) -> list[int]:
    """Independent ideal count; mode 'pruned' (layered) or 'exhaustive' (all HNFs)."""
    if mode == "exhaustive":
        return direct_exhaustive(pres, p, K, force)
    if mode == "pruned":
        return direct_pruned(pres, p, K, force)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# multiplicities by enumeration


def type_exponents(I: Sequence[int], r: Sequence[int], dprime: int) -> list[int]:
    """Descending Smith exponents of a maximal lattice of type (I, r)."""
    gaps = dict(zip(I, r))
    return [sum(g for lvl, g in gaps.items() if lvl >= i) for i in range(1, dprime + 1)]


def coset_lattices(I: Sequence[int], r: Sequence[int], dprime: int, p: int) -> set[tuple]:
    """Distinct lattices u diag(p^e) Z^n with u unitriangular, p | u_{ik}, u_{ik} mod p^{e_i - e_k}.

    These are exactly the lattices of type (I, r) attached to the standard flag.
    """
    e = type_exponents(I, r, dprime)
    n = dprime
    slots = [(i, k) for i in range(n) for k in range(i + 1, n) if e[i] > e[k]]
    ranges = [range(0, p ** (e[i] - e[k]), p) for i, k in slots]
    guards.ensure(prod(len(x) for x in ranges), "lattices", False, "coset enumeration")
    modulus = p ** (e[0] + 1)
    seen = set()
    for vals in itertools.product(*ranges):
        u = [[int(i == k) for k in range(n)] for i in range(n)]
        for (i, k), v in zip(slots, vals):
            u[i][k] = v
        gens = [[p ** e[k] * u[i][k] for i in range(n)] for k in range(n)]
        H = hnf_from_generators(gens, n, modulus)
        seen.add(tuple(tuple(x) for x in H))
    return seen


def coset_lattice_count(I: Sequence[int], r: Sequence[int], dprime: int, p: int) -> int:
    return len(coset_lattices(I, r, dprime, p))


def count_lattices_of_type(I: Sequence[int], r: Sequence[int], dprime: int, p: int,
                           force: bool = False) -> int:
    """Exhaustive count of maximal sublattices of Z^{d'} of type (I, r)."""
    target = TypeData(tuple(I), tuple(r), 0)
    e = type_exponents(I, r, dprime)
    cnt = 0
    for L in enumerate_sublattices(dprime, p, sum(e), force):
        if max(L.diagonal_exponents(p)) > e[0]:
            continue
        if elementary_divisor_type(L, p) == target:
            cnt += 1
    return cnt


def flag_total(I: Sequence[int], dprime: int, p: int) -> int:
    return flag_count(list(I), dprime).evaluate({"p": p})
