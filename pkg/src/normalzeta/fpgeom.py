"""Finite-field geometry of the Pfaffian hypersurface.

Points of P^{d'-1}(F_p) are stored as normalized tuples (first nonzero entry 1);
linear subspaces as reduced row-echelon bases.  Rows of an RREF basis combined
with a normalized coefficient vector give a normalized point again, which makes
plane containment a set-membership test.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import guards
from .intlinalg import rank_mod_p
from .polyring import IntPoly, gaussian_binomial
from .presentation import GroupPresentation, PfaffianPoly, cached_pfaffian, evaluate_relation_matrix

log = logging.getLogger(__name__)


class NeedsComponentData(RuntimeError):
    """Fano class dimensions cannot be determined without user-supplied data."""

    def __init__(self, message: str, levels: Sequence[int] = ()):
        self.levels = list(levels)
        super().__init__(message)


@dataclass(frozen=True)
class PlaneRep:
    """A k-dimensional subspace of F_p^{d'} as its RREF basis."""

    p: int
    k: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.rows)

    def points(self) -> Iterator[tuple[int, ...]]:
        """Normalized projective points of the plane."""
        n = len(self.rows[0])
        for lam in projective_points(self.k, self.p):
            yield tuple(sum(l * r[j] for l, r in zip(lam, self.rows)) % self.p for j in range(n))


@dataclass
class FanoClassSummary:
    """Planes of projective dimension i-1 on the Pfaffian sharing (corank, dimension)."""

    i: int
    corank: int
    dimension: int
    dprime: int
    counts: dict[int, int]
    delta: int
    count_poly: IntPoly | None = None
    source: str = "inferred"
    notes: list[str] = field(default_factory=list)

    @property
    def grassmannian_dimension(self) -> int:
        return self.i * (self.dprime - self.i)

    @property
    def codimension(self) -> int:
        return self.grassmannian_dimension - self.dimension

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.i, self.corank, self.dimension)

    def count_at(self, p: int) -> int:
        if p in self.counts:
            return self.counts[p]
        if self.count_poly is not None:
            return self.count_poly.evaluate({"p": p})
        raise NeedsComponentData(f"no point count for level {self.i} at p={p}", [self.i])


# ---------------------------------------------------------------------------
# points


def projective_points(n: int, p: int) -> Iterator[tuple[int, ...]]:
    """Normalized representatives of P^{n-1}(F_p)."""
    for lead in range(n):
        for tail in itertools.product(range(p), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


def _point_array(n: int, p: int) -> np.ndarray:
    blocks = []
    for lead in range(n):
        m = n - lead - 1
        tail = np.indices((p,) * m, dtype=np.int64).reshape(m, p ** m).T
        block = np.zeros((tail.shape[0], n), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = tail
        blocks.append(block)
    return np.concatenate(blocks)


def _eval_mod(poly: IntPoly, pts: np.ndarray, p: int, names: Sequence[str]) -> np.ndarray:
    col = {v: i for i, v in enumerate(names)}
    out = np.zeros(pts.shape[0], dtype=np.int64)
    for mono, c in poly.items():
        term = np.full(pts.shape[0], c % p, dtype=np.int64)
        for v, e in mono:
            term = term * np.remainder(pts[:, col[v]] ** e, p) % p
        out = (out + term) % p
    return out


def _y_names(dprime: int) -> list[str]:
    return [f"y{l + 1}" for l in range(dprime)]


def hypersurface_points(pf: PfaffianPoly, p: int, force: bool = False) -> set[tuple[int, ...]]:
    n = pf.dprime
    guards.ensure((p ** n - 1) // (p - 1), "points", force, "projective points")
    pts = _point_array(n, p)
    vals = _eval_mod(pf.poly, pts, p, _y_names(n))
    return {tuple(int(x) for x in row) for row in pts[vals == 0]}


def count_hypersurface_points(pf: PfaffianPoly, p: int, force: bool = False) -> int:
    """Number of F_p-points of the projective hypersurface pf = 0."""
    return len(hypersurface_points(pf, p, force))


# ---------------------------------------------------------------------------
# planes


def enumerate_planes(k: int, dprime: int, p: int, force: bool = False) -> Iterator[PlaneRep]:
    """Every k-dimensional subspace of F_p^{dprime} once, by pivot pattern."""
    if not 1 <= k <= dprime:
        raise ValueError(f"need 1 <= k <= dprime, got k={k}, dprime={dprime}")
    guards.ensure(gaussian_binomial(dprime, k).evaluate({"p": p}), "planes", force,
                  f"{k}-planes in F_{p}^{dprime}")
    for pivots in itertools.combinations(range(dprime), k):
        free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, dprime) if c not in pivots]
        for vals in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * dprime for _ in range(k)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            yield PlaneRep(p, k, tuple(tuple(r) for r in rows))


def plane_on_hypersurface(plane: PlaneRep, pf: PfaffianPoly) -> bool:
    """True iff pf vanishes at every F_p-point of the plane."""
    names = _y_names(pf.dprime)
    for pt in plane.points():
        if pf.poly.evaluate(dict(zip(names, pt))) % plane.p:
            return False
    return True


def planes_on_hypersurface(pf: PfaffianPoly, k: int, p: int, force: bool = False) -> Iterator[PlaneRep]:
    on = hypersurface_points(pf, p, force)
    for plane in enumerate_planes(k, pf.dprime, p, force):
        if any(r not in on for r in plane.rows):
            continue
        if all(pt in on for pt in plane.points()):
            yield plane


def count_fano(k: int, pf: PfaffianPoly, p: int, force: bool = False) -> int:
    """Number of (k-1)-planes (projective) contained in the hypersurface."""
    return sum(1 for _ in planes_on_hypersurface(pf, k, p, force))


def corank_of_plane(pres: GroupPresentation, plane: PlaneRep) -> int:
    """d minus the F_p-rank of the augmented matrix (M(v_1) | ... | M(v_k))."""
    blocks = [evaluate_relation_matrix(pres, v, plane.p) for v in plane.rows]
    aug = [sum((b[i] for b in blocks), []) for i in range(pres.d)]
    return pres.d - rank_mod_p(aug, plane.p)


def expected_fano_dimension(d: int, dprime: int, i: int) -> int | None:
    """Generic dimension of the Fano variety of (i-1)-planes; None if not applicable.

    For i = 1 this is the hypersurface itself, of dimension d'-2.  For i >= 2
    the generic count needs d/2 >= 3.
    """
    if i < 1:
        raise ValueError("i must be positive")
    if i == 1:
        return dprime - 2
    if d // 2 < 3:
        return None
    return i * (dprime - i) - comb(d // 2 + i - 1, i - 1)


# ---------------------------------------------------------------------------
# classification


def fit_integer_polynomial(counts: Mapping[int, int], degree: int) -> IntPoly | None:
    """Integer polynomial of exact degree ``degree`` through all (p, count), if one exists."""
    pts = sorted(counts.items())
    if len(pts) < degree + 1 or degree < 0:
        return None
    xs = [Fraction(x) for x, _ in pts[:degree + 1]]
    ys = [Fraction(y) for _, y in pts[:degree + 1]]
    # Newton divided differences, then expand
    coef = list(ys)
    for j in range(1, len(xs)):
        for i in range(len(xs) - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * (len(xs))
    basis = [Fraction(1)]
    for j, c in enumerate(coef):
        for k, b in enumerate(basis):
            poly[k] += c * b
        nxt = [Fraction(0)] * (len(basis) + 1)
        for k, b in enumerate(basis):
            nxt[k + 1] += b
            nxt[k] -= xs[j] * b
        basis = nxt
    if any(c.denominator != 1 for c in poly):
        return None
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    if len(poly) - 1 != degree:
        return None
    out = IntPoly()
    for k, c in enumerate(poly):
        if c:
            out = out + IntPoly.monomial(int(c), p=k)
    if any(out.evaluate({"p": x}) != y for x, y in pts):
        return None
    return out


def infer_dimension(counts: Mapping[int, int]) -> tuple[int, IntPoly | None]:
    """Dimension from point counts at three or more primes.

    A polynomial fit of minimal degree that is over-determined (at least one
    prime to spare) decides; otherwise round(log_p count) must agree by strict
    majority.
    """
    if len(counts) < 3:
        raise NeedsComponentData("dimension inference needs counts at three or more primes")
    for deg in range(0, len(counts) - 1):
        poly = fit_integer_polynomial(counts, deg)
        if poly is not None:
            return deg, poly
    votes = [round(math.log(c, p)) if c > 0 else -1 for p, c in counts.items()]
    best = max(set(votes), key=votes.count)
    if votes.count(best) * 2 <= len(votes):
        raise NeedsComponentData(f"inconsistent dimension estimates {sorted(votes)} across primes")
    return best, fit_integer_polynomial(counts, best)


def plane_coranks(pres: GroupPresentation, i: int, p: int, force: bool = False) -> dict[int, int]:
    """{corank: number of (i-1)-planes on the Pfaffian with that corank} at p."""
    pf = cached_pfaffian(pres)
    out: dict[int, int] = {}
    for plane in planes_on_hypersurface(pf, i, p, force):
        c = corank_of_plane(pres, plane)
        out[c] = out.get(c, 0) + 1
    return out


@dataclass(frozen=True)
class SuppliedComponent:
    i: int
    corank: int
    dimension: int
    counts: dict


def parse_supplied(text: str) -> list[SuppliedComponent]:
    """Lines ``i corank dimension count@p ...``; ``#`` starts a comment."""
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        i, corank, dim = (int(x) for x in line[:3])
        counts = {}
        for tok in line[3:]:
            n, p = tok.split("@")
            counts[int(p)] = int(n)
        out.append(SuppliedComponent(i, corank, dim, counts))
    return out


def classify_fano(pres: GroupPresentation, i: int, primes: Sequence[int],
                  supplied: Sequence[SuppliedComponent] | None = None,
                  force: bool = False) -> list[FanoClassSummary]:
    """Partition the (i-1)-planes on the Pfaffian by corank and attach dimensions."""
    primes = list(primes)
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    per_prime = {p: plane_coranks(pres, i, p, force) for p in primes}
    coranks = sorted({c for cs in per_prime.values() for c in cs})
    supplied = [s for s in (supplied or []) if s.i == i]
    out = []
    for c in coranks:
        counts = {p: per_prime[p].get(c, 0) for p in primes}
        mine = [s for s in supplied if s.corank == c]
        if mine:
            total = {}
            for s in mine:
                for p, n in s.counts.items():
                    total[p] = total.get(p, 0) + n
            for p, n in total.items():
                if p in counts and counts[p] != n:
                    log.warning("level %d corank %d: supplied counts %s disagree with enumeration %s",
                                i, c, total, counts)
            for s in mine:
                cc = dict(s.counts) if s.counts else (counts if len(mine) == 1 else {})
                out.append(_summary(pres, i, c, s.dimension, cc, "supplied"))
            continue
        out.append(_classify_one(pres, i, c, counts))
    for s in supplied:
        if s.corank not in coranks:
            out.append(_summary(pres, i, s.corank, s.dimension, dict(s.counts), "supplied"))
    return out


def _summary(pres, i, corank, dim, counts, source, notes=None) -> FanoClassSummary:
    poly = fit_integer_polynomial(counts, dim) if len(counts) >= 3 else None
    return FanoClassSummary(i, corank, dim, pres.dprime, dict(counts), 0 if corank == 0 else 1,
                            poly, source, list(notes or []))


def _classify_one(pres, i, corank, counts) -> FanoClassSummary:
    notes = []
    if i == 1 and corank > 2:
        notes.append(f"singular points of corank {corank} found")
        log.warning("Pfaffian has singular F_p-points (corank %d)", corank)
    expected = expected_fano_dimension(pres.d, pres.dprime, i)
    main = (i == 1 and corank == 2) or (i > 1 and corank == 1)
    if main and expected is not None and expected >= 0:
        dim = expected
        try:
            inferred, _ = infer_dimension(counts)
            if inferred != expected:
                notes.append(f"point counts suggest dimension {inferred}, generic value {expected} used")
        except NeedsComponentData:
            pass
        return _summary(pres, i, corank, dim, counts, "expected", notes)
    try:
        dim, _ = infer_dimension(counts)
    except NeedsComponentData as exc:
        raise NeedsComponentData(f"level {i}, corank {corank}: {exc}; supply component data", [i])
    return _summary(pres, i, corank, dim, counts, "inferred", notes)


def fano_data(pres: GroupPresentation, primes: Sequence[int],
              supplied: Sequence[SuppliedComponent] | None = None,
              force: bool = False) -> dict[int, list[FanoClassSummary]]:
    """Classes for every level 1..d'-1."""
    return {i: classify_fano(pres, i, primes, supplied, force) for i in range(1, pres.dprime)}


def fano_report_rows(data: Mapping[int, Sequence[FanoClassSummary]]) -> list[dict]:
    rows = []
    for i in sorted(data):
        for cls in data[i]:
            for p in sorted(cls.counts):
                rows.append({"prime": p, "i": i, "corank": cls.corank,
                             "count": cls.counts[p], "inferred_dimension": cls.dimension})
    return rows


def fano_table(pres: GroupPresentation, levels: Sequence[int], primes: Sequence[int],
               force: bool = False) -> list[dict]:
    """Per-prime counts by (level, corank); dimension left as None when it cannot be inferred."""
    rows = []
    for i in levels:
        per_prime = {p: plane_coranks(pres, i, p, force) for p in primes}
        for c in sorted({c for cs in per_prime.values() for c in cs}):
            counts = {p: per_prime[p].get(c, 0) for p in primes}
            try:
                dim = _classify_one(pres, i, c, counts).dimension
            except NeedsComponentData:
                dim = None
            for p in primes:
                rows.append({"prime": p, "i": i, "corank": c, "count": counts[p], "inferred_dimension": dim})
    return rows
