"""Assembly of the local normal zeta function from Igusa and exceptional factors.

The closed form is

    zeta = zeta_{Z^{d+m}} * 1/(1 - p^{d'(d+m)} t^{d+d'}) * (W0 + sum n_iota W_iota)

with t = p^{-s}.  An independent route, :func:`generating_function_truncated`,
sums the weight functions over lattice types directly at a fixed prime.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from math import comb
from typing import Mapping, Sequence

from .fpgeom import FanoClassSummary
from .polyring import (ONE, GeomFactor, IntPoly, RationalFn, exceptional_factor, flag_count,
                       gaussian_binomial, igusa_or_one)
from .presentation import GroupPresentation

log = logging.getLogger(__name__)

Y_CONVENTIONS = ("dimension", "codimension")

FanoData = Mapping[int, Sequence[FanoClassSummary]]


class MissingFanoData(RuntimeError):
    """Assembly needs Fano class data (or nesting) that was not provided."""

    def __init__(self, message: str, levels: Sequence[int] = ()):
        self.levels = list(levels)
        super().__init__(message)


# ---------------------------------------------------------------------------
# numerical data


def x_data(i: int, d: int, dprime: int, m: int) -> tuple[int, int]:
    """(a, b) with X_i = p^a t^b."""
    return (i * (d + dprime + m - i), d + i)


def t_shift(i: int) -> int:
    return 2 if i == 1 else 1


def y_data(i: int, cls: FanoClassSummary, d: int, m: int, convention: str = "dimension") -> tuple[int, int]:
    """(a, b) with Y_iota = p^a t^b.

    The default adds the class dimension to the p-exponent; the alternative
    adds the codimension.  Only the former matches lattice counts.
    """
    if convention not in Y_CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    extra = cls.dimension if convention == "dimension" else cls.codimension
    return (i * (d + m) + extra, d + i - t_shift(i))


def grassmannian_dim(i: int, dprime: int) -> int:
    return i * (dprime - i)


@dataclass
class NumericalData:
    d: int
    dprime: int
    m: int
    X: dict[int, tuple[int, int]]
    Y: dict[tuple[int, int, int], tuple[int, int]]
    convention: str = "dimension"

    @classmethod
    def build(cls, d: int, dprime: int, m: int, fano: FanoData, convention: str = "dimension") -> "NumericalData":
        X = {i: x_data(i, d, dprime, m) for i in range(1, dprime)}
        Y = {}
        for i, classes in fano.items():
            for c in classes:
                if c.delta:
                    Y[c.key] = y_data(i, c, d, m, convention)
        return cls(d, dprime, m, X, Y, convention)

    def table(self) -> list[str]:
        rows = [f"X_{i} = p^{a} t^{b}" for i, (a, b) in sorted(self.X.items())]
        for (i, corank, dim), (a, b) in sorted(self.Y.items()):
            rows.append(f"Y[i={i}, corank={corank}, dim={dim}] = p^{a} t^{b}")
        return rows


# ---------------------------------------------------------------------------
# lattice types


def mu_function(a: int, b: int) -> IntPoly:
    """Number of residues mod p^a of exact valuation b (valuation a meaning zero)."""
    if a < 1 or b < 1:
        raise ValueError("mu needs positive arguments")
    if a == b:
        return ONE
    if a > b:
        return IntPoly.monomial(1, p=a - b) - IntPoly.monomial(1, p=a - b - 1)
    return IntPoly()


def mu_value(a: int, b: int, p: int) -> int:
    if a == b:
        return 1
    return p ** (a - b - 1) * (p - 1) if a > b else 0


@dataclass(frozen=True)
class Multiplicity:
    """p-exponent const + sum coeffs[i] * r_i."""

    const: int
    coeffs: dict[int, int]

    def exponent(self, r: Mapping[int, int] | Sequence[int]) -> int:
        rr = r if isinstance(r, Mapping) else dict(zip(sorted(self.coeffs), r))
        return self.const + sum(c * rr[i] for i, c in self.coeffs.items())

    def to_text(self) -> str:
        parts = [str(self.const)] + [f"{c}*r{i}" for i, c in sorted(self.coeffs.items())]
        return "p^(" + " + ".join(parts) + ")"


def flag_variety_dim(I: Sequence[int], dprime: int) -> int:
    blocks = [b - a for a, b in zip((0,) + tuple(I), tuple(I) + (dprime,))]
    return sum(x * y for x, y in itertools.combinations(blocks, 2))


def multiplicity(I: Sequence[int], dprime: int) -> Multiplicity:
    """Lattices of type (I, r) per flag of type I, as an exponent of p affine in r."""
    I = sorted(I)
    if any(not 1 <= i < dprime for i in I):
        raise ValueError(f"levels must lie in 1..{dprime - 1}")
    return Multiplicity(-flag_variety_dim(I, dprime), {i: (dprime - i) * i for i in I})


@dataclass(frozen=True)
class LatticeTypeIndex:
    """Increasing levels; the first ``stars`` of them are starred (flag pieces on the Pfaffian)."""

    levels: tuple[int, ...]
    stars: int = 0

    @property
    def starred(self) -> tuple[int, ...]:
        return self.levels[:self.stars]

    @property
    def unstarred(self) -> tuple[int, ...]:
        return self.levels[self.stars:]

    def label(self) -> str:
        items = [f"{i}*" for i in self.starred] + [str(i) for i in self.unstarred]
        return "{" + ",".join(items) + "}"


def admissible_subsets(dprime: int, star_levels: Sequence[int]) -> list[LatticeTypeIndex]:
    """All admissible index sets; starred levels form an initial segment on Fano levels."""
    star_levels = set(star_levels)
    out = []
    for size in range(dprime):
        for levels in itertools.combinations(range(1, dprime), size):
            out.append(LatticeTypeIndex(levels, 0))
            for k in range(1, size + 1):
                if levels[k - 1] not in star_levels:
                    break
                out.append(LatticeTypeIndex(levels, k))
    return out


def check_admissible(I: LatticeTypeIndex, dprime: int, star_levels: Sequence[int]) -> None:
    if list(I.levels) != sorted(set(I.levels)) or any(not 1 <= i < dprime for i in I.levels):
        raise ValueError(f"{I.label()}: levels must be increasing in 1..{dprime - 1}")
    if not 0 <= I.stars <= len(I.levels) or any(i not in star_levels for i in I.starred):
        raise ValueError(f"{I.label()} is not admissible")


def _shift(U: Sequence[int], by: int) -> list[int]:
    return [u - by for u in U]


def coefficient_c(I: LatticeTypeIndex, counts: Mapping[int, IntPoly | int], dprime: int) -> IntPoly:
    """c_{I,p}: flags of type I whose starred pieces lie on Fano classes, minus overcounts.

    ``counts[i]`` is the total point count of the delta = 1 classes at level i.
    """
    check_admissible(I, dprime, [i for i, n in counts.items() if n])

    def n(i):
        return IntPoly.coerce(counts.get(i, 0))

    S, U = list(I.starred), list(I.unstarred)
    if not S:
        out = flag_count(U, dprime)
        if U:
            u1 = U[0]
            out = out - n(u1) * flag_count(_shift(U[1:], u1), dprime - u1)
        return out
    k, rest = S[-1], S[:-1]
    out = n(k) * flag_count(rest, k) * flag_count(_shift(U, k), dprime - k)
    if U:
        u1 = U[0]
        out = out - (n(u1) * gaussian_binomial(u1, k) * flag_count(rest, k)
                     * flag_count(_shift(U[1:], u1), dprime - u1))
    return out


# ---------------------------------------------------------------------------
# closed-form building blocks


def W0(pres: GroupPresentation) -> RationalFn:
    """Igusa factor over X_1..X_{d'-1} (the empty product 1 when d' = 1)."""
    return igusa_or_one([x_data(i, pres.d, pres.dprime, pres.m) for i in range(1, pres.dprime)])


def A_difference_closed(i: int, d: int, dprime: int, m: int, n_i: int, d_iota: int,
                        convention: str = "dimension") -> RationalFn:
    """Closed form of A_{i*} - A_i: the exceptional factor of one class."""
    cls = FanoClassSummary(i, 1, d_iota, dprime, {}, 1)
    if n_i != grassmannian_dim(i, dprime):
        raise ValueError(f"n_i must be i(d'-i) = {grassmannian_dim(i, dprime)}")
    return exceptional_factor(x_data(i, d, dprime, m), y_data(i, cls, d, m, convention), n_i, d_iota)


def _lower_y(cls: FanoClassSummary, fano: FanoData, data: NumericalData,
             nesting: Mapping | None) -> list[tuple[int, int]]:
    if nesting and cls.key in nesting:
        return [data.Y[k] for k in nesting[cls.key]]
    out = []
    for j in range(cls.i - 1, 0, -1):
        below = [c for c in fano.get(j, []) if c.delta]
        if len(below) != 1:
            raise MissingFanoData(
                f"class {cls.key} needs its nested level-{j} class; found {len(below)} candidates, "
                f"supply a nesting", [j])
        out.append(data.Y[below[0].key])
    return out


def W_component(pres: GroupPresentation, cls: FanoClassSummary, fano: FanoData,
                data: NumericalData | None = None, nesting: Mapping | None = None) -> RationalFn:
    """I(X_{i+1..d'-1}) * E(X_i, Y_iota) * I(Y of the nested lower classes)."""
    if not cls.delta:
        return RationalFn(IntPoly())
    data = data or NumericalData.build(pres.d, pres.dprime, pres.m, fano)
    i = cls.i
    left = igusa_or_one([data.X[j] for j in range(i + 1, pres.dprime)])
    E = exceptional_factor(data.X[i], data.Y[cls.key], grassmannian_dim(i, pres.dprime), cls.dimension)
    right = igusa_or_one(_lower_y(cls, fano, data, nesting))
    return left * E * right


def abelian_prefactor(n: int) -> RationalFn:
    """zeta of Z^n at p: prod_{i<n} 1/(1 - p^i t)."""
    return RationalFn(ONE, [GeomFactor(i, 1) for i in range(n)])


def homothety_prefactor(d: int, dprime: int, m: int) -> RationalFn:
    return RationalFn(ONE, [GeomFactor(dprime * (d + m), d + dprime)])


@dataclass
class ZetaResult:
    pres: GroupPresentation
    zeta: RationalFn
    A: RationalFn
    W0: RationalFn
    W_components: list[tuple[FanoClassSummary, RationalFn]]
    data: NumericalData
    prefactors: list[RationalFn]
    counts: dict[tuple[int, int, int], IntPoly | int]
    prime: int | None = None
    deviations: list[str] = field(default_factory=list)

    @property
    def symbolic(self) -> bool:
        return self.prime is None

    def series(self, K: int, p: int | None = None) -> list[int]:
        from .polyring import series_expand
        p = self.prime if p is None else p
        if p is None:
            raise ValueError("a prime is needed for numeric coefficients")
        if self.prime is not None and p != self.prime:
            raise ValueError(f"point counts were fixed at p={self.prime}")
        return series_expand(self.zeta, K, p)

    def metadata(self) -> list[str]:
        lines = [f"d={self.pres.d} d'={self.pres.dprime} m={self.pres.m}",
                 f"point counts: {'polynomial in p' if self.symbolic else f'fixed at p={self.prime}'}"]
        lines += self.data.table()
        for key, n in sorted(self.counts.items()):
            lines.append(f"n[i={key[0]}, corank={key[1]}, dim={key[2]}] = "
                         f"{n.to_text() if isinstance(n, IntPoly) else n}")
        lines += [f"deviation: {x}" for x in self.deviations]
        return lines


def class_count(cls: FanoClassSummary, prime: int | None) -> IntPoly | int:
    if prime is None:
        if cls.count_poly is None:
            raise MissingFanoData(f"class {cls.key} has no polynomial point count; assemble at a fixed prime",
                                  [cls.i])
        return cls.count_poly
    return cls.count_at(prime)


def _check_levels(pres: GroupPresentation, fano: FanoData) -> None:
    missing = [i for i in range(1, pres.dprime) if i not in fano]
    if missing:
        raise MissingFanoData(f"Fano data missing for levels {missing}", missing)


def assemble(pres: GroupPresentation, fano: FanoData, prime: int | None = None,
             convention: str = "dimension", nesting: Mapping | None = None) -> ZetaResult:
    """Closed-form local zeta function; counts are polynomials in p unless ``prime`` is given."""
    _check_levels(pres, fano)
    data = NumericalData.build(pres.d, pres.dprime, pres.m, fano, convention)
    w0 = W0(pres)
    A = w0
    comps, counts = [], {}
    for i in sorted(fano):
        for cls in fano[i]:
            if not cls.delta:
                continue
            W = W_component(pres, cls, fano, data, nesting)
            n = class_count(cls, prime)
            counts[cls.key] = n
            comps.append((cls, W))
            A = A + RationalFn(IntPoly.coerce(n)) * W
    pre = [abelian_prefactor(pres.d + pres.m), homothety_prefactor(pres.d, pres.dprime, pres.m)]
    zeta = pre[0] * pre[1] * A
    deviations = []
    if pres.d != pres.dprime:
        deviations.append(f"homothety factor uses p^(d'(d+m)) = p^{pres.dprime * (pres.d + pres.m)}; "
                          f"the variant p^(d(d+m)) disagrees with lattice counts")
    if comps:
        deviations.append(f"Y exponents use the class {convention} "
                          f"({'lattice-verified' if convention == 'dimension' else 'does not match lattice counts'})")
    deviations.append("empty Igusa factors are read as the empty product 1")
    return ZetaResult(pres, zeta, A, w0, comps, data, pre, counts, prime, deviations)


# ---------------------------------------------------------------------------
# direct summation over lattice types


def _single_classes(fano: FanoData) -> dict[int, FanoClassSummary]:
    out = {}
    for i, classes in fano.items():
        live = [c for c in classes if c.delta]
        if len(live) > 1:
            dims = {c.dimension for c in live}
            if len(dims) > 1:
                raise MissingFanoData(f"direct summation supports one class per level; level {i} has "
                                      f"{len(live)} of different dimensions", [i])
        if live:
            out[i] = live[0]
    return out


def _min_weights(g: int, R: int, p: int) -> dict[int, int]:
    """Distribution of the minimum valuation of g residues in p Z / p^R (valuation R for zero)."""
    if g == 0:
        return {None: 1}
    tail = [0] * (R + 2)
    for a in range(R, 0, -1):
        tail[a] = tail[a + 1] + mu_value(R, a, p)  # residues of valuation >= a
    return {a: tail[a] ** g - tail[a + 1] ** g for a in range(1, R + 1)}


def safe_rmax(K: int, d: int) -> int:
    """Smallest Rmax that makes every t-coefficient up to K complete."""
    step = max(d - 1, 1)
    return max(-(-(K + 1) // step) - 1, 0)


def safe_degree(Rmax: int, d: int) -> int:
    return (Rmax + 1) * max(d - 1, 1) - 1


def A_term_series(I: LatticeTypeIndex, pres: GroupPresentation, classes: Mapping[int, FanoClassSummary],
                  p: int, Rmax: int, K: int) -> list[int]:
    """Sum over r in [1, Rmax]^I of the weights of lattices of type I, per flag."""
    d, dp, m = pres.d, pres.dprime, pres.m
    levels = I.levels
    S = I.starred
    mult = multiplicity(levels, dp)
    codims = [classes[s].codimension for s in S]
    gsizes = [c - b for b, c in zip([0] + codims[:-1], codims)]
    out = [0] * (K + 1)
    for rv in itertools.product(range(1, Rmax + 1), repeat=len(levels)):
        r = dict(zip(levels, rv))
        w = sum(i * r[i] for i in levels)
        if w > K:
            continue
        M = mult.exponent(r)
        base_wp = d * sum(rv)
        if not S:
            deg = w + base_wp
            if deg <= K:
                out[deg] += p ** ((d + m) * w + M)
            continue
        R = [sum(r[s] for s in S[j:]) for j in range(len(S))]
        shift = [sum(r[s] for s in S[:j]) for j in range(len(S))]
        scale = p ** (M - sum(g * (Rj - 1) for g, Rj in zip(gsizes, R)))
        dists = [_min_weights(g, Rj, p) for g, Rj in zip(gsizes, R)]
        for mins in itertools.product(*(dist.items() for dist in dists)):
            weight = 1
            cands = []
            for (a, cnt), sh in zip(mins, shift):
                weight *= cnt
                if a is not None:
                    cands.append(sh + a)
            corr = min([R[0]] + cands)
            if S[0] == 1:
                first = mins[0][0]
                corr += min(r[1], first) if first is not None else r[1]
            deg = w + base_wp - corr
            if deg <= K:
                out[deg] += p ** ((d + m) * w) * scale * weight
    return out


def generating_function_truncated(pres: GroupPresentation, fano: FanoData, p: int,
                                  Rmax: int | None = None, K: int | None = None) -> tuple[list[int], int]:
    """A(p, t) at a fixed prime by direct summation; returns (coefficients, safe degree).

    Coefficients are exact up to the safe degree.  Give either ``Rmax`` or the
    wanted degree ``K``.
    """
    if Rmax is None:
        if K is None:
            raise ValueError("give Rmax or K")
        Rmax = safe_rmax(K, pres.d)
    safe = safe_degree(Rmax, pres.d)
    K = safe if K is None else K
    if K > safe:
        log.warning("coefficients above t^%d are incomplete with Rmax=%d", safe, Rmax)
    _check_levels(pres, fano)
    classes = _single_classes(fano)
    counts = {i: sum(c.count_at(p) for c in fano[i] if c.delta) for i in classes}
    total = [0] * (K + 1)
    for I in admissible_subsets(pres.dprime, list(classes)):
        c = coefficient_c(I, counts, pres.dprime).evaluate({"p": p})
        if not c:
            continue
        part = A_term_series(I, pres, classes, p, Rmax, K) if I.levels else [1] + [0] * K
        total = [x + c * y for x, y in zip(total, part)]
    return total, min(safe, K)


def exponent_identity(i: int, dprime: int) -> bool:
    """C(d'-i, 2) + i(d'-i) + C(i, 2) == C(d', 2)."""
    return comb(dprime - i, 2) + i * (dprime - i) + comb(i, 2) == comb(dprime, 2)
