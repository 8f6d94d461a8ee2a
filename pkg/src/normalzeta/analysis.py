"""Abscissa of convergence, pole inventory and functional-equation checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Sequence

from .fpgeom import FanoClassSummary, expected_fano_dimension
from .polyring import GeomFactor, IntPoly, RationalFn, _divide_geom, invert_variables
from .presentation import GroupPresentation
from .zeta import FanoData, ZetaResult, t_shift, x_data


# ---------------------------------------------------------------------------
# abscissa
#
# A local factor 1/(1 - p^a t^b) contributes prod_p 1/(1 - p^{a - b s}) to the
# Euler product, which converges for s > (a + 1)/b.


def factor_abscissa(a: int, b: int) -> Fraction:
    return Fraction(a + 1, b)


def abscissa_candidates(pres: GroupPresentation, fano: FanoData | None = None,
                        generic: bool = False) -> list[tuple[str, Fraction]]:
    """Labelled candidate values; ``generic`` uses expected Fano dimensions instead of the classes."""
    d, dp, m = pres.d, pres.dprime, pres.m
    out = [("abelian", Fraction(d + m))]
    for i in range(1, dp):
        a, b = x_data(i, d, dp, m)
        out.append((f"X_{i}", factor_abscissa(a, b)))
    if generic:
        for i in range(1, dp):
            dim = expected_fano_dimension(d, dp, i)
            if dim is not None and dim >= 0:
                out.append((f"Y_{i} (generic)", factor_abscissa(i * (d + m) + dim, d + i - t_shift(i))))
    else:
        if fano is None:
            raise ValueError("class data needed unless generic=True")
        for i in sorted(fano):
            for cls in fano[i]:
                if cls.delta:
                    if cls.dimension is None:
                        raise ValueError(f"class {cls.key} has no dimension")
                    out.append((f"Y[i={i}, corank={cls.corank}]",
                                factor_abscissa(i * (d + m) + cls.dimension, d + i - t_shift(i))))
    out.append(("homothety", factor_abscissa(dp * (d + m), d + dp)))
    return out


def abscissa(pres: GroupPresentation, fano: FanoData | None = None, generic: bool = False) -> Fraction:
    """Largest candidate abscissa."""
    return max(v for _, v in abscissa_candidates(pres, fano, generic))


# ---------------------------------------------------------------------------
# poles


@dataclass(frozen=True)
class PoleRecord:
    """Pole of the local factor from 1 - p^a t^b (a, b coprime), with confirmed multiplicity."""

    a: int
    b: int
    multiplicity: int

    @property
    def location(self) -> Fraction:
        return Fraction(self.a, self.b)

    @property
    def global_abscissa(self) -> Fraction:
        return factor_abscissa(self.a, self.b)


def _primitive(g: GeomFactor) -> tuple[int, int]:
    k = gcd(g.a, g.b) if g.a else g.b
    return (g.a // k, g.b // k)


def poles(z: ZetaResult | RationalFn) -> list[PoleRecord]:
    """Denominator factors grouped by their primitive factor, net of numerator cancellation."""
    f = z.zeta if isinstance(z, ZetaResult) else z
    groups: dict[tuple[int, int], int] = {}
    for g in f.den:
        key = _primitive(g)
        groups[key] = groups.get(key, 0) + 1
    out = []
    for (a, b), q in sorted(groups.items(), key=lambda kv: (Fraction(*kv[0]), kv[0])):
        # each member factor contains the primitive one exactly once
        num, v = f.num, 0
        while v < q:
            nxt = _divide_geom(num, GeomFactor(a, b))
            if nxt is None:
                break
            num, v = nxt, v + 1
        if q - v > 0:
            out.append(PoleRecord(a, b, q - v))
    return out


def pole_abscissa(records: Sequence[PoleRecord]) -> Fraction:
    return max(r.global_abscissa for r in records)


def pole_count(records: Sequence[PoleRecord]) -> int:
    """Poles counted with multiplicity."""
    return sum(r.multiplicity for r in records)


def pole_count_bound(d: int, dprime: int, m: int, r: int) -> int:
    """At most d + d' + m + r poles, r the number of Fano classes used."""
    return d + dprime + m + r


# ---------------------------------------------------------------------------
# functional equation


@dataclass
class FEReport:
    holds: bool
    sign: int
    p_exponent: int
    t_exponent: int
    expected: tuple[int, int, int]
    counts_ok: bool = True
    detail: str = ""


def count_inversion_ok(cls: FanoClassSummary) -> bool:
    """n(1/p) == p^{-dim} n(p) as a polynomial identity."""
    n = cls.count_poly
    return n is not None and n.invert("p") * IntPoly.monomial(1, p=cls.dimension) == n


def expected_fe_factor(d: int, dprime: int, m: int) -> tuple[int, int, int]:
    N = d + dprime + m
    return ((-1) ** N, comb(N, 2), 2 * d + dprime + m)


def check_functional_equation(z: ZetaResult) -> FEReport:
    """Invert p and t in the assembled function and compare with the expected factor."""
    if not z.symbolic:
        raise ValueError("cannot verify symbolically: point counts are fixed at one prime; "
                         "assemble with polynomial counts")
    d, dp, m = z.pres.d, z.pres.dprime, z.pres.m
    expected = expected_fe_factor(d, dp, m)
    bad = [cls.key for cls, _ in z.W_components if not count_inversion_ok(cls)]
    if bad:
        return FEReport(False, 0, 0, 0, expected, False, f"point counts fail the inversion rule: {bad}")
    factor = invert_variables(z.zeta).factor
    if factor is None:
        return FEReport(False, 0, 0, 0, expected, True, "inverted function is not a monomial multiple")
    got = (factor.sign, factor.p_exponent, factor.t_exponent)
    return FEReport(got == expected, *got, expected, True,
                    "" if got == expected else f"factor {got} differs from {expected}")


def analysis_report(z: ZetaResult, fano: FanoData) -> list[str]:
    pres = z.pres
    recs = poles(z)
    r = sum(1 for cls, _ in z.W_components)
    bound = pole_count_bound(pres.d, pres.dprime, pres.m, r)
    lines = [f"abscissa: {abscissa(pres, fano)}"]
    try:
        lines.append(f"abscissa (generic dimensions): {abscissa(pres, generic=True)}")
    except ValueError:
        pass
    lines.append("poles (a, b, s = a/b, multiplicity):")
    for rec in recs:
        lines.append(f"  ({rec.a}, {rec.b}) s={rec.location} x{rec.multiplicity}")
    lines.append(f"pole count: {pole_count(recs)} (bound {bound}: {'ok' if pole_count(recs) <= bound else 'exceeded'})")
    if z.symbolic:
        fe = check_functional_equation(z)
        lines.append(f"functional equation: {'holds' if fe.holds else 'fails'} "
                     f"sign={fe.sign:+d} p^{fe.p_exponent} t^{fe.t_exponent}"
                     + (f" ({fe.detail})" if fe.detail else ""))
    else:
        lines.append("functional equation: not checked (counts fixed at one prime)")
    return lines
