"""Exact polynomial and rational-function arithmetic over the integers.

Polynomials are sparse: a dict from monomials to integer coefficients, where a
monomial is a sorted tuple of ``(variable, exponent)`` pairs.  Exponents may be
negative, so the ring is really the Laurent ring; the zeta-function building
blocks need ``p^{-1}`` (flag counts at ``p^{-1}``, inversion ``p -> 1/p``).

Rational functions keep their denominators as a multiset of factors
``(1 - p^a t^b)``; no polynomial gcd is ever needed.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence


class DomainError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


def _natkey(name: str):
    m = re.fullmatch(r"([A-Za-z_]+)(\d*)", name)
    if not m:
        return (name, -1)
    # p and t first, then everything else alphabetically with numeric suffix order
    head = {"p": "\x00", "t": "\x01"}.get(m.group(1), m.group(1))
    return (head, int(m.group(2)) if m.group(2) else -1)


def _mono(exps: Mapping[str, int]) -> tuple:
    return tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda ve: _natkey(ve[0])))


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return _mono(d)


class IntPoly:
    """Sparse Laurent polynomial with integer coefficients in named variables."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, int] | None = None):
        self._terms = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None

    # construction helpers
    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls({(): int(c)})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "IntPoly":
        return cls({_mono({name: exp}): 1})

    @classmethod
    def monomial(cls, coeff: int = 1, **exps: int) -> "IntPoly":
        return cls({_mono(exps): coeff})

    @classmethod
    def coerce(cls, x) -> "IntPoly":
        if isinstance(x, IntPoly):
            return x
        if isinstance(x, int):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to IntPoly")

    # basic properties
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def variables(self) -> list[str]:
        names = {v for m in self._terms for v, _ in m}
        return sorted(names, key=_natkey)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_term(self) -> int:
        return self._terms.get((), 0)

    def degree(self, var: str) -> int:
        return max(dict(m).get(var, 0) for m in self._terms) if self._terms else 0

    def min_degree(self, var: str) -> int:
        return min(dict(m).get(var, 0) for m in self._terms) if self._terms else 0

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    def is_homogeneous(self) -> bool:
        degs = {sum(e for _, e in m) for m in self._terms}
        return len(degs) <= 1

    def is_polynomial(self) -> bool:
        """True when no exponent is negative."""
        return all(e >= 0 for m in self._terms for _, e in m)

    # arithmetic
    def __add__(self, other):
        other = IntPoly.coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return IntPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return IntPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-IntPoly.coerce(other))

    def __rsub__(self, other):
        return IntPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly({m: c * other for m, c in self._terms.items()})
        other = IntPoly.coerce(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._terms) == 1:
                (m, c), = self._terms.items()
                if c in (1, -1):
                    return IntPoly({tuple((v, e * n) for v, e in m): c ** (-n)})
            raise DomainError("negative power of a non-unit")
        result = IntPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # substitution and evaluation
    def invert(self, *names: str) -> "IntPoly":
        """Replace each named variable v by 1/v."""
        names = set(names)
        return IntPoly({tuple((v, -e) if v in names else (v, e) for v, e in m): c
                        for m, c in self._terms.items()})

    def subs(self, values: Mapping[str, "IntPoly | int"]) -> "IntPoly":
        """Substitute polynomials for variables (negative powers need unit images)."""
        out = IntPoly()
        cache: dict = {}
        for m, c in self._terms.items():
            term = IntPoly.const(c)
            rest = {}
            for v, e in m:
                if v in values:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = IntPoly.coerce(values[v]) ** e
                    term = term * cache[key]
                else:
                    rest[v] = e
            out = out + term * IntPoly({_mono(rest): 1})
        return out

    def evaluate(self, values: Mapping[str, int | Fraction]):
        """Numeric value; exact (int or Fraction)."""
        total = Fraction(0)
        for m, c in self._terms.items():
            val = Fraction(c)
            for v, e in m:
                if v not in values:
                    raise DomainError(f"no value for variable {v}")
                val *= Fraction(values[v]) ** e
            total += val
        return int(total) if total.denominator == 1 else total

    def collect(self, var: str) -> dict[int, "IntPoly"]:
        """Group by the exponent of ``var``: returns {exp: coefficient poly}."""
        out: dict[int, dict] = {}
        for m, c in self._terms.items():
            e = 0
            rest = []
            for v, ee in m:
                if v == var:
                    e = ee
                else:
                    rest.append((v, ee))
            out.setdefault(e, {})[tuple(rest)] = c
        return {e: IntPoly(t) for e, t in out.items()}

    def mod(self, n: int) -> "IntPoly":
        return IntPoly({m: c % n for m, c in self._terms.items()})

    def sorted_terms(self, ascending: bool = False):
        names = self.variables

        def key(mc):
            d = dict(mc[0])
            vec = tuple(d.get(v, 0) for v in names)
            return (sum(vec), vec)

        return sorted(self._terms.items(), key=key, reverse=not ascending)

    # text forms
    def to_text(self, ascending: bool = False) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms(ascending)):
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            mag = abs(c)
            body = mono if mono and mag == 1 else (f"{mag}*{mono}" if mono else str(mag))
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def to_latex(self, ascending: bool = False) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms(ascending)):
            mono = "".join(_latex_var(v) if e == 1 else f"{_latex_var(v)}^{{{e}}}" for v, e in m)
            mag = abs(c)
            body = mono if mono and mag == 1 else f"{mag}{mono}"
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "IntPoly":
        """Parse the output of :meth:`to_text` or :meth:`to_latex`."""
        s = text.replace("{", "").replace("}", "").replace("*", "").replace(" ", "").replace("_", "")
        if s in ("", "0"):
            return cls()
        if s[0] not in "+-":
            s = "+" + s
        out = cls()
        pieces = re.split(r"(?<!\^)([+-])", s)[1:]
        for sign, body in zip(pieces[::2], pieces[1::2]):
            m = re.match(r"(\d*)(.*)", body)
            coeff = int(m.group(1)) if m.group(1) else 1
            exps: dict[str, int] = {}
            rest = m.group(2)
            for name, exp in re.findall(r"([A-Za-z][0-9]*)(?:\^(-?\d+))?", rest):
                exps[name] = exps.get(name, 0) + (int(exp) if exp else 1)
            if re.sub(r"([A-Za-z][0-9]*)(?:\^(-?\d+))?", "", rest):
                raise DomainError(f"cannot parse term {body!r}")
            out = out + cls({_mono(exps): -coeff if sign == "-" else coeff})
        return out

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"IntPoly({self.to_text()!r})"


def _latex_var(name: str) -> str:
    m = re.fullmatch(r"([A-Za-z]+)(\d+)", name)
    return f"{m.group(1)}_{{{m.group(2)}}}" if m else name


P = IntPoly.var("p")
T = IntPoly.var("t")
ONE = IntPoly.const(1)


def pt(a: int, b: int, coeff: int = 1) -> IntPoly:
    """The monomial coeff * p^a t^b."""
    return IntPoly.monomial(coeff, p=a, t=b)


# ---------------------------------------------------------------------------
# rational functions with factored denominators


@dataclass(frozen=True, order=True)
class GeomFactor:
    """The factor (1 - p^a t^b) with b >= 1."""

    a: int
    b: int

    def __post_init__(self):
        if self.b < 1:
            raise DomainError(f"denominator factor needs a positive t-exponent, got b={self.b}")

    def poly(self) -> IntPoly:
        return ONE - pt(self.a, self.b)

    @property
    def location(self) -> Fraction:
        """Real part of the pole s = a/b (with t = p^{-s})."""
        return Fraction(self.a, self.b)

    def to_text(self) -> str:
        return f"(1 - {_pt_text(self.a, self.b)})"


def _pt_text(a: int, b: int) -> str:
    parts = []
    if a:
        parts.append("p" if a == 1 else f"p^{a}")
    if b:
        parts.append("t" if b == 1 else f"t^{b}")
    return "*".join(parts) or "1"


def _den_key(g: GeomFactor):
    return (g.b, g.a)


def _divide_geom(num: IntPoly, g: GeomFactor) -> IntPoly | None:
    """Exact quotient num / (1 - p^a t^b), or None if it does not divide."""
    if num.is_zero():
        return IntPoly()
    cols = num.collect("t")
    lo, hi = min(cols), max(cols)
    if hi - lo < g.b:
        return None
    u = IntPoly.var("p", g.a) if g.a else ONE
    q: dict[int, IntPoly] = {}
    for k in range(lo, hi - g.b + 1):
        val = cols.get(k, IntPoly())
        prev = q.get(k - g.b)
        if prev is not None:
            val = val + u * prev
        if val:
            q[k] = val
    for k in range(hi - g.b + 1, hi + 1):
        val = cols.get(k, IntPoly())
        prev = q.get(k - g.b)
        if prev is not None:
            val = val + u * prev
        if val:
            return None
    out = IntPoly()
    for k, c in q.items():
        out = out + c * IntPoly.var("t", k) if k else out + c
    return out


def _expand_den(factors: Iterable[GeomFactor]) -> IntPoly:
    out = ONE
    for g in factors:
        out = out * g.poly()
    return out


class RationalFn:
    """numerator / prod (1 - p^a t^b), kept in canonical (cancelled) form."""

    __slots__ = ("num", "den")

    def __init__(self, num, den: Iterable[GeomFactor] = (), canonical: bool = True):
        num = IntPoly.coerce(num)
        den = tuple(sorted(den, key=_den_key))
        if canonical:
            num, den = _cancel(num, den)
        self.num = num
        self.den = den

    @classmethod
    def geometric(cls, a: int, b: int) -> "RationalFn":
        """1/(1 - p^a t^b)."""
        return cls(ONE, (GeomFactor(a, b),))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _scaled_to(self, den: tuple) -> IntPoly:
        missing = list(den)
        for g in self.den:
            missing.remove(g)
        return self.num * _expand_den(missing)

    def _common(self, other: "RationalFn") -> tuple:
        den = list(self.den)
        rest = list(other.den)
        merged = list(den)
        for g in rest:
            if g in den:
                den.remove(g)
            else:
                merged.append(g)
        return tuple(sorted(merged, key=_den_key))

    def __add__(self, other):
        other = other if isinstance(other, RationalFn) else RationalFn(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        den = self._common(other)
        return RationalFn(self._scaled_to(den) + other._scaled_to(den), den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den, canonical=False)

    def __sub__(self, other):
        other = other if isinstance(other, RationalFn) else RationalFn(other)
        return self + (-other)

    def __rsub__(self, other):
        return RationalFn(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, IntPoly)):
            return RationalFn(self.num * other, self.den)
        if self.is_zero() or other.is_zero():
            return RationalFn(IntPoly())
        return RationalFn(self.num * other.num, self.den + other.den)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, IntPoly)):
            other = RationalFn(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        den = self._common(other)
        return self._scaled_to(den) == other._scaled_to(den)

    def __hash__(self):
        return hash(self.den)

    def to_text(self) -> str:
        num = f"({self.num.to_text(ascending=True)})"
        if not self.den:
            return num
        return f"{num} / {_den_text(self.den)}"

    def to_latex(self) -> str:
        num = self.num.to_latex(ascending=True)
        if not self.den:
            return num
        parts = []
        for g, k in _den_counts(self.den):
            f = f"(1 - {_pt_latex(g.a, g.b)})"
            parts.append(f + (f"^{{{k}}}" if k > 1 else ""))
        return f"\\frac{{{num}}}{{{''.join(parts)}}}"

    @classmethod
    def from_text(cls, text: str) -> "RationalFn":
        """Parse either the plain-text or the LaTeX serialization."""
        text = text.strip()
        if text.startswith("\\frac"):
            num_s, den_s = _split_frac(text)
            return cls(IntPoly.from_text(num_s), _parse_den(den_s.replace("{", "").replace("}", "")))
        if " / " in text:
            num_s, den_s = text.split(" / ", 1)
        else:
            num_s, den_s = text, ""
        num_s = num_s.strip()
        if num_s.startswith("(") and num_s.endswith(")"):
            num_s = num_s[1:-1]
        return cls(IntPoly.from_text(num_s), _parse_den(den_s))

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"RationalFn({self.to_text()!r})"


def _den_counts(den: tuple) -> list[tuple[GeomFactor, int]]:
    out: list = []
    for g in den:
        if out and out[-1][0] == g:
            out[-1] = (g, out[-1][1] + 1)
        else:
            out.append((g, 1))
    return out


def _den_text(den: tuple) -> str:
    return "*".join(g.to_text() + (f"^{k}" if k > 1 else "") for g, k in _den_counts(den))


def _pt_latex(a: int, b: int) -> str:
    s = ""
    if a:
        s += "p" if a == 1 else f"p^{{{a}}}"
    if b:
        s += "t" if b == 1 else f"t^{{{b}}}"
    return s or "1"


def _split_frac(text: str) -> tuple[str, str]:
    i = text.index("{")
    groups = []
    while len(groups) < 2:
        depth = 0
        for j in range(i, len(text)):
            if text[j] == "{":
                depth += 1
            elif text[j] == "}":
                depth -= 1
                if depth == 0:
                    groups.append(text[i + 1:j])
                    i = j + 1
                    break
        if len(groups) < 2:
            i = text.index("{", i)
    return groups[0], groups[1]


def _parse_den(s: str) -> list[GeomFactor]:
    out = []
    for mono, k in re.findall(r"\(1\s*-\s*([^)]*)\)(?:\^(\d+))?", s):
        m = IntPoly.from_text(mono)
        (key, c), = m.items()
        if c != 1:
            raise DomainError(f"bad denominator factor {mono!r}")
        d = dict(key)
        if set(d) - {"p", "t"}:
            raise DomainError(f"bad denominator factor {mono!r}")
        out.extend([GeomFactor(d.get("p", 0), d.get("t", 0))] * (int(k) if k else 1))
    leftover = re.sub(r"\(1\s*-\s*([^)]*)\)(?:\^(\d+))?", "", s).replace("*", "").strip()
    if leftover:
        raise DomainError(f"cannot parse denominator {s!r}")
    return out


def _cancel(num: IntPoly, den: tuple) -> tuple[IntPoly, tuple]:
    if num.is_zero():
        return num, ()
    kept = []
    for g in den:
        q = _divide_geom(num, g)
        if q is None:
            kept.append(g)
        else:
            num = q
    return num, tuple(kept)


# ---------------------------------------------------------------------------
# combinatorial factors


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int) -> IntPoly:
    """Number of k-dimensional subspaces of F_p^n, as a polynomial in p."""
    if not 0 <= k <= n:
        raise DomainError(f"gaussian_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if k == 0 or k == n:
        return ONE
    return gaussian_binomial(n - 1, k - 1) + P ** k * gaussian_binomial(n - 1, k)


def _check_index_set(I: Sequence[int], dprime: int) -> tuple[int, ...]:
    I = tuple(I)
    if list(I) != sorted(set(I)):
        raise DomainError(f"index set must be strictly increasing: {I}")
    if I and (I[0] < 1 or I[-1] > dprime):
        raise DomainError(f"index set {I} not inside 1..{dprime}")
    return I


@lru_cache(maxsize=None)
def _flag_count(I: tuple, dprime: int) -> IntPoly:
    out = ONE
    top = dprime
    for i in reversed(I):
        out = out * gaussian_binomial(top, i)
        top = i
    return out


def flag_count(I: Sequence[int], dprime: int) -> IntPoly:
    """Number of flags V_{i_1} < ... < V_{i_l} in F_p^{dprime}, dim V_i = i."""
    return _flag_count(_check_index_set(I, dprime), dprime)


def igusa_factor(U: Sequence[tuple[int, int]]) -> RationalFn:
    """sum over I of b_I(1/p) prod_{i in I} U_i/(1-U_i), flags taken in F_p^{n+1}.

    For n = 0 this returns the zero function (the boundary convention); callers
    that need an empty product use :func:`igusa_or_one`.
    """
    n = len(U)
    if n == 0:
        return RationalFn(IntPoly())
    us = [pt(a, b) for a, b in U]
    num = IntPoly()
    for size in range(n + 1):
        for I in itertools.combinations(range(1, n + 1), size):
            term = flag_count(I, n + 1).invert("p")
            for i in range(1, n + 1):
                term = term * (us[i - 1] if i in I else ONE - us[i - 1])
            num = num + term
    return RationalFn(num, [GeomFactor(a, b) for a, b in U])


def igusa_or_one(U: Sequence[tuple[int, int]]) -> RationalFn:
    """Igusa factor, with the empty list read as the empty product 1."""
    return igusa_factor(U) if U else RationalFn(ONE)


def exceptional_factor(X: tuple[int, int], Y: tuple[int, int], n_i: int, d_iota: int) -> RationalFn:
    """(p^{-d_iota} Y - p^{-n_i} X) / ((1 - X)(1 - Y))."""
    num = pt(Y[0] - d_iota, Y[1]) - pt(X[0] - n_i, X[1])
    return RationalFn(num, [GeomFactor(*X), GeomFactor(*Y)])


# ---------------------------------------------------------------------------
# expansion and inversion


def series_expand(f: RationalFn, K: int, p_value: int | None = None) -> list:
    """Coefficients of t^0..t^K.  IntPoly in p when p_value is None, else numbers."""
    if K < 0:
        raise DomainError("K must be non-negative")
    for g in f.den:
        if g.b < 1:
            raise DomainError("denominator factor with b = 0 has no t-adic expansion")
    cols = f.num.collect("t")
    if cols and min(cols) < 0:
        raise DomainError("numerator has negative powers of t")

    if p_value is None:
        zero = IntPoly()
        coeffs = [cols.get(k, zero) for k in range(K + 1)]
        for g in f.den:
            u = IntPoly.var("p", g.a) if g.a else ONE
            for k in range(g.b, K + 1):
                coeffs[k] = coeffs[k] + u * coeffs[k - g.b]
        return coeffs

    pv = Fraction(p_value)
    coeffs = [cols[k].evaluate({"p": pv}) if k in cols else 0 for k in range(K + 1)]
    for g in f.den:
        u = pv ** g.a
        for k in range(g.b, K + 1):
            coeffs[k] = coeffs[k] + u * coeffs[k - g.b]
    return [int(c) if Fraction(c).denominator == 1 else Fraction(c) for c in coeffs]


class Proportionality(NamedTuple):
    sign: int
    p_exponent: int
    t_exponent: int


class InversionResult(NamedTuple):
    function: RationalFn
    factor: Proportionality | None


def invert_variables(f: RationalFn) -> InversionResult:
    """f(1/p, 1/t), rewritten over the same denominator factors.

    ``factor`` is (sign, alpha, beta) with f(1/p, 1/t) = sign p^alpha t^beta f(p, t)
    when such a relation holds, else None.
    """
    sa = sum(g.a for g in f.den)
    sb = sum(g.b for g in f.den)
    sign = -1 if len(f.den) % 2 else 1
    num = f.num.invert("p", "t") * pt(sa, sb, sign)
    g = RationalFn(num, f.den, canonical=False)
    return InversionResult(g, _monomial_ratio(num, f.num))


def _monomial_ratio(a: IntPoly, b: IntPoly) -> Proportionality | None:
    """(sign, alpha, beta) with a = sign p^alpha t^beta b, if it exists."""
    if a.is_zero() or b.is_zero():
        return None
    if len(a) != len(b):
        return None
    (ma, ca), (mb, cb) = a.sorted_terms()[0], b.sorted_terms()[0]
    if ca not in (cb, -cb):
        return None
    da, db = dict(ma), dict(mb)
    alpha = da.get("p", 0) - db.get("p", 0)
    beta = da.get("t", 0) - db.get("t", 0)
    for v in set(da) | set(db):
        if v not in ("p", "t") and da.get(v, 0) != db.get(v, 0):
            return None
    sign = 1 if ca == cb else -1
    if a != b * pt(alpha, beta, sign):
        return None
    return Proportionality(sign, alpha, beta)
