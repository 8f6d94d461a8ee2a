"""Class-two nilpotent presentations and their Pfaffian hypersurfaces.

A presentation of Gamma x Z^m is stored through its relation matrix M(y): the
d x d antisymmetric matrix whose (i, j) entry is the linear form in y_1..y_{d'}
giving the commutator [x_i, x_j].
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

from .polyring import DomainError, IntPoly


class ValidationError(ValueError):
    """A presentation fails validation; ``violations`` lists the reasons."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class LinearForm:
    """sum_l coeffs[l] * y_{l+1}."""

    coeffs: tuple[int, ...]

    def __neg__(self):
        return LinearForm(tuple(-c for c in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def poly(self) -> IntPoly:
        out = IntPoly()
        for l, c in enumerate(self.coeffs):
            if c:
                out = out + IntPoly.var(f"y{l + 1}") * c
        return out

    def at(self, point: Sequence[int]) -> int:
        return sum(c * y for c, y in zip(self.coeffs, point))


@dataclass(frozen=True)
class Violation:
    kind: str
    pair: tuple[int, int] | None = None
    detail: str = ""

    def __str__(self):
        where = f" at ({self.pair[0]},{self.pair[1]})" if self.pair else ""
        return f"{self.kind}{where}" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class GroupPresentation:
    """Gamma x Z^m with Gamma/Z(Gamma) of rank d and [Gamma, Gamma] of rank dprime."""

    d: int
    dprime: int
    m: int
    M: tuple  # d x d tuple of LinearForm
    name: str = field(default="", compare=False)

    @classmethod
    def from_upper(cls, d: int, dprime: int, m: int,
                   entries: Mapping[tuple[int, int], Sequence[int]], name: str = ""):
        """Build from 1-based entries (i, j), i < j; the lower triangle follows."""
        zero = LinearForm((0,) * dprime)
        rows = [[zero] * d for _ in range(d)]
        for (i, j), coeffs in entries.items():
            if not (1 <= i < j <= d):
                raise ValidationError([Violation("entry outside the strict upper triangle", (i, j))])
            if len(coeffs) != dprime:
                raise ValidationError([Violation("linear form has wrong length", (i, j),
                                                 f"expected {dprime}, got {len(coeffs)}")])
            f = LinearForm(tuple(int(c) for c in coeffs))
            rows[i - 1][j - 1] = f
            rows[j - 1][i - 1] = -f
        return cls(d, dprime, m, tuple(tuple(r) for r in rows), name)

    @classmethod
    def from_matrix(cls, d: int, dprime: int, m: int, matrix, name: str = ""):
        """Build from a full matrix of coefficient vectors (antisymmetry not enforced)."""
        rows = tuple(tuple(LinearForm(tuple(int(c) for c in e)) for e in row) for row in matrix)
        return cls(d, dprime, m, rows, name)

    def entry(self, i: int, j: int) -> LinearForm:
        """1-based entry M_{ij}."""
        return self.M[i - 1][j - 1]

    def relation_polys(self) -> list[list[IntPoly]]:
        return [[f.poly() for f in row] for row in self.M]

    def relation_tensor(self) -> list[list[list[int]]]:
        """C[l][i][j]: coefficient of y_{l+1} in M_{ij} (0-based)."""
        return [[[self.M[i][j].coeffs[l] for j in range(self.d)] for i in range(self.d)]
                for l in range(self.dprime)]

    def relations(self) -> list[str]:
        out = []
        for i in range(self.d):
            for j in range(i + 1, self.d):
                f = self.M[i][j]
                if not f.is_zero():
                    out.append(f"[x{i + 1},x{j + 1}] = {f.poly().to_text()}")
        return out

    def with_abelian_rank(self, m: int) -> "GroupPresentation":
        name = f"{self.name}+z{m}" if self.name and m else self.name
        return GroupPresentation(self.d, self.dprime, m, self.M, name)

    def to_text(self) -> str:
        lines = [f"{self.d} {self.dprime} {self.m}"]
        for i in range(self.d):
            for j in range(i + 1, self.d):
                f = self.M[i][j]
                if not f.is_zero():
                    lines.append(f"{i + 1} {j + 1} : " + " ".join(str(c) for c in f.coeffs))
        return "\n".join(lines) + "\n"


def validate(pres: GroupPresentation) -> list[Violation]:
    """Empty list if the presentation is usable, else the reasons it is not."""
    out = []
    if pres.d <= 0 or pres.d % 2:
        out.append(Violation("d must be a positive even integer", None, f"d={pres.d}"))
    if pres.dprime < 1:
        out.append(Violation("dprime must be positive", None, f"dprime={pres.dprime}"))
    if pres.m < 0:
        out.append(Violation("m must be non-negative", None, f"m={pres.m}"))
    if len(pres.M) != pres.d or any(len(row) != pres.d for row in pres.M):
        out.append(Violation("relation matrix has the wrong shape"))
        return out
    for i in range(pres.d):
        for j in range(pres.d):
            if len(pres.M[i][j].coeffs) != pres.dprime:
                out.append(Violation("linear form has wrong length", (i + 1, j + 1)))
    if out:
        return out
    for i in range(pres.d):
        if not pres.M[i][i].is_zero():
            out.append(Violation("nonzero diagonal entry", (i + 1, i + 1)))
        for j in range(i + 1, pres.d):
            if pres.M[i][j] != -pres.M[j][i]:
                out.append(Violation("not antisymmetric", (i + 1, j + 1)))
    if not out and pres.d % 2 == 0 and pfaffian_raw(pres).is_zero():
        out.append(Violation("Pfaffian is identically zero"))
    return out


def check(pres: GroupPresentation) -> GroupPresentation:
    """Return pres unchanged, or raise ValidationError."""
    v = validate(pres)
    if v:
        raise ValidationError(v)
    return pres


def _pf_rec(A, idx: tuple, memo: dict) -> IntPoly:
    if not idx:
        return IntPoly.const(1)
    if idx in memo:
        return memo[idx]
    first, rest = idx[0], idx[1:]
    total = IntPoly()
    for k, j in enumerate(rest):
        a = A[first][j]
        if a.is_zero():
            continue
        minor = rest[:k] + rest[k + 1:]
        term = a * _pf_rec(A, minor, memo)
        total = total + term if k % 2 == 0 else total - term
    memo[idx] = total
    return total


def pfaffian_matrix(A: Sequence[Sequence[IntPoly]]) -> IntPoly:
    """Pfaffian by expansion along the first row (standard sign convention)."""
    n = len(A)
    if n % 2:
        return IntPoly()
    return _pf_rec(A, tuple(range(n)), {})


def pfaffian_raw(pres: GroupPresentation) -> IntPoly:
    return pfaffian_matrix(pres.relation_polys())


@dataclass(frozen=True)
class PfaffianPoly:
    """Defining polynomial of the Pfaffian hypersurface.

    ``poly`` is normalized to a positive leading coefficient (the hypersurface
    does not see the sign); ``sign`` records the factor relative to the
    first-row expansion.
    """

    poly: IntPoly
    sign: int
    dprime: int

    def __str__(self):
        return self.poly.to_text()


def pfaffian(pres: GroupPresentation) -> PfaffianPoly:
    check(pres)
    raw = pfaffian_raw(pres)
    lead = raw.sorted_terms()[0][1]
    sign = 1 if lead > 0 else -1
    return PfaffianPoly(raw * sign, sign, pres.dprime)


def det_poly(A: Sequence[Sequence[IntPoly]]) -> IntPoly:
    """Determinant by permutation expansion (fine for d <= 6)."""
    n = len(A)
    total = IntPoly()
    for perm in itertools.permutations(range(n)):
        term = IntPoly.const(1)
        for i, j in enumerate(perm):
            if A[i][j].is_zero():
                break
            term = term * A[i][j]
        else:
            inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
            total = total + (term if inv % 2 == 0 else -term)
    return total


def evaluate_relation_matrix(pres: GroupPresentation, point: Sequence[int], modulus: int) -> list[list[int]]:
    """M(point) with entries reduced mod ``modulus``."""
    if modulus < 2:
        raise DomainError("modulus must be at least 2")
    if len(point) != pres.dprime:
        raise DomainError(f"point must have {pres.dprime} coordinates")
    return [[f.at(point) % modulus for f in row] for row in pres.M]


# ---------------------------------------------------------------------------
# presets and files

_PRESETS = {
    # [x1,x3]=y1, [x1,x4]=y2, [x2,x3]=y3, [x2,x4]=y4
    "segre": (4, 4, {(1, 3): 1, (1, 4): 2, (2, 3): 3, (2, 4): 4}),
    "heisenberg": (2, 1, {(1, 2): 1}),
    "u3": (4, 3, {(1, 2): 1, (2, 3): 2, (3, 4): 3}),
    "hb-cubic": (6, 5, {(1, 4): 1, (1, 5): 2, (2, 4): 5, (2, 5): 3, (2, 6): 4,
                        (3, 5): 1, (3, 6): 2}),
    # Pfaffian y1*y3 - y2^2: a smooth conic in P^2
    "conic": (4, 3, {(1, 2): 1, (3, 4): 3, (1, 3): 2, (2, 4): 2}),
    # direct product of two Heisenberg groups; Pfaffian y1*y2
    "hxh": (4, 2, {(1, 2): 1, (3, 4): 2}),
}

PRESET_NAMES = ("segre", "heisenberg", "u3", "hb-cubic", "conic", "hxh", "znm(d)")


def _from_relations(name, d, dprime, rels, m=0):
    entries = {}
    for (i, j), l in rels.items():
        coeffs = [0] * dprime
        coeffs[l - 1] = 1
        entries[(i, j)] = coeffs
    return GroupPresentation.from_upper(d, dprime, m, entries, name)


def load_preset(name: str) -> GroupPresentation:
    """Named presentation.  A suffix ``+zM`` takes the direct product with Z^M.

    ``znm(d)`` is the abelian group Z^d written with a zero commutator matrix;
    it exists to exercise the rejection path (its Pfaffian vanishes).
    """
    base, m = name.strip().lower(), 0
    mz = re.fullmatch(r"(.+)\+z(\d+)", base)
    if mz:
        base, m = mz.group(1), int(mz.group(2))
    mz = re.fullmatch(r"znm\((\d+)\)", base)
    if mz:
        d = int(mz.group(1))
        return GroupPresentation.from_upper(d, 1, m, {}, name)
    if base not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")
    d, dprime, rels = _PRESETS[base]
    return _from_relations(name, d, dprime, rels, m)


def parse_presentation(text: str, name: str = "") -> GroupPresentation:
    """Parse the line format: header ``d d' m`` then ``i j : c_1 ... c_d'``."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValidationError([Violation("empty presentation file")])
    try:
        d, dprime, m = (int(x) for x in lines[0].split())
    except ValueError:
        raise ValidationError([Violation("bad header", None, f"expected 'd dprime m', got {lines[0]!r}")])
    zero = (0,) * dprime
    rows = [[zero] * d for _ in range(d)]
    violations = []
    for line in lines[1:]:
        mm = re.fullmatch(r"(\d+)\s+(\d+)\s*:\s*(.*)", line)
        if not mm:
            violations.append(Violation("bad line", None, repr(line)))
            continue
        i, j = int(mm.group(1)), int(mm.group(2))
        coeffs = tuple(int(c) for c in mm.group(3).split())
        if not (1 <= i <= d and 1 <= j <= d):
            violations.append(Violation("index out of range", (i, j)))
            continue
        if len(coeffs) != dprime:
            violations.append(Violation("linear form has wrong length", (i, j)))
            continue
        if i >= j:
            # kept as given so that validation can report it
            rows[i - 1][j - 1] = coeffs
            continue
        rows[i - 1][j - 1] = coeffs
        if rows[j - 1][i - 1] == zero:
            rows[j - 1][i - 1] = tuple(-c for c in coeffs)
    if violations:
        raise ValidationError(violations)
    return GroupPresentation.from_matrix(d, dprime, m, rows, name)


def load_file(path: str | Path) -> GroupPresentation:
    path = Path(path)
    return parse_presentation(path.read_text(), name=path.stem)


@lru_cache(maxsize=None)
def cached_pfaffian(pres: GroupPresentation) -> PfaffianPoly:
    return pfaffian(pres)
