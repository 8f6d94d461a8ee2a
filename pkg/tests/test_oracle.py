import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from normalzeta.intlinalg import int_det
from normalzeta.oracle import (A_series_lattice, TypeData, centralizer_index, dirichlet_coeffs_direct,
                               dirichlet_coeffs_lattice, elementary_divisor_type, enumerate_sublattices,
                               type_exponents, type_from_exponents)
from normalzeta.presentation import load_preset

SEGRE = load_preset("segre")
HEIS = load_preset("heisenberg")


def _val(x, p):
    if x == 0:
        return 10 ** 6
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _pf(v):
    return v[0] * v[3] - v[1] * v[2]


def _rand_unimodular(n, rng, first=None):
    while True:
        g = [[rng.randrange(-6, 7) for _ in range(n)] for _ in range(n)]
        if first is not None:
            g[0] = list(first)
        if abs(int_det(g)) == 1:
            return g


def _inverse_column(g, j):
    """Column j of g^{-1} for unimodular g, via cofactors."""
    n, D = len(g), int_det(g)
    minor = lambda a, b: [[g[x][y] for y in range(n) if y != b] for x in range(n) if x != a]
    return [(-1) ** (i + j) * int_det(minor(j, i)) * D for i in range(n)]


@pytest.mark.parametrize("n,p,j,expected", [(2, 2, 1, 3), (2, 3, 2, 13), (4, 2, 1, 15)])
def test_sublattice_counts(n, p, j, expected):
    lats = list(enumerate_sublattices(n, p, j))
    assert len(lats) == expected == len(set(lats))
    assert all(L.index == p ** j for L in lats)


def test_elementary_divisor_types():
    p = 3
    t = elementary_divisor_type([[p * p, 0, 0, 0], [0, p, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], p)
    assert (t.I, t.r, t.maximal) == ((1, 2), (1, 1), True)
    assert elementary_divisor_type([[1, 0], [0, 1]], p) == TypeData((), (), 0)
    t = elementary_divisor_type([[p, 0, 0, 0], [0, p, 0, 0], [0, 0, p, 0], [0, 0, 0, p]], p)
    assert t.I == () and t.scale == 1 and not t.maximal


@settings(max_examples=100)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=6))
def test_type_round_trip(exps):
    t = type_from_exponents(exps)
    n = len(exps)
    back = [e + t.scale for e in type_exponents(t.I, t.r, n)] if t.I else [t.scale] * n
    assert sorted(back) == sorted(exps)


def test_centralizer_trivial_and_heisenberg():
    for p in (2, 3):
        assert centralizer_index(SEGRE, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], p) == 0
        assert centralizer_index(HEIS, [[p]], p) == 2
        assert centralizer_index(HEIS, [[p ** 3]], p) == 6


def test_centralizer_cap_checked():
    with pytest.raises(ValueError):
        centralizer_index(HEIS, [[8]], 2, cap=1)


def test_centralizer_point_formula(seed):
    """Type (p^r, 1, 1, 1): w' = d r - 2 min(r, v(pf(phi))), phi the functional cutting out the hyperplane."""
    rng = random.Random(seed)
    p, seen = 3, set()
    for _ in range(60):
        g = _rand_unimodular(4, rng)
        phi = _inverse_column(g, 0)
        r = rng.randint(1, 3)
        L = [[p ** (r if k == 0 else 0) * x for x in g[k]] for k in range(4)]
        v = min(r, _val(_pf(phi), p))
        seen.add(v)
        assert centralizer_index(SEGRE, L, p) == 4 * r - 2 * v
    assert len(seen) >= 2


def _dual_flag(g, e):
    """Flag pieces of the lattice rows p^e[k] g[k]: spans of dual vectors, smallest piece first."""
    phis = [_inverse_column(g, j) for j in range(4)]
    return [[phis[j] for j in range(4) if e[j] >= lev] for lev in sorted(set(e), reverse=True)[:-1]]


def _points(span, p):
    for coeffs in product(range(p), repeat=len(span)):
        if any(coeffs):
            yield [sum(c * s[k] for c, s in zip(coeffs, span)) for k in range(4)]


def _on_surface(span, p):
    return all(_pf(v) % p == 0 for v in _points(span, p))


def _misses_surface(span, p):
    return all(_pf(v) % p for v in _points(span, p))


def _random_type(rng, min_len=1):
    I = tuple(sorted(rng.sample([1, 2, 3], rng.randint(min_len, 3))))
    return I, tuple(rng.randint(1, 3) for _ in I)


def test_centralizer_off_pfaffian(seed):
    """Flags missing the surface: w' = d * sum(r)."""
    rng = random.Random(seed)
    p, n = 3, 0
    while n < 30:
        g = _rand_unimodular(4, rng)
        I, r = _random_type(rng)
        e = type_exponents(I, r, 4)
        if not all(_misses_surface(piece, p) for piece in _dual_flag(g, e)):
            continue
        L = [[p ** e[k] * x for x in g[k]] for k in range(4)]
        assert centralizer_index(SEGRE, L, p) == 4 * sum(r)
        n += 1


def test_centralizer_weight_splitting(seed):
    """Leading flag pieces inside the surface, later ones not: w' = w'(leading part) + d * sum(rest)."""
    rng = random.Random(seed)
    p, n = 3, 0
    while n < 40:
        g = _rand_unimodular(4, rng)
        I, r = _random_type(rng, 2)
        e = type_exponents(I, r, 4)
        inside = [_on_surface(piece, p) for piece in _dual_flag(g, e)]
        k = inside.index(False) if False in inside else len(inside)
        if k == 0 or k == len(inside) or any(inside[k:]):
            continue
        e1 = type_exponents(I[:k], r[:k], 4)
        L = [[p ** e[q] * x for x in g[q]] for q in range(4)]
        L1 = [[p ** e1[q] * x for x in g[q]] for q in range(4)]
        assert centralizer_index(SEGRE, L, p) == centralizer_index(SEGRE, L1, p) + 4 * sum(r[k:])
        n += 1


def test_centralizer_unimodular_invariance(seed):
    rng = random.Random(seed)
    p = 2
    for L in list(enumerate_sublattices(4, p, 2))[::7]:
        w = centralizer_index(SEGRE, L, p)
        U = _rand_unimodular(4, rng)
        B = [[sum(U[i][k] * L.basis[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
        assert centralizer_index(SEGRE, B, p) == w


def test_heisenberg_coefficients():
    assert dirichlet_coeffs_lattice(HEIS, 2, 8) == [1, 3, 7, 19, 43, 91, 203, 427, 875]
    assert dirichlet_coeffs_lattice(HEIS, 3, 8) == [1, 4, 13, 49, 157, 481, 1534, 4693, 14170]


def test_direct_modes_agree():
    for p in (2, 3):
        ex = dirichlet_coeffs_direct(HEIS, p, 4, mode="exhaustive")
        assert ex == dirichlet_coeffs_direct(HEIS, p, 4, mode="pruned") == dirichlet_coeffs_lattice(HEIS, p, 4)
        assert ex[0] == 1


def test_heisenberg_times_z():
    hz = load_preset("heisenberg+z1")
    for p in (2, 3):
        a = dirichlet_coeffs_lattice(hz, p, 3)
        assert a == dirichlet_coeffs_direct(hz, p, 3, mode="exhaustive")
        assert a[1] == p * p + p + 1  # hyperplanes containing the commutator


def test_segre_lattice_oracle_p2():
    assert dirichlet_coeffs_lattice(SEGRE, 2, 6) == [1, 15, 155, 1539, 13971, 121107, 1030035]
    assert A_series_lattice(SEGRE, 2, 0) == [1]
