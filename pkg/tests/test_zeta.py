import itertools

import pytest

from normalzeta.fpgeom import FanoClassSummary, fano_data
from normalzeta.oracle import A_series_lattice, coset_lattice_count, count_lattices_of_type, flag_total
from normalzeta.polyring import (GeomFactor, IntPoly, ONE, RationalFn, exceptional_factor, gaussian_binomial,
                                 igusa_or_one, pt, series_expand)
from normalzeta.presentation import ValidationError, check, load_preset
from normalzeta.zeta import (LatticeTypeIndex, MissingFanoData, A_difference_closed, W0, W_component,
                             admissible_subsets, assemble, check_admissible, coefficient_c,
                             generating_function_truncated, mu_function, mu_value, multiplicity, x_data, y_data)

SEGRE = load_preset("segre")
PRIMES = [2, 3, 5, 7]


@pytest.fixture(scope="module")
def segre_fano():
    return fano_data(SEGRE, PRIMES)


def test_mu_examples():
    assert mu_function(3, 3) == ONE
    assert mu_function(3, 1) == pt(2, 0) - pt(1, 0)
    assert mu_function(1, 3).is_zero()
    for p in (2, 3):
        assert mu_value(3, 1, p) == mu_function(3, 1).evaluate({"p": p})
    with pytest.raises(ValueError):
        mu_function(0, 1)


def test_multiplicity_examples():
    m = multiplicity([1, 2], 4)
    assert (m.const, m.coeffs) == (-5, {1: 3, 2: 4})
    assert multiplicity([], 4).exponent({}) == 0
    m = multiplicity([1], 2)
    assert (m.const, m.coeffs) == (-1, {1: 1})


def _multiplicity_cases(p, large):
    for dp in range(2, 5):
        for size in range(1, dp):
            for I in itertools.combinations(range(1, dp), size):
                for r in itertools.product((1, 2), repeat=size):
                    big = p ** multiplicity(I, dp).exponent(r) > 3 ** 9
                    if big == large:
                        yield I, r, dp


@pytest.mark.parametrize("p", [2, 3])
def test_multiplicity_matches_coset_enumeration(p):
    for I, r, dp in _multiplicity_cases(p, large=False):
        assert coset_lattice_count(I, r, dp, p) == p ** multiplicity(I, dp).exponent(r), (I, r)


@pytest.mark.slow
def test_multiplicity_matches_coset_enumeration_large():
    for I, r, dp in _multiplicity_cases(3, large=True):
        assert coset_lattice_count(I, r, dp, 3) == 3 ** multiplicity(I, dp).exponent(r), (I, r)


def test_multiplicity_times_flags_is_total():
    p = 2
    for dp in (2, 3):
        for size in range(1, dp):
            for I in itertools.combinations(range(1, dp), size):
                for r in itertools.product((1, 2), repeat=size):
                    total = count_lattices_of_type(I, r, dp, p)
                    assert total == flag_total(I, dp, p) * p ** multiplicity(I, dp).exponent(r)


def test_admissible_subsets_segre():
    subsets = admissible_subsets(4, [1, 2])
    assert len(subsets) == 16
    labels = {I.label() for I in subsets}
    assert {"{}", "{1*}", "{1*,2*,3}", "{2*,3}"} <= labels
    assert "{2*}" in labels and "{3*}" not in labels
    with pytest.raises(ValueError):
        check_admissible(LatticeTypeIndex((3,), 1), 4, [1, 2])
    with pytest.raises(ValueError):
        check_admissible(LatticeTypeIndex((2, 1), 0), 4, [1, 2])


def test_segre_coefficients_all_sixteen():
    n1, n2 = IntPoly.var("n1"), IntPoly.var("n2")
    b = gaussian_binomial
    expected = {
        ((), 0): ONE,
        ((1,), 0): b(4, 1) - n1,
        ((2,), 0): b(4, 2) - n2,
        ((3,), 0): b(4, 3),
        ((1, 2), 0): b(3, 1) * (b(4, 1) - n1),
        ((1, 3), 0): b(3, 2) * (b(4, 1) - n1),
        ((2, 3), 0): b(2, 1) * (b(4, 2) - n2),
        ((1, 2, 3), 0): b(2, 1) * b(3, 1) * (b(4, 1) - n1),
        ((1,), 1): n1,
        ((1, 2), 1): b(3, 1) * n1 - n2 * b(2, 1),
        ((1, 3), 1): b(3, 2) * n1,
        ((1, 2, 3), 1): b(2, 1) * (b(3, 1) * n1 - n2 * b(2, 1)),
        ((2,), 1): n2,
        ((1, 2), 2): n2 * b(2, 1),
        ((2, 3), 1): b(2, 1) * n2,
        ((1, 2, 3), 2): b(2, 1) * n2 * b(2, 1),
    }
    subsets = admissible_subsets(4, [1, 2])
    assert {(I.levels, I.stars) for I in subsets} == set(expected)
    for I in subsets:
        assert coefficient_c(I, {1: n1, 2: n2}, 4) == expected[(I.levels, I.stars)], I.label()


def test_coefficients_sum_to_all_flags():
    # summing the starred and unstarred versions of each level set recovers the flag count
    n1, n2 = IntPoly.var("n1"), IntPoly.var("n2")
    from normalzeta.polyring import flag_count
    by_levels = {}
    for I in admissible_subsets(4, [1, 2]):
        by_levels[I.levels] = by_levels.get(I.levels, IntPoly()) + coefficient_c(I, {1: n1, 2: n2}, 4)
    for levels, total in by_levels.items():
        assert total == flag_count(list(levels), 4)


def test_numerical_data_segre(segre_fano):
    assert [x_data(i, 4, 4, 0) for i in (1, 2, 3)] == [(7, 5), (12, 6), (15, 7)]
    c1, c2 = segre_fano[1][0], segre_fano[2][0]
    assert y_data(1, c1, 4, 0) == (6, 3)
    assert y_data(2, c2, 4, 0) == (9, 5)
    assert y_data(1, c1, 4, 0, "codimension") == (5, 3)
    with pytest.raises(ValueError):
        y_data(1, c1, 4, 0, "other")


def test_W_examples(segre_fano):
    X = {i: x_data(i, 4, 4, 0) for i in (1, 2, 3)}
    assert W0(SEGRE) == igusa_or_one([X[1], X[2], X[3]])
    assert W0(load_preset("heisenberg")) == RationalFn(ONE)
    c1, c2 = segre_fano[1][0], segre_fano[2][0]
    assert W_component(SEGRE, c1, segre_fano) == igusa_or_one([X[2], X[3]]) * exceptional_factor(X[1], (6, 3), 3, 2)
    assert W_component(SEGRE, c2, segre_fano) == (igusa_or_one([X[3]]) * exceptional_factor(X[2], (9, 5), 4, 1)
                                                  * igusa_or_one([(6, 3)]))
    zero = FanoClassSummary(2, 0, 1, 4, {}, 0)
    assert W_component(SEGRE, zero, segre_fano).is_zero()


def test_A_difference_closed():
    E2 = A_difference_closed(2, 4, 4, 0, 4, 1)
    assert E2 == RationalFn(pt(8, 5) - pt(8, 6), [GeomFactor(9, 5), GeomFactor(12, 6)])
    E1 = A_difference_closed(1, 4, 4, 0, 3, 2)
    assert E1 == RationalFn(pt(4, 3) - pt(4, 5), [GeomFactor(6, 3), GeomFactor(7, 5)])
    with pytest.raises(ValueError):
        A_difference_closed(1, 4, 4, 0, 4, 2)


def test_segre_prefactors(segre_fano):
    z = assemble(SEGRE, segre_fano)
    assert z.symbolic
    assert set(z.prefactors[0].den) == {GeomFactor(i, 1) for i in range(4)}
    assert z.prefactors[1].den == (GeomFactor(16, 8),)
    assert z.counts[(1, 2, 2)] == (ONE + pt(1, 0)) ** 2
    assert z.counts[(2, 1, 1)] == 2 * (ONE + pt(1, 0))


CLOSED_PRESETS = ["segre", "conic", "hxh", "heisenberg", "segre+z1", "heisenberg+z2"]


@pytest.mark.parametrize("name", CLOSED_PRESETS)
@pytest.mark.parametrize("p", [2, 3])
def test_direct_sum_matches_closed_form(name, p):
    pres = load_preset(name)
    fd = fano_data(pres, PRIMES)
    z = assemble(pres, fd)
    K = 8 if p == 2 else 6
    coeffs, safe = generating_function_truncated(pres, fd, p, K=K)
    assert safe >= K
    assert coeffs == series_expand(z.A, K, p)


@pytest.mark.parametrize("name", ["conic", "hxh", "heisenberg"])
def test_closed_form_matches_lattice_oracle(name):
    pres = load_preset(name)
    z = assemble(pres, fano_data(pres, PRIMES))
    for p in (2, 3):
        assert series_expand(z.A, 5, p) == A_series_lattice(pres, p, 5)


def test_segre_A_series_frozen(segre_fano):
    z = assemble(SEGRE, segre_fano)
    assert z.series(8, 2) == [1, 15, 155, 1539, 13971, 121107, 1030035, 8612499, 70945939]
    assert z.series(8, 3) == [1, 40, 1210, 35176, 977611, 26717872, 726299806, 19683456376, 532319908666]


@pytest.mark.parametrize("name", CLOSED_PRESETS)
def test_coefficients_nonnegative(name):
    pres = load_preset(name)
    z = assemble(pres, fano_data(pres, PRIMES))
    for p in (2, 3, 5):
        a = z.series(10, p)
        assert a[0] == 1 and all(isinstance(x, int) and x >= 0 for x in a)


def test_rmax_zero_is_constant(segre_fano):
    coeffs, safe = generating_function_truncated(SEGRE, segre_fano, 2, Rmax=0)
    assert coeffs[0] == 1 and all(c == 0 for c in coeffs[1:])
    assert safe == 2


def test_fixed_prime_assembly(segre_fano):
    z = assemble(SEGRE, segre_fano, prime=3)
    assert not z.symbolic and z.counts[(1, 2, 2)] == 16
    assert z.series(6) == assemble(SEGRE, segre_fano).series(6, 3)
    with pytest.raises(ValueError):
        z.series(4, 2)


def test_missing_levels(segre_fano):
    with pytest.raises(MissingFanoData) as exc:
        assemble(SEGRE, {1: segre_fano[1]})
    assert exc.value.levels == [2, 3]


def test_abelian_rejected():
    with pytest.raises(ValidationError):
        check(load_preset("znm(4)"))


def test_codimension_convention_fails_oracle(segre_fano):
    good = assemble(SEGRE, segre_fano)
    bad = assemble(SEGRE, segre_fano, convention="codimension")
    oracle = A_series_lattice(SEGRE, 2, 6)
    assert series_expand(good.A, 6, 2) == oracle
    assert series_expand(bad.A, 6, 2) != oracle
    assert any("does not match" in x for x in bad.deviations)
