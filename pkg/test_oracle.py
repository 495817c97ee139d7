from fractions import Fraction

import pytest
import sympy

from chi_index.errors import PreconditionError
from chi_index.fieldspec import enumerate_characters, real_cyclotomic_field
from chi_index.modarith import p_adic_valuation
from chi_index.oracle import (
    CyclotomicRational,
    DirichletCharacter,
    bernoulli,
    bernoulli_polynomial,
    characters_mod,
    even_primitive_characters,
    generalized_bernoulli,
    is_regular,
    predicted_nontrivial_configs,
    teichmuller_character,
)


def _by_order(f, order):
    return [chi for chi in characters_mod(f) if chi.order == order]


@pytest.mark.parametrize("k, expected", [(0, Fraction(1)), (1, Fraction(-1, 2)), (2, Fraction(1, 6)),
                                         (12, Fraction(-691, 2730))])
def test_bernoulli(k, expected):
    assert bernoulli(k) == expected


def test_odd_bernoulli_numbers_vanish():
    assert all(bernoulli(k) == 0 for k in range(3, 40, 2))


def test_bernoulli_agrees_with_sympy():
    # sympy fixes B_1 = +1/2, so the comparison starts at 2
    for k in range(2, 60):
        value = sympy.bernoulli(k)
        assert bernoulli(k) == Fraction(int(value.p), int(value.q))


def test_bernoulli_polynomial_values():
    assert bernoulli_polynomial(1, 1) == Fraction(1, 2)
    assert bernoulli_polynomial(2, 0) == Fraction(1, 6)
    assert bernoulli_polynomial(3, Fraction(1, 2)) == 0


@pytest.mark.parametrize("p, expected", [(3, True), (5, True), (11, True), (37, False), (59, False), (67, False),
                                         (101, False), (103, False), (97, True)])
def test_is_regular(p, expected):
    assert is_regular(p) is expected


def test_is_regular_rejects_non_primes():
    with pytest.raises(PreconditionError):
        is_regular(2)
    with pytest.raises(PreconditionError):
        is_regular(9)


def test_characters_mod_five():
    characters = characters_mod(5)
    assert sorted(chi.order for chi in characters) == [1, 2, 4, 4]
    assert [chi.order for chi in even_primitive_characters(5)] == [2]


def test_teichmuller_character_is_odd_and_faithful():
    omega = teichmuller_character(7)
    assert omega.order == 6
    assert not omega.is_even
    assert omega.is_primitive
    assert omega.power(6).order == 1


def test_primitive_character_of_an_imprimitive_one():
    (quadratic,) = _by_order(5, 2)
    trivial3 = _by_order(3, 1)[0]
    induced = quadratic * trivial3
    assert induced.modulus == 15
    assert induced.conductor == 5
    assert not induced.is_primitive
    assert induced.primitive() == quadratic


def test_generalized_bernoulli_trivial_character():
    (trivial,) = characters_mod(1)
    assert generalized_bernoulli(trivial, 2).as_rational() == Fraction(1, 6)
    assert generalized_bernoulli(trivial, 1).as_rational() == Fraction(1, 2)


def test_generalized_bernoulli_quadratic_characters():
    (mod5,) = _by_order(5, 2)
    assert generalized_bernoulli(mod5, 1).is_zero()
    (mod3,) = _by_order(3, 2)
    assert generalized_bernoulli(mod3, 1).as_rational() == Fraction(-1, 3)
    # L(-1, chi_5) = -B_{2,chi}/2 = -2/5
    assert generalized_bernoulli(mod5, 2).as_rational() == Fraction(4, 5)


@pytest.mark.parametrize("f", [5, 7, 8, 12, 13])
def test_generalized_bernoulli_parity_vanishing(f):
    for psi in characters_mod(f):
        if not psi.is_primitive or psi.order == 1:
            continue
        for k in range(1, 6):
            if psi.is_even != (k % 2 == 0):
                assert generalized_bernoulli(psi, k).is_zero()


def test_generalized_bernoulli_rejects_imprimitive_characters():
    (quadratic,) = _by_order(5, 2)
    with pytest.raises(PreconditionError):
        generalized_bernoulli(quadratic * _by_order(3, 1)[0], 2)


def test_cyclotomic_norms():
    one_plus_i = CyclotomicRational(4, (Fraction(1), Fraction(1)))
    assert one_plus_i.norm() == 2
    zeta3 = CyclotomicRational(3, (Fraction(0), Fraction(1)))
    assert zeta3.norm() == 1
    assert CyclotomicRational(1, (Fraction(3, 4),)).norm() == Fraction(3, 4)


def test_cyclotomic_reduction():
    # zeta_4^2 = -1
    reduced = CyclotomicRational.reduce(4, [Fraction(1), Fraction(0), Fraction(1), Fraction(0)])
    assert reduced.is_zero()
    with pytest.raises(PreconditionError):
        CyclotomicRational(4, (Fraction(0), Fraction(1))).as_rational()


@pytest.mark.parametrize("p", [5, 7])
def test_regular_primes_predict_nothing_over_q(p):
    assert predicted_nontrivial_configs(p, 1, 7, conductors=[1]) == []


def test_predicted_configs_reject_bad_primes():
    with pytest.raises(PreconditionError):
        predicted_nontrivial_configs(2, 10, 5)


@pytest.mark.slow
def test_irregular_pair_at_37_flags_only_r_5_mod_36():
    configs = predicted_nontrivial_configs(37, 1, 71, conductors=[1])
    assert sorted(config.r for config in configs) == [5, 41]
    assert all(config.valuation >= 1 for config in configs)
    assert all(config.twisted.conductor == 37 for config in configs)


def test_local_valuation_of_rationals():
    assert CyclotomicRational(1, (Fraction(74, 3),)).local_valuation(37) == 1
    assert CyclotomicRational(1, (Fraction(5, 37),)).local_valuation(37) == -1
    with pytest.raises(PreconditionError):
        CyclotomicRational(3, (Fraction(0), Fraction(0))).local_valuation(3)


@pytest.mark.parametrize("m, p, coefficients, expected", [
    # zeta_4 -> T(2) mod 5, so 1 + 2i lies over the chosen prime and 1 - 2i does not
    (4, 5, (1, 2), 1),
    (4, 5, (1, -2), 0),
    # zeta_3 -> T(3^2) = T(2) mod 7
    (3, 7, (2, -1), 1),
    (3, 7, (4, -1), 0),
    (4, 3, (1, 1), 0),
    (4, 3, (3, 6), 1),
])
def test_local_valuation_unramified(m, p, coefficients, expected):
    value = CyclotomicRational(m, tuple(Fraction(c) for c in coefficients))
    assert value.local_valuation(p) == expected


@pytest.mark.parametrize("m, p, coefficients, expected", [
    (3, 3, (1, -1), Fraction(1, 2)),
    (3, 3, (3, 0), 1),
    (5, 5, (1, -1, 0, 0), Fraction(1, 4)),
    (12, 3, (Fraction(1, 3), 0, 0, 0), -1),
])
def test_local_valuation_ramified(m, p, coefficients, expected):
    value = CyclotomicRational(m, tuple(Fraction(c) for c in coefficients))
    assert value.local_valuation(p) == expected


def test_local_valuation_is_bounded_by_the_norm():
    value = CyclotomicRational(36, tuple(Fraction(c) for c in (3, 1, 0, 5, 2, 0, 1, 0, 0, 7, 0, 1)))
    norm = value.norm()
    assert norm.denominator == 1
    # 37 splits completely in Q(zeta_36), so one prime cannot carry more than the norm
    assert 0 <= value.local_valuation(37) <= p_adic_valuation(norm.numerator, 37)


@pytest.mark.parametrize("f", [5, 7, 13, 16, 20, 35])
def test_field_characters_pull_back_to_even_dirichlet_characters(f):
    field = real_cyclotomic_field(f, 3)
    conductors = set()
    for chi in enumerate_characters(field.group):
        dirichlet = DirichletCharacter.from_field_character(field, chi)
        assert dirichlet.order == chi.order
        assert dirichlet.is_even
        assert dirichlet.conductor == field.character_conductor(chi)
        conductors.add(dirichlet.conductor)
    assert 1 in conductors and f in conductors
