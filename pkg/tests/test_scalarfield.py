from fractions import Fraction

import pytest

from iqpoisson.scalarfield import (I, ONE, Q, V, ZERO, GaussianRational, IntegralityProfile, PoleAtOne,
                                   Scalar, divide_exact, format_scalar, is_in_A_prime, parse_scalar,
                                   quantum_binomial, quantum_factorial, quantum_integer,
                                   specialize_at_one)


def test_quantum_integers():
    assert quantum_integer(2, 1) == (V ** 4 + 1) / V ** 2
    assert quantum_integer(1, 3) == ONE
    assert quantum_binomial(3, 1, 1) == (V ** 8 + V ** 4 + 1) / V ** 4
    assert quantum_factorial(3) == quantum_integer(2) * quantum_integer(3)
    assert quantum_integer(-2) == -quantum_integer(2)


def test_quantum_integer_scaled_eps():
    # [2]_{q^2} = q^2 + q^-2
    assert quantum_integer(2, 2) == Q ** 2 + ONE / Q ** 2


def test_divide_exact():
    assert divide_exact((V ** 2 - 1) * (V ** 2 + 1), V ** 2 - 1) == V ** 2 + 1
    assert divide_exact(ZERO, V + 3) == ZERO
    assert divide_exact(Q - 1, (V - 1) * 2) == (V + 1) / 2
    with pytest.raises(ZeroDivisionError):
        divide_exact(ONE, ZERO)


def test_specialize():
    assert specialize_at_one((V ** 2 - 1) / (V - 1)) == GaussianRational(2)
    assert specialize_at_one(quantum_integer(2)) == GaussianRational(2)
    assert specialize_at_one(I * 3 + V) == GaussianRational(1, 3)
    with pytest.raises(PoleAtOne):
        specialize_at_one(ONE / (V - 1))


def test_canonical_form():
    a = (V ** 2 - 1) / (V - 1)
    assert a == V + 1
    assert hash(a) == hash(V + 1)
    assert ZERO.is_zero() and (V - V).is_zero()
    assert (I * I) == -ONE
    assert (ONE / (ONE + I)) == (ONE - I) / 2


def test_integrality_profile():
    p = IntegralityProfile((1,))
    assert is_in_A_prime(ONE / (1 + V ** 2), p)
    assert not is_in_A_prime(ONE / (V ** 2 - 1), p)
    assert not is_in_A_prime(V / 2, p)
    assert is_in_A_prime(V ** -3 * 7, p)
    assert not is_in_A_prime(I, p)
    assert is_in_A_prime(I, IntegralityProfile((1,), gaussian=True))


def test_integrality_profile_eps():
    # [2]! for eps = 2 makes (q^2 + 1) invertible
    p = IntegralityProfile((1, 2))
    assert is_in_A_prime(ONE / quantum_integer(2), p)
    assert not is_in_A_prime(ONE / quantum_integer(3), p)


def test_gaussian_rational():
    z = GaussianRational(Fraction(1, 2), 3)
    assert z * GaussianRational(2) == GaussianRational(1, 6)
    assert (z - z) == GaussianRational(0)
    assert not GaussianRational(0)
    assert GaussianRational(3).is_integer() and not z.is_integer()
    assert str(GaussianRational(0, 1)) == "I"


def test_format_parse_round_trip():
    for x in (ZERO, ONE, V, (V ** 4 + 1) / V ** 2, I * V - 3, (V - 1) / (V ** 3 + 2)):
        assert parse_scalar(format_scalar(x)) == x
