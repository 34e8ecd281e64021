from fractions import Fraction

import pytest

from hyperrep.scalar import ExactScalar


def test_half_power_even_and_odd():
    assert ExactScalar.half_power(3, 2) == 3
    assert ExactScalar.half_power(3, -2) == Fraction(1, 3)
    assert ExactScalar.half_power(3, 1) == ExactScalar(0, 1, 3)
    assert ExactScalar.half_power(3, -1) * ExactScalar.half_power(3, 1) == 1


def test_square_radicand_folds_into_rational():
    s = ExactScalar(1, 2, 9)
    assert s.sqrt_free()
    assert s == 7


def test_arithmetic_is_exact():
    r3 = ExactScalar(0, 1, 3)
    assert r3 * r3 == 3
    assert (1 + r3) * (1 - r3) == -2
    assert (2 + r3) / (2 + r3) == 1
    assert (1 + r3) ** 3 == ExactScalar(10, 6, 3)
    assert (1 + r3) ** -1 == ExactScalar(Fraction(-1, 2), Fraction(1, 2), 3)


def test_ordering_uses_exact_sign():
    r3 = ExactScalar(0, 1, 3)
    assert r3 > Fraction(173, 100)
    assert r3 < Fraction(174, 100)
    assert ExactScalar(2, -1, 3) > 0
    assert ExactScalar(1, -1, 3) < 0
    assert abs(ExactScalar(1, -1, 3)) == ExactScalar(-1, 1, 3)


def test_float_rounds_to_nearest():
    assert float(ExactScalar(0, 1, 2)) == 2 ** 0.5
    assert float(ExactScalar(Fraction(2, 3))) == 2 / 3


def test_mixed_fields_are_rejected():
    with pytest.raises(ValueError):
        ExactScalar(0, 1, 3) + ExactScalar(0, 1, 5)


def test_rational_coerces_into_any_field():
    assert ExactScalar(0, 1, 3) + ExactScalar(1, 0, 5) == ExactScalar(1, 1, 3)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ExactScalar(1, 0, 3) / 0


def test_to_fraction_refuses_irrationals():
    assert ExactScalar(Fraction(1, 4), 0, 3).to_fraction() == Fraction(1, 4)
    with pytest.raises(ValueError):
        ExactScalar(0, 1, 3).to_fraction()


def test_equal_values_hash_equal():
    assert hash(ExactScalar(Fraction(1, 2), 0, 3)) == hash(Fraction(1, 2))
    assert len({ExactScalar(1, 1, 3), ExactScalar(1, 1, 3)}) == 1
