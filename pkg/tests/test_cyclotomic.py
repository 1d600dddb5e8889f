import random
from fractions import Fraction

import pytest

from zetafock.cyclotomic import Cyclotomic, cyclo, cyclotomic_polynomial


def frac(*args):
    return Fraction(*args)


def test_cyclotomic_polynomials():
    # (coefficients low to high)
    assert cyclotomic_polynomial(1) == (frac(-1), frac(1))
    assert cyclotomic_polynomial(2) == (frac(1), frac(1))
    assert cyclotomic_polynomial(3) == (frac(1), frac(1), frac(1))
    assert cyclotomic_polynomial(4) == (frac(1), frac(0), frac(1))
    assert cyclotomic_polynomial(6) == (frac(1), frac(-1), frac(1))
    assert cyclotomic_polynomial(12) == (frac(1), frac(0), frac(-1), frac(0), frac(1))


def test_root_of_unity_relations():
    for p in range(1, 13):
        w = cyclo(p, 1)
        assert w**p == Cyclotomic.from_rational(p, 1)
        if p > 1:
            total = Cyclotomic.from_rational(p, 0)
            for s in range(p):
                total = total + cyclo(p, s)
            assert total == Cyclotomic.from_rational(p, 0)


def rand_elt(rng, p):
    return Cyclotomic(
        p, [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(max(p, 1))]
    )


def test_field_axioms():
    rng = random.Random(99)
    for p in range(1, 13):
        for _ in range(5):
            x, y, z = (rand_elt(rng, p) for _ in range(3))
            assert x + y == y + x
            assert x * y == y * x
            assert (x + y) + z == x + (y + z)
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z
            assert x + (-x) == Cyclotomic.from_rational(p, 0)
            if x:
                assert x * x.inverse() == Cyclotomic.from_rational(p, 1)
                assert (1 / x) * x == Cyclotomic.from_rational(p, 1)


def test_rational_detection():
    c = Cyclotomic.from_rational(5, Fraction(3, 7))
    assert c.is_rational()
    assert c.rational_value() == Fraction(3, 7)
    assert not cyclo(5, 1).is_rational()


def test_scalar_mixing():
    c = cyclo(3, 1)
    assert c * 2 == c + c
    assert c - c == Cyclotomic.from_rational(3, 0)
    assert 1 + c == c + 1


def test_mixed_orders_rejected():
    with pytest.raises(ValueError):
        cyclo(3, 1) + cyclo(4, 1)
    with pytest.raises(ValueError):
        cyclo(3, 1) * cyclo(5, 1)


def test_zero_inverse_rejected():
    with pytest.raises(ZeroDivisionError):
        Cyclotomic.from_rational(4, 0).inverse()


def test_reduction_wraps_high_powers():
    # w_4^2 = -1, so squaring the generator lands on a rational element
    assert cyclo(4, 1) * cyclo(4, 1) == Cyclotomic.from_rational(4, -1)
    assert cyclo(2, 1) == Cyclotomic.from_rational(2, -1)
