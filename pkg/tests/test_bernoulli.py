from fractions import Fraction

import pytest

from zetafock.bernoulli import bernoulli_number, bernoulli_poly, zeta_negative

KNOWN = {
    0: Fraction(1),
    1: Fraction(-1, 2),
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
}


def test_known_numbers():
    for n, b in KNOWN.items():
        assert bernoulli_number(n) == b
    for n in range(3, 20, 2):
        assert bernoulli_number(n) == 0


def test_polynomial_difference_equation():
    # B_n(x+1) - B_n(x) = n x^(n-1)
    for n in range(1, 10):
        for x in [Fraction(0), Fraction(1, 2), Fraction(-2, 3), Fraction(5, 7)]:
            lhs = bernoulli_poly(n, x + 1) - bernoulli_poly(n, x)
            assert lhs == n * x ** (n - 1)


def test_polynomial_symmetry_and_endpoints():
    for n in range(0, 10):
        assert bernoulli_poly(n, Fraction(0)) == bernoulli_number(n)
        for x in [Fraction(1, 3), Fraction(2, 5)]:
            assert bernoulli_poly(n, 1 - x) == (-1) ** n * bernoulli_poly(n, x)


def test_zeta_negative_values():
    assert zeta_negative(1) == Fraction(-1, 12)
    assert zeta_negative(3) == Fraction(1, 120)
    assert zeta_negative(5) == Fraction(-1, 252)
    assert zeta_negative(7) == Fraction(1, 240)
    for m in range(1, 12):
        assert zeta_negative(m) == -bernoulli_number(m + 1) / (m + 1)
