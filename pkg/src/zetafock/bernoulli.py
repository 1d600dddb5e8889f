"""Bernoulli numbers, Bernoulli polynomials and zeta values at negative integers.

All values are exact rationals.  The convention is B_1 = -1/2, under which
B_n(0) = B_n for every n.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Return the Bernoulli number B_n (convention B_1 = -1/2).

    Computed from the defining recurrence
    sum_{k=0}^{n} C(n+1, k) B_k = 0 for n >= 1, with B_0 = 1.
    """
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2 == 1:
        return Fraction(0)
    acc = Fraction(0)
    for k in range(n):
        acc += comb(n + 1, k) * bernoulli_number(k)
    return -acc / (n + 1)


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    """Evaluate the Bernoulli polynomial B_n(x) at a rational point.

    B_n(x) = sum_k C(n, k) B_k x^(n-k).
    """
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    x = Fraction(x)
    acc = Fraction(0)
    for k in range(n + 1):
        acc += comb(n, k) * bernoulli_number(k) * x ** (n - k)
    return acc


def zeta_negative(m: int) -> Fraction:
    """Return zeta(-m) = -B_{m+1}/(m+1) for a positive integer m."""
    if m < 1:
        raise ValueError("argument must be a positive integer")
    return -bernoulli_number(m + 1) / (m + 1)
