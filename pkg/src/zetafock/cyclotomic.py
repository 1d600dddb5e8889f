"""Exact arithmetic in the cyclotomic field Q(w_p).

Elements are residue representatives in Q[z] modulo the p-th cyclotomic
polynomial Phi_p(z), with z standing for a fixed primitive p-th root of
unity.  Reduction modulo Phi_p gives a canonical form, so equality (in
particular equality to zero) is decidable coefficient-wise.  Rationals
embed as the p = 1 (constant) case.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

Scalar = Union[int, Fraction, "Cyclotomic"]


def _poly_trim(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    """Quotient and remainder of polynomial division (coefficient lists, low first)."""
    a = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    inv_lead = 1 / b[-1]
    while True:
        _poly_trim(a)
        if len(a) < len(b):
            break
        d = len(a) - len(b)
        c = a[-1] * inv_lead
        q[d] = c
        for i, bc in enumerate(b):
            a[d + i] -= c * bc
    return _poly_trim(q), a


def _unsafe(p: int, coeffs: tuple) -> "Cyclotomic":
    """Construct without reduction; coeffs must already be canonical."""
    z = object.__new__(Cyclotomic)
    z.p = p
    z.coeffs = coeffs
    return z


@lru_cache(maxsize=None)
def cyclotomic_polynomial(p: int) -> tuple[Fraction, ...]:
    """Coefficients of Phi_p(z), lowest degree first.

    Computed by dividing z^p - 1 by the product of Phi_d for proper divisors d.
    """
    if p < 1:
        raise ValueError("p must be a positive integer")
    num = [Fraction(0)] * (p + 1)
    num[0] = Fraction(-1)
    num[p] = Fraction(1)
    for d in range(1, p):
        if p % d == 0:
            q, r = _poly_divmod(num, list(cyclotomic_polynomial(d)))
            assert not r, "cyclotomic division must be exact"
            num = q
    return tuple(num)


class Cyclotomic:
    """An element of Q(w_p) in reduced canonical form.

    The coefficient vector has length deg Phi_p and represents the residue
    class of a polynomial in w_p.  Arithmetic is a commutative field;
    mixed-order arithmetic is rejected except for rational scalars.
    """

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Sequence[Union[int, Fraction]] = ()):
        if p < 1:
            raise ValueError("p must be a positive integer")
        phi = cyclotomic_polynomial(p)
        deg = len(phi) - 1
        c = [Fraction(x) for x in coeffs]
        if len(c) > deg:
            _, c = _poly_divmod(c, list(phi))
        c += [Fraction(0)] * (deg - len(c))
        self.p = p
        self.coeffs = tuple(c[:deg])

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_rational(p: int, x: Union[int, Fraction]) -> "Cyclotomic":
        return Cyclotomic(p, [Fraction(x)])

    @staticmethod
    def root(p: int, s: int = 1) -> "Cyclotomic":
        """The root of unity w_p^s in canonical reduced form."""
        s %= p
        c = [Fraction(0)] * (s + 1)
        c[s] = Fraction(1)
        return Cyclotomic(p, c)

    def _coerce(self, other: Scalar) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.p != self.p:
                raise ValueError(f"mixed cyclotomic orders {self.p} and {other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.from_rational(self.p, other)
        return NotImplemented  # type: ignore[return-value]

    # -- field arithmetic ----------------------------------------------------

    def __add__(self, other: Scalar) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.p != self.p:
                raise ValueError(f"mixed cyclotomic orders {self.p} and {other.p}")
            return _unsafe(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))
        if isinstance(other, (int, Fraction)):
            c = list(self.coeffs)
            c[0] = c[0] + other
            return _unsafe(self.p, tuple(c))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return _unsafe(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other: Scalar) -> "Cyclotomic":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> "Cyclotomic":
        return (-self) + other

    def __mul__(self, other: Scalar) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            return _unsafe(self.p, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = len(self.coeffs)
        prod = [Fraction(0)] * (2 * n - 1 if n else 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                if b != 0:
                    prod[i + j] += a * b
        return Cyclotomic(self.p, prod)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        """Multiplicative inverse via the extended Euclidean algorithm in Q[z]."""
        if not self:
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        # extended gcd of self (as a polynomial) and Phi_p
        r0 = list(cyclotomic_polynomial(self.p))
        r1 = _poly_trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while True:
            q, r = _poly_divmod(r0, r1)
            if not r:
                break
            # s_next = s0 - q * s1
            s_next = list(s0) + [Fraction(0)] * max(0, len(q) + len(s1) - 1 - len(s0))
            for i, qc in enumerate(q):
                if qc == 0:
                    continue
                for j, sc in enumerate(s1):
                    s_next[i + j] -= qc * sc
            r0, r1 = r1, r
            s0, s1 = s1, _poly_trim(s_next)
        # r1 is the gcd (a nonzero constant since Phi_p is irreducible)
        assert len(r1) == 1, "Phi_p must be coprime to any nonzero residue"
        inv_c = 1 / r1[0]
        return Cyclotomic(self.p, [c * inv_c for c in s1])

    def __truediv__(self, other: Scalar) -> "Cyclotomic":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Scalar) -> "Cyclotomic":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Cyclotomic":
        if n < 0:
            return self.inverse() ** (-n)
        result = Cyclotomic.from_rational(self.p, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- predicates and conversions ------------------------------------------

    def __bool__(self) -> bool:
        return any(c != 0 for c in self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.from_rational(self.p, other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(str(c) if i == 0 else f"{c}*w{self.p}^{i}")
        return " + ".join(terms) if terms else "0"

    def serialize(self) -> list[str]:
        """Coefficient list as fraction strings."""
        return [str(c) for c in self.coeffs]


def cyclo(p: int, s: int) -> Cyclotomic:
    """Return w_p^s in canonical reduced form (w_p^p = 1)."""
    return Cyclotomic.root(p, s)
