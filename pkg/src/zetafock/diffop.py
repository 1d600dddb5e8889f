"""The centrally extended Lie algebras of differential operators on the circle.

Elements are finite sums of t^m f(D) with rational polynomial f, plus a
central coefficient.  The bracket carries the 2-cocycle in its normalized
form (-1/2 of the defining cocycle), which yields the usual Virasoro
relations for the r = 0 generators.  The generator family L_n^(r) (and its
zeta-shifted "bar" companion) spans the positive subalgebra; membership is
certified by decomposing against the generator basis at fixed degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bernoulli import zeta_negative

Poly = tuple[Fraction, ...]  # coefficients of f(D), lowest degree first


def _ptrim(c: list[Fraction]) -> Poly:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _ptrim(
        [
            (a[i] if i < len(a) else Fraction(0))
            + (b[i] if i < len(b) else Fraction(0))
            for i in range(n)
        ]
    )


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _ptrim(out)


def _pscale(a: Poly, c: Fraction) -> Poly:
    return _ptrim([x * c for x in a])


def _pshift(a: Poly, n: int) -> Poly:
    """f(D) -> f(D + n)."""
    out: Poly = ()
    base: Poly = (Fraction(1),)
    shift: Poly = (Fraction(n), Fraction(1))
    for c in a:
        out = _padd(out, _pscale(base, c))
        base = _pmul(base, shift)
    return out


def _peval(a: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class GeneratorIndex:
    n: int
    r: int
    basis: str = "plain"  # "plain" | "bar"

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("generator order r must be nonnegative")
        if self.basis not in ("plain", "bar"):
            raise ValueError("basis must be 'plain' or 'bar'")


class DiffOpElement:
    """A finite sum of t^m f_m(D) plus a central coefficient."""

    __slots__ = ("terms", "central")

    def __init__(self, terms=None, central=0):
        clean: dict[int, Poly] = {}
        for m, poly in (terms or {}).items():
            poly = _ptrim([Fraction(c) for c in poly])
            if poly:
                clean[int(m)] = poly
        self.terms = clean
        self.central = Fraction(central)

    @staticmethod
    def monomial(m: int, poly) -> "DiffOpElement":
        return DiffOpElement({m: tuple(Fraction(c) for c in poly)})

    @staticmethod
    def central_element(c=1) -> "DiffOpElement":
        return DiffOpElement({}, central=c)

    def __add__(self, other: "DiffOpElement") -> "DiffOpElement":
        terms = dict(self.terms)
        for m, poly in other.terms.items():
            terms[m] = _padd(terms.get(m, ()), poly)
        return DiffOpElement(terms, self.central + other.central)

    def __neg__(self) -> "DiffOpElement":
        return DiffOpElement(
            {m: _pscale(p, Fraction(-1)) for m, p in self.terms.items()},
            -self.central,
        )

    def __sub__(self, other: "DiffOpElement") -> "DiffOpElement":
        return self + (-other)

    def scale(self, c) -> "DiffOpElement":
        c = Fraction(c)
        return DiffOpElement(
            {m: _pscale(p, c) for m, p in self.terms.items()}, self.central * c
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffOpElement):
            return NotImplemented
        return self.terms == other.terms and self.central == other.central

    def __hash__(self):
        return hash((tuple(sorted(self.terms.items())), self.central))

    def __bool__(self) -> bool:
        return bool(self.terms) or self.central != 0

    def is_zero(self) -> bool:
        return not self

    def serialize(self):
        return {
            "terms": [
                {"m": m, "poly": [str(c) for c in poly]}
                for m, poly in sorted(self.terms.items())
            ],
            "central": str(self.central),
        }

    def __repr__(self) -> str:
        parts = []
        for m, poly in sorted(self.terms.items()):
            ptxt = " + ".join(
                f"{c}*D^{i}" if i else str(c) for i, c in enumerate(poly) if c
            )
            parts.append(f"t^{m}({ptxt})")
        if self.central:
            parts.append(f"{self.central}*c")
        return " + ".join(parts) if parts else "0"


def generator(index: GeneratorIndex) -> DiffOpElement:
    """The generator with the given index, as an explicit element.

    Plain basis: t^n (-1)^(r+1) (D+n)^r D^(r+1); the bar basis adds the
    zeta-value shift (-1)^r/2 * zeta(-1-2r) on the central coordinate when
    n = 0.
    """
    n, r = index.n, index.r
    dpow: Poly = (Fraction(0), Fraction(1))  # D
    poly: Poly = (Fraction(1),)
    shifted: Poly = (Fraction(n), Fraction(1))  # D + n
    for _ in range(r):
        poly = _pmul(poly, shifted)
    for _ in range(r + 1):
        poly = _pmul(poly, dpow)
    poly = _pscale(poly, Fraction((-1) ** (r + 1)))
    central = Fraction(0)
    if index.basis == "bar" and n == 0:
        central = Fraction((-1) ** r, 2) * zeta_negative(1 + 2 * r)
    return DiffOpElement({n: poly}, central)


def cocycle_psi(a: DiffOpElement, b: DiffOpElement) -> Fraction:
    """The defining 2-cocycle, extended bilinearly from the t^m f(D) basis.

    Nonzero only on pairs of degrees summing to zero; for m > 0 the value on
    (t^m f, t^-m g) is sum_{i=1}^{m} f(-i) g(m-i), and antisymmetry covers
    the rest (zero when m = 0).
    """
    acc = Fraction(0)
    for m, f in a.terms.items():
        if m <= 0:
            continue
        g = b.terms.get(-m)
        if g:
            acc += sum((_peval(f, Fraction(-i)) * _peval(g, Fraction(m - i)) for i in range(1, m + 1)), Fraction(0))
    for m, g in b.terms.items():
        if m <= 0:
            continue
        f = a.terms.get(-m)
        if f:
            acc -= sum((_peval(g, Fraction(-i)) * _peval(f, Fraction(m - i)) for i in range(1, m + 1)), Fraction(0))
    return acc


def bracket(a: DiffOpElement, b: DiffOpElement) -> DiffOpElement:
    """Lie bracket with central part -1/2 of the cocycle.

    [t^m f(D), t^n g(D)] = t^(m+n)(f(D+n) g(D) - g(D+m) f(D)); the central
    element brackets to zero.
    """
    terms: dict[int, Poly] = {}
    for m, f in a.terms.items():
        for n, g in b.terms.items():
            part = _padd(
                _pmul(_pshift(f, n), g), _pscale(_pmul(_pshift(g, m), f), Fraction(-1))
            )
            if part:
                terms[m + n] = _padd(terms.get(m + n, ()), part)
    central = Fraction(-1, 2) * cocycle_psi(a, b)
    return DiffOpElement(terms, central)


@dataclass
class Decomposition:
    """Coefficients of an element against the generator basis at one degree.

    reconstruction: sum_i coefficients[i] * generator(degree, i, plain)
    + central * c + residual equals the decomposed element.
    """

    degree: int
    coefficients: dict[int, Fraction] = field(default_factory=dict)
    central: Fraction = Fraction(0)
    residual: DiffOpElement = field(default_factory=DiffOpElement)

    def reconstruct(self) -> DiffOpElement:
        acc = DiffOpElement({}, self.central)
        for i, c in self.coefficients.items():
            acc = acc + generator(GeneratorIndex(self.degree, i)).scale(c)
        return acc + self.residual


def decompose(e: DiffOpElement, degree: int) -> Decomposition:
    """Triangular solve against the generator polynomials at fixed degree.

    The generator polynomials (-1)^(i+1) (D+degree)^i D^(i+1) have distinct
    odd leading degrees 2i+1, so the solve proceeds by descending polynomial
    degree; anything outside the span (e.g. even-degree leading monomials)
    lands in the residual.
    """
    for m in e.terms:
        if m != degree:
            raise ValueError(f"element has support at degree {m}, expected {degree}")
    poly = list(e.terms.get(degree, ()))
    coeffs: dict[int, Fraction] = {}
    residual: Poly = ()
    while _ptrim(list(poly)):
        poly = list(_ptrim(list(poly)))
        deg = len(poly) - 1
        if deg % 2 == 1:
            i = (deg - 1) // 2
            gen_poly = generator(GeneratorIndex(degree, i)).terms[degree]
            a = poly[-1] / gen_poly[-1]
            coeffs[i] = coeffs.get(i, Fraction(0)) + a
            poly = list(_padd(tuple(poly), _pscale(gen_poly, -a)))
        else:
            mono = [Fraction(0)] * deg + [poly[-1]]
            residual = _padd(residual, tuple(mono))
            poly[-1] = Fraction(0)
    coeffs = {i: c for i, c in coeffs.items() if c}
    res = DiffOpElement({degree: residual}) if residual else DiffOpElement()
    return Decomposition(degree, coeffs, e.central, res)


def bar_central_term(r: int, s: int, m: int) -> Fraction:
    """Central coefficient of the bracket of bar generators at degrees m, -m.

    Computed by the change-of-basis route: the bracket's central part in the
    plain basis minus the zeta shifts carried by the bar generators that
    appear in the decomposition.
    """
    br = bracket(
        generator(GeneratorIndex(m, r)), generator(GeneratorIndex(-m, s))
    )
    dec = decompose(br, 0)
    if dec.residual:
        raise ValueError("bracket of generators left the generator span")
    acc = br.central
    for i, a in dec.coefficients.items():
        acc -= a * Fraction((-1) ** i, 2) * zeta_negative(1 + 2 * i)
    return acc
