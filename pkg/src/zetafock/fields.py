"""Twisted vertex operators on the Fock modules, built constructively.

The untwisted free-boson algebra S(h^-) lives here as VoaVector: finite
combinations of creation monomials b_{k,a}(-m_1)...b_{k,a}(-m_L)1 with
cyclotomic coefficients.  Square-bracket operators Y[u,y] = Y(e^{y L(0)}u,
e^y - 1) are computed exactly to any y-order.

Twisted fields on S[nu] are constructed from the weight-one mode sums by
the modified-weak-associativity limit: the product Y_M(u,x_1)Y_M(v,x_2)w,
multiplied by (x_1-x_2)^k and substituted x_1 -> w_p^s (x_2+x_0)^{1/p}-wise,
is divisible by x_0^k, and the quotient IS Y_M(Y(nu^{-s}u,x_0)v,x_2)w.
Slicing the x_0 coefficient of order m-1 with u = b(-1)1 extracts
Y_M(b(-m)v,x_2)w, which assembles the field of any creation monomial by
recursion on its length.  Divisibility is checked at every use, so each
assembled coefficient doubles as a verification of the limit relation.
"""

from __future__ import annotations

import time
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .cyclotomic import Cyclotomic, cyclo
from .fock import FockVector, TwistSetup, apply_mode, monomial_degree
from .reports import CheckRecord, serialize_value
from .series import (
    TruncatedSeries,
    WindowError,
    binom_frac,
    em1_power,
    exp_series,
    y_series,
)

# a VOA creation mode: (k, a, m) stands for b_{k,a}(-m), m >= 1
VoaMode = tuple[int, int, int]
VoaMonomial = tuple[VoaMode, ...]


class VoaVector:
    """Element of the free-boson algebra S(h^-) over Q(w_p)."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        clean: dict[VoaMonomial, Cyclotomic] = {}
        for mono, c in (terms or {}).items():
            if not isinstance(c, Cyclotomic):
                c = Cyclotomic.from_rational(p, c)
            if not c:
                continue
            mono = tuple(sorted(mono))
            for (_, _, m) in mono:
                if m < 1:
                    raise ValueError("VOA monomials are built from creation modes")
            clean[mono] = clean[mono] + c if mono in clean else c
        self.terms = {m: c for m, c in clean.items() if c}

    @staticmethod
    def one(p: int) -> "VoaVector":
        return VoaVector(p, {(): 1})

    @staticmethod
    def creation(p: int, k: int, a: int, m: int = 1) -> "VoaVector":
        return VoaVector(p, {((k % p, a, m),): 1})

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return VoaVector(self.p, terms)

    __radd__ = __add__

    def __neg__(self):
        return VoaVector(self.p, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, VoaVector):
            return NotImplemented
        return VoaVector(self.p, {m: c * scalar for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, VoaVector):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def weights(self) -> set[int]:
        return {sum(m for _, _, m in mono) for mono in self.terms}

    def max_weight(self) -> int:
        return max((sum(m for _, _, m in mono) for mono in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len(self.weights()) <= 1

    def nu(self, power: int = 1) -> "VoaVector":
        """The lifted automorphism: b_{k,a} components scale by w_p^k."""
        out = {}
        for mono, c in self.terms.items():
            tot = sum(k for k, _, _ in mono) * power
            out[mono] = c * cyclo(self.p, tot % self.p)
        return VoaVector(self.p, out)

    def serialize(self):
        return [
            {"monomial": [list(md) for md in mono], "coeff": c.serialize()}
            for mono, c in sorted(self.terms.items())
        ]

    def __repr__(self):
        parts = []
        for mono, c in sorted(self.terms.items()):
            label = "".join(f"b[{k},{a}](-{m})" for k, a, m in mono) or "1"
            parts.append(f"({c!r})*{label}")
        return " + ".join(parts) if parts else "0"


def voa_weight(mono: VoaMonomial) -> int:
    return sum(m for _, _, m in mono)


def voa_apply_mode(setup: TwistSetup, k: int, a: int, n: int, v: VoaVector) -> VoaVector:
    """Untwisted Heisenberg mode b_{k,a}(n) acting on S(h^-).

    Negative n creates, positive n contracts with factor <.,.>*n, n = 0
    kills (zero modes act trivially on the vacuum-generated module).
    """
    p = setup.p
    k %= p
    if n == 0:
        return VoaVector(p)
    out: dict[VoaMonomial, Cyclotomic] = {}
    if n < 0:
        md = (k, a, -n)
        for mono, c in v.terms.items():
            m2 = tuple(sorted(mono + (md,)))
            out[m2] = out[m2] + c if m2 in out else c
        return VoaVector(p, out)
    for mono, c in v.terms.items():
        seen = set()
        for i, (k2, a2, m2) in enumerate(mono):
            if (k2, a2, m2) in seen:
                continue
            seen.add((k2, a2, m2))
            if m2 != n or not setup.pairing(k, a, k2, a2):
                continue
            mult = sum(1 for md in mono if md == (k2, a2, m2))
            rest = list(mono)
            rest.pop(i)
            coeff = c * (n * mult)
            key = tuple(rest)
            out[key] = out[key] + coeff if key in out else coeff
    return VoaVector(p, out)


def voa_l_minus_one(setup: TwistSetup, v: VoaVector) -> VoaVector:
    """L(-1): the derivation b(-m) -> m b(-m-1) on monomials."""
    out = VoaVector(setup.p)
    for mono, c in v.terms.items():
        for i, (k, a, m) in enumerate(mono):
            lifted = list(mono)
            lifted[i] = (k, a, m + 1)
            out = out + VoaVector(setup.p, {tuple(lifted): c * m})
    return out


def _weight1_mode_coeff(m_creation: int, n) -> Fraction:
    """Coefficient of b(n) in Y(b(-m)1, x) at x^{-n-m}: C(-n-1, m-1)."""
    return binom_frac(Fraction(-n - 1), m_creation - 1)


def y_product_linear(setup: TwistSetup, u_mode: VoaMode, j: int, v: VoaVector) -> VoaVector:
    """(b_{k,a}(-m)1)_j v in the untwisted algebra.

    Y(b(-m)1, x) = sum_n C(-n-1, m-1) b(n) x^{-n-m}, so the j-th product
    picks n = j - m + 1.
    """
    k, a, m = u_mode
    n = j - m + 1
    coeff = _weight1_mode_coeff(m, n)
    if not coeff:
        return VoaVector(setup.p)
    return voa_apply_mode(setup, k, a, n, v) * coeff


def y_product(setup: TwistSetup, u: VoaVector, j: int, v: VoaVector) -> VoaVector:
    """u_j v for u with monomials of length <= 1 (1 or a single creation mode)."""
    out = VoaVector(setup.p)
    for mono, c in u.terms.items():
        if len(mono) == 0:
            if j == -1:
                out = out + v * c
        elif len(mono) == 1:
            out = out + y_product_linear(setup, mono[0], j, v) * c
        else:
            raise ValueError("y_product handles first arguments of length <= 1 only")
    return out


def y_series_apply(
    setup: TwistSetup, u: VoaVector, v: VoaVector, var: str, lo: int, hi: int
) -> TruncatedSeries:
    """Y(u,x)v as a certified series: length <= 1 first argument directly,
    longer by skew symmetry Y(u,x)v = e^{x L(-1)} Y(v,-x) u."""
    simple = all(len(mono) <= 1 for mono in u.terms)
    data: dict[tuple, VoaVector] = {}
    if simple:
        for e in range(lo, hi + 1):
            term = y_product(setup, u, -e - 1, v)
            if term:
                data[(Fraction(e),)] = term
        return TruncatedSeries(
            (var,), {var: "y"}, {var: Fraction(lo)}, {var: Fraction(hi)}, data
        )
    if not all(len(mono) <= 1 for mono in v.terms):
        raise ValueError("one argument of Y(u,x)v must have length <= 1")
    # skew symmetry: coefficient at x^e of e^{xL(-1)} Y(v,-x)u is
    # sum_t L(-1)^t/t! applied to the x^{e-t} coefficient of Y(v,-x)u.
    base: dict[int, VoaVector] = {}
    floor = -v.max_weight() - u.max_weight() - 1
    for e in range(min(lo, floor), hi + 1):
        term = y_product(setup, v, -e - 1, u) * Fraction(-1 if e % 2 else 1)
        if term:
            base[e] = term
    for e in range(lo, hi + 1):
        acc = VoaVector(setup.p)
        t = 0
        while e - t >= min(lo, floor):
            src = base.get(e - t)
            if src:
                lifted = src
                f = Fraction(1)
                for s in range(t):
                    lifted = voa_l_minus_one(setup, lifted)
                    f /= s + 1
                acc = acc + lifted * f
            t += 1
        if acc:
            data[(Fraction(e),)] = acc
    return TruncatedSeries(
        (var,), {var: "y"}, {var: Fraction(lo)}, {var: Fraction(hi)}, data
    )


def square_bracket_series(
    setup: TwistSetup, u: VoaVector, v: VoaVector, var: str, hi: int
) -> TruncatedSeries:
    """Y[u,y]v = e^{y wt(u)} Y(u, e^y-1)v, exact to y-order hi.

    u must be homogeneous; pole order is bounded by wt u + wt v.  One of
    u, v must have monomial length <= 1.
    """
    if not u.is_homogeneous():
        raise ValueError("square-bracket source must be homogeneous")
    wt_u = u.max_weight()
    pole = wt_u + v.max_weight()
    lo = -pole
    # x-coefficients of Y(u,x)v needed up to x^hi (since (e^y-1)^e = y^e(1+..))
    xs = y_series_apply(setup, u, v, "_x", lo, hi)
    out = TruncatedSeries(
        (var,), {var: "y"}, {var: Fraction(lo)}, {var: Fraction(hi)}, {}
    )
    ewt = exp_series(var, Fraction(wt_u), hi + pole)
    for (e,), vec in xs.support():
        factor = em1_power(var, int(e), hi + pole)
        piece = (factor * ewt).restrict_hi({var: hi})
        add = {}
        for (o,), c in piece.support():
            term = vec * c
            if term:
                add[(o,)] = term
        out = out + TruncatedSeries(
            (var,), {var: "y"}, {var: Fraction(lo)}, {var: Fraction(hi)}, add
        )
    return out


def square_bracket_coeff(
    setup: TwistSetup, u: VoaVector, v: VoaVector, j: int, hi: Optional[int] = None
) -> VoaVector:
    """Exact coefficient of y^j in Y[u,y]v."""
    s = square_bracket_series(setup, u, v, "y", max(j, 0) if hi is None else hi)
    c = s.coeff((Fraction(j),))
    return c if c else VoaVector(setup.p)


# ---------------------------------------------------------------------------
# twisted fields on S[nu]
# ---------------------------------------------------------------------------


def _max_deg(w: FockVector) -> Fraction:
    return max(w.degrees(), default=Fraction(0))


def _lattice_points(setup: TwistSetup, k: int, lo: Fraction, hi: Fraction):
    """Points of k/p + Z inside [lo, hi], ascending."""
    base = Fraction(k, setup.p)
    delta = lo - base
    n = base - Fraction((-delta.numerator) // delta.denominator)  # ceil to lattice
    out = []
    while n <= hi:
        out.append(n)
        n += 1
    return out


def weight1_y_entries(
    setup: TwistSetup, k: int, a: int, m: int, w: FockVector, e_lo: Fraction, e_hi: Fraction
):
    """(exponent, vector) pairs of Y_M(b_{k,a}(-m)1, x)w on [e_lo, e_hi].

    Y_M(b(-m)1, x) = sum_{n in k/p+Z} C(-n-1, m-1) b(n) x^{-n-m}.
    """
    out = []
    for n in _lattice_points(setup, k, -e_hi - m, -e_lo - m):
        e = -n - m
        if e < e_lo or e > e_hi:
            continue
        coeff = binom_frac(Fraction(-n - 1), m - 1)
        if not coeff:
            continue
        vec = apply_mode(setup, (k % setup.p, a, n), w) * coeff
        if vec:
            out.append((e, vec))
    return out


def twisted_y_series(
    setup: TwistSetup, v: VoaVector, w: FockVector, var: str, hi, lo_hint=None
) -> TruncatedSeries:
    """Y_M(v, x)w as a certified series, constructed recursively.

    Monomials of length <= 1 are direct mode sums; longer monomials are
    extracted from the modified-weak-associativity iterate (see
    mwa_iterate), slicing the x_0 coefficient that isolates b(-m).
    """
    hi = Fraction(hi)
    total = None
    for mono, c in v.terms.items():
        piece = _monomial_y_series(setup, mono, w, var, hi)
        piece = piece.map_coeffs(lambda vec, c=c: vec * c)
        total = piece if total is None else _add_padded(total, piece)
    if total is None:
        floor = Fraction(0)
        return TruncatedSeries(
            (var,), {var: "x"}, {var: floor}, {var: hi}, {}, setup.p
        )
    return total


def _add_padded(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def _monomial_y_series(
    setup: TwistSetup, mono: VoaMonomial, w: FockVector, var: str, hi: Fraction
) -> TruncatedSeries:
    p = setup.p
    if len(mono) == 0:
        lo = Fraction(0)
        data = {(Fraction(0),): w} if w else {}
        return TruncatedSeries((var,), {var: "x"}, {var: min(lo, hi)}, {var: hi}, data, p)
    if len(mono) == 1:
        k, a, m = mono[0]
        lo = -_max_deg(w) - m  # e = -n-m, n <= deg w
        data = {}
        for e, vec in weight1_y_entries(setup, k, a, m, w, lo, hi):
            data[(e,)] = vec
        return TruncatedSeries((var,), {var: "x"}, {var: lo}, {var: hi}, data, p)
    # recursion: mono = (k,a,m) + rest; extract from the iterate
    head, rest = mono[0], mono[1:]
    k, a, m = head
    vrest = VoaVector(p, {rest: 1})
    k_div = 1 + voa_weight(rest)
    T = mwa_iterate(
        setup,
        (k, a),
        vrest,
        0,
        k_div,
        w,
        x0_hi=Fraction(m - 1),
        x2_lo_hint=None,
        x2_hi=hi,
        var0="_x0",
        var2=var,
    )
    return T.slice("_x0", Fraction(m - 1))


def mwa_band(
    setup: TwistSetup,
    u_label: tuple[int, int],
    v: VoaVector,
    k_div: int,
    w: FockVector,
    x0_hi: Fraction,
    x2_hi: Fraction,
    check_orders: bool = True,
):
    """The s-independent part of the modified-weak-associativity limit,
    for u = b_{k,a}(-1)1.

    The product (x_1-x_2)^{k_div} Y_M(u,x_1)Y_M(v,x_2)w is assembled on a
    band around the target window.  Raw products carry infinite
    antidiagonal tails that cancel only after the (x_1-x_2)^{k_div}
    factor, so the band e_1+e_2 = const is truncated using the structural
    x_1-floor of the opposite operator order, and both orders are compared
    on their common window as a guard.  The result feeds mwa_substitute
    once per twist sector.
    """
    p = setup.p
    ku, au = u_label
    x0_hi = Fraction(x0_hi)
    x2_hi = Fraction(x2_hi)
    wdeg = _max_deg(w)
    L1 = -wdeg - 1  # true floor of Y_M(u,x_1)w exponents (order B)
    # snap L1 to the u-mode lattice: e1 = -n-1, n in ku/p + Z
    # C = e1 + e2 ranges over targets
    C_max = x2_hi + k_div + x0_hi

    # ---- order A: v first, then u ----
    A2 = twisted_y_series(setup, v, w, "x2", x2_hi_A(hi=x2_hi, C_max=C_max, L1=L1))
    L2A = A2.lo["x2"]
    H2A = A2.hi["x2"]
    H1A = C_max - L2A
    SA: dict[tuple[Fraction, Fraction], FockVector] = {}
    slice_floors = []
    for (e2,), vec2 in A2.support():
        lo1 = -_max_deg(vec2) - 1
        slice_floors.append(lo1)
        for e1, vec in weight1_y_entries(setup, ku, au, 1, vec2, lo1, H1A):
            key = (e1, e2)
            SA[key] = SA[key] + vec if key in SA else vec
    loA1 = min(slice_floors, default=Fraction(0))
    # multiply by (x_1 - x_2)^{k_div}
    P: dict[tuple[Fraction, Fraction], FockVector] = {}
    for (e1, e2), vec in SA.items():
        for t in range(k_div + 1):
            f1, f2 = e1 + k_div - t, e2 + t
            if f1 > H1A or f2 > H2A:
                continue
            term = vec * (binom_frac(Fraction(k_div), t) * Fraction(-1 if t % 2 else 1))
            if term:
                key = (f1, f2)
                P[key] = P[key] + term if key in P else term
    P = {k2: vv for k2, vv in P.items() if vv}

    if check_orders:
        _check_opposite_order(setup, u_label, v, w, k_div, P, L1, L2A, H1A, H2A, wdeg)

    by_C: dict[Fraction, list] = {}
    for (e1, e2), vec in P.items():
        by_C.setdefault(e1 + e2, []).append((e1, e2, vec))
    # the limit must be divisible by x0^{k_div + floor0}, where floor0 is
    # the actual x0-floor of Y(u, x0)v computed in the vertex algebra
    u_vec = VoaVector.creation(p, ku, au, 1)
    jmax = None
    for j in range(voa_weight(((ku, au, 1),)) + v.max_weight(), -v.max_weight() - 2, -1):
        if y_product(setup, u_vec, j, v):
            jmax = j
            break
    floor0 = Fraction(-1 - jmax) if jmax is not None else Fraction(0)
    # components of Y(u,x0)v at x0^j have weight wt(u)+wt(v)-j-1, so the
    # deepest x2 pole comes from the highest retained x0 power
    lo2 = min(-wdeg - (1 + v.max_weight() + x0_hi), Fraction(0))
    return (by_C, k_div, x0_hi, x2_hi, floor0, lo2)


def mwa_substitute(
    setup: TwistSetup,
    band,
    s: int,
    var0: str = "x0",
    var2: str = "x2",
) -> TruncatedSeries:
    """Finish the iterate for twist sector s from a precomputed band:
    substitute x_1^{m/p} -> w_p^{sm}(x_2+x_0)^{m/p}, divide by x_0^{k_div}
    and check the divisibility."""
    p = setup.p
    by_C, k_div, x0_hi, x2_hi, floor0, lo2 = band
    data: dict[tuple, FockVector] = {}
    j = Fraction(0)
    while j <= k_div + x0_hi:
        for C, entries in by_C.items():
            E = C - j
            if E > x2_hi:
                continue
            # band completeness: entries with e2 > C - L1 vanish by the
            # order-B floor; entries with e2 <= C - L1 must lie in the box.
            acc = None
            for (e1, e2, vec) in entries:
                m_int = e1 * p
                root = cyclo(p, (s * int(m_int)) % p) if p > 1 else None
                b = binom_frac(e1, int(j))
                if not b:
                    continue
                term = vec * b if root is None else vec * (b * root)
                acc = term if acc is None else acc + term
            if acc:
                key = (j, E)
                data[key] = data[key] + acc if key in data else acc
        j += 1
    data = {k2: vv for k2, vv in data.items() if vv}
    for (j, E), vec in data.items():
        if j - k_div < floor0:
            raise ValueError(
                f"iterate limit exceeds the x0 pole bound {floor0}: nonzero "
                f"at x0^{j - k_div} x2^{E}: {vec!r}"
            )
    shifted = {(j - k_div, E): vec for (j, E), vec in data.items()}
    return TruncatedSeries(
        (var0, var2),
        {var0: "y", var2: "x"},
        {var0: floor0, var2: lo2},
        {var0: x0_hi, var2: x2_hi},
        shifted,
        p,
    )


def mwa_iterate(
    setup: TwistSetup,
    u_label: tuple[int, int],
    v: VoaVector,
    s: int,
    k_div: int,
    w: FockVector,
    x0_hi: Fraction,
    x2_hi: Fraction,
    x2_lo_hint=None,
    var0: str = "x0",
    var2: str = "x2",
    check_orders: bool = True,
) -> TruncatedSeries:
    """Y_M(Y(nu^{-s}u, x_0)v, x_2)w via the modified-weak-associativity limit,
    for u = b_{k,a}(-1)1."""
    band = mwa_band(setup, u_label, v, k_div, w, x0_hi, x2_hi, check_orders)
    return mwa_substitute(setup, band, s, var0=var0, var2=var2)


def x2_hi_A(hi: Fraction, C_max: Fraction, L1: Fraction) -> Fraction:
    """Order-A window ceiling: cover the whole band above the order-B floor."""
    return max(hi, C_max - L1)


def _check_opposite_order(setup, u_label, v, w, k_div, P, L1, L2A, H1A, H2A, wdeg):
    """Recompute (x_1-x_2)^k * product in the opposite operator order on a
    modest box and compare with P where both are certified."""
    ku, au = u_label
    H1B = min(H1A, L1 + 3)
    H2B = min(H2A, Fraction(2))
    SB: dict[tuple[Fraction, Fraction], FockVector] = {}
    for e1, vec1 in weight1_y_entries(setup, ku, au, 1, w, L1, H1B):
        Sv = twisted_y_series(setup, v, vec1, "_t", H2B)
        for (e2,), vec in Sv.support():
            key = (e1, e2)
            SB[key] = SB[key] + vec if key in SB else vec
    PB: dict[tuple[Fraction, Fraction], FockVector] = {}
    for (e1, e2), vec in SB.items():
        for t in range(k_div + 1):
            f1, f2 = e1 + k_div - t, e2 + t
            if f1 > H1B or f2 > H2B:
                continue
            term = vec * (binom_frac(Fraction(k_div), t) * Fraction(-1 if t % 2 else 1))
            if term:
                key = (f1, f2)
                PB[key] = PB[key] + term if key in PB else term
    # compare on the common certified box
    keys = {k2 for k2 in P if k2[0] <= H1B and k2[1] <= H2B}
    keys |= {k2 for k2 in PB if k2[0] <= H1A and k2[1] <= H2A and k2[0] >= L1}
    for k2 in keys:
        a = P.get(k2, 0)
        b = PB.get(k2, 0)
        ok = (not a and not b) or a == b
        if not ok:
            raise ValueError(
                f"operator orders disagree at x1^{k2[0]} x2^{k2[1]}: "
                f"{a!r} vs {b!r} (weak commutativity violated at k={k_div})"
            )


# ---------------------------------------------------------------------------
# operator series and the twisted Jacobi identity
# ---------------------------------------------------------------------------


class OperatorSeries:
    """A field-valued series: apply(w, **ceilings) yields a certified
    TruncatedSeries of Fock vectors."""

    def __init__(self, setup: TwistSetup, variables: tuple[str, ...], fn):
        self.setup = setup
        self.variables = variables
        self._fn = fn

    def apply(self, w: FockVector, **ceilings) -> TruncatedSeries:
        return self._fn(w, **ceilings)


def iterate_operator(
    setup: TwistSetup, u: VoaVector, v: VoaVector, s: int, k: int
) -> OperatorSeries:
    """Y_M(Y(nu^{-s}u, x0)v, x2) for u of weight <= 1, built from the
    modified-weak-associativity limit."""
    if u.max_weight() > 1:
        raise ValueError("iterate source u must have weight <= 1")

    def fn(w: FockVector, x0_hi, x2_hi) -> TruncatedSeries:
        x0_hi, x2_hi = Fraction(x0_hi), Fraction(x2_hi)
        total = None
        for mono, c in u.terms.items():
            if len(mono) == 0:
                # Y(1, x0)v = v: no x0 dependence
                S2 = twisted_y_series(setup, v, w, "x2", x2_hi)
                piece = TruncatedSeries(
                    ("x0", "x2"),
                    {"x0": "y", "x2": "x"},
                    {"x0": Fraction(0), "x2": S2.lo["x2"]},
                    {"x0": x0_hi, "x2": x2_hi},
                    {(Fraction(0), e[0]): vec for e, vec in S2.support()},
                    setup.p,
                ).map_coeffs(lambda vec, c=c: vec * c)
            else:
                (km, am, mm) = mono[0]
                piece = mwa_iterate(
                    setup, (km, am), v, s, k, w, x0_hi=x0_hi, x2_hi=x2_hi
                ).map_coeffs(lambda vec, c=c: vec * c)
            if total is None:
                total = piece
            else:
                lo = {z: min(total.lo[z], piece.lo[z]) for z in ("x0", "x2")}
                hi = {z: min(total.hi[z], piece.hi[z]) for z in ("x0", "x2")}
                data = dict(total.data)
                for key, vec in piece.data.items():
                    data[key] = data[key] + vec if key in data else vec
                total = TruncatedSeries(
                    ("x0", "x2"), total.kinds, lo, hi,
                    {kk: vv for kk, vv in data.items() if vv}, setup.p,
                )
        return total

    return OperatorSeries(setup, ("x0", "x2"), fn)


def raw_product(
    setup: TwistSetup,
    outer: tuple[int, int],
    inner: tuple[int, int],
    w: FockVector,
    hi_outer: Fraction,
    hi_inner: Fraction,
):
    """Y_M(b_outer(-1)1, z1) Y_M(b_inner(-1)1, z2) w on a box.

    Returns (entries, lo_inner) with entries[(e1, e2)] (e1 the outer
    exponent) and the structural floor of the inner variable.
    """
    ki, ai = inner
    ko, ao = outer
    lo_inner = -_max_deg(w) - 1
    entries: dict[tuple[Fraction, Fraction], FockVector] = {}
    for e2, vec2 in weight1_y_entries(setup, ki, ai, 1, w, lo_inner, hi_inner):
        lo1 = -_max_deg(vec2) - 1
        for e1, vec in weight1_y_entries(setup, ko, ao, 1, vec2, lo1, hi_outer):
            key = (e1, e2)
            entries[key] = entries[key] + vec if key in entries else vec
    return {k2: vv for k2, vv in entries.items() if vv}, lo_inner


def jacobi_check(
    setup: TwistSetup,
    u: tuple[int, int],
    v: tuple[int, int],
    w: FockVector,
    window: int = 2,
) -> CheckRecord:
    """Twisted Jacobi identity, coefficient-wise in (x0, x1, x2) over
    |exponents| <= window, applied to w.

    LHS: x0^{-1}d((x1-x2)/x0) Y_M(u,x1)Y_M(v,x2)w
         - x0^{-1}d((x2-x1)/(-x0)) Y_M(v,x2)Y_M(u,x1)w.
    RHS: x2^{-1}(1/p) sum_r d(w_p^r (x1-x0)^{1/p}/x2^{1/p})
         Y_M(Y(nu^r u, x0)v, x2)w, iterates from the limit construction.
    """
    t0 = time.perf_counter()
    p = setup.p
    W = Fraction(window)
    ku, au = u
    kv, av = v
    wdeg = _max_deg(w)

    # exponent lattices: e1 = -n-1 with n in ku/p + Z, so e1 = (p-ku)/p mod 1
    e1_list = [e for e in _lattice_points(setup, (p - ku) % p, -W - 1, W) if -W <= e <= W]
    e2_list = [e for e in _lattice_points(setup, (p - kv) % p, -W - 1, W) if -W <= e <= W]
    e0_list = [Fraction(t) for t in range(-window, window + 1)]

    # order-A and order-B boxes
    i_maxA = int(W - (-wdeg - 1)) + 2
    H1A = 2 * W + 1 + i_maxA
    A, loA2 = raw_product(setup, u, v, w, H1A, W)
    i_maxB = i_maxA
    H2B = 2 * W + 1 + i_maxB
    B, loB1 = raw_product(setup, v, u, w, H2B, W)
    # note: raw_product(outer=v, inner=u) returns entries[(e2, e1)]
    B = {(k2[1], k2[0]): vv for k2, vv in B.items()}

    # iterates T_r = Y_M(Y(nu^r u, x0)v, x2)w  (pipeline s = -r)
    v_vec = VoaVector.creation(p, kv, av, 1)
    k_div = 2
    band = mwa_band(setup, u, v_vec, k_div, w, x0_hi=W, x2_hi=3 * W + 1 + wdeg + 3)
    Ts = [mwa_substitute(setup, band, (-r) % p) for r in range(p)]
    floor0 = min(T.lo["x0"] for T in Ts)

    mismatches = []
    checked = 0
    for e0 in e0_list:
        n = -e0 - 1
        for e1 in e1_list:
            for e2 in e2_list:
                # LHS
                lhs = None
                i = 0
                while e2 - i >= loA2:
                    b = binom_frac(n, i)
                    if b:
                        val = A.get((e1 - n + i, e2 - i), 0)
                        if val:
                            term = val * (b * Fraction(-1 if i % 2 else 1))
                            lhs = term if lhs is None else lhs + term
                    i += 1
                sgn2 = Fraction(1 if (int(n) % 2 == 0) else -1) * Fraction(-1)
                i = 0
                while e1 - i >= loB1:
                    b = binom_frac(n, i)
                    if b:
                        val = B.get((e1 - i, e2 - n + i), 0)
                        if val:
                            term = val * (b * Fraction(-1 if i % 2 else 1) * sgn2)
                            lhs = term if lhs is None else lhs + term
                    i += 1
                # RHS
                rhs = None
                for r in range(p):
                    T = Ts[r]
                    i = 0
                    while e0 - i >= floor0:
                        b = binom_frac(e1 + i, i)
                        if b:
                            key = (e0 - i, e2 + 1 + e1 + i)
                            if key[1] > T.hi["x2"]:
                                raise WindowError(f"iterate window short at {key}")
                            val = T.data.get(key, 0)
                            if val:
                                t_int = int(p * (e1 + i))
                                scal = b * Fraction(-1 if i % 2 else 1) * Fraction(1, p)
                                term = val * scal
                                if p > 1:
                                    term = term * cyclo(p, (r * t_int) % p)
                                rhs = term if rhs is None else rhs + term
                        i += 1
                checked += 1
                ok = (not lhs and not rhs) or (
                    (lhs or FockVector(p, {})) == (rhs or FockVector(p, {}))
                )
                if not ok:
                    mismatches.append(
                        {
                            "exponents": [str(e0), str(e1), str(e2)],
                            "lhs": serialize_value(lhs),
                            "rhs": serialize_value(rhs),
                        }
                    )
    elapsed = (time.perf_counter() - t0) * 1000.0
    return CheckRecord(
        suite="jacobi",
        params={
            "p": p,
            "dims": list(setup.dims),
            "u": list(u),
            "v": list(v),
            "w": w.serialize(),
            "window": window,
        },
        status="pass" if not mismatches else "fail",
        lhs=f"{checked} coefficients",
        rhs=f"{len(mismatches)} mismatches",
        witness=mismatches[:3] if mismatches else None,
        elapsed_ms=elapsed,
    )


# ---------------------------------------------------------------------------
# homogeneous (X-convention) fields and their commutators
# ---------------------------------------------------------------------------


def twisted_x_series(
    setup: TwistSetup, vec: VoaVector, w: FockVector, var: str, hi
) -> TruncatedSeries:
    """X_M(vec, x)w = Y_M(x^{L(0)}vec, x)w: each weight-h component of vec
    contributes its Y-series shifted by x^h."""
    hi = Fraction(hi)
    p = setup.p
    by_wt: dict[int, VoaVector] = {}
    for mono, c in vec.terms.items():
        by_wt.setdefault(voa_weight(mono), VoaVector(p, {}))
        by_wt[voa_weight(mono)] = by_wt[voa_weight(mono)] + VoaVector(p, {mono: c})
    total = None
    for h, sub in sorted(by_wt.items()):
        S = twisted_y_series(setup, sub, w, var, hi - h)
        piece = TruncatedSeries(
            (var,),
            {var: "x"},
            {var: S.lo[var] + h},
            {var: hi},
            {(e[0] + h,): v2 for e, v2 in S.support()},
            p,
        )
        if total is None:
            total = piece
        else:
            lo = {var: min(total.lo[var], piece.lo[var])}
            hi_m = {var: min(total.hi[var], piece.hi[var])}
            data = dict(total.data)
            for key, v2 in piece.data.items():
                data[key] = data[key] + v2 if key in data else v2
            total = TruncatedSeries(
                (var,), {var: "x"}, lo, hi_m,
                {kk: vv for kk, vv in data.items() if vv}, p,
            )
    if total is None:
        return TruncatedSeries((var,), {var: "x"}, {var: Fraction(0)}, {var: hi}, {}, p)
    return total


def assemble_operator(setup: TwistSetup, target: VoaVector) -> OperatorSeries:
    """Twisted field X_M(target, x) for an arbitrary creation vector.

    The field is assembled by recursion on monomial length through the
    modified-weak-associativity iterate (each b(-m) factor is the x_0^{m-1}
    coefficient of an iterate with u = b(-1)1), which realizes the
    weight-triangular extraction exactly.
    """

    def fn(w: FockVector, x_hi) -> TruncatedSeries:
        return twisted_x_series(setup, target, w, "x", x_hi)

    return OperatorSeries(setup, ("x",), fn)


def conformal_vector(setup: TwistSetup) -> VoaVector:
    """omega = (1/2) sum over dual pairs b_{k,a}(-1) b_{p-k,a}(-1) 1."""
    p = setup.p
    v = VoaVector(p, {})
    for k in range(p):
        for a in range(1, setup.dims[k] + 1):
            mono = tuple(sorted([(k, a, 1), ((p - k) % p, a, 1)]))
            v = v + VoaVector(p, {mono: Fraction(1, 2)})
    return v


def x_mode(setup: TwistSetup, S: TruncatedSeries, var: str, n) -> FockVector:
    """Coefficient of x^{-n} of an X-convention series (0 below floor)."""
    e = Fraction(-n)
    if e < S.lo[var]:
        return FockVector(setup.p, {})
    return S.coeff((e,)) or FockVector(setup.p, {})


def homogeneous_commutator_check(
    setup: TwistSetup,
    u: tuple[int, int],
    v: tuple[int, int],
    w: FockVector,
    window: int = 2,
) -> CheckRecord:
    """Commutator formula for homogeneous weight-one fields:

    [X_M(u,x1), X_M(v,x2)] =
      Res_y (1/p) sum_r d(w_p^{-r}(e^y x2/x1)^{1/p}) X_M(Y[nu^r u, y]v, x2).

    At x1^{-m/p} the delta pins t = m, leaving sum_j (m/p)^j/j! times the
    y^{-1-j} coefficient of X_M(Y[nu^r u,y]v, x2); only the singular part
    of the square-bracket product contributes.
    """
    t0 = time.perf_counter()
    p = setup.p
    W = Fraction(window)
    ku, au = u
    kv, av = v
    wdeg = _max_deg(w)
    u_vec = VoaVector.creation(p, ku, au, 1)
    v_vec = VoaVector.creation(p, kv, av, 1)

    # LHS raw products in X convention (weight-1: X exponent = Y exponent + 1)
    H = 2 * W + wdeg + 3
    A, _ = raw_product(setup, u, v, w, H, H)
    B, _ = raw_product(setup, v, u, w, H, H)
    B = {(k2[1], k2[0]): vv for k2, vv in B.items()}

    # RHS: singular square-bracket coefficients, X_M applied on x2-windows
    pole = 2  # wt u + wt v
    sq = {}   # (r, jy) -> X_M series of the y^{jy} coefficient
    for r in range(p):
        ur = u_vec.nu(r)
        for jy in (-2, -1):
            cvec = square_bracket_coeff(setup, ur, v_vec, jy)
            sq[(r, jy)] = (
                twisted_x_series(setup, cvec, w, "x2", H) if cvec else None
            )

    mismatches = []
    checked = 0
    # X exponents: f1 on u's lattice shifted by +1, f2 on v's lattice + 1
    f1_list = [e + 1 for e in _lattice_points(setup, (p - ku) % p, -W - 2, W) if -W <= e + 1 <= W]
    f2_list = [e + 1 for e in _lattice_points(setup, (p - kv) % p, -W - 2, W) if -W <= e + 1 <= W]
    for f1 in f1_list:
        m = int(-p * f1)
        for f2 in f2_list:
            lhs = A.get((f1 - 1, f2 - 1), 0)
            rterm = B.get((f1 - 1, f2 - 1), 0)
            if rterm:
                lhs = lhs - rterm if lhs else -rterm
            rhs = None
            for r in range(p):
                for j in range(pole):
                    S = sq[(r, -1 - j)]
                    if S is None:
                        continue
                    e2 = f2 - Fraction(m, p)
                    if e2 < S.lo["x2"]:
                        continue
                    if e2 > S.hi["x2"]:
                        raise WindowError("commutator window short")
                    val = S.coeff((e2,))
                    if not val:
                        continue
                    scal = Fraction(m, p) ** j / _factorial(j) * Fraction(1, p)
                    term = val * scal
                    if p > 1:
                        term = term * cyclo(p, (-r * m) % p)
                    rhs = term if rhs is None else rhs + term
            checked += 1
            ok = (not lhs and not rhs) or (
                (lhs or FockVector(p, {})) == (rhs or FockVector(p, {}))
            )
            if not ok:
                mismatches.append(
                    {
                        "exponents": [str(f1), str(f2)],
                        "lhs": serialize_value(lhs),
                        "rhs": serialize_value(rhs),
                    }
                )
    elapsed = (time.perf_counter() - t0) * 1000.0
    return CheckRecord(
        suite="commutator",
        params={
            "p": p, "dims": list(setup.dims), "u": list(u), "v": list(v),
            "w": w.serialize(), "window": window,
        },
        status="pass" if not mismatches else "fail",
        lhs=f"{checked} coefficients",
        rhs=f"{len(mismatches)} mismatches",
        witness=mismatches[:3] if mismatches else None,
        elapsed_ms=elapsed,
    )


def _factorial(n: int) -> Fraction:
    out = Fraction(1)
    for t in range(2, n + 1):
        out *= t
    return out


def virasoro_axiom_check(setup: TwistSetup, window: int = 2) -> CheckRecord:
    """The modes of the assembled field of omega close on Virasoro relations:
    [L(m), L(n)] = (m-n)L(m+n) + delta_{m+n,0} (m^3-m)/12 c with c = d,
    L(0) acts on graded vectors by degree + vacuum eigenvalue, and L(-1)
    differentiates weight-one fields."""
    t0 = time.perf_counter()
    p = setup.p
    omega = conformal_vector(setup)
    d = setup.d
    vac = FockVector.vacuum(p)
    mismatches = []
    W = window
    from .fock import basis_vectors

    L0vac = twisted_x_series(setup, omega, vac, "x", Fraction(1)).coeff((Fraction(0),))
    c_vac = L0vac.terms.get((), None) if L0vac else None
    c_vac = c_vac.rational_value() if c_vac else Fraction(0)

    def L(n, w):
        S = twisted_x_series(setup, omega, w, "x", Fraction(abs(n) + 1))
        return x_mode(setup, S, "x", n)

    for w in basis_vectors(setup, Fraction(2)):
        for deg in [next(iter(w.degrees()), Fraction(0))]:
            # L(0) spectrum
            got = L(0, w)
            want = w * (deg + c_vac)
            if got != want:
                mismatches.append({"check": "L0", "deg": str(deg)})
            # Virasoro bracket on a small grid
            for m in range(-W, W + 1):
                for n in range(-W, W + 1):
                    lhs = L(m, L(n, w)) - L(n, L(m, w))
                    want = L(m + n, w) * Fraction(m - n)
                    if m + n == 0:
                        want = want + w * (Fraction(m**3 - m, 12) * d)
                    if lhs != want:
                        mismatches.append(
                            {"check": "bracket", "m": m, "n": n, "deg": str(deg)}
                        )
    elapsed = (time.perf_counter() - t0) * 1000.0
    return CheckRecord(
        suite="virasoro",
        params={"p": p, "dims": list(setup.dims), "window": window},
        status="pass" if not mismatches else "fail",
        lhs=f"central charge d={d}, vacuum eigenvalue {c_vac}",
        rhs=f"{len(mismatches)} mismatches",
        witness=mismatches[:5] if mismatches else None,
        elapsed_ms=elapsed,
    )


# ---------------------------------------------------------------------------
# generating functions L^{nu;y1,y2}<x> and their Bernoulli corrections
# ---------------------------------------------------------------------------


def _ser_mul(a: dict, b: dict, lo: int, hi: int) -> dict:
    out = {}
    for i, ca in a.items():
        for j, cb in b.items():
            t = i + j
            if lo <= t <= hi:
                out[t] = out.get(t, Fraction(0)) + ca * cb
    return {t: c for t, c in out.items() if c}


def _ser_inv(a: dict, hi: int) -> dict:
    """Invert a one-variable Laurent series with nonzero leading term."""
    v = min(a)
    lead = a[v]
    # a = lead*x^v*(1 + r), invert the unit part by geometric series
    r = {i - v: c / lead for i, c in a.items() if i != v}
    out = {0: Fraction(1)}
    acc = {0: Fraction(1)}
    order = hi - (-v) + abs(v) + 1
    for _ in range(order):
        acc = _ser_mul(acc, {i: -c for i, c in r.items()}, 0, order)
        if not acc:
            break
        for i, c in acc.items():
            out[i] = out.get(i, Fraction(0)) + c
    return {i - v: c / lead for i, c in out.items() if c and i - v <= hi}


def _ser_exp(c: Fraction, hi: int) -> dict:
    """e^{c y} to order hi."""
    out, term = {0: Fraction(1)}, Fraction(1)
    for i in range(1, hi + 1):
        term = term * c / i
        out[i] = term
    return out


def correction_series(setup: TwistSetup, variant: str, y_hi: int) -> dict[int, Fraction]:
    """Scalar correction of the generating function, as a Laurent series in
    y = y1 - y2 with floor -2.

    Writing u = -y1+y2 = -y, the correction is -1/2 d/dy1 G(u) = 1/2 G'(u)
    with G(u) = sum_k d_k (e^{ku/p} - [variant == plain]) / (1 - e^u).
    The bar variant keeps the full sum and is singular, 1/2 d/(y1-y2)^2 +
    O(1); the plain variant subtracts the constant d, which cancels the
    pole entirely.
    """
    p = setup.p
    H = y_hi + 3
    em1 = {i: Fraction(1) / _factorial(i) for i in range(1, H + 2)}  # e^u - 1
    inv = _ser_inv({i: -c for i, c in em1.items()}, H)  # 1/(1-e^u)
    num = {}
    for k in range(p):
        d_k = setup.dims[k]
        if not d_k:
            continue
        ek = _ser_exp(Fraction(k, p), H + 2)
        for i, c in ek.items():
            num[i] = num.get(i, Fraction(0)) + d_k * c
    if variant == "plain":
        num[0] = num.get(0, Fraction(0)) - setup.d
    elif variant != "bar":
        raise ValueError(f"unknown variant {variant!r}")
    G = _ser_mul(num, inv, -2, H)
    # 1/2 G'(u) at u = -y: coefficient of y^{t-1} is t*g_t*(-1)^{t-1}/2
    out = {}
    for t, g in G.items():
        if t == 0:
            continue
        e = t - 1
        if -2 <= e <= y_hi:
            out[e] = Fraction(t) * g * Fraction(-1 if (t - 1) % 2 else 1) / 2
    return {e: c for e, c in out.items() if c}


def generating_L(setup: TwistSetup, variant: str, orders=None) -> OperatorSeries:
    """L^{nu;y1,y2}<x> (variant "plain") or bar variant, as an operator
    series in (y, y2, x) with y = y1 - y2.

    The bifield part is (1/2) sum over dual pairs of the normal-ordered
    product b(m)b(n) e^{-m y} e^{-(m+n) y2} x^{-m-n}; the scalar
    correction (a Laurent series in y alone, floor -2) is added at
    x^0 y2^0.
    """

    def fn(w: FockVector, y_hi, y2_hi, x_lo, x_hi) -> TruncatedSeries:
        p = setup.p
        y_hi_i, y2_hi_i = int(y_hi), int(y2_hi)
        x_lo, x_hi = Fraction(x_lo), Fraction(x_hi)
        D = _max_deg(w)
        data: dict[tuple, FockVector] = {}

        def add(key, vec):
            if vec:
                data[key] = data[key] + vec if key in data else vec

        e = x_lo
        while e <= x_hi:
            for k in range(p):
                kd = (p - k) % p
                for a in range(1, setup.dims[k] + 1):
                    # sum over m in k/p + Z with n = -e - m in kd/p + Z
                    for m in _lattice_points(setup, k, -e - D - 1, D + 1):
                        n = -e - m
                        if m > 0:
                            vec = apply_mode(setup, (k, a, m), w)
                            vec = apply_mode(setup, (kd, a, n), vec) if vec else vec
                        else:
                            vec = apply_mode(setup, (kd, a, n), w)
                            vec = apply_mode(setup, (k, a, m), vec) if vec else vec
                        if not vec:
                            continue
                        vec = vec * Fraction(1, 2)
                        for j1 in range(y_hi_i + 1):
                            c1 = (-m) ** j1 / _factorial(j1) if j1 else Fraction(1)
                            if not c1:
                                continue
                            for j2 in range(y2_hi_i + 1):
                                c2 = (e ** j2) / _factorial(j2) if j2 else Fraction(1)
                                add((Fraction(j1), Fraction(j2), e), vec * (c1 * c2))
            e += 1
        # scalar correction, at x^0 y2^0
        if x_lo <= 0 <= x_hi:
            for t, c in correction_series(setup, variant, y_hi_i).items():
                add((Fraction(t), Fraction(0), Fraction(0)), w * c)
        return TruncatedSeries(
            ("y", "y2", "x"),
            {"y": "y", "y2": "y", "x": "x"},
            {"y": Fraction(-2), "y2": Fraction(0), "x": x_lo},
            {"y": Fraction(y_hi_i), "y2": Fraction(y2_hi_i), "x": x_hi},
            {kk: vv for kk, vv in data.items() if vv},
            p,
        )

    return OperatorSeries(setup, ("y", "y2", "x"), fn)


def genfun_coefficient(
    setup: TwistSetup, variant: str, r1: int, r2: int, n: int, w: FockVector
) -> FockVector:
    """r1! r2! times the y1^{r1} y2^{r2} x^{-n} coefficient of the
    generating function applied to w; reproduces the quadratic operator
    with kernel (-j)^{r1} (-(n-j))^{r2}.

    Converts from the internal (y, y2) grid: y1^{r1} y2^{r2} receives
    y^a y2^{r1+r2-a} with a >= r1 weighted by C(a, r1)(-1)^{a-r1}.
    """
    S = generating_L(setup, variant).apply(
        w, y_hi=r1 + r2, y2_hi=r1 + r2, x_lo=Fraction(-n), x_hi=Fraction(-n)
    )
    total = None
    for a in range(r1, r1 + r2 + 1):
        b = r1 + r2 - a
        val = S.coeff((Fraction(a), Fraction(b), Fraction(-n)))
        if not val:
            continue
        c = binom_frac(Fraction(a), r1) * Fraction(-1 if (a - r1) % 2 else 1)
        term = val * c
        total = term if total is None else total + term
    if total is None:
        return FockVector(setup.p, {})
    return total * (_factorial(r1) * _factorial(r2))


def pair_bracket_vector(setup: TwistSetup, y_hi: int) -> dict[int, VoaVector]:
    """(1/2) sum over dual pairs of Y[b_{k,a}(-1)1, y] b_{p-k,a}(-1)1 as a
    y-Laurent series of creation vectors (floor -2; the y^{-2} term is the
    scalar (1/2) d times the vacuum)."""
    p = setup.p
    out: dict[int, VoaVector] = {}
    for k in range(p):
        kd = (p - k) % p
        for a in range(1, setup.dims[k] + 1):
            u = VoaVector.creation(p, k, a, 1)
            v = VoaVector.creation(p, kd, a, 1)
            S = square_bracket_series(setup, u, v, "y", y_hi)
            for (t,), vec in S.support():
                ti = int(t)
                out[ti] = out.get(ti, VoaVector(p, {})) + vec
    return {t: v * Fraction(1, 2) for t, v in out.items() if v}


def prop63_series(
    setup: TwistSetup, w: FockVector, y_hi: int, y2_hi: int, x_lo, x_hi
) -> TruncatedSeries:
    """X_{S[nu]}((1/2) sum_q Y[a_q(-1)1, y] a_q(-1)1, e^{y2}x) applied to w,
    on the (y, y2, x) grid."""
    p = setup.p
    x_lo, x_hi = Fraction(x_lo), Fraction(x_hi)
    data: dict[tuple, FockVector] = {}
    for t, vec in pair_bracket_vector(setup, y_hi).items():
        S = twisted_x_series(setup, vec, w, "x", x_hi)
        for (E,), val in S.support():
            if E < x_lo:
                continue
            for b in range(y2_hi + 1):
                c = (E ** b) / _factorial(b) if b else Fraction(1)
                key = (Fraction(t), Fraction(b), E)
                term = val * c
                if term:
                    data[key] = data[key] + term if key in data else term
    return TruncatedSeries(
        ("y", "y2", "x"),
        {"y": "y", "y2": "y", "x": "x"},
        {"y": Fraction(-2), "y2": Fraction(0), "x": x_lo},
        {"y": Fraction(y_hi), "y2": Fraction(y2_hi), "x": x_hi},
        {kk: vv for kk, vv in data.items() if vv},
        p,
    )


def k_prefactor_series(
    setup: TwistSetup, k: int, w: FockVector, y_hi: int, y2_hi: int, x_lo, x_hi
) -> TruncatedSeries:
    """(1/2) lim_{x1->x2} sum_q ((x1/x2 e^y - 1)/(e^y - 1))^k
    a_q<e^{y1}x1> a_q<e^{y2}x2> w, on the (y, y2, x) grid.

    Per x-power E the raw product has a finite band of mode pairs plus, at
    E = 0 only, an infinite scalar contraction tail sum_{m > D} m q^{-m}
    with q = (x1/x2) e^y.  Multiplying the tail by (q - 1)^k leaves a
    Laurent polynomial whenever k >= 2, so the x1 -> x2 evaluation is the
    band at z = 1 (where the prefactor telescopes to 1) plus the tail
    polynomial at q = e^y divided by (e^y - 1)^k.
    """
    if k < 2:
        raise ValueError("prefactor power must be at least 2")
    p = setup.p
    x_lo, x_hi = Fraction(x_lo), Fraction(x_hi)
    D = _max_deg(w)
    data: dict[tuple, FockVector] = {}

    def add(i, b, E, vec):
        key = (Fraction(i), Fraction(b), Fraction(E))
        data[key] = data[key] + vec if key in data else vec

    em1 = {i: Fraction(1) / _factorial(i) for i in range(1, y_hi + 2 + k)}
    inv1 = _ser_inv(em1, y_hi + 2)
    invk = {0: Fraction(1)}
    for _ in range(k):
        invk = _ser_mul(invk, inv1, -k, y_hi + 2)

    E = x_lo
    while E <= x_hi:
        for kk_ in range(p):
            kd = (p - kk_) % p
            for a in range(1, setup.dims[kk_] + 1):
                # band: outer mode m = -e1 with |annihilation| bounded by D
                for e1 in _lattice_points(setup, (p - kk_) % p, -D, E + D):
                    m = -e1
                    n = e1 - E
                    vec = apply_mode(setup, (kd, a, n), w)
                    if not vec:
                        continue
                    vec = apply_mode(setup, (kk_, a, m), vec)
                    if not vec:
                        continue
                    vec = vec * Fraction(1, 2)
                    yser = _ser_exp(e1, y_hi)
                    for i, cy in yser.items():
                        for b in range(y2_hi + 1):
                            c2 = (E ** b) / _factorial(b) if b else Fraction(1)
                            term = vec * (cy * c2)
                            if term:
                                add(i, b, E, term)
            if E == 0 and setup.dims[kk_]:
                # scalar tail: m0 = first lattice point of kk_/p + Z above D
                pts = _lattice_points(setup, kk_, D + Fraction(1, 2 * p), D + 2)
                m0 = min(pts)
                # (q-1)^k * sum_{m>=m0} m q^{-m}
                #   = q^{1-m0} (m0 (q-1) + 1) (q-1)^{k-2}
                poly = {0: Fraction(1)}
                for _ in range(k - 2):
                    nxt: dict[int, Fraction] = {}
                    for i, c in poly.items():
                        nxt[i + 1] = nxt.get(i + 1, Fraction(0)) + c
                        nxt[i] = nxt.get(i, Fraction(0)) - c
                    poly = {i: c for i, c in nxt.items() if c}
                lin = {}
                for i, c in poly.items():
                    lin[i + 1] = lin.get(i + 1, Fraction(0)) + m0 * c
                    lin[i] = lin.get(i, Fraction(0)) + (1 - m0) * c
                # substitute q = e^y: sum_i lin_i e^{(1 - m0 + i) y}
                tail = {}
                for i, c in lin.items():
                    ee = _ser_exp(1 - m0 + i, y_hi + k)
                    for j, cj in ee.items():
                        tail[j] = tail.get(j, Fraction(0)) + c * cj
                tail = _ser_mul(tail, invk, -k, y_hi)
                for i, cy in tail.items():
                    if not cy:
                        continue
                    if i < -2:
                        raise ValueError(
                            f"prefactor limit pole y^{i} survives at x^0"
                        )
                    term = w * (cy * Fraction(setup.dims[kk_], 2))
                    if term:
                        add(i, 0, E, term)
        E += 1
    data = {kk2: vv for kk2, vv in data.items() if vv}
    return TruncatedSeries(
        ("y", "y2", "x"),
        {"y": "y", "y2": "y", "x": "x"},
        {"y": Fraction(-2), "y2": Fraction(0), "x": x_lo},
        {"y": Fraction(y_hi), "y2": Fraction(y2_hi), "x": x_hi},
        data,
        p,
    )


def iterate_identity_check(
    setup: TwistSetup, k: int = 2, orders: tuple[int, int] = (2, 2)
) -> CheckRecord:
    """The bar generating function equals both the k-prefactor limit (for k
    and k+1) and the iterate of Prop-style square-bracket vectors."""
    t0 = time.perf_counter()
    y_hi, y2_hi = orders
    p = setup.p
    from .fock import basis_vectors

    x_lo, x_hi = Fraction(-2), Fraction(2)
    mismatches = []
    for w in basis_vectors(setup, Fraction(1)):
        G = generating_L(setup, "bar").apply(
            w, y_hi=y_hi, y2_hi=y2_hi, x_lo=x_lo, x_hi=x_hi
        )
        P63 = prop63_series(setup, w, y_hi, y2_hi, x_lo, x_hi)
        Pk = k_prefactor_series(setup, k, w, y_hi, y2_hi, x_lo, x_hi)
        Pk1 = k_prefactor_series(setup, k + 1, w, y_hi, y2_hi, x_lo, x_hi)
        for name, S in [("prop63", P63), (f"k={k}", Pk), (f"k={k+1}", Pk1)]:
            keys = set(G.data) | set(S.data)
            for key in keys:
                a = G.data.get(key, 0)
                b = S.data.get(key, 0)
                ok = (not a and not b) or a == b
                if not ok:
                    mismatches.append(
                        {
                            "which": name,
                            "key": [str(x) for x in key],
                            "lhs": serialize_value(a),
                            "rhs": serialize_value(b),
                        }
                    )
    elapsed = (time.perf_counter() - t0) * 1000.0
    return CheckRecord(
        suite="iterates",
        params={"p": p, "dims": list(setup.dims), "k": k, "orders": list(orders)},
        status="pass" if not mismatches else "fail",
        lhs="bar generating function",
        rhs=f"{len(mismatches)} mismatches",
        witness=mismatches[:3] if mismatches else None,
        elapsed_ms=elapsed,
    )


MV = dict  # (a, b, c, d) exponents of (s, y2, Z, y4) -> Fraction


def _mv_mul(X: MV, Y: MV, n_hi: int) -> MV:
    out: MV = {}
    for ka, ca in X.items():
        for kb, cb in Y.items():
            key = tuple(i + j for i, j in zip(ka, kb))
            if sum(key) > n_hi:
                continue
            c = ca * cb
            out[key] = out.get(key, Fraction(0)) + c
    return {k: c for k, c in out.items() if c}


def _mv_exp_linear(coefs, n_hi: int) -> MV:
    """e^{sum_i coefs[i] * v_i} truncated to total order n_hi."""
    out: MV = {(0, 0, 0, 0): Fraction(1)}
    for pos, c in enumerate(coefs):
        if not c:
            continue
        single: MV = {}
        for j in range(n_hi + 1):
            key = [0, 0, 0, 0]
            key[pos] = j
            single[tuple(key)] = (c ** j) / _factorial(j)
        out = _mv_mul(out, single, n_hi)
    return out


def _mv_pow_sz(sig_s: int, sig_z: int, j: int, n_hi: int) -> MV:
    """(sig_s*s + sig_z*Z)^j.  Nonnegative j expands binomially; negative j
    is expanded in nonnegative powers of Z (Laurent in s)."""
    out: MV = {}
    if j >= 0:
        for i in range(j + 1):
            c = binom_frac(Fraction(j), i) * (sig_s ** i) * (sig_z ** (j - i))
            if i + (j - i) <= n_hi:
                out[(i, 0, j - i, 0)] = Fraction(c)
        return out
    for i in range(n_hi - j + 3):
        e_s, e_z = j - i, i
        if e_s + e_z > n_hi:
            continue
        c = binom_frac(Fraction(j), i) * Fraction(sig_s) ** (j - i) * (sig_z ** i)
        out[(e_s, 0, e_z, 0)] = Fraction(c)
    return out


def lbar_bracket_check(
    setup: TwistSetup, orders: int = 2, window: int = 1
) -> CheckRecord:
    """Commutator of two bar generating functions equals the four-term
    delta-localized expansion, as series in (s, y2, Z, y4, x1, x2) with
    s = y1 - y2 and Z = y3 - y4, up to total y-order `orders`.

    The scalar correction of the shifted generating functions is Laurent in
    a single pole variable v = s -+ Z per delta-term pair; the pair sums
    must be regular in v, which is asserted before binomial re-expansion.
    """
    t0 = time.perf_counter()
    p = setup.p
    from .fock import basis_vectors

    W = orders
    H = W + 1  # one extra order to survive the outer derivative
    xw = Fraction(window)
    G = generating_L(setup, "bar")
    corr = correction_series(setup, "bar", H + 2)
    mismatches = []

    def madd(target, key, vec):
        if vec:
            target[key] = target[key] + vec if key in target else vec

    for w in basis_vectors(setup, Fraction(1)):
        # LHS: op1 carries (s, y2, x1), op2 carries (Z, y4, x2)
        lhs: dict[tuple, FockVector] = {}
        for sign, first_is_2 in ((1, True), (-1, False)):
            inner_series = G.apply(w, y_hi=H, y2_hi=H, x_lo=-xw, x_hi=xw)
            for (ji, jbi, Ei), vec in inner_series.data.items():
                outer = G.apply(vec, y_hi=H, y2_hi=H, x_lo=-xw, x_hi=xw)
                for (jo, jbo, Eo), vec2 in outer.data.items():
                    if first_is_2:
                        key = (int(jo), int(jbo), int(ji), int(jbi), Eo, Ei)
                    else:
                        key = (int(ji), int(jbi), int(jo), int(jbo), Ei, Eo)
                    madd(lhs, key, vec2 * Fraction(sign))

        rhs: dict[tuple, FockVector] = {}

        # Normal-ordered part of the four delta terms; the shifted first
        # argument sig_s*s + sig_z*Z appears to nonnegative powers only.
        terms = [
            (-1, 1, False, (1, 1, -1, -1), 1),   # arg Z-s, B=y4, e^{t(y1-y3)}
            (-1, -1, True, (1, 1, 0, -1), 1),    # arg -s-Z, B=y3
            (1, 1, False, (0, 1, -1, -1), 2),    # arg s+Z, B=y4, e^{t(y2-y3)}
            (1, -1, True, (0, 1, 0, -1), 2),     # arg s-Z, B=y3
        ]
        Lw = G.apply(w, y_hi=H, y2_hi=H, x_lo=-2 * xw, x_hi=2 * xw)
        no_data = dict(Lw.data)
        for t_c, c_c in corr.items():
            key = (Fraction(t_c), Fraction(0), Fraction(0))
            if key in no_data:
                v = no_data[key] + w * (-c_c)
                if v:
                    no_data[key] = v
                else:
                    del no_data[key]
            elif c_c:
                no_data[key] = w * (-c_c)
        raw: dict[int, dict] = {1: {}, 2: {}}
        t = -xw
        while t <= xw:
            for sig_s, sig_z, b_has_z, gvec, group in terms:
                ef = _mv_exp_linear([t * Fraction(g) for g in gvec], H)
                for (jy, jb, E), vec in no_data.items():
                    o2 = E - t
                    if o2 < -xw or o2 > xw:
                        continue
                    part = _mv_pow_sz(sig_s, sig_z, int(jy), H)
                    if b_has_z:
                        bpart: MV = {}
                        for i in range(int(jb) + 1):
                            bpart[(0, 0, i, int(jb) - i)] = binom_frac(jb, i)
                    else:
                        bpart = {(0, 0, 0, int(jb)): Fraction(1)}
                    ser = _mv_mul(_mv_mul(part, bpart, H), ef, H)
                    for (a, b, c, d), cf in ser.items():
                        madd(raw[group], (a, b, c, d, t, o2), vec * cf)
            t += 1
        for (a, b, c, d, t, o2), vec in raw[1].items():
            # -1/2 d/dy1 = -1/2 d/ds
            if a != 0:
                madd(rhs, (a - 1, b, c, d, t, o2), vec * Fraction(-a, 2))
        for (a, b, c, d, t, o2), vec in raw[2].items():
            # -1/2 d/dy2 = -1/2 (d/dy2|_s - d/ds)
            if b != 0:
                madd(rhs, (a, b - 1, c, d, t, o2), vec * Fraction(-b, 2))
            if a != 0:
                madd(rhs, (a - 1, b, c, d, t, o2), vec * Fraction(a, 2))

        # Correction part, per pole class v = s - Z (terms 1 and 4) and
        # u = s + Z (terms 2 and 3), in class coordinates (v, y2, Z, y4).
        # (flip sign of c argument?, exp coefs in class coords, group)
        classes = {
            "v": [(True, (1, 1, 0, -1), 1), (False, (0, 1, 0, -1), 2)],
            "u": [(True, (1, 1, -1, -1), 1), (False, (0, 1, -1, -1), 2)],
        }
        t = -xw
        while t <= xw:
            o2 = -t  # the correction sits at the x-degree-zero slice
            if o2 < -xw or o2 > xw:
                t += 1
                continue
            for cls, pair in classes.items():
                acc: MV = {}
                for flip, gvec, group in pair:
                    L = {
                        j: (c * (-1 if (flip and j % 2) else 1))
                        for j, c in corr.items()
                    }
                    ef = _mv_exp_linear(
                        [t * Fraction(g) for g in gvec], H + 4
                    )
                    prod: MV = {}
                    for j, cj in L.items():
                        for (av, b, c_, d), cf in ef.items():
                            key = (j + av, b, c_, d)
                            if sum(key) > H + 1:
                                continue
                            prod[key] = prod.get(key, Fraction(0)) + cj * cf
                    for (av, b, c_, d), cf in list(prod.items()):
                        out = {}
                        if group == 1:
                            if av != 0:
                                out[(av - 1, b, c_, d)] = cf * Fraction(-av, 2)
                        else:
                            if b != 0:
                                out[(av, b - 1, c_, d)] = cf * Fraction(-b, 2)
                            if av != 0:
                                out[(av - 1, b, c_, d)] = cf * Fraction(av, 2)
                        for k2, c2 in out.items():
                            acc[k2] = acc.get(k2, Fraction(0)) + c2
                acc = {k2: c2 for k2, c2 in acc.items() if c2}
                bad_pole = [k2 for k2 in acc if k2[0] < 0]
                if bad_pole:
                    mismatches.append(
                        {
                            "key": ["pole", cls, str(t)],
                            "lhs": 0,
                            "rhs": str(sorted(bad_pole)[:3]),
                        }
                    )
                    continue
                zsig = -1 if cls == "v" else 1
                for (av, b, c_, d), cf in acc.items():
                    for i in range(av + 1):
                        c3 = cf * binom_frac(Fraction(av), i) * (zsig ** (av - i))
                        madd(
                            rhs,
                            (i, b, c_ + av - i, d, t, o2),
                            w * c3,
                        )
            t += 1

        for key in set(lhs) | set(rhs):
            a, b, c, d = key[:4]
            if a + b + c + d > W or min(a, c) < 0:
                continue
            va = lhs.get(key, 0)
            vb = rhs.get(key, 0)
            if (va or vb) and va != vb:
                mismatches.append(
                    {
                        "key": [str(x) for x in key],
                        "lhs": serialize_value(va),
                        "rhs": serialize_value(vb),
                    }
                )
    elapsed = (time.perf_counter() - t0) * 1000.0
    return CheckRecord(
        suite="lbar",
        params={"p": p, "dims": list(setup.dims), "orders": orders, "window": window},
        status="pass" if not mismatches else "fail",
        lhs="commutator of bar generating functions",
        rhs=f"{len(mismatches)} mismatches",
        witness=mismatches[:4] if mismatches else None,
        elapsed_ms=elapsed,
    )


def _sqb_any(
    setup: TwistSetup, u: VoaVector, v: VoaVector, var: str, hi: int
) -> dict[int, VoaVector]:
    """Square-bracket series for inhomogeneous u, split by weight component."""
    p = setup.p
    by_wt: dict[Fraction, VoaVector] = {}
    for mono, c in u.terms.items():
        wt = voa_weight(mono)
        piece = by_wt.setdefault(wt, VoaVector(p, {}))
        piece.terms[mono] = piece.terms.get(mono, 0) + c if mono in piece.terms else c
    out: dict[int, VoaVector] = {}
    for wt, piece in by_wt.items():
        if wt == 0:
            c = piece.terms.get((), None)
            if c:
                vec = v * c
                if vec:
                    out[0] = out[0] + vec if 0 in out else vec
            continue
        S = square_bracket_series(setup, piece, v, var, hi)
        for (j,), vec in S.support():
            ji = int(j)
            out[ji] = out[ji] + vec if ji in out else vec
    return {j: vec for j, vec in out.items() if vec}


def iterate_commutator_check(
    setup: TwistSetup,
    u1: VoaVector,
    v1: VoaVector,
    u2: VoaVector,
    v2: VoaVector,
    y_order: int = 1,
    window: int = 1,
    max_degree=2,
) -> CheckRecord:
    """Commutator of two square-bracket iterates equals the four
    delta-localized terms, compared as coefficients of
    y1^a y2^b x1^{o1} x2^{o2} acting on low-degree vectors."""
    t0 = time.perf_counter()
    p = setup.p
    from .fock import basis_vectors

    A_ser = _sqb_any(setup, u1, v1, "a", y_order)
    B_ser = _sqb_any(setup, u2, v2, "b", y_order)
    xw = Fraction(window)
    mismatches = []

    def madd(target, key, vec):
        if vec:
            target[key] = target[key] + vec if key in target else vec

    for w in basis_vectors(setup, Fraction(max_degree)):
        lhs: dict[tuple, FockVector] = {}
        for sign, first, second, swap in (
            (1, B_ser, A_ser, False),
            (-1, A_ser, B_ser, True),
        ):
            for jF, vecF in first.items():
                XF = twisted_x_series(setup, vecF, w, "x", xw)
                for (oF,), wF in XF.support():
                    if oF < -xw:
                        continue
                    for jS, vecS in second.items():
                        XS = twisted_x_series(setup, vecS, wF, "x", xw)
                        for (oS,), wS in XS.support():
                            if oS < -xw:
                                continue
                            if swap:
                                key = (jF, jS, oF, oS)
                            else:
                                key = (jS, jF, oS, oF)
                            madd(lhs, key, wS * Fraction(sign))

        rhs: dict[tuple, FockVector] = {}
        for r in range(p):
            u2r = u2.nu(-r)
            v2r = v2.nu(-r)
            # (head1, tail1, head2, flip2, left outer?, (g1, g2, gy))
            terms = [
                (v1, u2r, v2r, True, True, (0, -1, -1)),
                (v1, v2r, u2r, False, True, (0, 0, -1)),
                (u1, u2r, v2r, True, False, (1, -1, -1)),
                (u1, v2r, u2r, False, False, (1, 0, -1)),
            ]
            for head1, tail1, head2, flip2, left, (g1, g2, gy) in terms:
                inner1 = _sqb_any(setup, head1, tail1, "q", 0)
                for jy_B, vecB in inner1.items():
                    if jy_B > -1:
                        continue
                    inner2 = _sqb_any(setup, head2, vecB, "t", y_order)
                    for j2p, vecC in inner2.items():
                        sflip = Fraction(-1 if (flip2 and j2p % 2) else 1)
                        if left:
                            outer = _sqb_any(setup, head1 * 0 + u1, vecC, "w", y_order + 1)
                        else:
                            outer = _sqb_any(setup, vecC, v1, "w", y_order + 1)
                        for jw, vecD in outer.items():
                            X = twisted_x_series(setup, vecD, w, "x", 2 * xw)
                            xdata = {E: val for (E,), val in X.support()}
                            o2 = -xw
                            while o2 <= xw:
                                if (p * o2).denominator != 1:
                                    o2 += Fraction(1, p)
                                    continue
                                m = -p * o2
                                om = cyclo(p, int(r * m) % p) * Fraction(1, p)
                                o1 = -xw
                                while o1 <= xw:
                                    E = o1 + o2
                                    vecX = xdata.get(E)
                                    if vecX is None:
                                        o1 += Fraction(1, p)
                                        continue
                                    for i in range(-1 - jy_B + 1):
                                        ey = -1 - jy_B - i
                                        cy_base = Fraction(m, p) * gy - (E if left else 0)
                                        if ey and not cy_base:
                                            continue
                                        cey = (cy_base ** ey) / _factorial(ey) if ey else Fraction(1)
                                        cbin = binom_frac(Fraction(jw), i) * (
                                            Fraction(1) if left else Fraction(-1) ** i
                                        )
                                        if not cbin:
                                            continue
                                        for b in range(j2p, y_order + 1):
                                            e2 = b - j2p
                                            c2_base = Fraction(m, p) * g2
                                            if e2 and not c2_base:
                                                continue
                                            ce2 = (c2_base ** e2) / _factorial(e2) if e2 else Fraction(1)
                                            for a in range(jw - i, y_order + 1):
                                                e1 = a - (jw - i)
                                                c1_base = Fraction(m, p) * g1
                                                if e1 and not c1_base:
                                                    continue
                                                ce1 = (c1_base ** e1) / _factorial(e1) if e1 else Fraction(1)
                                                coef = cey * cbin * ce2 * ce1 * sflip
                                                if not coef:
                                                    continue
                                                term_v = vecX * (om * coef)
                                                madd(rhs, (a, b, o1, o2), term_v)
                                    o1 += Fraction(1, p)
                                o2 += Fraction(1, p)
        for key in set(lhs) | set(rhs):
            a, b = key[:2]
            if a > y_order or b > y_order:
                continue
            va = lhs.get(key, 0)
            vb = rhs.get(key, 0)
            if (va or vb) and va != vb:
                mismatches.append(
                    {
                        "key": [str(x) for x in key],
                        "lhs": serialize_value(va),
                        "rhs": serialize_value(vb),
                    }
                )
    elapsed = (time.perf_counter() - t0) * 1000.0
    return CheckRecord(
        suite="iterate-commutator",
        params={
            "p": p,
            "dims": list(setup.dims),
            "y_order": y_order,
            "window": window,
        },
        status="pass" if not mismatches else "fail",
        lhs="commutator of square-bracket iterates",
        rhs=f"{len(mismatches)} mismatches",
        witness=mismatches[:4] if mismatches else None,
        elapsed_ms=elapsed,
    )


def _solve_exact(columns: list[dict], target: dict):
    """Solve sum_j c_j * columns[j] = target over the rationals, where each
    vector is a sparse dict keyed by arbitrary hashable equation labels.
    Returns a coefficient list or None if inconsistent."""
    keys = sorted({k for col in columns for k in col} | set(target), key=repr)
    ncols = len(columns)
    rows = [
        [col.get(k, Fraction(0)) for col in columns] + [target.get(k, Fraction(0))]
        for k in keys
    ]
    pivots = []
    rank_row = 0
    for j in range(ncols):
        piv = next(
            (i for i in range(rank_row, len(rows)) if rows[i][j]), None
        )
        if piv is None:
            continue
        rows[rank_row], rows[piv] = rows[piv], rows[rank_row]
        pr = rows[rank_row]
        inv = Fraction(1) / pr[j]
        rows[rank_row] = [x * inv for x in pr]
        pr = rows[rank_row]
        for i in range(len(rows)):
            if i != rank_row and rows[i][j]:
                f = rows[i][j]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(j)
        rank_row += 1
    for i in range(rank_row, len(rows)):
        if rows[i][ncols]:
            return None
    sol = [Fraction(0)] * ncols
    for i, j in enumerate(pivots):
        sol[j] = rows[i][ncols]
    return sol


def _op_column(setup: TwistSetup, images: list[FockVector]) -> dict:
    """Flatten a list of operator images into a sparse rational vector keyed
    by (input index, output monomial, cyclotomic coordinate)."""
    col = {}
    for idx, vec in enumerate(images):
        for mono, c in vec.terms.items():
            for i, q in enumerate(c.coeffs):
                if q:
                    col[(idx, mono, i)] = q
    return col


def generator_field_vector(setup: TwistSetup, m: int) -> VoaVector:
    """sum_q a_q(-m-1) a_q(-m-1) 1 in the dual-pair basis."""
    p = setup.p
    terms = {}
    for k in range(p):
        kd = (p - k) % p
        for a in range(1, setup.dims[k] + 1):
            mono = tuple(sorted(((k, a, m + 1), (kd, a, m + 1))))
            terms[mono] = terms.get(mono, 0) + 1
    return VoaVector(p, terms)


def generators_corollary_check(
    setup: TwistSetup, m: int = 1, max_degree=3
) -> CheckRecord:
    """Modes of the level-(m+1) squared-current fields are exact rational
    combinations of the diagonal quadratic operators and vice versa, on
    vectors of degree <= max_degree."""
    t0 = time.perf_counter()
    p = setup.p
    from .fock import basis_vectors, quad_operator, apply_operator

    basis = basis_vectors(setup, Fraction(max_degree))
    n_vals = range(-2, 3)
    r_extra = 2  # candidate pool r <= m + r_extra for the forward solve
    hi = Fraction(max_degree + 2)
    failures = []
    combos = {}

    # images of each candidate generator on the whole basis
    field_images: dict[int, dict[Fraction, list[FockVector]]] = {}
    for mm in range(m + 1):
        vec = generator_field_vector(setup, mm)
        per_E: dict[Fraction, list[FockVector]] = {}
        for idx, w in enumerate(basis):
            X = twisted_x_series(setup, vec, w, "x", hi)
            for (E,), val in X.support():
                per_E.setdefault(E, [FockVector(p, {})] * len(basis))
                lst = per_E[E]
                if lst[idx] is not None:
                    lst = list(lst)
                    lst[idx] = val
                    per_E[E] = lst
        field_images[mm] = per_E

    def quad_images(r: int, n: int) -> list[FockVector]:
        op = quad_operator(setup, r, r, n, "plain")
        return [apply_operator(op, w) for w in basis]

    for n in n_vals:
        E = Fraction(-n)
        quad_cols = {
            r: _op_column(setup, quad_images(r, n)) for r in range(m + r_extra + 1)
        }
        id_col = _op_column(setup, basis)
        # forward: field mode -> combination of L^{(r)}(n)
        for mm in range(m + 1):
            imgs = field_images[mm].get(E)
            target = _op_column(setup, imgs) if imgs else {}
            cols = [quad_cols[r] for r in range(m + r_extra + 1)]
            sol = _solve_exact(cols, target)
            used_id = False
            if sol is None and n == 0:
                sol = _solve_exact(cols + [id_col], target)
                used_id = sol is not None
            if sol is None:
                failures.append({"direction": "field->quad", "m": mm, "n": n})
            else:
                combos[f"G[{mm}](n={n})"] = {
                    "coeffs": [str(c) for c in sol],
                    "identity": used_id,
                }
        # converse: L^{(r)}(n), r <= m, from the field modes
        field_cols = []
        for mm in range(m + 1):
            imgs = field_images[mm].get(E)
            field_cols.append(_op_column(setup, imgs) if imgs else {})
        for r in range(m + 1):
            target = quad_cols[r]
            sol = _solve_exact(field_cols, target)
            used_id = False
            if sol is None and n == 0:
                sol = _solve_exact(field_cols + [id_col], target)
                used_id = sol is not None
            if sol is None:
                failures.append({"direction": "quad->field", "r": r, "n": n})
            else:
                combos[f"L[{r}](n={n})"] = {
                    "coeffs": [str(c) for c in sol],
                    "identity": used_id,
                }
    elapsed = (time.perf_counter() - t0) * 1000.0
    return CheckRecord(
        suite="generators",
        params={"p": p, "dims": list(setup.dims), "m": m, "max_degree": str(max_degree)},
        status="pass" if not failures else "fail",
        lhs="squared-current field modes",
        rhs=f"{len(failures)} unsolvable; {len(combos)} combinations found",
        witness=failures[:4] if failures else {"combinations": dict(sorted(combos.items())[:6])},
        elapsed_ms=elapsed,
    )


def genfun_check(
    setup: TwistSetup, r_max: int = 2, n_max: int = 2, max_degree=2
) -> CheckRecord:
    """Diagonal coefficients of both generating functions reproduce the
    quadratic operators, and the bar singular part is (1/2) d/(y1-y2)^2."""
    t0 = time.perf_counter()
    p = setup.p
    from .fock import basis_vectors, quad_operator, apply_operator

    mismatches = []
    cbar = correction_series(setup, "bar", 2)
    if cbar.get(-2) != Fraction(setup.d, 2) or cbar.get(-1):
        mismatches.append(
            {
                "which": "bar singular part",
                "lhs": str(Fraction(setup.d, 2)),
                "rhs": {str(j): str(c) for j, c in cbar.items() if j < 0},
            }
        )
    cplain = correction_series(setup, "plain", 2)
    if any(c for j, c in cplain.items() if j < 0):
        mismatches.append(
            {
                "which": "plain singular part",
                "lhs": "0",
                "rhs": {str(j): str(c) for j, c in cplain.items() if j < 0},
            }
        )
    basis = basis_vectors(setup, Fraction(max_degree))
    for variant in ("plain", "bar"):
        for r in range(r_max + 1):
            for n in range(-n_max, n_max + 1):
                op = quad_operator(setup, r, r, n, variant)
                for w in basis:
                    want = apply_operator(op, w)
                    got = genfun_coefficient(setup, variant, r, r, n, w)
                    if want != got:
                        mismatches.append(
                            {
                                "which": f"{variant} r={r} n={n}",
                                "lhs": serialize_value(want),
                                "rhs": serialize_value(got),
                            }
                        )
    elapsed = (time.perf_counter() - t0) * 1000.0
    return CheckRecord(
        suite="genfun",
        params={
            "p": p,
            "dims": list(setup.dims),
            "r_max": r_max,
            "n_max": n_max,
            "max_degree": str(max_degree),
        },
        status="pass" if not mismatches else "fail",
        lhs="generating-function diagonal coefficients",
        rhs=f"{len(mismatches)} mismatches",
        witness=mismatches[:4] if mismatches else None,
        elapsed_ms=elapsed,
    )
