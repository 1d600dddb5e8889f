"""Twisted Heisenberg Fock modules and their quadratic operators.

The module is built from a period-p isometry given in eigenbasis normal
form: a basis {b_{k,a}} (k the eigenvalue index, a the copy index) with
<b_{k,a}, b_{k',a'}> = 1 exactly when k + k' = 0 mod p and a = a'.  Modes
b_{k,a}(n) exist for n in k/p + Z; negative levels create, positive levels
annihilate with the Heisenberg contraction <.,.> * level, level-zero modes
act as zero, and the central mode acts as 1 (level-one module).

Quadratic operators carry the diagonal (or bidegree) Casimir kernel over
dual basis pairs, plus the Bernoulli-polynomial scalar correction on the
degree-zero operator.
"""

from __future__ import annotations

import time
from bisect import insort
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

from .bernoulli import bernoulli_number, bernoulli_poly
from .cyclotomic import Cyclotomic
from . import diffop
from .reports import CheckRecord
from .series import em1_power, exp_series, y_series

Mode = tuple[int, int, Fraction]  # (k, a, level)
Monomial = tuple[Mode, ...]  # sorted, all levels < 0
ScalarLike = Union[int, Fraction, Cyclotomic]


@dataclass(frozen=True)
class TwistSetup:
    """Period p and eigenspace dimensions [d_0, ..., d_{p-1}]."""

    p: int
    dims: tuple[int, ...]

    def __init__(self, p: int, dims: Iterable[int]):
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "dims", tuple(int(d) for d in dims))
        if self.p < 1:
            raise ValueError("period p must be a positive integer")
        if len(self.dims) != self.p:
            raise ValueError(f"dims must have length p = {self.p}")
        if any(d < 0 for d in self.dims):
            raise ValueError("eigenspace dimensions must be nonnegative")
        if self.d < 1:
            raise ValueError("total dimension must be positive")
        for k in range(self.p):
            if self.dims[k] != self.dims[(self.p - k) % self.p]:
                raise ValueError(
                    "nondegeneracy requires dim[k] == dim[(p-k) mod p]; "
                    f"violated at k = {k}"
                )

    @property
    def d(self) -> int:
        return sum(self.dims)

    def dual_index(self, k: int) -> int:
        return (self.p - k) % self.p

    def modes_at_level(self, level: Fraction):
        """(k, a) labels available at a given level in (1/p)Z."""
        level = Fraction(level)
        num = level * self.p
        if num.denominator != 1:
            raise ValueError(f"level {level} not in (1/{self.p})Z")
        k = int(num) % self.p
        return [(k, a) for a in range(1, self.dims[k] + 1)]

    def pairing(self, k1: int, a1: int, k2: int, a2: int) -> int:
        return 1 if (k1 + k2) % self.p == 0 and a1 == a2 else 0

    def serialize(self):
        return {"p": self.p, "dims": list(self.dims)}


def mode_label(setup: TwistSetup, k: int, a: int, level) -> Mode:
    """Validated mode label: level must lie in k/p + Z and a in range."""
    level = Fraction(level)
    if (level * setup.p - k).denominator != 1 or int(level * setup.p - k) % setup.p != 0:
        raise ValueError(f"level {level} not in {k}/{setup.p} + Z")
    if not (1 <= a <= setup.dims[k % setup.p]):
        raise ValueError(f"copy index {a} out of range for k = {k}")
    return (k % setup.p, a, level)


class FockVector:
    """Finite linear combination of creation-mode monomials, Q(w_p) coefficients."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        clean: dict[Monomial, Cyclotomic] = {}
        for mono, c in (terms or {}).items():
            if not isinstance(c, Cyclotomic):
                c = Cyclotomic.from_rational(p, c)
            if not c:
                continue
            mono = tuple(sorted(mono))
            for (_, _, lvl) in mono:
                if lvl >= 0:
                    raise ValueError("Fock monomials may contain creation modes only")
            clean[mono] = clean[mono] + c if mono in clean else c
        self.terms = {m: c for m, c in clean.items() if c}

    @staticmethod
    def vacuum(p: int) -> "FockVector":
        return FockVector(p, {(): 1})

    @staticmethod
    def _raw(p: int, terms: dict) -> "FockVector":
        """Construct from already-canonical terms, skipping validation."""
        v = object.__new__(FockVector)
        v.p = p
        v.terms = terms
        return v

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, FockVector):
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            c = terms[m] + c if m in terms else c
            if c:
                terms[m] = c
            elif m in terms:
                del terms[m]
        return FockVector._raw(self.p, terms)

    __radd__ = __add__

    def __neg__(self):
        return FockVector._raw(self.p, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, FockVector):
            return NotImplemented
        out = {}
        for m, c in self.terms.items():
            c = c * scalar
            if c:
                out[m] = c
        return FockVector._raw(self.p, out)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, tuple(sorted((m, c.coeffs) for m, c in self.terms.items()))))

    def degrees(self) -> set[Fraction]:
        return {monomial_degree(m) for m in self.terms}

    def serialize(self):
        return [
            {
                "monomial": [[k, a, str(lvl)] for (k, a, lvl) in mono],
                "coeff": c.serialize(),
            }
            for mono, c in sorted(self.terms.items())
        ]

    def __repr__(self):
        parts = []
        for mono, c in sorted(self.terms.items()):
            label = "".join(f"b[{k},{a}]({lvl})" for k, a, lvl in mono) or "vac"
            parts.append(f"({c!r})*{label}")
        return " + ".join(parts) if parts else "0"


def monomial_degree(mono: Monomial) -> Fraction:
    return -sum((lvl for _, _, lvl in mono), Fraction(0))


def apply_mode(setup: TwistSetup, mode: Mode, v: FockVector) -> FockVector:
    """Action of a single mode on a Fock vector.

    Negative levels multiply into the monomial; positive levels contract
    against matching creation modes with factor <.,.> * level; level-zero
    modes annihilate everything (the inducing line extends across S[nu]
    because zero modes are central in the Heisenberg algebra).
    """
    k, a, level = mode
    out: dict[Monomial, Cyclotomic] = {}
    if level == 0:
        return FockVector(setup.p)
    if level < 0:
        for mono, c in v.terms.items():
            m2 = tuple(sorted(mono + (mode,)))
            out[m2] = out[m2] + c if m2 in out else c
        return FockVector._raw(setup.p, {m: c for m, c in out.items() if c})
    for mono, c in v.terms.items():
        seen = set()
        for i, (k2, a2, lvl2) in enumerate(mono):
            if (k2, a2, lvl2) in seen:
                continue
            seen.add((k2, a2, lvl2))
            if lvl2 != -level or not setup.pairing(k, a, k2, a2):
                continue
            mult = sum(1 for md in mono if md == (k2, a2, lvl2))
            m2 = list(mono)
            m2.pop(i)
            m2 = tuple(m2)
            coeff = c * (level * mult)
            out[m2] = out[m2] + coeff if m2 in out else coeff
    return FockVector._raw(setup.p, {m: c for m, c in out.items() if c})


def enumerate_basis(setup: TwistSetup, max_degree) -> dict[Fraction, list[Monomial]]:
    """All creation monomials of degree <= max_degree, grouped by degree.

    Each negative level -l contributes dims[(p*(-l)) mod p] independent
    slots; monomials are multisets of slots.
    """
    max_degree = Fraction(max_degree)
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    step = Fraction(1, setup.p)
    slots: list[tuple[Fraction, Mode]] = []  # (degree cost, mode)
    lvl = step
    while lvl <= max_degree:
        for (k, a) in setup.modes_at_level(-lvl):
            slots.append((lvl, (k, a, -lvl)))
        lvl += step
    out: dict[Fraction, list[Monomial]] = {}

    def rec(i: int, remaining: Fraction, acc: list):
        out.setdefault(max_degree - remaining, []).append(tuple(sorted(acc)))
        for j in range(i, len(slots)):
            cost, mode = slots[j]
            if cost > remaining:
                break
            acc.append(mode)
            rec(j, remaining - cost, acc)
            acc.pop()

    rec(0, max_degree, [])
    return {deg: sorted(monos) for deg, monos in sorted(out.items())}


def basis_vectors(setup: TwistSetup, max_degree) -> list[FockVector]:
    vecs = []
    for monos in enumerate_basis(setup, max_degree).values():
        for m in monos:
            vecs.append(FockVector(setup.p, {m: 1}))
    return vecs


# ---------------------------------------------------------------------------
# quadratic operators
# ---------------------------------------------------------------------------


def vacuum_correction(setup: TwistSetup, r: int, variant: str) -> Fraction:
    """Scalar part of the degree-zero diagonal operator.

    plain: -(-1)^r/(4(r+1)) sum_k d_k (B_{2(r+1)}(k/p) - B_{2(r+1)})
    bar:   -(-1)^r/(4(r+1)) sum_k d_k  B_{2(r+1)}(k/p)
    """
    n2 = 2 * (r + 1)
    acc = Fraction(0)
    for k in range(setup.p):
        if not setup.dims[k]:
            continue
        val = bernoulli_poly(n2, Fraction(k, setup.p))
        if variant == "plain":
            val -= bernoulli_number(n2)
        acc += setup.dims[k] * val
    return Fraction(-((-1) ** r), 4 * (r + 1)) * acc


@dataclass(frozen=True)
class QuadOperator:
    """(1/2) sum over dual pairs of the normal-ordered bidegree kernel.

    kernel(j, n-j) = (-j)^r1 * (-(n-j))^r2; the diagonal degree-zero case
    carries the Bernoulli scalar correction.  Lowers degree by exactly n.
    """

    setup: TwistSetup
    r1: int
    r2: int
    n: int
    scalar: Fraction
    variant: str = "plain"

    def kernel(self, j: Fraction) -> Fraction:
        return (-j) ** self.r1 * (-(Fraction(self.n) - j)) ** self.r2


def quad_operator(
    setup: TwistSetup, r1: int, r2: int, n: int, variant: str = "plain"
) -> QuadOperator:
    if variant not in ("plain", "bar"):
        raise ValueError("variant must be 'plain' or 'bar'")
    scalar = Fraction(0)
    if n == 0 and r1 == r2:
        scalar = vacuum_correction(setup, r1, variant)
    return QuadOperator(setup, r1, r2, n, scalar, variant)


_quad_memo: dict = {}


def _scaled_mono(p: int, mono):
    """Integer-level image of a monomial, used as a cheap dict key."""
    return tuple((k, a, int(lvl * p)) for k, a, lvl in mono)


def _apply_quad_to_monomial(setup: TwistSetup, r1: int, r2: int, n: int, mono):
    """Normal-ordered kernel action on a single monomial.

    For each dual basis pair and a monomial of degree delta, only levels
    j in [n - delta, delta] (excluding the all-creation overflow) can act
    without annihilating the vector, so the sum is finite.  The scalar
    part is not included.  Returns (monomial, scaled key, coeff) triples.
    """
    p = setup.p
    sm = _scaled_mono(p, mono)
    N = n * p
    delta = -sum(lvl for _, _, lvl in sm)
    denom0 = 2 * p ** (r1 + r2)
    acc: dict = {}
    for k in range(p):
        kd = setup.dual_index(k)
        for a in range(1, setup.dims[k] + 1):
            lo = N - delta
            js = lo + ((k - lo) % p)
            while js <= delta:
                j2s = N - js
                if js != 0 and j2s != 0:
                    num = (-js) ** r1 * (-j2s) ** r2
                    # normal ordering: annihilation acts first
                    if js > 0 and j2s < 0:
                        seq = ((k, a, js), (kd, a, j2s))
                    else:
                        seq = ((kd, a, j2s), (k, a, js))
                    cur = list(sm)
                    ok = True
                    n_ann = 0
                    for kk, aa, ls in seq:
                        if ls > 0:
                            tgt = ((p - kk) % p, aa, -ls)
                            mult = cur.count(tgt)
                            if not mult:
                                ok = False
                                break
                            num *= ls * mult
                            n_ann += 1
                            cur.remove(tgt)
                        else:
                            insort(cur, (kk, aa, ls))
                    if ok and num:
                        key2 = tuple(cur)
                        val = Fraction(num, denom0 * p**n_ann)
                        acc[key2] = acc[key2] + val if key2 in acc else val
                js += p
    res = []
    for sm2, c2 in acc.items():
        if c2:
            mono2 = tuple((kk, aa, Fraction(ls, p)) for kk, aa, ls in sm2)
            res.append((mono2, sm2, c2))
    return tuple(res)


def apply_operator(op: QuadOperator, v: FockVector) -> FockVector:
    """Exact finite evaluation of a quadratic operator on a Fock vector,
    memoized monomial-by-monomial on integer-scaled keys."""
    setup = op.setup
    p = setup.p
    table = _quad_memo.setdefault((p, setup.dims, op.r1, op.r2, op.n), {})
    acc: dict = {}
    for mono, c in v.terms.items():
        sm = _scaled_mono(p, mono)
        res = table.get(sm)
        if res is None:
            res = _apply_quad_to_monomial(setup, op.r1, op.r2, op.n, mono)
            table[sm] = res
        for m2, s2, c2 in res:
            e = acc.get(s2)
            if e is None:
                acc[s2] = [m2, c * c2]
            else:
                e[1] = e[1] + c * c2
    terms = {}
    for m2, val in acc.values():
        if val:
            terms[m2] = val
    out = FockVector._raw(setup.p, terms)
    if op.scalar:
        out = out + v * op.scalar
    return out


def _ceil_to_int(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def rep_check(
    setup: TwistSetup,
    r: int,
    s: int,
    m: int,
    n: int,
    max_degree,
) -> CheckRecord:
    """Verify the commutator of diagonal quadratic operators against the
    abstract bracket, with structure constants and the cocycle supplied by
    the abstract algebra and the central element acting as the total
    dimension."""
    t0 = time.monotonic()
    dec = diffop.decompose(
        diffop.bracket(
            diffop.generator(diffop.GeneratorIndex(m, r)),
            diffop.generator(diffop.GeneratorIndex(n, s)),
        ),
        m + n,
    )
    params = {"p": setup.p, "dims": list(setup.dims), "r": r, "s": s, "m": m, "n": n,
              "max_degree": str(Fraction(max_degree))}
    if dec.residual:
        return CheckRecord("rep", params, "fail", witness="nonzero residual in abstract bracket")
    op_r = quad_operator(setup, r, r, m)
    op_s = quad_operator(setup, s, s, n)
    rhs_ops = [(a, quad_operator(setup, i, i, m + n)) for i, a in dec.coefficients.items()]
    central = dec.central * setup.d
    for v in basis_vectors(setup, max_degree):
        lhs = apply_operator(op_r, apply_operator(op_s, v)) - apply_operator(
            op_s, apply_operator(op_r, v)
        )
        rhs = FockVector(setup.p)
        for a, op_i in rhs_ops:
            rhs = rhs + apply_operator(op_i, v) * a
        rhs = rhs + v * central
        if lhs != rhs:
            return CheckRecord(
                "rep",
                params,
                "fail",
                lhs=lhs.serialize(),
                rhs=rhs.serialize(),
                witness={"vector": v.serialize()},
                elapsed_ms=int(1000 * (time.monotonic() - t0)),
            )
    return CheckRecord(
        "rep", params, "pass", elapsed_ms=int(1000 * (time.monotonic() - t0))
    )


def delta_genfun(setup: TwistSetup, order: int) -> CheckRecord:
    """Compare highest-weight data from vacuum eigenvalues against the
    closed-form generating function.

    Eigenvalue side: the functional value on the k-th diagonal degree-zero
    operator is (-1)^k times its vacuum eigenvalue.  Closed-form side:
    (1/2) d/dx of sum_k d_k (e^(k x / p) - 1)/(1 - e^x), expanded as an
    exact Laurent series; the x^(2k)/(2k)! coefficients are compared for
    1 <= k <= order/2.  Coefficients outside that family are reported but
    not judged.
    """
    t0 = time.monotonic()
    if order < 2:
        raise ValueError("order must be at least 2")
    half_orders = order // 2
    hi = order + 2
    # numerator sum_k d_k (e^(k x/p) - 1) as a power series
    num = y_series("x", {}, 0, hi)
    for k in range(setup.p):
        term = exp_series("x", Fraction(k, setup.p), hi).scale(Fraction(setup.dims[k]))
        num = num + term
    num = num + y_series("x", {0: Fraction(-setup.d)}, 0, hi)
    # 1/(1 - e^x) = -(e^x - 1)^(-1)
    inv = em1_power("x", -1, hi).scale(Fraction(-1))
    closed = num * inv
    # derivative, halved
    ddx = {}
    for (e,), c in closed.support():
        if e != 0:
            ddx[int(e) - 1] = Fraction(e) * c
    closed_form = y_series(
        "x", ddx, int(closed.lo["x"]) - 1, int(closed.hi["x"]) - 1
    ).scale(Fraction(1, 2))

    from math import factorial

    mismatches = []
    values = {}
    for k in range(1, half_orders + 1):
        eig = vacuum_correction(setup, k, "plain")
        delta_val = Fraction((-1) ** k) * eig
        coeff = Fraction(closed_form.coeff((Fraction(2 * k),)))
        closed_val = coeff * factorial(2 * k)
        values[f"k={k}"] = str(delta_val)
        if delta_val != closed_val:
            mismatches.append({"k": k, "eigenvalue_side": str(delta_val),
                               "closed_form_side": str(closed_val)})
    extra = {
        str(e): str(c)
        for (e,), c in sorted(closed_form.support())
        if e <= order and (e < 2 or int(e) % 2 == 1)
    }
    params = {"p": setup.p, "dims": list(setup.dims), "order": order}
    status = "pass" if not mismatches else "fail"
    return CheckRecord(
        "delta",
        params,
        status,
        lhs=values,
        rhs={"off_family_coefficients": extra},
        witness=mismatches or None,
        elapsed_ms=int(1000 * (time.monotonic() - t0)),
    )


def graded_dimension_check(setup: TwistSetup, max_degree) -> CheckRecord:
    """Compare basis counts against the Euler-product generating function."""
    t0 = time.monotonic()
    max_degree = Fraction(max_degree)
    # expand prod_{levels l} (1 - q^l)^(-d(l)) in q^(1/p) up to max_degree
    steps = int(max_degree * setup.p)
    coeffs = [Fraction(0)] * (steps + 1)
    coeffs[0] = Fraction(1)
    step = Fraction(1, setup.p)
    lvl = step
    while lvl <= max_degree:
        mult = len(setup.modes_at_level(-lvl))
        unit = int(lvl * setup.p)
        for _ in range(mult):
            # multiply by 1/(1 - q^lvl) = sum_i q^(i*lvl)
            for i in range(unit, steps + 1):
                coeffs[i] += coeffs[i - unit]
        lvl += step
    counts = {deg: len(monos) for deg, monos in enumerate_basis(setup, max_degree).items()}
    mismatches = []
    table = {}
    for i in range(steps + 1):
        deg = Fraction(i, setup.p)
        expected = coeffs[i]
        got = counts.get(deg, 0)
        table[str(deg)] = got
        if expected != got:
            mismatches.append({"degree": str(deg), "enumerated": got, "product": str(expected)})
    params = {"p": setup.p, "dims": list(setup.dims), "max_degree": str(max_degree)}
    return CheckRecord(
        "dims",
        params,
        "pass" if not mismatches else "fail",
        lhs=table,
        witness=mismatches or None,
        elapsed_ms=int(1000 * (time.monotonic() - t0)),
    )
