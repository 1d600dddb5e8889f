"""Truncated formal series in named variables with window bookkeeping.

A TruncatedSeries stores finitely many coefficients of a formal series in
variables that are either x-type (exponents in (1/p)Z) or y-type (integer
exponents).  Each variable carries a window [lo, hi]:

  * lo is a structural support floor: every coefficient with exponent
    below lo is genuinely zero, so queries below lo return 0;
  * hi is the authoritative ceiling: coefficients above hi are unknown,
    and querying them raises WindowError rather than returning a silent
    zero.

Operations compute the certified output window by interval arithmetic on
exponents: a product coefficient is reported only where every contributing
pair of source coefficients lies inside both factors' windows.

One caveat is inherent to box-shaped windows: binomial expansion and root
substitution produce series whose true support floor in the expansion
variable is diagonal (a bound on a sum of exponents, not on each exponent
separately).  The floor declared for such an output is valid only together
with the ceiling of the companion variable, so consumers must not widen
the window of such a series.  All internal callers either slice such
series at a fixed exponent or read coefficients directly.

Coefficients are generic: exact rationals, cyclotomics, Fock vectors, or
anything supporting +, scalar *, == 0 and truthiness.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union

from .cyclotomic import Cyclotomic, cyclo

Exp = Fraction
Key = tuple[Fraction, ...]


class WindowError(Exception):
    """A coefficient was requested outside the certified window."""


def binom_frac(gamma: Fraction, i: int) -> Fraction:
    """Generalized binomial coefficient C(gamma, i) for rational gamma."""
    gamma = Fraction(gamma)
    num = Fraction(1)
    for j in range(i):
        num *= gamma - j
    for j in range(1, i + 1):
        num /= j
    return num


def _as_frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TruncatedSeries:
    """Formal series with per-variable certified windows.

    vars:  ordered variable names.
    kinds: 'x' (exponents in (1/p)Z, lower bounded) or 'y' (integer
           exponents, bounded pole order) per variable.
    lo/hi: window bounds per variable; hi may be None (+infinity) for a
           variable the series is known not to involve beyond its stored
           support (e.g. a freshly adjoined variable).
    """

    __slots__ = ("vars", "kinds", "p", "lo", "hi", "data")

    def __init__(
        self,
        variables: Iterable[str],
        kinds: Mapping[str, str],
        lo: Mapping[str, Exp],
        hi: Mapping[str, Optional[Exp]],
        data: Mapping[Key, object],
        p: int = 1,
    ):
        self.vars = tuple(variables)
        self.kinds = {v: kinds[v] for v in self.vars}
        self.p = p
        self.lo = {v: _as_frac(lo[v]) for v in self.vars}
        self.hi = {v: (None if hi[v] is None else _as_frac(hi[v])) for v in self.vars}
        clean: dict[Key, object] = {}
        for key, c in data.items():
            if not c:
                continue
            key = tuple(_as_frac(e) for e in key)
            for v, e in zip(self.vars, key):
                if self.kinds[v] == "y":
                    if e.denominator != 1:
                        raise ValueError(f"fractional exponent {e} in y-variable {v}")
                elif (e * p).denominator != 1:
                    raise ValueError(f"exponent {e} not in (1/{p})Z for {v}")
                if e < self.lo[v] or (self.hi[v] is not None and e > self.hi[v]):
                    raise ValueError(
                        f"stored exponent {e} of {v} outside window "
                        f"[{self.lo[v]}, {self.hi[v]}]"
                    )
            clean[key] = c
        self.data = clean

    # -- constructors --------------------------------------------------------

    @staticmethod
    def constant(
        value,
        variables: Iterable[str],
        kinds: Mapping[str, str],
        p: int = 1,
    ) -> "TruncatedSeries":
        variables = tuple(variables)
        zero = Fraction(0)
        data = {}
        if value:
            data[tuple(zero for _ in variables)] = value
        return TruncatedSeries(
            variables,
            kinds,
            {v: zero for v in variables},
            {v: None for v in variables},
            data,
            p,
        )

    def _like(self, lo, hi, data) -> "TruncatedSeries":
        return TruncatedSeries(self.vars, self.kinds, lo, hi, data, self.p)

    def index(self, var: str) -> int:
        return self.vars.index(var)

    # -- coefficient access --------------------------------------------------

    def coeff(self, key: Iterable) -> object:
        key = tuple(_as_frac(e) for e in key)
        for v, e in zip(self.vars, key):
            if e < self.lo[v]:
                return 0
        for v, e in zip(self.vars, key):
            if self.hi[v] is not None and e > self.hi[v]:
                raise WindowError(
                    f"coefficient at {v}^{e} outside certified window "
                    f"(hi {self.hi[v]})"
                )
        return self.data.get(key, 0)

    def support(self):
        return self.data.items()

    def __bool__(self) -> bool:
        return bool(self.data)

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.vars != other.vars:
            raise ValueError("variable mismatch in series addition")
        lo = {v: min(self.lo[v], other.lo[v]) for v in self.vars}
        hi = {v: _min_hi(self.hi[v], other.hi[v]) for v in self.vars}
        data: dict[Key, object] = dict(self.data)
        for key, c in other.data.items():
            data[key] = data[key] + c if key in data else c
        data = {
            k: c
            for k, c in data.items()
            if c and all(
                hi[v] is None or e <= hi[v] for v, e in zip(self.vars, k)
            )
        }
        return self._like(lo, hi, data)

    def __neg__(self) -> "TruncatedSeries":
        return self._like(self.lo, self.hi, {k: -1 * c for k, c in self.data.items()})

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def scale(self, c) -> "TruncatedSeries":
        if not c:
            return self._like(self.lo, self.hi, {})
        return self._like(self.lo, self.hi, {k: c * v for k, v in self.data.items()})

    def map_coeffs(self, f: Callable[[object], object]) -> "TruncatedSeries":
        return self._like(self.lo, self.hi, {k: f(c) for k, c in self.data.items()})

    # -- multiplication ------------------------------------------------------

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Product with window shrinking.

        Certified ceiling per variable: min(hi_A + lo_B, hi_B + lo_A); the
        floor is lo_A + lo_B.  Scalar-through-scalar coefficient products
        are assumed commutative where used.
        """
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.vars != other.vars:
            raise ValueError("variable mismatch in series product")
        lo = {v: self.lo[v] + other.lo[v] for v in self.vars}
        hi = {}
        for v in self.vars:
            cands = []
            if self.hi[v] is not None:
                cands.append(self.hi[v] + other.lo[v])
            if other.hi[v] is not None:
                cands.append(other.hi[v] + self.lo[v])
            hi[v] = min(cands) if cands else None
        data: dict[Key, object] = {}
        for ka, ca in self.data.items():
            for kb, cb in other.data.items():
                key = tuple(a + b for a, b in zip(ka, kb))
                if any(
                    hi[v] is not None and e > hi[v] for v, e in zip(self.vars, key)
                ):
                    continue
                term = ca * cb
                if not term:
                    continue
                data[key] = data[key] + term if key in data else term
        data = {k: c for k, c in data.items() if c}
        return self._like(lo, hi, data)

    # -- window surgery ------------------------------------------------------

    def restrict_hi(self, new_hi: Mapping[str, Optional[Exp]]) -> "TruncatedSeries":
        """Narrow ceilings (only downward) and drop coefficients above them."""
        hi = dict(self.hi)
        for v, h in new_hi.items():
            if h is None:
                continue
            h = _as_frac(h)
            if hi[v] is None or h < hi[v]:
                hi[v] = h
        data = {
            k: c
            for k, c in self.data.items()
            if all(hi[v] is None or e <= hi[v] for v, e in zip(self.vars, k))
        }
        return self._like(self.lo, hi, data)

    def extend(self, new_vars: Iterable[str], kinds: Mapping[str, str]) -> "TruncatedSeries":
        """Adjoin variables the series does not involve (exponent 0, full window)."""
        new_vars = tuple(new_vars)
        variables = self.vars + new_vars
        kinds_all = dict(self.kinds)
        for v in new_vars:
            kinds_all[v] = kinds[v]
        zero = Fraction(0)
        lo = dict(self.lo)
        hi = dict(self.hi)
        for v in new_vars:
            lo[v] = zero
            hi[v] = None
        data = {k + (zero,) * len(new_vars): c for k, c in self.data.items()}
        return TruncatedSeries(variables, kinds_all, lo, hi, data, self.p)

    def reorder(self, variables: Iterable[str]) -> "TruncatedSeries":
        variables = tuple(variables)
        if set(variables) != set(self.vars):
            raise ValueError("reorder must permute the existing variables")
        perm = [self.index(v) for v in variables]
        data = {tuple(k[i] for i in perm): c for k, c in self.data.items()}
        return TruncatedSeries(variables, self.kinds, self.lo, self.hi, data, self.p)

    def slice(self, var: str, e) -> "TruncatedSeries":
        """The coefficient of var^e as a series in the remaining variables."""
        e = _as_frac(e)
        i = self.index(var)
        if self.hi[var] is not None and e > self.hi[var]:
            raise WindowError(f"slice at {var}^{e} beyond ceiling {self.hi[var]}")
        rest = tuple(v for v in self.vars if v != var)
        data = {
            tuple(x for j, x in enumerate(k) if j != i): c
            for k, c in self.data.items()
            if k[i] == e
        }
        return TruncatedSeries(
            rest,
            {v: self.kinds[v] for v in rest},
            {v: self.lo[v] for v in rest},
            {v: self.hi[v] for v in rest},
            data,
            self.p,
        )

    def shift(self, var: str, delta) -> "TruncatedSeries":
        """Multiply by var^delta (exact monomial shift)."""
        delta = _as_frac(delta)
        i = self.index(var)
        lo = dict(self.lo)
        hi = dict(self.hi)
        lo[var] += delta
        if hi[var] is not None:
            hi[var] += delta
        data = {
            k[:i] + (k[i] + delta,) + k[i + 1:]: c for k, c in self.data.items()
        }
        return self._like(lo, hi, data)

    def divide_power(self, var: str, k) -> "TruncatedSeries":
        """Divide by var^k, verifying that all certified lower coefficients vanish."""
        k = _as_frac(k)
        i = self.index(var)
        for key, c in self.data.items():
            if key[i] < k and c:
                raise ValueError(
                    f"series not divisible by {var}^{k}: nonzero coefficient at "
                    f"{var}^{key[i]}"
                )
        return self.shift(var, -k)

    # -- expansion kernels ---------------------------------------------------

    def mul_binomial(
        self,
        var_a: str,
        var_b: str,
        gamma,
        out_hi: Mapping[str, Optional[Exp]],
        sign: int = -1,
    ) -> "TruncatedSeries":
        """Multiply by (a + sign*b)^gamma expanded in nonnegative powers of b.

        The output is certified on the requested ceilings; WindowError if the
        source windows cannot support them.  The declared floor of var_a is
        diagonal-derived and valid only below the requested ceiling of var_b
        (see module docstring).
        """
        gamma = _as_frac(gamma)
        ia, ib = self.index(var_a), self.index(var_b)
        hia = out_hi.get(var_a, self.hi[var_a])
        hib = out_hi.get(var_b, self.hi[var_b])
        if hia is None or hib is None:
            raise WindowError("binomial expansion needs finite output ceilings")
        hia, hib = _as_frac(hia), _as_frac(hib)
        # certification at the output box corner
        if self.hi[var_a] is not None and hia + hib > self.hi[var_a] + gamma + self.lo[var_b]:
            raise WindowError(
                f"source window of {var_a} too small for binomial expansion"
            )
        if self.hi[var_b] is not None and hib > self.hi[var_b]:
            raise WindowError(
                f"source window of {var_b} too small for binomial expansion"
            )
        lo = dict(self.lo)
        hi = dict(self.hi)
        lo[var_a] = self.lo[var_a] + gamma - (hib - self.lo[var_b])
        lo[var_b] = self.lo[var_b]
        hi[var_a] = hia
        hi[var_b] = hib
        data: dict[Key, object] = {}
        for key, c in self.data.items():
            i_max = hib - key[ib]
            if i_max < 0:
                continue
            i = 0
            while i <= i_max:
                ea = key[ia] + gamma - i
                if ea < lo[var_a]:
                    break
                b = binom_frac(gamma, i)
                if b:
                    out = list(key)
                    out[ia] = ea
                    out[ib] = key[ib] + i
                    out_key = tuple(out)
                    if all(
                        hi[v] is None or e <= hi[v]
                        for v, e in zip(self.vars, out_key)
                    ):
                        term = (b * sign**i) * c
                        if term:
                            data[out_key] = (
                                data[out_key] + term if out_key in data else term
                            )
                i += 1
        data = {k: c for k, c in data.items() if c}
        return self._like(lo, hi, data)

    def substitute_root(
        self,
        var: str,
        s: int,
        targets: tuple[str, str],
        out_hi: Mapping[str, Optional[Exp]],
    ) -> "TruncatedSeries":
        """Replace var^(m/p) by w_p^(s m) (base + small)^(m/p).

        The binomial is expanded in nonnegative powers of the small variable.
        'base' and 'small' may be existing variables (exponents add) or new
        ones.  Output certified on the requested ceilings.
        """
        base, small = targets
        if self.kinds[var] != "x":
            raise ValueError("substitution target must be an x-type variable")
        p = self.p
        # assemble the output variable list
        keep = [v for v in self.vars if v != var]
        out_vars = list(keep)
        kinds = {v: self.kinds[v] for v in keep}
        for v in (base, small):
            if v not in out_vars:
                out_vars.append(v)
                kinds[v] = "x"
        hi_base = out_hi.get(base)
        hi_small = out_hi.get(small)
        if hi_base is None or hi_small is None:
            raise WindowError("root substitution needs finite output ceilings")
        hi_base, hi_small = _as_frac(hi_base), _as_frac(hi_small)

        lo_var = self.lo[var]
        lo_base_src = self.lo.get(base, Fraction(0)) if base in self.vars else Fraction(0)
        lo_small_src = self.lo.get(small, Fraction(0)) if small in self.vars else Fraction(0)
        # certification: contributing source exponents are bounded by the
        # requested output corner; check they sit inside the source windows.
        reach = hi_base + hi_small - lo_small_src
        if self.hi[var] is not None and reach - lo_base_src > self.hi[var]:
            raise WindowError(f"source window of {var} too small for substitution")
        if base in self.vars and self.hi[base] is not None and reach - lo_var > self.hi[base]:
            raise WindowError(f"source window of {base} too small for substitution")
        if small in self.vars and self.hi[small] is not None and hi_small > self.hi[small]:
            raise WindowError(f"source window of {small} too small for substitution")
        for v in keep:
            if v in (base, small):
                continue
            want = out_hi.get(v, self.hi[v])
            if want is not None and self.hi[v] is not None and _as_frac(want) > self.hi[v]:
                raise WindowError(f"source window of {v} too small for substitution")

        lo = {v: self.lo[v] for v in keep}
        hi = {v: self.hi[v] for v in keep}
        lo[small] = lo_small_src
        hi[small] = hi_small
        lo[base] = lo_var + lo_base_src + lo_small_src - hi_small
        hi[base] = hi_base
        for v in keep:
            if v in (base, small):
                continue
            want = out_hi.get(v)
            if want is not None and (hi[v] is None or _as_frac(want) < hi[v]):
                hi[v] = _as_frac(want)

        iv = self.index(var)
        pos = {v: i for i, v in enumerate(out_vars)}
        data: dict[Key, object] = {}
        zero = Fraction(0)
        for key, c in self.data.items():
            e1 = key[iv]
            m = e1 * p
            assert m.denominator == 1
            root = cyclo(p, (s * int(m)) % p) if p > 1 else None
            rest = {v: key[self.index(v)] for v in keep}
            e_small0 = rest.get(small, zero)
            e_base0 = rest.get(base, zero)
            i = 0
            while e_small0 + i <= hi_small:
                b = binom_frac(e1, i)
                if b:
                    out = [zero] * len(out_vars)
                    for v in keep:
                        out[pos[v]] = rest[v]
                    out[pos[base]] = e_base0 + (e1 - i)
                    out[pos[small]] = e_small0 + i
                    ok = all(
                        (hi[v] is None or out[pos[v]] <= hi[v])
                        and out[pos[v]] >= lo[v]
                        for v in out_vars
                    )
                    if ok:
                        term = c * b if root is None else (b * root) * c
                        if term:
                            k2 = tuple(out)
                            data[k2] = data[k2] + term if k2 in data else term
                i += 1
        data = {k: c for k, c in data.items() if c}
        return TruncatedSeries(out_vars, kinds, lo, hi, data, p)

    def diagonal(self, var_src: str, var_dst: str) -> "TruncatedSeries":
        """Set var_src equal to var_dst (sum coefficients along diagonals).

        Certified like a product: ceiling min(hi_src + lo_dst, hi_dst + lo_src).
        """
        isrc, idst = self.index(var_src), self.index(var_dst)
        cands = []
        if self.hi[var_src] is not None:
            cands.append(self.hi[var_src] + self.lo[var_dst])
        if self.hi[var_dst] is not None:
            cands.append(self.hi[var_dst] + self.lo[var_src])
        hi_d = min(cands) if cands else None
        rest = tuple(v for v in self.vars if v != var_src)
        lo = {v: self.lo[v] for v in rest}
        hi = {v: self.hi[v] for v in rest}
        lo[var_dst] = self.lo[var_src] + self.lo[var_dst]
        hi[var_dst] = hi_d
        data: dict[Key, object] = {}
        for key, c in self.data.items():
            out = list(key)
            out[idst] = key[isrc] + key[idst]
            del out[isrc]
            k2 = tuple(out)
            j = rest.index(var_dst)
            if hi_d is not None and k2[j] > hi_d:
                continue
            data[k2] = data[k2] + c if k2 in data else c
        data = {k: c for k, c in data.items() if c}
        return TruncatedSeries(
            rest, {v: self.kinds[v] for v in rest}, lo, hi, data, self.p
        )

    # -- comparison ----------------------------------------------------------

    def difference_witness(self, other: "TruncatedSeries"):
        """First differing coefficient on the intersection of windows, or None."""
        if self.vars != other.vars:
            raise ValueError("variable mismatch in comparison")
        hi = {v: _min_hi(self.hi[v], other.hi[v]) for v in self.vars}
        keys = set()
        for k in self.data:
            if all(hi[v] is None or e <= hi[v] for v, e in zip(self.vars, k)):
                keys.add(k)
        for k in other.data:
            if all(hi[v] is None or e <= hi[v] for v, e in zip(self.vars, k)):
                keys.add(k)
        for k in sorted(keys):
            a = self.coeff(k)
            b = other.coeff(k)
            if not _eq(a, b):
                return (k, a, b)
        return None

    def __repr__(self) -> str:
        terms = []
        for k in sorted(self.data)[:8]:
            mono = " ".join(f"{v}^{e}" for v, e in zip(self.vars, k) if e)
            terms.append(f"({self.data[k]!r}) {mono}".strip())
        more = " + ..." if len(self.data) > 8 else ""
        return f"<series {' + '.join(terms) or '0'}{more}>"


def _min_hi(a: Optional[Exp], b: Optional[Exp]) -> Optional[Exp]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _eq(a, b) -> bool:
    if isinstance(a, int) and a == 0:
        return not b
    if isinstance(b, int) and b == 0:
        return not a
    return a == b


# ---------------------------------------------------------------------------
# univariate helpers (exact Laurent calculus in one y-type variable)
# ---------------------------------------------------------------------------


def y_series(var: str, coeffs: Mapping[int, Fraction], lo: int, hi: int, p: int = 1) -> TruncatedSeries:
    data = {(Fraction(n),): c for n, c in coeffs.items() if c}
    return TruncatedSeries(
        (var,), {var: "y"}, {var: Fraction(lo)}, {var: Fraction(hi)}, data, p
    )


def exp_series(var: str, c: Fraction, hi: int, p: int = 1) -> TruncatedSeries:
    """e^(c*var) truncated at order hi."""
    c = Fraction(c)
    coeffs = {}
    term = Fraction(1)
    for n in range(hi + 1):
        coeffs[n] = term
        term = term * c / (n + 1)
    return y_series(var, coeffs, 0, hi, p)


def _unit_inverse(coeffs: list[Fraction], n_terms: int) -> list[Fraction]:
    """Inverse of a power series with invertible constant term."""
    inv = [Fraction(0)] * n_terms
    inv[0] = 1 / coeffs[0]
    for n in range(1, n_terms):
        acc = Fraction(0)
        for k in range(1, min(n, len(coeffs) - 1) + 1):
            acc += coeffs[k] * inv[n - k]
        inv[n] = -acc * inv[0]
    return inv


def em1_power(var: str, n: int, hi: int, p: int = 1) -> TruncatedSeries:
    """(e^var - 1)^n for any integer n, truncated at order hi.

    For n < 0 this is a Laurent series with pole order -n, computed exactly
    from the unit part of (e^y - 1)/y.
    """
    n_terms = hi + abs(n) + 2
    unit = [Fraction(1, 1)]
    fact = 1
    for k in range(1, n_terms):
        fact *= k + 1
        unit.append(Fraction(1, fact))  # (e^y-1)/y = sum y^k/(k+1)!
    if n >= 0:
        acc = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
        for _ in range(n):
            acc = _poly_mul_trunc(acc, unit, n_terms)
    else:
        inv = _unit_inverse(unit, n_terms)
        acc = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
        for _ in range(-n):
            acc = _poly_mul_trunc(acc, inv, n_terms)
    coeffs = {n + k: acc[k] for k in range(n_terms) if n + k <= hi}
    return y_series(var, coeffs, n, hi, p)


def log1p_power(var: str, n: int, hi: int, p: int = 1) -> TruncatedSeries:
    """(log(1 + var))^n for any integer n, truncated at order hi."""
    n_terms = hi + abs(n) + 2
    # log(1+y)/y = sum (-1)^k y^k/(k+1)
    unit = [Fraction((-1) ** k, k + 1) for k in range(n_terms)]
    if n >= 0:
        acc = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
        for _ in range(n):
            acc = _poly_mul_trunc(acc, unit, n_terms)
    else:
        inv = _unit_inverse(unit, n_terms)
        acc = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
        for _ in range(-n):
            acc = _poly_mul_trunc(acc, inv, n_terms)
    coeffs = {n + k: acc[k] for k in range(n_terms) if n + k <= hi}
    return y_series(var, coeffs, n, hi, p)


def _poly_mul_trunc(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, ai in enumerate(a):
        if ai == 0 or i >= n:
            continue
        for j, bj in enumerate(b):
            if i + j >= n:
                break
            if bj:
                out[i + j] += ai * bj
    return out


def residue(series: TruncatedSeries, var: str):
    """Coefficient of var^(-1), certified by the window."""
    i = series.index(var)
    if series.hi[var] is not None and series.hi[var] < -1:
        raise WindowError("window does not reach the residue exponent")
    acc = 0
    for key, c in series.data.items():
        if key[i] == -1:
            acc = acc + c
    return acc


def residue_change_of_variable_check(h: TruncatedSeries, F: TruncatedSeries) -> bool:
    """Verify Res_x h(x) = Res_y h(F(y)) F'(y) at the given truncation.

    h is a univariate Laurent series in some variable; F a univariate power
    series in another variable with zero constant term and invertible linear
    coefficient.  Raises WindowError when the truncations cannot certify the
    comparison.
    """
    (xv,) = h.vars
    (yv,) = F.vars
    if F.lo[yv] < 1 or F.coeff((Fraction(0),)):
        raise ValueError("F must have zero constant term")
    lin = F.coeff((Fraction(1),))
    if not lin:
        raise ValueError("F must have invertible linear coefficient")
    if F.hi[yv] is None:
        raise WindowError("F must be truncated")
    hi_f = int(F.hi[yv])
    pole = -int(h.lo[xv])
    # unit part u with F = y * lin * (1 + ...)
    unit = [F.coeff((Fraction(k + 1),)) for k in range(hi_f)]
    n_terms = hi_f + pole + 2
    unit = [Fraction(u) for u in unit] + [Fraction(0)] * (n_terms - len(unit))
    # F' as coefficient list
    fprime = [Fraction((k + 1)) * Fraction(F.coeff((Fraction(k + 1),))) for k in range(hi_f)]
    fprime += [Fraction(0)] * (n_terms - len(fprime))

    inv_unit = _unit_inverse(unit, n_terms)

    # F^n for needed n, as Laurent coefficient lists offset by n
    total = {}
    if h.hi[xv] is None:
        h_hi = max((int(k[0]) for k in h.data), default=0)
    else:
        h_hi = int(h.hi[xv])
    for n in range(int(h.lo[xv]), h_hi + 1):
        hn = h.coeff((Fraction(n),))
        if not hn:
            continue
        acc = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
        base = unit if n >= 0 else inv_unit
        for _ in range(abs(n)):
            acc = _poly_mul_trunc(acc, base, n_terms)
        term = _poly_mul_trunc(acc, fprime, n_terms)
        for k, c in enumerate(term):
            if c:
                e = n + k
                total[e] = total.get(e, Fraction(0)) + hn * c
    res_y = total.get(-1, Fraction(0))
    res_x = h.coeff((Fraction(-1),)) if h.lo[xv] <= -1 else 0
    return Fraction(res_x if res_x else 0) == res_y
