import random
from fractions import Fraction

import pytest

from zetafock.cyclotomic import cyclo
from zetafock.series import (
    TruncatedSeries,
    WindowError,
    binom_frac,
    em1_power,
    exp_series,
    log1p_power,
    residue,
    residue_change_of_variable_check,
    y_series,
)


def test_exp_series_coefficients():
    S = exp_series("y", Fraction(3, 2), 5)
    fact = 1
    for k in range(6):
        if k:
            fact *= k
        assert S.coeff((Fraction(k),)) == Fraction(3, 2) ** k / fact


def test_em1_inverse_pair():
    a = em1_power("y", 2, 6)
    b = em1_power("y", -2, 6)
    prod = a * b
    for k in range(-2, prod_hi(prod) + 1):
        assert prod.coeff((Fraction(k),)) == (1 if k == 0 else 0)


def prod_hi(S):
    return int(S.hi["y"])


def test_log_exp_leading_terms():
    L = log1p_power("y", 1, 6)
    assert L.coeff((Fraction(1),)) == 1
    assert L.coeff((Fraction(2),)) == Fraction(-1, 2)
    assert L.coeff((Fraction(3),)) == Fraction(1, 3)


def test_window_certification():
    S = y_series("y", {0: Fraction(1)}, 0, 3)
    with pytest.raises(WindowError):
        S.coeff((Fraction(4),))
    assert S.coeff((Fraction(-5),)) == 0  # below the floor is certified zero


def test_shift_slice_divide():
    S = y_series("y", {1: Fraction(2), 3: Fraction(-1)}, 0, 4)
    T = S.shift("y", 2)
    assert T.coeff((Fraction(3),)) == 2
    D = S.divide_power("y", 1)
    assert D.coeff((Fraction(0),)) == 2
    assert D.coeff((Fraction(2),)) == -1
    sl = S.slice("y", 3)
    assert sl.coeff(()) == -1


def test_residue_basic():
    S = y_series("y", {-2: Fraction(5), -1: Fraction(7), 0: Fraction(9)}, -2, 2)
    assert residue(S, "y") == 7


def test_residue_change_of_variable():
    # h(x) = x^-1 + 3 x^-2, F(y) = y + y^2
    h = y_series("x", {-1: Fraction(1), -2: Fraction(3)}, -2, 2)
    F = y_series("y", {1: Fraction(1), 2: Fraction(1)}, 1, 8)
    assert residue_change_of_variable_check(h, F)


def test_mul_binomial_vs_brute_force():
    rng = random.Random(5150)
    for _ in range(50):
        p = rng.choice([1, 2, 3])
        data = {}
        for _k in range(rng.randint(1, 5)):
            ea = Fraction(rng.randint(0, 3 * p), p)
            eb = Fraction(rng.randint(0, 2 * p), p)
            data[(ea, eb)] = data.get((ea, eb), 0) + Fraction(
                rng.randint(-4, 4), rng.randint(1, 3)
            )
        data = {k: c for k, c in data.items() if c}
        S = TruncatedSeries(
            ("a", "b"),
            {"a": "x", "b": "x"},
            {"a": Fraction(0), "b": Fraction(0)},
            {"a": Fraction(9), "b": Fraction(4)},
            data,
            p,
        )
        gamma = Fraction(rng.randint(-2 * p, 2 * p), p)
        ha, hb = Fraction(2), Fraction(2)
        out = S.mul_binomial("a", "b", gamma, {"a": ha, "b": hb})
        brute = {}
        for (ea, eb), c in data.items():
            i = 0
            while eb + i <= hb:
                coeff = binom_frac(gamma, i) * (-1) ** i * c
                key = (ea + gamma - i, eb + i)
                if coeff:
                    brute[key] = brute.get(key, 0) + coeff
                i += 1
        for key in {k for k in brute if brute[k]} | set(out.data):
            ea, eb = key
            if ea > ha or eb > hb or ea < out.lo["a"]:
                continue
            assert out.coeff(key) == brute.get(key, 0), (p, gamma, key)


def test_substitute_root_vs_brute_force():
    # x^(m/p) -> w_p^(s m) (base + small)^(m/p) on a two-term series
    p, s = 3, 2
    data = {
        (Fraction(1, 3),): Fraction(2),
        (Fraction(5, 3),): Fraction(-1, 2),
    }
    S = TruncatedSeries(
        ("x",), {"x": "x"}, {"x": Fraction(0)}, {"x": Fraction(6)}, data, p
    )
    out = S.substitute_root("x", s, ("u", "v"), {"u": Fraction(2), "v": Fraction(2)})
    brute = {}
    for (e,), c in data.items():
        m = int(e * p)
        root = cyclo(p, (s * m) % p)
        for i in range(0, 3):
            coeff = binom_frac(e, i) * root * c
            key = (e - i, Fraction(i))
            if coeff:
                brute[key] = brute.get(key, 0) + coeff
    for key, val in brute.items():
        eu, ev = key
        if eu > 2 or ev > 2 or eu < out.lo["u"]:
            continue
        assert out.coeff(key) == val, key


def test_mul_window_guard():
    S = y_series("y", {0: Fraction(1)}, 0, 2)
    T = y_series("y", {1: Fraction(1)}, 1, 2)
    prod = S * T
    assert prod.coeff((Fraction(1),)) == 1
    with pytest.raises(WindowError):
        prod.coeff((Fraction(3),))
