"""End-to-end acceptance checks at desk scale.

Every comparison here is an exact equality over Q or Q(w_p); there are no
tolerances.  The timed tests assert a wall-clock budget on top of the
algebraic assertions.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from zetafock.bernoulli import bernoulli_number
from zetafock.cyclotomic import Cyclotomic, cyclo
from zetafock.diffop import (
    GeneratorIndex,
    bar_central_term,
    bracket,
    decompose,
    generator,
)
from zetafock.fields import (
    VoaVector,
    genfun_check,
    generators_corollary_check,
    iterate_commutator_check,
    iterate_identity_check,
    iterate_operator,
    jacobi_check,
    lbar_bracket_check,
)
from zetafock.fock import (
    FockVector,
    TwistSetup,
    apply_operator,
    basis_vectors,
    delta_genfun,
    graded_dimension_check,
    quad_operator,
    rep_check,
)

SETUPS = [(1, [1]), (2, [0, 1]), (3, [0, 1, 1])]


def weight1_labels(setup):
    return [(k, a) for k in range(setup.p) for a in range(1, setup.dims[k] + 1)]


# -- 1: pure-monomial central term ------------------------------------------


def test_central_term_grid():
    t0 = time.monotonic()
    for r in range(4):
        for s in range(4):
            w = r + s
            expect_unit = Fraction(
                math.factorial(r + s + 1) ** 2, 2 * math.factorial(2 * w + 3)
            )
            for m in range(1, 5):
                assert bar_central_term(r, s, m) == expect_unit * m ** (2 * w + 3)
    for m in range(1, 5):
        assert bar_central_term(0, 0, m) == Fraction(m**3, 12)
        assert bar_central_term(0, 1, m) == Fraction(m**5, 60)
        assert bar_central_term(1, 0, m) == Fraction(m**5, 60)
    assert time.monotonic() - t0 < 5.0


# -- 2: closure and coefficient range ---------------------------------------


def test_bracket_closure_and_range():
    t0 = time.monotonic()
    for r in range(4):
        for s in range(4):
            for m in range(-4, 5):
                for n in range(-4, 5):
                    e = bracket(
                        generator(GeneratorIndex(m, r)),
                        generator(GeneratorIndex(n, s)),
                    )
                    dec = decompose(e, m + n)
                    assert not dec.residual.terms, (r, s, m, n)
                    for i in dec.coefficients:
                        assert min(r, s) <= i <= r + s, (r, s, m, n, i)
    assert time.monotonic() - t0 < 5.0


# -- 3: representation check grid -------------------------------------------


def test_rep_check_grid():
    t0 = time.monotonic()
    for p, dims in SETUPS:
        setup = TwistSetup(p, dims)
        for r in range(3):
            for s in range(3):
                for m in range(-3, 4):
                    for n in range(-3, 4):
                        rec = rep_check(setup, r, s, m, n, 4)
                        assert rec.status == "pass", (p, r, s, m, n, rec.witness)
    assert time.monotonic() - t0 < 120.0


# -- 4: Bernoulli corrections and zeta shift --------------------------------


def vacuum_eigenvalue(setup, r, variant):
    vac = FockVector.vacuum(setup.p)
    out = apply_operator(quad_operator(setup, r, r, 0, variant), vac)
    c = out.terms.get((), Cyclotomic.from_rational(setup.p, 0))
    assert set(out.terms) <= {()}
    return c.rational_value()


def test_vacuum_eigenvalues_p2():
    setup = TwistSetup(2, [0, 1])
    assert vacuum_eigenvalue(setup, 0, "plain") == Fraction(1, 16)
    assert vacuum_eigenvalue(setup, 1, "plain") == Fraction(1, 128)
    assert vacuum_eigenvalue(setup, 1, "bar") == Fraction(7, 1920)


def test_zeta_shift_p1():
    setup = TwistSetup(1, [1])
    for r in range(5):
        # zeta(-1-2r) = -B_{2r+2}/(2r+2), computed here from first principles
        zeta_val = -bernoulli_number(2 * r + 2) / (2 * r + 2)
        diff = vacuum_eigenvalue(setup, r, "bar") - vacuum_eigenvalue(
            setup, r, "plain"
        )
        assert diff == Fraction((-1) ** r, 2) * zeta_val


# -- 5: untwisted regression against a direct normal-ordered double sum -----


def oracle_apply(r, n, state):
    """(1/2) sum_j j^r (n-j)^r :a(j)a(n-j):  on one state, d = 1, C = 1.

    Implemented from scratch on multisets of creation levels (positive
    integers); independent of the package's operator machinery.
    """
    out = {}
    D = sum(state)
    for j in range(n - D, D + 1):
        j2 = n - j
        if j == 0 or j2 == 0:
            continue
        coeff = Fraction((j**r) * (j2**r), 2)
        # normal ordering puts annihilation first in application order
        seq = (j, j2) if (j > 0 and j2 < 0) else (j2, j)
        cur = list(state)
        ok = True
        for mode in seq:
            if mode > 0:
                mult = cur.count(mode)
                if not mult:
                    ok = False
                    break
                coeff *= mode * mult
                cur.remove(mode)
            else:
                cur.append(-mode)
        if ok and coeff:
            key = tuple(sorted(cur))
            out[key] = out.get(key, Fraction(0)) + coeff
    return {k: c for k, c in out.items() if c}


def to_oracle_terms(vec):
    out = {}
    for mono, c in vec.terms.items():
        state = tuple(sorted(int(-lvl) for _, _, lvl in mono))
        out[state] = out.get(state, Fraction(0)) + c.rational_value()
    return {k: c for k, c in out.items() if c}


def test_untwisted_regression():
    setup = TwistSetup(1, [1])
    for w in basis_vectors(setup, 5):
        (mono,) = w.terms
        state = tuple(sorted(int(-lvl) for _, _, lvl in mono))
        for r in range(4):
            for n in range(-3, 4):
                op = quad_operator(setup, r, r, n)
                assert op.scalar == 0  # untwisted plain correction vanishes
                got = to_oracle_terms(apply_operator(op, w))
                assert got == oracle_apply(r, n, state), (state, r, n)


# -- 6: twisted Jacobi identity and iterate limit ---------------------------


def test_jacobi_and_iterate_limits():
    t0 = time.monotonic()
    for p, dims in SETUPS:
        setup = TwistSetup(p, dims)
        labels = weight1_labels(setup)
        basis = basis_vectors(setup, 3)
        for u in labels:
            for v in labels:
                for w in basis:
                    rec = jacobi_check(setup, u, v, w, window=2)
                    assert rec.status == "pass", (p, u, v, rec.witness)
        # k-independence of the (x1-x2)^k limit, per twist sector
        ku, au = labels[0]
        u_vec = VoaVector.creation(p, ku, au, 1)
        w = basis[1] if len(basis) > 1 else basis[0]
        for s in range(p):
            A = iterate_operator(setup, u_vec, u_vec, s, 2).apply(
                w, x0_hi=1, x2_hi=1
            )
            B = iterate_operator(setup, u_vec, u_vec, s, 3).apply(
                w, x0_hi=1, x2_hi=1
            )
            assert A.difference_witness(B) is None, (p, s)
    assert time.monotonic() - t0 < 300.0


# -- 7: generating-function layer -------------------------------------------


def test_genfun_layer():
    for p, dims in [(1, [1]), (2, [0, 1])]:
        setup = TwistSetup(p, dims)
        rec = genfun_check(setup, r_max=2, n_max=2)
        assert rec.status == "pass", (p, rec.witness)
        rec = iterate_identity_check(setup, k=2, orders=(2, 2))
        assert rec.status == "pass", (p, rec.witness)
        rec = lbar_bracket_check(setup, orders=2)
        assert rec.status == "pass", (p, rec.witness)


# -- 8: iterate commutator ---------------------------------------------------


def test_iterate_commutator():
    for p, dims in [(1, [1]), (2, [0, 1])]:
        setup = TwistSetup(p, dims)
        ku, au = weight1_labels(setup)[0]
        u = VoaVector.creation(p, ku, au, 1)
        rec = iterate_commutator_check(
            setup, u, u, u, u, y_order=1, window=1, max_degree=2
        )
        assert rec.status == "pass", (p, rec.witness)


# -- 9: highest-weight generating function ----------------------------------


def test_delta_genfun():
    rec = delta_genfun(TwistSetup(1, [1]), 8)
    assert rec.status == "pass"
    assert all(Fraction(val) == 0 for val in rec.lhs.values())

    rec = delta_genfun(TwistSetup(2, [0, 1]), 8)
    assert rec.status == "pass"
    assert Fraction(rec.lhs["k=1"]) == Fraction(-1, 128)

    rec = delta_genfun(TwistSetup(3, [1, 1, 1]), 8)
    assert rec.status == "pass"


# -- 10: squared-current generators ------------------------------------------


def test_generators_corollary():
    for p, dims in [(1, [1]), (2, [0, 1])]:
        setup = TwistSetup(p, dims)
        rec = generators_corollary_check(setup, m=1, max_degree=3)
        assert rec.status == "pass", (p, rec.witness)


# -- 11: property suites ------------------------------------------------------


def random_element(rng):
    e = generator(GeneratorIndex(rng.randint(-4, 4), rng.randint(0, 3)))
    return e.scale(Fraction(rng.randint(-3, 3), rng.randint(1, 4)))


def test_diffop_jacobi_random():
    rng = random.Random(20260826)
    for _ in range(100):
        a, b, c = (random_element(rng) for _ in range(3))
        total = (
            bracket(bracket(a, b), c)
            + bracket(bracket(b, c), a)
            + bracket(bracket(c, a), b)
        )
        assert not total.terms
        assert total.central == 0


def test_graded_dimensions():
    for p, dims in SETUPS:
        rec = graded_dimension_check(TwistSetup(p, dims), 5)
        assert rec.status == "pass", (p, rec.witness)


def test_cyclotomic_field_axioms():
    rng = random.Random(7)
    for p in range(1, 13):
        xs = [
            Cyclotomic(p, [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(p)])
            for _ in range(3)
        ]
        x, y, z = xs
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert cyclo(p, 1) ** p == Cyclotomic.from_rational(p, 1)
        if x:
            assert x * x.inverse() == Cyclotomic.from_rational(p, 1)


def test_substitution_kernel_random():
    from zetafock.series import TruncatedSeries, binom_frac

    rng = random.Random(123)
    for _ in range(50):
        p = rng.choice([1, 2, 3])
        ha, hb = Fraction(2), Fraction(2)
        src_hi_a = Fraction(8)
        data = {}
        for _k in range(rng.randint(1, 6)):
            ea = Fraction(rng.randint(0, 4 * p), p)
            eb = Fraction(rng.randint(0, 2 * p), p)
            data[(ea, eb)] = data.get((ea, eb), 0) + Fraction(
                rng.randint(-5, 5), rng.randint(1, 3)
            )
        data = {k: c for k, c in data.items() if c}
        S = TruncatedSeries(
            ("a", "b"),
            {"a": "x", "b": "x"},
            {"a": Fraction(0), "b": Fraction(0)},
            {"a": src_hi_a, "b": Fraction(4)},
            data,
            p,
        )
        gamma = Fraction(rng.randint(-2 * p, 2 * p), p)
        out = S.mul_binomial("a", "b", gamma, {"a": ha, "b": hb})
        # brute force: multiply each term by the binomial expansion directly
        brute = {}
        for (ea, eb), c in data.items():
            i = 0
            while eb + i <= hb:
                coeff = binom_frac(gamma, i) * (-1) ** i * c
                key = (ea + gamma - i, eb + i)
                if coeff:
                    brute[key] = brute.get(key, 0) + coeff
                i += 1
        brute = {k: c for k, c in brute.items() if c}
        for key in set(brute) | set(out.data):
            ea, eb = key
            if ea > ha or eb > hb or ea < out.lo["a"]:
                continue
            assert out.coeff(key) == brute.get(key, 0), (p, gamma, key)
