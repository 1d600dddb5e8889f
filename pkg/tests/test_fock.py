from fractions import Fraction

import pytest

from zetafock.bernoulli import bernoulli_number, bernoulli_poly
from zetafock.cyclotomic import Cyclotomic
from zetafock.fock import (
    FockVector,
    TwistSetup,
    apply_mode,
    apply_operator,
    basis_vectors,
    delta_genfun,
    enumerate_basis,
    graded_dimension_check,
    mode_label,
    quad_operator,
    rep_check,
    vacuum_correction,
)


def test_setup_validation():
    with pytest.raises(ValueError):
        TwistSetup(0, [])
    with pytest.raises(ValueError):
        TwistSetup(2, [1])  # wrong length
    with pytest.raises(ValueError):
        TwistSetup(2, [1, -1])
    with pytest.raises(ValueError):
        TwistSetup(1, [0])  # total dimension must be positive
    with pytest.raises(ValueError):
        TwistSetup(3, [1, 2, 1])  # dims[1] != dims[2]
    s = TwistSetup(3, [0, 2, 2])
    assert s.d == 4
    assert s.dual_index(1) == 2


def test_mode_label_validation():
    s = TwistSetup(2, [0, 1])
    assert mode_label(s, 1, 1, Fraction(-1, 2)) == (1, 1, Fraction(-1, 2))
    with pytest.raises(ValueError):
        mode_label(s, 1, 1, Fraction(-1))  # level not in 1/2 + Z
    with pytest.raises(ValueError):
        mode_label(s, 0, 1, Fraction(-1))  # no copies at k = 0
    with pytest.raises(ValueError):
        mode_label(s, 1, 2, Fraction(-1, 2))  # copy index out of range


def test_fock_vector_rejects_annihilation_monomials():
    with pytest.raises(ValueError):
        FockVector(1, {((0, 1, Fraction(1)),): 1})


def test_heisenberg_commutator():
    # [b(m), b(-m)] = m on every vector
    s = TwistSetup(2, [0, 1])
    lvl = Fraction(3, 2)
    for w in basis_vectors(s, 2):
        up = (1, 1, -lvl)
        dn = (1, 1, lvl)
        lhs = apply_mode(s, dn, apply_mode(s, up, w)) - apply_mode(
            s, up, apply_mode(s, dn, w)
        )
        assert lhs == w * lvl


def test_zero_modes_annihilate():
    s = TwistSetup(1, [1])
    for w in basis_vectors(s, 2):
        assert not apply_mode(s, (0, 1, Fraction(0)), w)


def test_untwisted_basis_counts_are_partitions():
    s = TwistSetup(1, [1])
    basis = enumerate_basis(s, 6)
    partitions = [1, 1, 2, 3, 5, 7, 11]
    for deg, expect in enumerate(partitions):
        assert len(basis[Fraction(deg)]) == expect


def test_twisted_basis_lattice():
    s = TwistSetup(2, [0, 1])
    basis = enumerate_basis(s, 2)
    # only half-integer modes exist: degrees step by 1/2, one slot per level
    assert len(basis[Fraction(1, 2)]) == 1
    assert len(basis[Fraction(1)]) == 1  # (1/2)^2
    assert len(basis[Fraction(3, 2)]) == 2  # (1/2)^3, (3/2)
    assert len(basis[Fraction(2)]) == 2  # (1/2)^4, (3/2)(1/2)


def test_vacuum_correction_closed_form():
    for p, dims in [(1, [1]), (2, [0, 1]), (3, [0, 1, 1]), (4, [1, 2, 0, 2])]:
        s = TwistSetup(p, dims)
        for r in range(4):
            for variant in ("plain", "bar"):
                n2 = 2 * (r + 1)
                acc = Fraction(0)
                for k in range(p):
                    val = bernoulli_poly(n2, Fraction(k, p))
                    if variant == "plain":
                        val -= bernoulli_number(n2)
                    acc += dims[k] * val
                expect = Fraction(-((-1) ** r), 4 * (r + 1)) * acc
                assert vacuum_correction(s, r, variant) == expect


def test_quad_operator_degree_shift():
    s = TwistSetup(2, [0, 1])
    op = quad_operator(s, 1, 2, 2)
    for w in basis_vectors(s, 3):
        (mono,) = w.terms
        deg = -sum((lvl for _, _, lvl in mono), Fraction(0))
        out = apply_operator(op, w)
        assert out.degrees() <= {deg - 2}


def test_quad_operator_variant_validation():
    with pytest.raises(ValueError):
        quad_operator(TwistSetup(1, [1]), 0, 0, 0, "regularized")


def test_rep_check_smoke():
    s = TwistSetup(2, [0, 1])
    assert rep_check(s, 1, 0, 2, -2, 2).status == "pass"


def test_graded_dimension():
    for p, dims in [(1, [1]), (2, [0, 1]), (2, [2, 1])]:
        assert graded_dimension_check(TwistSetup(p, dims), 4).status == "pass"


def test_delta_genfun_requires_order():
    with pytest.raises(ValueError):
        delta_genfun(TwistSetup(1, [1]), 1)
