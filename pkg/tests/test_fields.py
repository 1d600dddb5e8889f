from fractions import Fraction

import pytest

from zetafock.fields import (
    VoaVector,
    conformal_vector,
    correction_series,
    genfun_check,
    generating_L,
    generator_field_vector,
    homogeneous_commutator_check,
    iterate_identity_check,
    jacobi_check,
    lbar_bracket_check,
    twisted_x_series,
    virasoro_axiom_check,
    voa_apply_mode,
    voa_weight,
    y_product,
)
from zetafock.fock import (
    FockVector,
    TwistSetup,
    apply_operator,
    basis_vectors,
    quad_operator,
)


def test_voa_vector_validation():
    with pytest.raises(ValueError):
        VoaVector(1, {((0, 1, 0),): 1})  # level-zero is not a creation mode
    v = VoaVector.creation(2, 1, 1, 2)
    assert v.max_weight() == 2
    assert voa_weight(((1, 1, 2), (1, 1, 1))) == 3


def test_nu_action_roots():
    # nu multiplies each mode by a root of unity determined by its sector
    v = VoaVector.creation(3, 1, 1, 1)
    tv = v.nu(1)
    (coeff,) = tv.terms.values()
    assert not coeff.is_rational()
    assert v.nu(3) == v  # order-p action


def test_square_bracket_vacuum_pairing():
    # Y[u, y]v for dual weight-one pairs has the level pairing at y^-2
    s = TwistSetup(2, [0, 1])
    u = VoaVector.creation(2, 1, 1, 1)
    prod = y_product(s, u, 1, u)
    # u_(1) u = <u, u*> vacuum with coefficient 1
    assert prod.terms == {(): prod.terms[()]}


def test_conformal_vector_reproduces_virasoro_mode():
    # X-series of the conformal vector at integer exponents acts as L(0)(n)
    for p, dims in [(1, [1]), (2, [0, 1])]:
        s = TwistSetup(p, dims)
        omega = conformal_vector(s)
        for w in basis_vectors(s, 2):
            S = twisted_x_series(s, omega, w, "x", Fraction(2))
            for n in range(-1, 3):
                got = S.data.get((Fraction(-n),))
                expect = apply_operator(quad_operator(s, 0, 0, n), w)
                if got is None:
                    assert not expect
                else:
                    assert got == expect, (p, n)


def test_virasoro_axiom():
    for p, dims in [(1, [1]), (2, [0, 1])]:
        rec = virasoro_axiom_check(TwistSetup(p, dims), window=2)
        assert rec.status == "pass", rec.witness


def test_homogeneous_commutator_small():
    s = TwistSetup(2, [0, 1])
    w = basis_vectors(s, Fraction(3, 2))[1]
    rec = homogeneous_commutator_check(s, (1, 1), (1, 1), w, window=2)
    assert rec.status == "pass", rec.witness


def test_jacobi_small():
    s = TwistSetup(1, [1])
    w = basis_vectors(s, 2)[2]
    rec = jacobi_check(s, (0, 1), (0, 1), w, window=2)
    assert rec.status == "pass", rec.witness


def test_correction_series_structure():
    for p, dims in [(1, [1]), (2, [0, 1]), (2, [2, 1])]:
        s = TwistSetup(p, dims)
        bar = correction_series(s, "bar", 4)
        assert bar.get(-2) == Fraction(sum(dims), 2)
        assert not bar.get(-1)
        # evenness of the bar correction
        assert all(bar.get(j, 0) == 0 for j in (1, 3))
        plain = correction_series(s, "plain", 4)
        assert all(j >= 0 for j, c in plain.items() if c)


def test_generating_function_diagonal():
    s = TwistSetup(2, [0, 1])
    rec = genfun_check(s, r_max=1, n_max=1, max_degree=1)
    assert rec.status == "pass", rec.witness


def test_iterate_identity_rejects_small_k():
    s = TwistSetup(1, [1])
    from zetafock.fields import k_prefactor_series

    with pytest.raises(ValueError):
        k_prefactor_series(s, 1, FockVector.vacuum(1), 1, 1, Fraction(-1), Fraction(1))


def test_lbar_bracket_asymmetric_dims():
    # valid p = 2 setup with unequal sector dimensions
    rec = lbar_bracket_check(TwistSetup(2, [2, 1]), orders=1)
    assert rec.status == "pass", rec.witness


def test_generator_field_vector_shape():
    s = TwistSetup(2, [0, 1])
    v = generator_field_vector(s, 1)
    for mono in v.terms:
        assert len(mono) == 2
        assert all(lvl == 2 for _, _, lvl in mono)
