import numpy as np
import pytest

from finslerhom.algebra import (
    LieAlgebraData, abelian, affine_line_algebra, commutator_complement_vector, commutator_span_m,
    decomposition_with_m, heisenberg_algebra, killing_form, killing_invariance_residual, reductive_split,
    su2_algebra,
)
from finslerhom.errors import DecompositionError


def test_killing_forms_oracles():
    assert np.array_equal(killing_form(heisenberg_algebra()), np.zeros((3, 3)))
    assert np.allclose(killing_form(su2_algebra()), -2 * np.eye(3))
    assert np.allclose(killing_form(affine_line_algebra()), np.diag([0.0, 1.0]))
    assert np.array_equal(killing_form(abelian(4)), np.zeros((4, 4)))


def test_killing_form_invariance():
    for alg in (heisenberg_algebra(), su2_algebra(), affine_line_algebra()):
        assert killing_invariance_residual(alg) <= 1e-12


def test_heisenberg_bracket():
    alg = heisenberg_algebra()
    assert np.allclose(alg.bracket([1, 0, 0], [0, 1, 0]), [0, 0, 1])
    assert np.allclose(alg.bracket([0, 0, 1], [1, 2, 3]), 0)


def test_invalid_structure_constants():
    c = np.zeros((2, 2, 2))
    c[0, 1, 0] = 1.0
    with pytest.raises(ValueError):
        LieAlgebraData(c)  # not antisymmetric
    c = np.zeros((3, 3, 3))
    # [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e3: fails Jacobi
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 2)]:
        c[i, j, k], c[j, i, k] = 1.0, -1.0
    with pytest.raises(ValueError):
        LieAlgebraData(c)


def test_branches():
    assert reductive_split(heisenberg_algebra()).branch == "rad=m"
    assert reductive_split(su2_algebra()).branch == "rad<m"
    dec = reductive_split(affine_line_algebra())
    assert dec.branch == "rad<m" and dec.rad_basis.shape[0] == 1


def test_split_with_isotropy():
    dec = reductive_split(su2_algebra(), h_basis=[[0, 0, 1]])
    assert dec.m_dim == 2 and dec.full_rank()
    assert dec.ad_invariance_residual() <= 1e-12
    h, m = dec.split([1.0, 2.0, 3.0])
    assert np.allclose(dec.from_m(m) + h @ dec.h_basis, [1, 2, 3])


def test_degenerate_h_rejected():
    with pytest.raises(DecompositionError):
        reductive_split(heisenberg_algebra(), h_basis=[[0, 0, 1]])
    dec = decomposition_with_m(heisenberg_algebra(), [[0, 0, 1]], [[1, 0, 0], [0, 1, 0]])
    assert dec.m_dim == 2
    with pytest.raises(DecompositionError):
        decomposition_with_m(heisenberg_algebra(), [[0, 0, 1]], [[1, 0, 0], [2, 0, 0]])


def test_commutator_complement():
    dec = reductive_split(heisenberg_algebra())
    span = commutator_span_m(dec)
    assert span.shape == (1, 3) and np.allclose(np.abs(span[0]), [0, 0, 1])
    X = commutator_complement_vector(dec)
    assert abs(X[2]) <= 1e-15 and np.linalg.norm(X) == pytest.approx(1.0)
    assert commutator_complement_vector(reductive_split(su2_algebra())) is None
    assert commutator_complement_vector(reductive_split(abelian(2))) is not None


def test_ad_matrix():
    alg = su2_algebra()
    X = np.array([0.3, -1.0, 2.0])
    Y = np.array([1.0, 0.5, -0.2])
    assert np.allclose(alg.ad(X) @ Y, alg.bracket(X, Y))
