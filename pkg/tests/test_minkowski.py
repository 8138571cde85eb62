import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslerhom import jetcalc as jc
from finslerhom import minkowski as mk
from finslerhom.errors import DomainError, MetricValidityError

from conftest import random_randers


def randers_g_closed_form(A, b, y):
    """g_ij = (F/alpha)(a_ij - l_i l_j) + (l_i + b_i)(l_j + b_j), l = A y / alpha."""
    alpha = np.sqrt(y @ A @ y)
    F = alpha + b @ y
    l = A @ y / alpha
    return F / alpha * (A - np.outer(l, l)) + np.outer(l + b, l + b)


def test_riemannian_tensors_exact(rng):
    for n in (2, 3, 4):
        M = rng.normal(size=(n, n))
        A = M @ M.T + np.eye(n)
        F = mk.riemannian(A)
        y = rng.normal(size=n)
        assert np.max(np.abs(mk.fundamental_tensor(F, y).g - A)) <= 1e-12
        assert np.max(np.abs(mk.cartan_tensor(F, y).C)) <= 1e-12


def test_randers_matches_closed_form(rng):
    for _ in range(20):
        A, b = random_randers(rng, 3)
        y = rng.normal(size=3)
        g = mk.fundamental_tensor(mk.randers(A, b), y).g
        assert np.allclose(g, randers_g_closed_form(A, b, y), atol=1e-12)


def test_randers_validity():
    with pytest.raises(MetricValidityError):
        mk.randers(np.eye(2), [1.0, 0.0])
    with pytest.raises(MetricValidityError):
        mk.riemannian([[1.0, 2.0], [2.0, 1.0]])
    assert mk.randers(np.eye(2), [0.0, 0.0]).kind == "riemannian"


def test_randers_asymmetry():
    F = mk.randers(np.eye(2), [0.3, 0.0])
    y = np.array([1.0, 2.0])
    assert F(y) - F(-y) == pytest.approx(2 * 0.3)
    assert not F.reversible


def test_zero_vector_rejected():
    with pytest.raises(DomainError):
        mk.fundamental_tensor(mk.euclidean(3), np.zeros(3))
    with pytest.raises(DomainError):
        mk.euclidean(2)([0.0, 0.0])


vec3 = st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-2)
norms = [mk.euclidean(3), mk.randers(np.diag([1.0, 2.0, 3.0]), [0.2, -0.3, 0.4]), mk.quartic(3)]


@settings(max_examples=60, deadline=None)
@given(vec3, st.sampled_from(range(len(norms))), st.floats(0.1, 10.0))
def test_homogeneity_and_euler(y, k, lam):
    F = norms[k]
    y = np.array(y)
    g1 = mk.fundamental_tensor(F, y).g
    g2 = mk.fundamental_tensor(F, lam * y).g
    assert np.allclose(g1, g2, rtol=1e-9, atol=1e-9)
    C1 = mk.cartan_tensor(F, y).C
    C2 = mk.cartan_tensor(F, lam * y).C
    assert np.allclose(C1, lam * C2, rtol=1e-8, atol=1e-9)
    e = mk.euler_check(F, y)
    scale = max(1.0, e.F ** 2)
    assert e.euler <= 1e-10 * scale and e.cartan_contraction <= 1e-10 * scale
    assert F(lam * y) == pytest.approx(lam * F(y), rel=1e-12)


def test_cartan_symmetric_and_fd(rng):
    F = mk.quartic(3)
    y = rng.normal(size=3)
    C = mk.cartan_tensor(F, y).C
    assert np.allclose(C, C.transpose(1, 0, 2)) and np.allclose(C, C.transpose(0, 2, 1))
    L = lambda p: 0.5 * F(list(p)) ** 2
    assert C[0, 1, 2] == pytest.approx(0.5 * jc.fd_derivative(L, y, (0, 1, 2)), abs=1e-6)


def test_tensor_objects_callable():
    F = mk.euclidean(2)
    g = mk.fundamental_tensor(F, [1.0, 1.0])
    assert g([1, 0], [1, 0]) == pytest.approx(1.0)
    assert mk.cartan_tensor(F, [1.0, 1.0])([1, 0], [0, 1], [1, 1]) == pytest.approx(0.0)
