import numpy as np
import pytest
import scipy.linalg

from finslerhom import zoo
from finslerhom.errors import AccuracyError, DegenerateDirectionError, DomainError
from finslerhom.geodesy import compare_orbit_geodesic, integrate_geodesic
from finslerhom.homspace import orbit_curve


def test_flat_straight_line(spaces):
    ch = zoo.flat(zoo.mk.euclidean(2)).chart
    sol = integrate_geodesic(ch, [0.0, 0.0], [1.0, 2.0], 1.0)
    assert np.allclose(sol.endpoint, [1.0, 2.0], atol=1e-13)
    assert sol.order == 4 and sol.step == pytest.approx(1e-3)


def test_hyperbolic_vertical_ray(spaces):
    sol = integrate_geodesic(spaces["hyperbolic"].chart, [0.0, 1.0], [0.0, 1.0], 1.0, 1e-3)
    assert np.max(np.abs(sol.endpoint - [0.0, np.e])) <= 1e-6


def test_hyperbolic_semicircle():
    # unit-speed geodesic through (0,1) with horizontal velocity: (tanh t, sech t)
    ch = zoo.builtin("hyperbolic").chart
    sol = integrate_geodesic(ch, [0.0, 1.0], [1.0, 0.0], 1.0)
    assert np.max(np.abs(sol.endpoint - [np.tanh(1.0), 1 / np.cosh(1.0)])) <= 1e-10


def test_fourth_order_convergence():
    ch = zoo.builtin("hyperbolic").chart
    err = [abs(integrate_geodesic(ch, [0, 1], [0, 1], 1.0, h, drift_bound=None).endpoint[1] - np.e)
           for h in (0.1, 0.05)]
    assert 12 <= err[0] / err[1] <= 20


def test_speed_drift_sweep(spaces, rng):
    for name, sp in spaces.items():
        x0 = sp.chart.sample_point(rng)
        y0 = rng.normal(size=sp.dim)
        sol = integrate_geodesic(sp.chart, x0, y0 / np.linalg.norm(y0), 1.0)
        assert sol.speed_drift <= 1e-7, name


def test_accuracy_error_on_coarse_step(spaces):
    with pytest.raises(AccuracyError):
        integrate_geodesic(spaces["hyperbolic"].chart, [0.0, 1.0], [3.0, 0.5], 1.0, step=0.5)


def test_chart_exit_truncates(spaces):
    # x2 -> 0 along the downward ray (exits the half-plane is never reached in finite time),
    # so use the SU(2) chart whose coordinates blow up near the antipode
    sol = integrate_geodesic(spaces["su2"].chart, [0, 0, 0], [0, 0, 2.0], 4.0, 1e-2, drift_bound=None)
    assert sol.exited and sol.exit_time is not None and sol.times[-1] < 4.0


def test_zero_velocity_rejected(spaces):
    with pytest.raises(DomainError):
        integrate_geodesic(spaces["flat"].chart, [0, 0, 0], [0, 0, 0])
    with pytest.raises(DomainError):
        integrate_geodesic(spaces["hyperbolic"].chart, [0, -1.0], [1.0, 0])


def test_heisenberg_orbit_matrix_exponential(spaces):
    sp = spaces["heisenberg"]
    X = np.array([1.0, 1.0, 0.0])
    for t in (0.5, 1.3):
        M = scipy.linalg.expm(t * np.array([[0, X[0], X[2]], [0, 0, X[1]], [0, 0, 0]]))
        assert np.allclose(orbit_curve(sp, X, t), [M[0, 1], M[1, 2], M[0, 2]], atol=1e-14)


def test_comparison_examples(spaces, rng):
    rep = compare_orbit_geodesic(spaces["flat"], [0.3, -1.0, 2.0])
    assert rep.sup_distance <= 1e-12 and rep.reparam_k == 0.0
    for _ in range(3):
        X = rng.normal(size=3)
        rep = compare_orbit_geodesic(spaces["su2"], X / np.linalg.norm(X))
        assert rep.sup_distance <= 1e-6 and abs(rep.reparam_k) <= 1e-6
    bad = compare_orbit_geodesic(spaces["heisenberg"], [1.0, 0.0, 1.0])
    assert bad.sup_distance > 1e-3


def test_comparison_scaling_equivariance(spaces):
    sp = spaces["heisenberg"]
    X = np.array([0.6, 0.8, 0.0])
    for lam in (0.5, 2.0):
        rep = compare_orbit_geodesic(sp, lam * X, window=1.0 / lam)
        assert rep.sup_distance <= 1e-6


def test_comparison_degenerate(spaces):
    with pytest.raises(DegenerateDirectionError):
        compare_orbit_geodesic(spaces["flat"], [0.0, 0.0, 0.0])
