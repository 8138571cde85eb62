"""Constant-speed geodesics and orbit-versus-geodesic comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chart import FinslerChart, covariant_derivative, field_value, spray
from .errors import AccuracyError, ChartExitError, DegenerateDirectionError, DomainError
from .homspace import HomogeneousSpaceSpec, orbit_curve

DEFAULT_STEP = 1e-3


@dataclass
class GeodesicSolution:
    x0: np.ndarray
    y0: np.ndarray
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    step: float
    order: int = 4
    exited: bool = False
    exit_time: float | None = None
    speed_drift: float = 0.0

    @property
    def endpoint(self) -> np.ndarray:
        return self.positions[-1]


def _rhs(chart, x, y):
    return y, -2.0 * spray(chart, x, y)


def _window(window):
    if np.isscalar(window):
        return 0.0, float(window)
    t0, t1 = window
    return float(t0), float(t1)


def integrate_geodesic(chart: FinslerChart, x0, y0, window=1.0, step: float = DEFAULT_STEP,
                       drift_bound: float | None = 1e-7) -> GeodesicSolution:
    """Solve x'' + Gamma(x, x') x' x' = 0 with classical RK4 at a fixed step.

    ``window`` is T or (t0, t1).  If the curve leaves the chart the solution
    is truncated and flagged.  Speed drift above ``drift_bound`` raises
    :class:`AccuracyError` (pass ``None`` to skip the check).
    """
    x = np.asarray(x0, dtype=float).copy()
    y = np.asarray(y0, dtype=float).copy()
    if not np.any(y):
        raise DomainError("initial velocity must be nonzero")
    if not chart.contains(x):
        raise DomainError(f"initial point {x.tolist()} lies outside the chart")
    t0, t1 = _window(window)
    nsteps = max(1, int(math.ceil(round((t1 - t0) / step, 9))))
    h = (t1 - t0) / nsteps
    F0 = chart.norm(x, y)
    times, xs, ys = [t0], [x.copy()], [y.copy()]
    drift = 0.0
    exited, exit_time = False, None
    for k in range(nsteps):
        try:
            k1x, k1y = _rhs(chart, x, y)
            k2x, k2y = _rhs(chart, x + 0.5 * h * k1x, y + 0.5 * h * k1y)
            k3x, k3y = _rhs(chart, x + 0.5 * h * k2x, y + 0.5 * h * k2y)
            k4x, k4y = _rhs(chart, x + h * k3x, y + h * k3y)
        except DomainError:
            exited, exit_time = True, times[-1]
            break
        xn = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        yn = y + (h / 6.0) * (k1y + 2 * k2y + 2 * k3y + k4y)
        if not chart.contains(xn):
            exited, exit_time = True, times[-1]
            break
        x, y = xn, yn
        times.append(t0 + (k + 1) * h)
        xs.append(x.copy())
        ys.append(y.copy())
        drift = max(drift, abs(chart.norm(x, y) - F0))
    sol = GeodesicSolution(
        np.asarray(x0, float), np.asarray(y0, float), np.array(times), np.array(xs), np.array(ys),
        h, exited=exited, exit_time=exit_time, speed_drift=drift,
    )
    if drift_bound is not None and drift > drift_bound:
        raise AccuracyError(
            f"speed drift {drift:.3g} exceeds {drift_bound:.3g}; use a smaller step than {h:g}"
        )
    return sol


@dataclass(frozen=True)
class ComparisonReport:
    sup_distance: float
    velocity_mismatch: float
    reparam_k: float
    window: tuple
    truncated: bool = False

    def as_dict(self):
        return {
            "sup_distance": self.sup_distance,
            "velocity_mismatch": self.velocity_mismatch,
            "reparam_k": self.reparam_k,
            "window": list(self.window),
            "truncated": self.truncated,
        }


def fit_reparametrization(spec: HomogeneousSpaceSpec, X, times) -> float:
    """Least-squares k in D_{X*} X* = k X* along the orbit samples."""
    W = spec.killing_field(X)
    num = den = 0.0
    for t in times:
        x = orbit_curve(spec, X, t)
        Z = field_value(W, x)
        D = covariant_derivative(spec.chart, W, W, W, x)
        num += float(D @ Z)
        den += float(Z @ Z)
    return num / den if den > 0 else 0.0


def compare_orbit_geodesic(spec: HomogeneousSpaceSpec, X, window=1.0, step: float = DEFAULT_STEP,
                           fit_points: int = 5) -> ComparisonReport:
    """Integrate the geodesic from (p, X*(p)) and measure its distance to exp(tX)(p)."""
    spec.require_chart()
    X = np.asarray(X, dtype=float)
    y0 = spec.to_tangent(X)
    if not np.any(X) or not np.any(y0):
        raise DegenerateDirectionError("X*(p) = 0: the orbit through p is constant")
    sol = integrate_geodesic(spec.chart, spec.origin, y0, window, step, drift_bound=None)
    truncated = sol.exited
    W = spec.killing_field(X)
    sup = 0.0
    last = None
    for t, xg in zip(sol.times, sol.positions):
        try:
            xo = orbit_curve(spec, X, t)
        except ChartExitError:
            truncated = True
            break
        sup = max(sup, float(np.max(np.abs(xo - xg))))
        last = (t, xo)
    t_end = last[0]
    idx = int(np.searchsorted(sol.times, t_end))
    vel_orbit = field_value(W, last[1])
    vel_mis = float(np.max(np.abs(vel_orbit - sol.velocities[idx])))
    fit_times = np.linspace(sol.times[0], t_end, fit_points)
    k = fit_reparametrization(spec, X, fit_times)
    return ComparisonReport(sup, vel_mis, float(k), (float(sol.times[0]), float(t_end)), truncated)
