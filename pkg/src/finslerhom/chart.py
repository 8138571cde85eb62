"""Finsler structure on a coordinate chart.

All tensors are evaluated pointwise in natural coordinates (x, y).  The
pullback bundle is never built: g, C, the formal Christoffel symbols, the
nonlinear connection and the Chern coefficients are plain functions of (x, y)
obtained from a single order-3 jet of L = F^2 / 2 in the concatenated
variable block (x, y).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from . import jetcalc as jc
from .config import DEFAULT, Tolerances
from .errors import DomainError, MetricValidityError


@dataclass(frozen=True, eq=False)
class FinslerChart:
    """A Finsler metric ``F(x, y)`` on a single chart.

    ``F`` must be written with jet arithmetic so it can be lifted in x and y.
    ``domain(x)`` restricts base points; y = 0 is always excluded.
    ``box`` bounds the region used by randomized sweeps.
    """

    dim: int
    F: Callable
    domain: Callable | None = None
    name: str = ""
    reversible: bool = False
    box: tuple | None = None

    def contains(self, x) -> bool:
        if self.domain is None:
            return True
        return bool(self.domain(np.asarray(x, dtype=float)))

    def norm(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self._check(x, y)
        return float(self.F(list(x), list(y)))

    def _check(self, x, y):
        if not np.any(y):
            raise DomainError("F is not smooth at y = 0; tensors are undefined there")
        if not self.contains(x):
            raise DomainError(f"point {x.tolist()} lies outside the chart")

    def lagrangian_jet(self, x, y, order: int) -> jc.Jet:
        """Jet of F^2/2 in the variables (x^1..x^n, y^1..y^n)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self._check(x, y)
        n = self.dim

        def L(z):
            F = self.F(z[:n], z[n:])
            return 0.5 * F * F

        return jc.jet_lift(L, np.concatenate([x, y]), order)

    def sample_point(self, rng) -> np.ndarray:
        lo, hi = self.box if self.box is not None else (-np.ones(self.dim), np.ones(self.dim))
        return rng.uniform(np.asarray(lo, float), np.asarray(hi, float))


def _cholesky(g, x, y):
    try:
        return scipy.linalg.cho_factor(g)
    except np.linalg.LinAlgError:
        raise MetricValidityError(
            f"fundamental tensor not positive definite at x={np.asarray(x).tolist()}, "
            f"y={np.asarray(y).tolist()}"
        ) from None


def _raise(cho, arr):
    """Raise the first index of ``arr`` with g^{-1} (SPD solve, no inverse)."""
    shape = arr.shape
    out = scipy.linalg.cho_solve(cho, arr.reshape(shape[0], -1))
    return out.reshape(shape)


@dataclass(frozen=True)
class ConnectionData:
    x: np.ndarray
    y: np.ndarray
    g: np.ndarray
    C: np.ndarray  # C_ijk, lower indices
    gamma: np.ndarray  # formal Christoffel symbols gamma^i_jk
    N: np.ndarray  # nonlinear connection N^i_j
    Gamma: np.ndarray  # Chern coefficients Gamma^i_jk

    @property
    def omega(self):
        """Connection forms: omega^i_j = Gamma^i_jk dx^k, as coefficient arrays."""
        return self.Gamma


def connection_data(chart: FinslerChart, x, y) -> ConnectionData:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = chart.dim
    jet = chart.lagrangian_jet(x, y, 3)
    yy = slice(n, 2 * n)
    xx = slice(0, n)
    g = jet.hess[yy, yy]
    g = 0.5 * (g + g.T)
    # dg[i, j, k] = d g_ij / d x^k
    dg = jet.third[yy, yy, xx]
    C = 0.5 * jet.third[yy, yy, yy]
    cho = _cholesky(g, x, y)

    # lower Christoffel [s; jk] = 1/2 (d_k g_sj - d_s g_jk + d_j g_ks)
    low = 0.5 * (
        dg.transpose(0, 1, 2)  # d_k g_sj  -> [s, j, k]
        - np.transpose(dg, (2, 0, 1))  # d_s g_jk -> [s, j, k]
        + np.transpose(dg, (1, 2, 0))  # d_j g_ks -> [s, j, k]
    )
    gamma = _raise(cho, low)
    C_up = _raise(cho, C)
    gyy = np.einsum("krs,r,s->k", gamma, y, y)
    N = np.einsum("ijk,k->ij", gamma, y) - np.einsum("ijk,k->ij", C_up, gyy)
    # CN[i, j, k] = C_ijs N^s_k
    CN = np.einsum("ijs,sk->ijk", C, N)
    corr = CN - np.transpose(CN, (2, 0, 1)) + np.transpose(CN, (1, 2, 0))
    # terms: C_ijs N^s_k - C_jks N^s_i + C_kis N^s_j, indexed [i, j, k]
    Gamma = gamma - _raise(cho, corr)
    return ConnectionData(x, y, g, C, gamma, N, Gamma)


def spray(chart: FinslerChart, x, y) -> np.ndarray:
    """Geodesic spray coefficients G^i, with Gamma^i_jk y^j y^k = 2 G^i.

    Needs only an order-2 jet of F^2/2, which keeps geodesic integration cheap.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = chart.dim
    jet = chart.lagrangian_jet(x, y, 2)
    g = jet.hess[n:, n:]
    g = 0.5 * (g + g.T)
    mixed = jet.hess[:n, n:]  # L_{x^k y^l}
    rhs = mixed.T @ y - jet.grad[:n]
    cho = _cholesky(g, x, y)
    return 0.5 * scipy.linalg.cho_solve(cho, rhs)


# -- vector fields ------------------------------------------------------------


def field_value(W: Callable, x) -> np.ndarray:
    return jc.values(W(list(np.asarray(x, dtype=float))))


def field_jacobian(W: Callable, x):
    """Value and Jacobian dW^i/dx^j of a jet-compatible field."""
    return jc.value_and_jacobian(W, np.asarray(x, dtype=float))


def lie_bracket(W1: Callable, W2: Callable, x) -> np.ndarray:
    w1, J1 = field_jacobian(W1, x)
    w2, J2 = field_jacobian(W2, x)
    return J2 @ w1 - J1 @ w2


def covariant_derivative(chart: FinslerChart, V: Callable, W1: Callable, W2: Callable, x) -> np.ndarray:
    """nabla^V_{W1} W2 at x, using the Chern coefficients at (x, V(x))."""
    x = np.asarray(x, dtype=float)
    v = field_value(V, x)
    if not np.any(v):
        raise DomainError("reference field V vanishes at x; nabla^V is undefined there")
    w1 = field_value(W1, x)
    w2, J2 = field_jacobian(W2, x)
    Gamma = connection_data(chart, x, v).Gamma
    return J2 @ w1 + np.einsum("ijk,j,k->i", Gamma, w2, w1)


def torsion_residual(chart: FinslerChart, V: Callable, W1: Callable, W2: Callable, x) -> np.ndarray:
    """nabla^V_{W1} W2 - nabla^V_{W2} W1 - [W1, W2]; zero for a torsion-free connection."""
    return (covariant_derivative(chart, V, W1, W2, x) - covariant_derivative(chart, V, W2, W1, x)
            - lie_bracket(W1, W2, x))


def metric_compatibility_residual(chart: FinslerChart, V: Callable, W: Callable, W1: Callable,
                                  W2: Callable, x, fd_step: float | None = None) -> float:
    """W g_V(W1, W2) - g_V(nabla_W W1, W2) - g_V(W1, nabla_W W2) - 2 C_V(nabla_W V, W1, W2).

    The directional derivative on the left is taken by central finite
    differences along x + s W(x), so it is independent of the jet machinery.
    """
    x = np.asarray(x, dtype=float)
    w = field_value(W, x)

    def h(s):
        z = x + s[0] * w
        v = field_value(V, z)
        jet = chart.lagrangian_jet(z, v, 2)
        g = jet.hess[chart.dim:, chart.dim:]
        return float(field_value(W1, z) @ g @ field_value(W2, z))

    lhs = jc.fd_derivative(h, np.zeros(1), (0,), fd_step)
    cd = connection_data(chart, x, field_value(V, x))
    w1, w2 = field_value(W1, x), field_value(W2, x)
    D1 = covariant_derivative(chart, V, W, W1, x)
    D2 = covariant_derivative(chart, V, W, W2, x)
    DV = covariant_derivative(chart, V, W, V, x)
    rhs = D1 @ cd.g @ w2 + w1 @ cd.g @ D2 + 2.0 * np.einsum("ijk,i,j,k->", cd.C, DV, w1, w2)
    return float(lhs - rhs)


def _curve_jets(curve: Callable, t: float, order: int):
    tj = jc.Jet.variable(float(t), 0, order, 1)
    return [c if isinstance(c, jc.Jet) else jc.Jet.constant(c, order, 1) for c in curve(tj)]


def derivative_along_curve(chart: FinslerChart, curve: Callable, t: float, W: Callable | None = None) -> np.ndarray:
    """D_T W at gamma(t) with reference direction T = gamma'(t).

    ``curve`` and ``W`` take a scalar parameter (float or jet).  With
    ``W=None`` the field is the velocity itself (D_T T).
    """
    pts = _curve_jets(curve, t, 2)
    pos = np.array([p.val for p in pts])
    T = np.array([p.grad[0] for p in pts])
    if not np.any(T):
        raise DomainError(f"curve velocity vanishes at t={t}")
    if W is None:
        w = T
        wdot = np.array([p.hess[0, 0] for p in pts])
    else:
        wj = [w if isinstance(w, jc.Jet) else jc.Jet.constant(w, 1, 1) for w in W(jc.Jet.variable(float(t), 0, 1, 1))]
        w = np.array([a.val for a in wj])
        wdot = np.array([a.grad[0] for a in wj])
    Gamma = connection_data(chart, pos, T).Gamma
    return wdot + np.einsum("ijk,j,k->i", Gamma, w, T)


# -- structural checks --------------------------------------------------------


@dataclass(frozen=True)
class SymmetryReport:
    samples: int
    F_asymmetry: float  # max |F(x,y) - F(x,-y)|
    g: float
    C: float
    gamma: float
    N: float
    Gamma: float
    reversible: bool

    def max_tensor_residual(self) -> float:
        return max(self.g, self.C, self.gamma, self.N, self.Gamma)


def _random_direction(rng, n):
    while True:
        y = rng.normal(size=n)
        nrm = np.linalg.norm(y)
        if nrm > 1e-3:
            return y / nrm


def reversibility_check(chart: FinslerChart, samples: int = 20, seed: int = 0,
                        tol: Tolerances = DEFAULT) -> SymmetryReport:
    rng = np.random.default_rng(seed)
    res = dict(F=0.0, g=0.0, C=0.0, gamma=0.0, N=0.0, Gamma=0.0)
    for _ in range(samples):
        x = chart.sample_point(rng)
        y = _random_direction(rng, chart.dim)
        a = connection_data(chart, x, y)
        b = connection_data(chart, x, -y)
        res["F"] = max(res["F"], abs(chart.norm(x, y) - chart.norm(x, -y)))
        res["g"] = max(res["g"], np.max(np.abs(a.g - b.g)))
        res["C"] = max(res["C"], np.max(np.abs(a.C + b.C)))
        res["gamma"] = max(res["gamma"], np.max(np.abs(a.gamma - b.gamma)))
        res["N"] = max(res["N"], np.max(np.abs(a.N + b.N)))
        res["Gamma"] = max(res["Gamma"], np.max(np.abs(a.Gamma - b.Gamma)))
    return SymmetryReport(
        samples, float(res["F"]), float(res["g"]), float(res["C"]), float(res["gamma"]),
        float(res["N"]), float(res["Gamma"]), reversible=res["F"] <= tol.structural,
    )


@dataclass(frozen=True)
class BerwaldReport:
    samples: int
    directions: int
    spread: float
    worst_point: list
    berwald: bool


def berwald_check(chart: FinslerChart, samples: int = 5, directions: int = 12, seed: int = 0,
                  tol: Tolerances = DEFAULT) -> BerwaldReport:
    """Spread of Gamma(x, y) over directions y, maximised over sampled x."""
    rng = np.random.default_rng(seed)
    worst, where = 0.0, None
    for _ in range(samples):
        x = chart.sample_point(rng)
        G = np.array([
            connection_data(chart, x, _random_direction(rng, chart.dim)).Gamma
            for _ in range(directions)
        ])
        spread = float(np.max(G.max(axis=0) - G.min(axis=0)))
        if where is None or spread > worst:
            worst, where = spread, x
    return BerwaldReport(samples, directions, worst, np.asarray(where).tolist(), worst <= tol.structural)
