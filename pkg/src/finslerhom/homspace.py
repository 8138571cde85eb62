"""Homogeneous spaces: Killing fields, isometry orbits and invariance checks.

Killing fields are the fundamental fields of a left action, so
``[K_i, K_j] = -c^k_{ij} K_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jetcalc as jc
from .algebra import LieAlgebraData, ReductiveDecomposition, reductive_split
from .chart import FinslerChart, field_jacobian, field_value, lie_bracket
from .errors import ChartExitError, DegenerateDirectionError, FinslerError
from .minkowski import MinkowskiNorm, custom, fundamental_tensor


class ChartRequiredError(FinslerError):
    """Operation needs a chart-level (built-in family) space."""


@dataclass(eq=False)
class HomogeneousSpaceSpec:
    """A homogeneous Finsler space G/H with an explicit chart.

    ``frame(x)`` returns the Killing fields K_1..K_n at x (jet-compatible).
    ``action(X, t, x)`` is exp(tX) acting on x; ``pushforward(X, t, x, V)``
    its differential.  Algebra-only spaces leave the chart fields as None and
    carry ``m_norm`` directly.
    """

    name: str
    family: str
    dim: int
    algebra: LieAlgebraData
    decomposition: ReductiveDecomposition
    chart: FinslerChart | None = None
    origin: np.ndarray | None = None
    frame: Callable | None = None
    action: Callable | None = None
    pushforward: Callable | None = None
    norm: MinkowskiNorm | None = None
    reversible: bool = False
    berwald: bool = False
    description: str = ""
    m_norm_override: MinkowskiNorm | None = None
    _B: np.ndarray | None = field(default=None, repr=False)
    _m_norm: MinkowskiNorm | None = field(default=None, repr=False)

    @property
    def chart_level(self) -> bool:
        return self.chart is not None

    def require_chart(self):
        if not self.chart_level:
            raise ChartRequiredError(
                f"space {self.name!r} carries only algebra data; chart-level operations need a built-in family"
            )

    def killing_field(self, X) -> Callable:
        self.require_chart()
        X = np.asarray(X, dtype=float)

        def field_(x):
            K = self.frame(x)
            out = []
            for i in range(self.dim):
                acc = 0.0
                for a in range(self.dim):
                    if X[a] != 0.0:
                        acc = acc + X[a] * K[a][i]
                out.append(acc)
            return out

        return field_

    def basis_at_origin(self) -> np.ndarray:
        """Matrix whose columns are K_i(p): the basis B of T_pM."""
        self.require_chart()
        if self._B is None:
            K = self.frame(list(self.origin))
            self._B = np.array([[jc.value(v) for v in Ki] for Ki in K]).T
        return self._B

    def to_tangent(self, X) -> np.ndarray:
        """X*(p) for an algebra vector X."""
        return self.basis_at_origin() @ np.asarray(X, float)

    def from_tangent(self, v) -> np.ndarray:
        """Coordinates of a tangent vector at p in the basis B."""
        return np.linalg.solve(self.basis_at_origin(), np.asarray(v, float))

    @property
    def m_norm(self) -> MinkowskiNorm:
        """Invariant Minkowski norm on m (m-coordinates), F(p, X*(p))."""
        if self.m_norm_override is not None:
            return self.m_norm_override
        if self._m_norm is None:
            dec = self.decomposition
            chart, p = self.chart, list(self.origin)
            B = self.basis_at_origin()
            M = dec.m_basis

            def f(xm):
                # g-coordinates of the m-vector, then the tangent vector at p
                xg = [sum(xm[a] * M[a, i] for a in range(len(xm)) if M[a, i] != 0.0) for i in range(self.dim)]
                y = [sum(B[i, j] * xg[j] for j in range(self.dim) if B[i, j] != 0.0) for i in range(self.dim)]
                return chart.F(p, y)

            self._m_norm = custom(dec.m_dim, f, name=f"{self.name}@p", reversible=self.reversible)
        return self._m_norm

    def orbit(self, X, t) -> np.ndarray:
        return orbit_curve(self, X, t)

    def summary(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "dim": self.dim,
            "metric": self.norm.describe() if self.norm is not None else None,
            "reversible": self.reversible,
            "berwald": self.berwald,
            "branches": applicable_branches(self),
        }


def applicable_branches(spec: HomogeneousSpaceSpec) -> list[str]:
    out = []
    if spec.dim % 2 == 1:
        out.append("odd-dim")
    if spec.berwald or spec.reversible:
        out.append("berwald/reversible")
    if spec.decomposition.branch == "rad=m":
        out.append("rad(K)=m")
    else:
        out.append("alpha-operator")
    return out


def existence_guaranteed(spec: HomogeneousSpaceSpec) -> bool:
    return spec.dim % 2 == 1 or spec.berwald or spec.reversible


# -- orbits -------------------------------------------------------------------


def _escape_time(spec, X, t_fail, iters=60):
    lo, hi = 0.0, float(t_fail)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        try:
            ok = spec.chart.contains(spec.action(X, mid, spec.origin))
        except ChartExitError:
            ok = False
        if ok:
            lo = mid
        else:
            hi = mid
    return hi


def orbit_curve(spec: HomogeneousSpaceSpec, X, t: float) -> np.ndarray:
    """exp(tX)(p) in chart coordinates."""
    spec.require_chart()
    X = np.asarray(X, dtype=float)
    try:
        x = np.asarray(spec.action(X, float(t), spec.origin), dtype=float)
        inside = spec.chart.contains(x)
    except ChartExitError:
        inside = False
    if not inside:
        te = _escape_time(spec, X, t)
        raise ChartExitError(f"orbit leaves the chart at t ~ {te:.6g}", escape_time=te)
    return x


def group_law_residual(spec: HomogeneousSpaceSpec, X, pairs) -> float:
    """max |orbit(t+s) - exp(tX) orbit(s)| over (t, s) pairs."""
    worst = 0.0
    for t, s in pairs:
        lhs = orbit_curve(spec, X, t + s)
        rhs = spec.action(X, t, orbit_curve(spec, X, s))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# -- invariants ----------------------------------------------------------------


def killing_independence(spec: HomogeneousSpaceSpec) -> float:
    """Smallest singular value of B = [K_1(p) ... K_n(p)]."""
    return float(np.linalg.svd(spec.basis_at_origin(), compute_uv=False)[-1])


def bracket_closure_residual(spec: HomogeneousSpaceSpec, points) -> float:
    """max |[K_i, K_j] + c^k_{ij} K_k| over the given chart points."""
    spec.require_chart()
    n = spec.dim
    E = np.eye(n)
    c = spec.algebra.c
    worst = 0.0
    for x in points:
        K = np.array([field_value(spec.killing_field(E[i]), x) for i in range(n)])
        for i in range(n):
            for j in range(i + 1, n):
                br = lie_bracket(spec.killing_field(E[i]), spec.killing_field(E[j]), x)
                expected = -c[i, j] @ K
                worst = max(worst, float(np.max(np.abs(br - expected))))
    return worst


def generator_residual(spec: HomogeneousSpaceSpec, points) -> float:
    """max |d/dt action(e_i, t, x)|_{t=0} - K_i(x)|, via jets in t."""
    n = spec.dim
    E = np.eye(n)
    worst = 0.0
    for x in points:
        for i in range(n):
            tj = jc.Jet.variable(0.0, 0, 1, 1)
            moved = spec.action(E[i], tj, np.asarray(x, float))
            vel = np.array([m.grad[0] if isinstance(m, jc.Jet) else 0.0 for m in moved])
            K = field_value(spec.killing_field(E[i]), x)
            worst = max(worst, float(np.max(np.abs(vel - K))))
    return worst


@dataclass(frozen=True)
class InvarianceReport:
    samples: int
    F_residual: float
    g_residual: float


def isometry_invariance(spec: HomogeneousSpaceSpec, X, samples: int = 20, t_range=(-2.0, 2.0),
                        seed: int = 0) -> InvarianceReport:
    """Check that exp(tX) preserves F and the fundamental tensor along the orbit."""
    spec.require_chart()
    rng = np.random.default_rng(seed)
    X = np.asarray(X, dtype=float)
    chart, p = spec.chart, spec.origin
    Xp = spec.to_tangent(X)
    g0 = fundamental_tensor_at(chart, p, Xp) if np.any(Xp) else None
    Fres = gres = 0.0
    for _ in range(samples):
        t = float(rng.uniform(*t_range))
        U, V = rng.normal(size=spec.dim), rng.normal(size=spec.dim)
        xt = orbit_curve(spec, X, t)
        pV = np.asarray(spec.pushforward(X, t, p, V), float)
        Fres = max(Fres, abs(chart.norm(xt, pV) - chart.norm(p, V)))
        if g0 is not None:
            Xt = field_value(spec.killing_field(X), xt)
            gt = fundamental_tensor_at(chart, xt, Xt)
            pU = np.asarray(spec.pushforward(X, t, p, U), float)
            gres = max(gres, abs(pU @ gt @ pV - U @ g0 @ V))
    return InvarianceReport(samples, float(Fres), float(gres))


def fundamental_tensor_at(chart: FinslerChart, x, y) -> np.ndarray:
    jet = chart.lagrangian_jet(x, y, 2)
    n = chart.dim
    g = jet.hess[n:, n:]
    return 0.5 * (g + g.T)
