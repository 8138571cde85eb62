"""Minkowski norms and their fundamental and Cartan tensors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from . import jetcalc as jc
from .errors import DomainError, MetricValidityError


def _quadratic(A, u):
    n = len(u)
    total = 0.0
    for i in range(n):
        if A[i, i] != 0.0:
            total = total + A[i, i] * u[i] * u[i]
        for j in range(i + 1, n):
            if A[i, j] != 0.0:
                total = total + 2.0 * A[i, j] * u[i] * u[j]
    return total


def _linear(b, u):
    total = 0.0
    for i, bi in enumerate(b):
        if bi != 0.0:
            total = total + bi * u[i]
    return total


def _nonzero(y) -> bool:
    return bool(np.any(jc.values(y) != 0.0))


@dataclass(frozen=True, eq=False)
class MinkowskiNorm:
    """A positively homogeneous, strongly convex norm on R^dim.

    ``kind`` is ``"riemannian"``, ``"randers"`` or ``"custom"``.  Evaluation
    accepts floats or jets, so derivatives come from :mod:`jetcalc`.
    """

    dim: int
    kind: str
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    func: Callable | None = None
    domain: Callable | None = None
    name: str = ""
    reversible: bool = False

    def __call__(self, y):
        if len(y) != self.dim:
            raise ValueError(f"expected a {self.dim}-vector, got length {len(y)}")
        if not self.in_domain(y):
            raise DomainError(f"Minkowski norm is not smooth at y={jc.values(y).tolist()}")
        if self.kind == "riemannian":
            return jc.sqrt(_quadratic(self.A, y))
        if self.kind == "randers":
            return jc.sqrt(_quadratic(self.A, y)) + _linear(self.b, y)
        return self.func(y)

    def in_domain(self, y) -> bool:
        if self.domain is not None:
            return bool(self.domain(jc.values(y)))
        return _nonzero(y)

    def describe(self) -> dict:
        d = {"type": self.kind, "dim": self.dim}
        if self.A is not None:
            d["A"] = self.A.tolist()
        if self.b is not None:
            d["b"] = self.b.tolist()
        if self.name:
            d["name"] = self.name
        return d


def riemannian(A) -> MinkowskiNorm:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    if not np.allclose(A, A.T, atol=1e-14):
        raise ValueError("A must be symmetric")
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise MetricValidityError("A must be positive definite") from None
    return MinkowskiNorm(A.shape[0], "riemannian", A=A, reversible=True)


def euclidean(n: int) -> MinkowskiNorm:
    return riemannian(np.eye(n))


def randers(A, b) -> MinkowskiNorm:
    base = riemannian(A)
    b = np.array(b, dtype=float).reshape(-1)
    if b.size != base.dim:
        raise ValueError("b must match the dimension of A")
    # strong convexity needs |b| < 1 in the dual norm of A
    dual = float(b @ scipy.linalg.solve(base.A, b, assume_a="pos"))
    if not dual < 1.0:
        raise MetricValidityError(f"Randers drift too strong: b^T A^-1 b = {dual:.6g} >= 1")
    if not np.any(b):
        return base
    return MinkowskiNorm(base.dim, "randers", A=base.A, b=b, reversible=False)


def custom(dim: int, func: Callable, *, domain=None, name="custom", reversible=False) -> MinkowskiNorm:
    return MinkowskiNorm(dim, "custom", func=func, domain=domain, name=name, reversible=reversible)


def quartic(dim: int, c: float = 1.0) -> MinkowskiNorm:
    """Reversible non-quadratic norm (sum y_i^4 + c |y|^4)^(1/4)."""

    def f(y):
        s2 = sum(yi * yi for yi in y)
        s4 = sum(yi * yi * yi * yi for yi in y)
        return jc.sqrt(jc.sqrt(s4 + c * s2 * s2))

    return custom(dim, f, name="quartic", reversible=True)


CUSTOM_BUILTINS = {"quartic": quartic}


# -- tensors ------------------------------------------------------------------


@dataclass(frozen=True)
class FundamentalTensor:
    y: np.ndarray
    g: np.ndarray

    def __call__(self, u, v) -> float:
        return float(np.asarray(u) @ self.g @ np.asarray(v))


@dataclass(frozen=True)
class CartanTensor:
    y: np.ndarray
    C: np.ndarray

    def __call__(self, u, v, w) -> float:
        return float(np.einsum("ijk,i,j,k->", self.C, u, v, w))


def half_square_jet(norm: MinkowskiNorm, y, order: int) -> jc.Jet:
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise DomainError("the fundamental tensor is undefined at y = 0 (F is not smooth there)")

    def L(ys):
        F = norm(ys)
        return 0.5 * F * F

    return jc.jet_lift(L, y, order)


def check_positive_definite(g, where) -> None:
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise MetricValidityError(f"fundamental tensor not positive definite at {where}") from None


def fundamental_tensor(norm: MinkowskiNorm, y) -> FundamentalTensor:
    y = np.asarray(y, dtype=float)
    g = half_square_jet(norm, y, 2).hess
    g = 0.5 * (g + g.T)
    check_positive_definite(g, f"y={y.tolist()}")
    return FundamentalTensor(y.copy(), g)


def cartan_tensor(norm: MinkowskiNorm, y) -> CartanTensor:
    y = np.asarray(y, dtype=float)
    # (1/4 F^2)''' = 1/2 (1/2 F^2)'''
    C = 0.5 * half_square_jet(norm, y, 3).third
    return CartanTensor(y.copy(), C)


@dataclass(frozen=True)
class EulerResidual:
    F: float
    gyy: float
    euler: float  # |g_y(y,y) - F^2|
    cartan_contraction: float  # max |y^i C_ijk|


def euler_check(norm: MinkowskiNorm, y) -> EulerResidual:
    y = np.asarray(y, dtype=float)
    jet = half_square_jet(norm, y, 3)
    F = float(norm(y))
    g = jet.hess
    gyy = float(y @ g @ y)
    yC = np.einsum("i,ijk->jk", y, 0.5 * jet.third)
    return EulerResidual(F, gyy, abs(gyy - F * F), float(np.max(np.abs(yC))))


# -- finite-difference oracles --------------------------------------------------


def _fd_step(y, order):
    # F^2/2 is 2-homogeneous: its natural length scale is |y|
    return jc.DEFAULT_FD_STEPS[order] * float(np.linalg.norm(y))


def fd_fundamental_tensor(norm: MinkowskiNorm, y) -> np.ndarray:
    """g from central differences of F^2/2 (independent of the jet path)."""
    y = np.asarray(y, dtype=float)
    L = lambda p: 0.5 * float(norm(list(p))) ** 2
    n = y.size
    h = _fd_step(y, 2)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = jc.fd_derivative(L, y, (i, j), h)
    return g


def fd_cartan_tensor(norm: MinkowskiNorm, y) -> np.ndarray:
    """C = (F^2/4)''' from central differences, filled by symmetry."""
    y = np.asarray(y, dtype=float)
    L = lambda p: 0.5 * float(norm(list(p))) ** 2
    n = y.size
    h = _fd_step(y, 3)
    C = np.empty((n, n, n))
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                v = 0.5 * jc.fd_derivative(L, y, (i, j, k), h)
                for p in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                    C[p] = v
    return C
