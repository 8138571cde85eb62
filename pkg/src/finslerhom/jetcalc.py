"""Truncated multivariate Taylor arithmetic (jets) up to third order.

A :class:`Jet` carries the value, gradient, Hessian and third derivative
array of a scalar function of ``nvars`` variables at a fixed point.  Jets
combine under ``+ - * /`` and the elementary functions below, so any smooth
map written in terms of them yields exact derivatives up to ``order``.

Coefficients are stored as *derivatives* (not Taylor coefficients divided by
factorials), which keeps the product and chain rules free of combinatorial
factors.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NumericalError

MAX_ORDER = 3


def _sym3(a, h):
    """Symmetrised a_i h_jk + a_j h_ik + a_k h_ij."""
    p = a[:, None, None] * h[None, :, :]
    return p + p.transpose(1, 0, 2) + p.transpose(1, 2, 0)


class Jet:
    """Derivatives up to ``order`` of a scalar function of ``nvars`` variables."""

    __slots__ = ("order", "nvars", "val", "grad", "hess", "third")
    __array_ufunc__ = None

    def __init__(self, val, grad=None, hess=None, third=None, *, order, nvars):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
        self.order = order
        self.nvars = nvars
        self.val = float(val)
        self.grad = grad if order >= 1 else None
        self.hess = hess if order >= 2 else None
        self.third = third if order >= 3 else None
        if order >= 1 and self.grad is None:
            self.grad = np.zeros(nvars)
        if order >= 2 and self.hess is None:
            self.hess = np.zeros((nvars, nvars))
        if order >= 3 and self.third is None:
            self.third = np.zeros((nvars, nvars, nvars))

    @classmethod
    def constant(cls, c, order, nvars):
        return cls(c, order=order, nvars=nvars)

    @classmethod
    def variable(cls, value, index, order, nvars):
        grad = np.zeros(nvars)
        grad[index] = 1.0
        return cls(value, grad, order=order, nvars=nvars)

    def __repr__(self):
        return f"Jet(val={self.val!r}, order={self.order}, nvars={self.nvars})"

    def _new(self, val, grad, hess, third):
        return Jet(val, grad, hess, third, order=self.order, nvars=self.nvars)

    def _check(self, other: Jet):
        if other.order != self.order or other.nvars != self.nvars:
            raise ValueError("jets of different order or size cannot be combined")

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        o = self.order
        return self._new(
            -self.val,
            -self.grad if o >= 1 else None,
            -self.hess if o >= 2 else None,
            -self.third if o >= 3 else None,
        )

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            o = self.order
            return self._new(
                self.val + other.val,
                self.grad + other.grad if o >= 1 else None,
                self.hess + other.hess if o >= 2 else None,
                self.third + other.third if o >= 3 else None,
            )
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self._new(self.val + other, self.grad, self.hess, self.third)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (Jet, int, float, np.floating, np.integer)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            o = self.order
            f0, g0 = self.val, other.val
            grad = hess = third = None
            if o >= 1:
                f1, g1 = self.grad, other.grad
                grad = f0 * g1 + g0 * f1
            if o >= 2:
                f2, g2 = self.hess, other.hess
                cross = np.outer(f1, g1)
                hess = f0 * g2 + g0 * f2 + cross + cross.T
            if o >= 3:
                third = (
                    f0 * other.third
                    + g0 * self.third
                    + _sym3(f1, g2)
                    + _sym3(g1, f2)
                )
            return self._new(f0 * g0, grad, hess, third)
        if isinstance(other, (int, float, np.floating, np.integer)):
            o = self.order
            return self._new(
                self.val * other,
                self.grad * other if o >= 1 else None,
                self.hess * other if o >= 2 else None,
                self.third * other if o >= 3 else None,
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            result = Jet.constant(1.0, self.order, self.nvars)
            for _ in range(int(p)):
                result = result * self
            return result
        if isinstance(p, (int, float, np.floating, np.integer)):
            p = float(p)
            v = self.val
            if v <= 0.0:
                raise DomainError(f"non-integer power of non-positive value {v}")
            return self.compose(
                v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2),
                p * (p - 1) * (p - 2) * v ** (p - 3),
            )
        return NotImplemented

    # -- composition --------------------------------------------------------

    def compose(self, d0, d1, d2=0.0, d3=0.0):
        """Chain rule: jet of phi(self) given phi and its derivatives at self.val."""
        o = self.order
        grad = hess = third = None
        if o >= 1:
            f1 = self.grad
            grad = d1 * f1
        if o >= 2:
            f2 = self.hess
            hess = d2 * np.outer(f1, f1) + d1 * f2
        if o >= 3:
            third = (
                d3 * np.einsum("i,j,k->ijk", f1, f1, f1)
                + d2 * _sym3(f1, f2)
                + d1 * self.third
            )
        return self._new(d0, grad, hess, third)

    # -- access -------------------------------------------------------------

    def derivative(self, multi_index: Sequence[int]) -> float:
        """Partial derivative for a tuple of variable indices, e.g. (0, 2)."""
        k = len(multi_index)
        if k > self.order:
            raise ValueError(f"derivative of order {k} exceeds jet order {self.order}")
        if k == 0:
            return self.val
        arr = (self.grad, self.hess, self.third)[k - 1]
        return float(arr[tuple(multi_index)])


# -- elementary functions -----------------------------------------------------
# Each accepts a Jet or a plain number so that metric code is written once.


def reciprocal(x):
    if isinstance(x, Jet):
        v = x.val
        if v == 0.0:
            raise DomainError("division by a jet with zero value")
        r = 1.0 / v
        return x.compose(r, -r * r, 2 * r**3, -6 * r**4)
    return 1.0 / x


def sqrt(x):
    if isinstance(x, Jet):
        v = x.val
        if v <= 0.0:
            raise DomainError(f"sqrt is not smooth at {v}")
        s = math.sqrt(v)
        return x.compose(s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v))
    if x < 0:
        raise DomainError(f"sqrt of negative value {x}")
    return math.sqrt(x)


def exp(x):
    if isinstance(x, Jet):
        e = math.exp(x.val)
        return x.compose(e, e, e, e)
    return math.exp(x)


def expm1(x):
    if isinstance(x, Jet):
        e = math.exp(x.val)
        return x.compose(math.expm1(x.val), e, e, e)
    return math.expm1(x)


def log(x):
    if isinstance(x, Jet):
        v = x.val
        if v <= 0.0:
            raise DomainError(f"log is not defined at {v}")
        return x.compose(math.log(v), 1 / v, -1 / v**2, 2 / v**3)
    return math.log(x)


def sin(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.val), math.cos(x.val)
        return x.compose(s, c, -s, -c)
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.val), math.cos(x.val)
        return x.compose(c, -s, -c, s)
    return math.cos(x)


def value(x) -> float:
    return x.val if isinstance(x, Jet) else float(x)


def values(xs) -> np.ndarray:
    return np.array([value(x) for x in xs], dtype=float)


# -- lifting ------------------------------------------------------------------


def variables(point, order: int) -> list[Jet]:
    """Coordinate jets of the identity map at ``point``."""
    point = np.asarray(point, dtype=float)
    n = point.size
    return [Jet.variable(point[i], i, order, n) for i in range(n)]


def _as_jet(r, order, nvars):
    if isinstance(r, Jet):
        return r
    return Jet.constant(float(r), order, nvars)


def jet_lift(f: Callable, point, order: int) -> Jet:
    """Jet of the scalar function ``f`` at ``point`` up to ``order``.

    ``f`` receives a list of coordinate jets and must be written with jet
    arithmetic (operators and the functions of this module).  A non-smooth
    evaluation point surfaces as :class:`DomainError`.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    xs = variables(point, order)
    return _as_jet(f(xs), order, len(xs))


def jacobian(f: Callable, point) -> np.ndarray:
    """Jacobian of a vector-valued jet-compatible map (order-1 lift)."""
    xs = variables(point, 1)
    out = f(xs)
    n = len(xs)
    return np.array([_as_jet(r, 1, n).grad for r in out])


def value_and_jacobian(f: Callable, point):
    xs = variables(point, 1)
    out = f(xs)
    n = len(xs)
    jets = [_as_jet(r, 1, n) for r in out]
    return np.array([j.val for j in jets]), np.array([j.grad for j in jets])


# -- finite-difference oracle -------------------------------------------------

DEFAULT_FD_STEPS = {1: 1e-4, 2: 1e-3, 3: 5e-3}


def _nested_central(f, point, multi_index, h):
    if not multi_index:
        return f(point)
    i, rest = multi_index[0], multi_index[1:]
    e = np.zeros_like(point)
    e[i] = h
    return (
        _nested_central(f, point + e, rest, h) - _nested_central(f, point - e, rest, h)
    ) / (2 * h)


def fd_derivative(f: Callable, point, multi_index: Sequence[int], step: float | None = None) -> float:
    """Central finite-difference partial derivative with one Richardson level.

    Nested central differences are second-order accurate; one Richardson
    extrapolation (h, h/2) lifts the truncation error to fourth order.
    ``f`` takes a float array.  ``step`` defaults to an order-dependent
    value balancing truncation and roundoff.
    """
    multi_index = tuple(int(i) for i in multi_index)
    k = len(multi_index)
    if not 1 <= k <= MAX_ORDER:
        raise ValueError("derivative order must be 1..3")
    point = np.asarray(point, dtype=float)
    h = DEFAULT_FD_STEPS[k] if step is None else float(step)
    if h <= 0:
        raise ValueError("step must be positive")
    scale = max(1.0, float(np.max(np.abs(point))) if point.size else 1.0)
    if h / 2 <= scale * np.finfo(float).eps * 16:
        raise NumericalError(f"finite-difference step {h:g} underflows at scale {scale:g}")
    d1 = _nested_central(f, point, multi_index, h)
    d2 = _nested_central(f, point, multi_index, h / 2)
    return float((4.0 * d2 - d1) / 3.0)
