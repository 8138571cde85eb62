"""Built-in homogeneous spaces and the space-spec file format.

Every family uses a simply transitive group G (trivial isotropy), so
m = g and the Killing fields K_i at the origin form the basis B.

Families
--------
flat        R^n with translations and any Minkowski norm.
heisenberg  H3 in coordinates (a, b, c) ~ [[1, a, c], [0, 1, b], [0, 0, 1]],
            left-invariant metric, G = H3 acting by left translations.
su2         SU(2) = S^3 in the chart q = ((1 - |w|^2), 2w) / (1 + |w|^2),
            w = u / 4, left-invariant metric, G = SU(2) acting on the left.
hyperbolic  upper half-plane x2 > 0 with G = {z -> lam z + mu, lam > 0}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import jetcalc as jc
from . import minkowski as mk
from .algebra import (
    LieAlgebraData, abelian, affine_line_algebra, heisenberg_algebra,
    reductive_split, su2_algebra,
)
from .chart import FinslerChart
from .errors import ChartExitError
from .homspace import HomogeneousSpaceSpec
from .minkowski import MinkowskiNorm


def _declared_flags(norm: MinkowskiNorm, flat: bool):
    riem = norm.kind == "riemannian"
    return bool(norm.reversible), bool(riem or flat)


# -- flat ---------------------------------------------------------------------


def flat(norm: MinkowskiNorm, origin=None, name=None) -> HomogeneousSpaceSpec:
    n = norm.dim
    origin = np.zeros(n) if origin is None else np.asarray(origin, float)

    def F(x, y):
        return norm(y)

    def frame(x):
        return [[1.0 if i == a else 0.0 for i in range(n)] for a in range(n)]

    def action(X, t, x):
        return [x[i] + t * X[i] for i in range(n)]

    def pushforward(X, t, x, V):
        return np.asarray(V, float).copy()

    rev, ber = _declared_flags(norm, flat=True)
    chart = FinslerChart(n, F, name="flat", reversible=rev)
    alg = abelian(n)
    return HomogeneousSpaceSpec(
        name=name or "flat", family="flat", dim=n, algebra=alg,
        decomposition=reductive_split(alg), chart=chart, origin=origin,
        frame=frame, action=action, pushforward=pushforward, norm=norm,
        reversible=rev, berwald=ber,
        description="R^n, translations, locally Minkowski",
    )


# -- Heisenberg ---------------------------------------------------------------


def _h3_mul(g, h):
    return [g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]]


def _h3_exp(X, t):
    return [t * X[0], t * X[1], t * X[2] + 0.5 * t * t * X[0] * X[1]]


def heisenberg(norm: MinkowskiNorm, origin=None, name=None) -> HomogeneousSpaceSpec:
    if norm.dim != 3:
        raise ValueError("the Heisenberg group is 3-dimensional")
    origin = np.zeros(3) if origin is None else np.asarray(origin, float)

    def F(x, y):
        # left trivialisation: coframe (da, db, dc - a db)
        return norm([y[0], y[1], y[2] - x[0] * y[1]])

    def frame(x):
        # right-invariant fields: K1 = d_a + b d_c, K2 = d_b, K3 = d_c
        return [[1.0, 0.0, x[1]], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

    def action(X, t, x):
        return _h3_mul(_h3_exp(X, t), list(x))

    def pushforward(X, t, x, V):
        A = t * X[0]
        return np.array([V[0], V[1], V[2] + A * V[1]], dtype=float)

    rev, ber = _declared_flags(norm, flat=False)
    chart = FinslerChart(3, F, name="heisenberg", reversible=rev)
    alg = heisenberg_algebra()
    return HomogeneousSpaceSpec(
        name=name or "heisenberg", family="heisenberg", dim=3, algebra=alg,
        decomposition=reductive_split(alg), chart=chart, origin=origin,
        frame=frame, action=action, pushforward=pushforward, norm=norm,
        reversible=rev, berwald=ber,
        description="Heisenberg group H3, left-invariant metric, nilpotent (K = 0)",
    )


# -- SU(2) --------------------------------------------------------------------

SU2_RADIUS = 100.0  # chart domain |u| < SU2_RADIUS


def _qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return [
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + b0 * a1 + a2 * b3 - a3 * b2,
        a0 * b2 + b0 * a2 + a3 * b1 - a1 * b3,
        a0 * b3 + b0 * a3 + a1 * b2 - a2 * b1,
    ]


def _q_of_u(u):
    w = [ui * 0.25 for ui in u]
    s = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    d = 1.0 / (1.0 + s)
    return [(1.0 - s) * d, 2.0 * w[0] * d, 2.0 * w[1] * d, 2.0 * w[2] * d]


def _dq(u, y):
    """Differential of u -> q(u) applied to y."""
    w = [ui * 0.25 for ui in u]
    dw = [yi * 0.25 for yi in y]
    s = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    ds = 2.0 * (w[0] * dw[0] + w[1] * dw[1] + w[2] * dw[2])
    d = 1.0 / (1.0 + s)
    d2 = d * d
    return [-2.0 * ds * d2] + [2.0 * dw[i] * d - 2.0 * w[i] * ds * d2 for i in range(3)]


def _u_of_q(q):
    if jc.value(q[0]) <= -1.0 + 1e-12:
        raise ChartExitError("point -1 of SU(2) is outside the stereographic chart")
    d = 4.0 / (1.0 + q[0])
    return [q[1] * d, q[2] * d, q[3] * d]


def _du(q, dq):
    """Differential of q -> u at q applied to dq."""
    d = 1.0 / (1.0 + q[0])
    return [4.0 * (dq[i + 1] * d - q[i + 1] * dq[0] * d * d) for i in range(3)]


_SU2_UNITS = ([0.0, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.0], [0.0, 0.0, 0.0, 0.5])


def _su2_exp(X, t):
    r = float(np.linalg.norm(X))
    if r == 0.0:
        return [1.0, 0.0, 0.0, 0.0]
    half = t * (0.5 * r)
    s = jc.sin(half)
    return [jc.cos(half)] + [s * (X[i] / r) for i in range(3)]


def su2(norm: MinkowskiNorm, origin=None, name=None) -> HomogeneousSpaceSpec:
    if norm.dim != 3:
        raise ValueError("SU(2) is 3-dimensional")
    origin = np.zeros(3) if origin is None else np.asarray(origin, float)

    def F(u, y):
        q = _q_of_u(u)
        qc = [q[0], -q[1], -q[2], -q[3]]
        left = _qmul(qc, _dq(u, y))  # q^{-1} dq, pure imaginary
        return norm([2.0 * left[1], 2.0 * left[2], 2.0 * left[3]])

    def frame(u):
        q = _q_of_u(u)
        return [_du(q, _qmul(e, q)) for e in _SU2_UNITS]

    def action(X, t, u):
        return _u_of_q(_qmul(_su2_exp(X, t), _q_of_u(list(u))))

    def pushforward(X, t, u, V):
        g = _su2_exp(X, t)
        q = _q_of_u(list(u))
        qn = _qmul(g, q)
        return np.array(_du(qn, _qmul(g, _dq(list(u), list(V)))), dtype=float)

    def domain(u):
        return float(u @ u) < SU2_RADIUS**2

    rev, ber = _declared_flags(norm, flat=False)
    chart = FinslerChart(3, F, domain=domain, name="su2", reversible=rev)
    alg = su2_algebra()
    bi = norm.kind == "riemannian" and np.allclose(norm.A, norm.A[0, 0] * np.eye(3))
    return HomogeneousSpaceSpec(
        name=name or "su2", family="su2", dim=3, algebra=alg,
        decomposition=reductive_split(alg), chart=chart, origin=origin,
        frame=frame, action=action, pushforward=pushforward, norm=norm,
        reversible=rev, berwald=ber,
        description="SU(2) = S^3, left-invariant metric" + (" (bi-invariant)" if bi else ""),
    )


# -- hyperbolic half-plane ----------------------------------------------------


def _phi(a, t):
    """(e^{ta} - 1) / a, continuous at a = 0."""
    if a == 0.0:
        return t
    return jc.expm1(t * a) / a


def hyperbolic(norm: MinkowskiNorm, origin=None, name=None) -> HomogeneousSpaceSpec:
    if norm.dim != 2:
        raise ValueError("the half-plane is 2-dimensional")
    origin = np.array([0.0, 1.0]) if origin is None else np.asarray(origin, float)

    def F(x, y):
        inv = 1.0 / x[1]
        return norm([y[0] * inv, y[1] * inv])

    def frame(x):
        # K1 translation, K2 dilation about the boundary point 0
        return [[1.0, 0.0], [x[0], x[1]]]

    def action(X, t, x):
        b, a = X[0], X[1]
        lam = jc.exp(t * a)
        return [lam * x[0] + b * _phi(a, t), lam * x[1]]

    def pushforward(X, t, x, V):
        return np.exp(t * X[1]) * np.asarray(V, float)

    def domain(x):
        return x[1] > 0.0

    rev, ber = _declared_flags(norm, flat=False)
    chart = FinslerChart(2, F, domain=domain, name="hyperbolic", reversible=rev,
                         box=(np.array([-1.0, 0.5]), np.array([1.0, 2.0])))
    alg = affine_line_algebra()
    return HomogeneousSpaceSpec(
        name=name or "hyperbolic", family="hyperbolic", dim=2, algebra=alg,
        decomposition=reductive_split(alg), chart=chart, origin=origin,
        frame=frame, action=action, pushforward=pushforward, norm=norm,
        reversible=rev, berwald=ber,
        description="upper half-plane, G = ax+b group (simply transitive)",
    )


# -- algebra-only spaces ------------------------------------------------------


def algebraic(algebra: LieAlgebraData, norm: MinkowskiNorm, h_basis=None, name="custom") -> HomogeneousSpaceSpec:
    """Space known only through structure constants and a norm on m."""
    dec = reductive_split(algebra, h_basis)
    if norm.dim != dec.m_dim:
        raise ValueError(f"metric dimension {norm.dim} does not match dim m = {dec.m_dim}")
    return HomogeneousSpaceSpec(
        name=name, family="custom", dim=dec.m_dim, algebra=algebra, decomposition=dec,
        norm=norm, m_norm_override=norm, reversible=norm.reversible,
        berwald=norm.kind == "riemannian", description="algebra-level only",
    )


# -- registry -----------------------------------------------------------------

FAMILIES: dict[str, Callable] = {
    "flat": flat,
    "heisenberg": heisenberg,
    "su2": su2,
    "hyperbolic": hyperbolic,
}

FAMILY_DIMS = {"heisenberg": 3, "su2": 3, "hyperbolic": 2}


@dataclass(frozen=True)
class Preset:
    name: str
    factory: Callable[[], HomogeneousSpaceSpec]


def _preset(name, family, norm_factory):
    return Preset(name, lambda: FAMILIES[family](norm_factory(), name=name))


PRESETS = {
    p.name: p
    for p in [
        _preset("flat", "flat", lambda: mk.euclidean(3)),
        _preset("flat-quartic", "flat", lambda: mk.quartic(3)),
        _preset("flat-randers", "flat", lambda: mk.randers(np.eye(3), [0.3, 0.0, 0.0])),
        _preset("heisenberg", "heisenberg", lambda: mk.euclidean(3)),
        _preset("heisenberg-randers", "heisenberg", lambda: mk.randers(np.eye(3), [0.0, 0.0, 0.3])),
        _preset("su2", "su2", lambda: mk.euclidean(3)),
        _preset("su2-randers", "su2", lambda: mk.randers(np.eye(3), [0.0, 0.0, 0.3])),
        _preset("hyperbolic", "hyperbolic", lambda: mk.euclidean(2)),
        _preset("hyperbolic-randers", "hyperbolic", lambda: mk.randers(np.eye(2), [0.3, 0.0])),
    ]
}


def builtin(name: str) -> HomogeneousSpaceSpec:
    try:
        return PRESETS[name].factory()
    except KeyError:
        raise KeyError(f"unknown built-in space {name!r}; choose from {sorted(PRESETS)}") from None


def builtin_names() -> list[str]:
    return list(PRESETS)


# -- space-spec documents -----------------------------------------------------

SPEC_KEYS = {"family", "metric", "origin", "algebra", "name"}
METRIC_KEYS = {"type", "A", "b", "name"}
ALGEBRA_KEYS = {"structure_constants", "h_basis"}


class SpecFormatError(ValueError):
    pass


def _reject_unknown(d, allowed, where):
    if not isinstance(d, dict):
        raise SpecFormatError(f"{where} must be an object")
    extra = set(d) - allowed
    if extra:
        raise SpecFormatError(f"unknown field(s) in {where}: {sorted(extra)}")


def norm_from_document(metric: dict, dim: int) -> MinkowskiNorm:
    _reject_unknown(metric, METRIC_KEYS, "metric")
    kind = metric.get("type")
    if kind == "riemannian":
        return mk.riemannian(metric.get("A", np.eye(dim)))
    if kind == "randers":
        if "b" not in metric:
            raise SpecFormatError("randers metric needs b")
        return mk.randers(metric.get("A", np.eye(dim)), metric["b"])
    if kind == "custom-builtin":
        nm = metric.get("name")
        if nm not in mk.CUSTOM_BUILTINS:
            raise SpecFormatError(f"unknown custom-builtin norm {nm!r}; choose from {sorted(mk.CUSTOM_BUILTINS)}")
        return mk.CUSTOM_BUILTINS[nm](dim)
    raise SpecFormatError(f"metric type must be riemannian, randers or custom-builtin, got {kind!r}")


def space_from_document(doc: dict) -> HomogeneousSpaceSpec:
    """Build a space from a parsed space-spec document (see README)."""
    _reject_unknown(doc, SPEC_KEYS, "space spec")
    family = doc.get("family")
    if "metric" not in doc:
        raise SpecFormatError("space spec needs a metric")
    name = doc.get("name")
    if family == "custom":
        alg_doc = doc.get("algebra")
        if alg_doc is None:
            raise SpecFormatError("family 'custom' needs an algebra block")
        _reject_unknown(alg_doc, ALGEBRA_KEYS, "algebra")
        if "structure_constants" not in alg_doc:
            raise SpecFormatError("algebra needs structure_constants")
        alg = LieAlgebraData(np.array(alg_doc["structure_constants"], dtype=float))
        h = alg_doc.get("h_basis") or None
        m_dim = alg.dim - (len(h) if h else 0)
        return algebraic(alg, norm_from_document(doc["metric"], m_dim), h, name=name or "custom")
    if family not in FAMILIES:
        raise SpecFormatError(f"unknown family {family!r}; choose from {sorted(FAMILIES)} or 'custom'")
    if "algebra" in doc:
        raise SpecFormatError("built-in families carry a fixed algebra; 'algebra' is only accepted for family 'custom'")
    origin = doc.get("origin")
    if family == "flat":
        if origin is None and doc["metric"].get("A") is None:
            raise SpecFormatError("flat spaces need an origin (it fixes the dimension)")
        dim = len(origin) if origin is not None else len(doc["metric"]["A"])
    else:
        dim = FAMILY_DIMS[family]
    if origin is not None and len(origin) != dim:
        raise SpecFormatError(f"origin must have {dim} components")
    spec = FAMILIES[family](norm_from_document(doc["metric"], dim), origin=origin, name=name)
    if not spec.chart.contains(spec.origin):
        raise SpecFormatError(f"origin {list(origin)} lies outside the {family} chart")
    return spec


def load_space(path) -> HomogeneousSpaceSpec:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecFormatError(f"{path}: not valid JSON ({exc})") from None
    return space_from_document(doc)


def resolve_space(ref) -> HomogeneousSpaceSpec:
    """Built-in name, path to a space-spec file, or an inline document."""
    if isinstance(ref, dict):
        return space_from_document(ref)
    if ref in PRESETS:
        return builtin(ref)
    if Path(ref).exists():
        return load_space(ref)
    raise KeyError(f"{ref!r} is neither a built-in space nor a readable space-spec file")
