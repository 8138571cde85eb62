"""Homogeneous-geodesic search on the sphere of directions.

For a unit X (coordinates in the basis B = {K_i(p)}, declared orthonormal
for the auxiliary Euclidean product) the Killing field X* = sum x_i K_i has
self-derivative v(X) = nabla^{X*}_{X*} X* at p, and t(X) is its component
tangent to the sphere.  Zeros of t are geodesic vectors; they are located by
spiral sampling followed by damped Gauss-Newton with a normalisation
retraction, then cross-checked against the algebraic criterion
g_X([X, Z]_m, X_m) = 0 and against an integrated geodesic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import commutator_complement_vector, commutator_span_m
from .chart import covariant_derivative, field_jacobian, spray
from .config import DEFAULT, Tolerances
from .errors import DegenerateDirectionError, FinslerError, MetricValidityError
from .geodesy import DEFAULT_STEP, ComparisonReport, compare_orbit_geodesic
from .homspace import HomogeneousSpaceSpec, applicable_branches, existence_guaranteed
from .minkowski import fundamental_tensor


# -- sphere fields --------------------------------------------------------------


def v_field(spec: HomogeneousSpaceSpec, X, method: str = "spray") -> np.ndarray:
    """v(X) = D_{X*} X* at p, in B-coordinates.

    ``method="connection"`` evaluates nabla^{X*}_{X*} X* with the full Chern
    coefficients; the default uses Gamma^i_jk y^j y^k = 2 G^i(p, y), which
    needs only second-order jets.
    """
    spec.require_chart()
    X = np.asarray(X, dtype=float)
    if not np.any(spec.to_tangent(X)):
        raise DegenerateDirectionError("X*(p) = 0; isotropy directions have no orbit")
    W = spec.killing_field(X)
    if method == "connection":
        v = covariant_derivative(spec.chart, W, W, W, spec.origin)
    elif method == "spray":
        w, J = field_jacobian(W, spec.origin)
        v = J @ w + 2.0 * spray(spec.chart, spec.origin, w)
    else:
        raise ValueError(f"unknown method {method!r}")
    return spec.from_tangent(v)


def _unit(X):
    X = np.asarray(X, dtype=float)
    r = np.linalg.norm(X)
    if r == 0.0:
        raise DegenerateDirectionError("direction must be nonzero")
    return X / r


def tangential(v, X) -> np.ndarray:
    return v - (v @ X) * X


def t_field(spec: HomogeneousSpaceSpec, X) -> np.ndarray:
    """t(X) = v(X) - <v(X), X> X for the unit direction of X."""
    X = _unit(X)
    return tangential(v_field(spec, X), X)


def spiral_points(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic quasi-uniform points on S^{n-1}.

    n = 2: equally spaced angles; n = 3: generalized spiral (poles included);
    n >= 4: normalised Gaussian draws from ``seed``.
    """
    if count < 1:
        raise ValueError("need at least one sample")
    if n == 2:
        ang = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if n == 3:
        if count == 1:
            return np.array([[0.0, 0.0, 1.0]])
        k = np.arange(count)
        h = -1.0 + 2.0 * k / (count - 1)
        theta = np.arccos(np.clip(h, -1, 1))
        phi = np.zeros(count)
        for i in range(1, count - 1):
            phi[i] = (phi[i - 1] + 3.6 / math.sqrt(count) / math.sqrt(1 - h[i] ** 2)) % (2 * np.pi)
        pts = np.column_stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), h])
        pts[0], pts[-1] = [0.0, 0.0, -1.0], [0.0, 0.0, 1.0]
        return pts
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(count, n))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def default_samples(n: int, base: int = 2000) -> int:
    """Sample count scaled like base^((n-1)/2) relative to n = 3."""
    return int(round(base ** ((n - 1) / 2.0)))


@dataclass
class SphereField:
    space: str
    X: np.ndarray
    v: np.ndarray
    t: np.ndarray

    @property
    def v_norm(self):
        return np.linalg.norm(self.v, axis=1)

    @property
    def t_norm(self):
        return np.linalg.norm(self.t, axis=1)

    def tangency_residual(self) -> float:
        return float(np.max(np.abs(np.einsum("ij,ij->i", self.t, self.X))))


def sphere_field(spec: HomogeneousSpaceSpec, samples: int = 2000, seed: int = 0) -> SphereField:
    pts = spiral_points(spec.dim, samples, seed)
    vs = np.array([v_field(spec, X) for X in pts])
    ts = vs - np.einsum("ij,ij->i", vs, pts)[:, None] * pts
    return SphereField(spec.name, pts, vs, ts)


# -- algebraic criteria ---------------------------------------------------------


def _m_metric(spec, Xm):
    return fundamental_tensor(spec.m_norm, Xm).g


def lemma2_vector(spec: HomogeneousSpaceSpec, X) -> np.ndarray:
    """(g_{X_m}([X, Z_a]_m, X_m))_a over the m-basis Z_a."""
    dec = spec.decomposition
    X = np.asarray(X, dtype=float)
    Xm = dec.m_coords(X)
    if not np.any(np.abs(Xm) > 0):
        raise DegenerateDirectionError("X_m = 0: the criterion needs a nonzero m-component")
    g = _m_metric(spec, Xm)
    gX = g @ Xm
    return np.array([dec.m_coords(spec.algebra.bracket(X, Z)) @ gX for Z in dec.m_basis])


def lemma2_residual(spec: HomogeneousSpaceSpec, X) -> float:
    return float(np.max(np.abs(lemma2_vector(spec, X))))


def lemma1_residual(spec: HomogeneousSpaceSpec, X, inner) -> float:
    """max_Z |<[X, Z]_m, X_m>| for a fixed scalar product on m (k = 0 case)."""
    dec = spec.decomposition
    Xm = dec.m_coords(X)
    P = np.asarray(inner, float)
    return float(max(abs(dec.m_coords(spec.algebra.bracket(X, Z)) @ P @ Xm) for Z in dec.m_basis))


# -- refinement -------------------------------------------------------------------


def _tangent_basis(X):
    return scipy.linalg.null_space(X[None, :]).T


def sphere_jacobian(residual, X, fd_step=1e-6):
    """Central-difference Jacobian along an orthonormal tangent basis T at X."""
    T = _tangent_basis(X)
    J = np.column_stack([
        (residual(_unit(X + fd_step * e)) - residual(_unit(X - fd_step * e))) / (2 * fd_step)
        for e in T
    ])
    return J, T


def refine_on_sphere(residual, X0, tol=1e-13, max_iters=30, fd_step=1e-6):
    """Damped Gauss-Newton for residual(X) = 0 on the unit sphere.

    Minimum-norm steps (lstsq) handle zero sets of positive dimension;
    iterates are retracted by normalisation.  Returns (X, |residual|, iters).
    """
    X = _unit(X0)
    r = residual(X)
    nr = float(np.linalg.norm(r))
    it = 0
    for it in range(1, max_iters + 1):
        if nr <= tol:
            break
        J, T = sphere_jacobian(residual, X, fd_step)
        delta = np.linalg.lstsq(J, -r, rcond=1e-10)[0]
        alpha, improved = 1.0, False
        while alpha > 1e-4:
            Xn = _unit(X + alpha * (delta @ T))
            rn = residual(Xn)
            nrn = float(np.linalg.norm(rn))
            if nrn < nr:
                X, r, nr, improved = Xn, rn, nrn, True
                break
            alpha *= 0.5
        if not improved:
            break
    return X, nr, it


def local_zero_dimension(residual, X, rank_tol=1e-6) -> int:
    """Dimension of the zero set through X, from the Jacobian rank."""
    J, _ = sphere_jacobian(residual, X)
    s = np.linalg.svd(J, compute_uv=False)
    if s.size == 0 or s[0] <= rank_tol:
        return J.shape[1]
    return int(J.shape[1] - np.sum(s > rank_tol * max(1.0, s[0])))


def trace_curve(residual, X0, dense: int = 180, tol=1e-13, accept=1e-10):
    """Follow a one-dimensional zero set through X0 by predictor-corrector steps.

    Returns (points in order along the curve, closed flag).
    """
    h = 2 * np.pi / dense

    def walk(X, sign):
        pts, prev_tau = [], None
        for _ in range(2 * dense):
            J, T = sphere_jacobian(residual, X)
            tau = T.T @ np.linalg.svd(J)[2][-1]
            if prev_tau is None:
                tau = sign * tau
            elif tau @ prev_tau < 0:
                tau = -tau
            Y, r, _ = refine_on_sphere(residual, math.cos(h) * X + math.sin(h) * tau, tol)
            if r > accept:
                return pts, False
            if len(pts) >= 2 and angular_distance(Y, X0) < 0.75 * h:
                return pts, True
            pts.append(Y)
            prev_tau, X = tau, Y
        return pts, False

    fwd, closed = walk(X0, 1.0)
    if closed:
        return [X0] + fwd, True
    bwd, _ = walk(X0, -1.0)
    return bwd[::-1] + [X0] + fwd, False


def angular_distance(a, b) -> float:
    a, b = _unit(a), _unit(b)
    c = float(a @ b)
    return math.atan2(float(np.linalg.norm(b - c * a)), c)


# -- candidates -------------------------------------------------------------------


@dataclass
class GeodesicVectorCandidate:
    X: np.ndarray
    provenance: list
    t_residual: float | None = None
    v_residual: float | None = None
    lemma2_residual: float | None = None
    comparison: ComparisonReport | None = None
    both_signs: bool = False
    status: str = "unchecked"

    def as_dict(self):
        return {
            "X": self.X.tolist(),
            "provenance": list(self.provenance),
            "both_signs": self.both_signs,
            "t_residual": self.t_residual,
            "v_residual": self.v_residual,
            "lemma2_residual": self.lemma2_residual,
            "comparison": self.comparison.as_dict() if self.comparison else None,
            "status": self.status,
        }


def certify(spec: HomogeneousSpaceSpec, X, provenance=("user",), tol: Tolerances = DEFAULT,
            window: float = 1.0, step: float = DEFAULT_STEP, compare: bool = True) -> GeodesicVectorCandidate:
    """Run every available check on X and label the outcome.

    ``certified`` needs all available checks to pass and at least two of
    them to exist; a lone passing check is ``uncorroborated``.
    """
    X = _unit(X)
    cand = GeodesicVectorCandidate(X, list(provenance))
    checks = []
    if spec.chart_level:
        v = v_field(spec, X)
        cand.v_residual = float(np.linalg.norm(v))
        cand.t_residual = float(np.linalg.norm(tangential(v, X)))
        checks += [cand.t_residual <= tol.t_residual, cand.v_residual <= tol.v_residual]
    try:
        cand.lemma2_residual = lemma2_residual(spec, X)
        checks.append(cand.lemma2_residual <= tol.lemma2)
    except DegenerateDirectionError:
        pass
    if spec.chart_level and compare:
        cand.comparison = compare_orbit_geodesic(spec, X, window, step)
        checks.append(cand.comparison.sup_distance <= tol.sup_distance)
    independent = (1 if spec.chart_level else 0) + (cand.lemma2_residual is not None) + (cand.comparison is not None)
    if not all(checks):
        cand.status = "rejected"
    elif independent >= 2:
        cand.status = "certified"
    else:
        cand.status = "uncorroborated"
    return cand


# -- search -----------------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    samples: int = 2000
    refine_tol: float = 1e-13
    max_newton_iters: int = 30
    max_basins: int = 12
    neighbours: int = 8
    trace_dense: int = 180
    trace_points: int = 12
    window: float = 1.0
    step: float = DEFAULT_STEP
    seed: int = 0
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        if self.samples < 1 or self.max_basins < 1 or self.trace_points < 1:
            raise ValueError("sample, basin and trace counts must be positive")
        if not (self.step > 0 and self.window > 0 and self.refine_tol > 0):
            raise ValueError("step, window and refine_tol must be positive")

    def as_dict(self):
        d = {k: getattr(self, k) for k in (
            "samples", "refine_tol", "max_newton_iters", "max_basins", "neighbours",
            "trace_dense", "trace_points", "window", "step", "seed")}
        d["tol"] = self.tol.as_dict()
        return d


@dataclass
class ZeroComponent:
    dimension: int
    points: list  # dense samples along the component
    closed: bool
    representatives: list

    def as_dict(self):
        return {
            "dimension": self.dimension,
            "closed": self.closed,
            "dense_points": len(self.points),
            "representatives": [np.asarray(r).tolist() for r in self.representatives],
        }


@dataclass
class SphereSearchReport:
    space: dict
    config: dict
    branches: list
    guaranteed: bool
    all_directions: bool
    candidates: list
    sampling: dict
    components: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def certified(self):
        return [c for c in self.candidates if c.status == "certified"]

    @property
    def status(self) -> str:
        if self.certified:
            return "certified"
        return "guarantee-violated" if self.guaranteed else "none-found"

    def as_dict(self):
        return {
            "space": self.space,
            "seed": self.config["seed"],
            "config": self.config,
            "branches": self.branches,
            "existence_guaranteed": self.guaranteed,
            "all_directions_geodesic": self.all_directions,
            "status": self.status,
            "sampling": self.sampling,
            "components": [c.as_dict() for c in self.components],
            "candidates": [c.as_dict() for c in self.candidates],
            "diagnostics": self.diagnostics,
        }


def _basins(X, score, k, limit):
    """Indices of discrete local minima of ``score`` over k nearest neighbours."""
    G = X @ X.T
    k = min(k, len(X) - 1)
    order_nb = np.argsort(-G, axis=1, kind="stable")[:, 1:k + 1]
    minima = [i for i in range(len(X)) if k == 0 or score[i] <= score[order_nb[i]].min()]
    minima.sort(key=lambda i: (score[i], *X[i].tolist()))
    return minima[:limit]


def _dedupe(found, ang_tol):
    """Keep the best representative within ang_tol; found = [(X, res)] sorted."""
    kept = []
    for X, res in found:
        if all(angular_distance(X, Y) >= ang_tol for Y, _ in kept):
            kept.append((X, res))
    return kept


def _zeros_of(residual, pts, score, cfg: SearchConfig):
    found = []
    for i in _basins(pts, score, cfg.neighbours, cfg.max_basins):
        X, nr, _ = refine_on_sphere(residual, pts[i], cfg.refine_tol, cfg.max_newton_iters)
        found.append((X, nr))
    found.sort(key=lambda p: (p[1], *p[0].tolist()))
    return _dedupe(found, cfg.tol.angular)


def zero_components(residual, zeros, cfg: SearchConfig) -> list[ZeroComponent]:
    """Group refined zeros into components, tracing one-dimensional ones."""
    comps: list[ZeroComponent] = []
    member_angle = 1.5 * 2 * np.pi / cfg.trace_dense
    for X in zeros:
        if any(min(angular_distance(X, P) for P in c.points) < member_angle for c in comps):
            continue
        dim = local_zero_dimension(residual, X)
        if dim == 1:
            pts, closed = trace_curve(residual, X, cfg.trace_dense, cfg.refine_tol, cfg.tol.t_residual)
            m = min(cfg.trace_points, len(pts))
            idx = sorted({int(round(k * len(pts) / m)) % len(pts) for k in range(m)})
            comps.append(ZeroComponent(1, pts, closed, [pts[i] for i in idx]))
        else:
            comps.append(ZeroComponent(dim, [X], dim == 0, [X]))
    return comps


def _merge_antipodes(spec, points, tol: Tolerances):
    """Report +-X once; both_signs when -X is also a zero of t and Lemma 2."""
    out, used = [], set()
    for i, X in enumerate(points):
        if i in used:
            continue
        partner = next((j for j in range(i + 1, len(points))
                        if j not in used and angular_distance(-X, points[j]) < tol.angular), None)
        if partner is not None:
            used.add(partner)
            both = True
        else:
            both = _negative_is_zero(spec, X, tol)
        out.append((_canonical_sign(X) if both else X, both))
    return out


def _negative_is_zero(spec, X, tol: Tolerances) -> bool:
    tm = float(np.linalg.norm(t_field(spec, -X)))
    try:
        lm = lemma2_residual(spec, -X)
    except DegenerateDirectionError:
        lm = 0.0
    return tm <= tol.t_residual and lm <= tol.lemma2


def _canonical_sign(X):
    """Representative of +-X whose first non-negligible component is positive."""
    X = np.asarray(X, float)
    nz = np.flatnonzero(np.abs(X) > 1e-12)
    return -X if nz.size and X[nz[0]] < 0 else X


def _add_candidate(cands, X, provenance, ang_tol):
    X = _unit(X)
    for c in cands:
        if angular_distance(c.X, X) < ang_tol or (c.both_signs and angular_distance(c.X, -X) < ang_tol):
            if provenance not in c.provenance:
                c.provenance.append(provenance)
            return None
    c = GeodesicVectorCandidate(X, [provenance])
    cands.append(c)
    return c


def find_zeros(spec: HomogeneousSpaceSpec, config: SearchConfig = SearchConfig()) -> SphereSearchReport:
    """Locate zeros of t on S^{n-1}, group them into components and certify them.

    Sampling: quasi-uniform points scored by |t|; discrete local minima are
    refined by Gauss-Newton; one-dimensional zero sets are traced and
    reported through evenly spaced representatives.  Candidates from the
    algebraic branches (commutator complement, constant alpha eigenvectors)
    are merged in and everything is certified by the triple check.
    """
    spec.require_chart()
    cfg = config
    tol = cfg.tol
    field_ = sphere_field(spec, cfg.samples, cfg.seed)
    tn = field_.t_norm
    i_min = int(np.argmin(tn))
    zero_mask = tn <= tol.t_residual
    all_dirs = bool(zero_mask.all()) and cfg.samples >= 2 * spec.dim
    residual = lambda X: t_field(spec, X)

    cands: list[GeodesicVectorCandidate] = []
    comps: list[ZeroComponent] = []
    if all_dirs:
        # t vanishes at every sample: report the basis directions
        for X in np.eye(spec.dim):
            c = _add_candidate(cands, X, "sphere-zero", tol.angular)
            c.both_signs = float(np.linalg.norm(t_field(spec, -X))) <= tol.t_residual
        comps.append(ZeroComponent(spec.dim - 1, [], True, [c.X for c in cands]))
    else:
        zeros = [X for X, r in _zeros_of(residual, field_.X, tn, cfg) if r <= tol.t_residual]
        comps = zero_components(residual, zeros, cfg)
        reps = [X for comp in comps for X in comp.representatives]
        for X, both in _merge_antipodes(spec, reps, tol):
            c = _add_candidate(cands, X, "sphere-zero", tol.angular)
            if c is not None:
                c.both_signs = both

    notes = {}
    dec = spec.decomposition
    if dec.branch == "rad=m":
        fb = fixed_branch_vector(spec)
        notes["commutator_complement"] = None if fb is None else fb.tolist()
        if fb is not None:
            _add_candidate(cands, fb, "commutator-complement", tol.angular)
    elif spec.norm is not None and spec.norm.kind == "riemannian":
        # alpha is constant: eigenvectors with nonzero eigenvalue are geodesic vectors
        op = alpha_operator(spec, dec.m_basis[0])
        for lam, vec in zip(op.eigenvalues, op.eigenvectors.T):
            if abs(lam) > 1e-10:
                _add_candidate(cands, dec.from_m(vec), "algebraic", tol.angular)
        notes["alpha_eigenvalues"] = op.eigenvalues.tolist()

    final = []
    for c in cands:
        if not c.both_signs and _negative_is_zero(spec, c.X, tol):
            c.both_signs = True
            c.X = _canonical_sign(c.X)
        full = certify(spec, c.X, c.provenance, tol, cfg.window, cfg.step)
        full.both_signs = c.both_signs
        final.append(full)
    final.sort(key=lambda c: (c.status != "certified", *np.round(-np.abs(c.X), 12).tolist(), *c.X.tolist()))

    sampling = {
        "method": {2: "uniform-circle", 3: "generalized-spiral"}.get(spec.dim, "gaussian"),
        "samples": cfg.samples,
        "min_t": float(tn[i_min]),
        "argmin_t": field_.X[i_min].tolist(),
        "zero_fraction": float(zero_mask.mean()),
        "max_tangency_residual": field_.tangency_residual(),
    }
    if all_dirs:
        sampling["max_lemma2_on_samples"] = float(max(lemma2_residual(spec, X) for X in field_.X))
    report = SphereSearchReport(
        space=spec.summary(), config=cfg.as_dict(), branches=applicable_branches(spec),
        guaranteed=existence_guaranteed(spec), all_directions=all_dirs, candidates=final,
        sampling=sampling, components=comps, diagnostics=notes,
    )
    if not report.certified:
        report.diagnostics["failure"] = {
            "global_min_t": float(tn[i_min]),
            "location": field_.X[i_min].tolist(),
            "message": (
                "no certified candidate although existence is guaranteed for this class"
                if report.guaranteed else "no certified candidate; no existence guarantee applies"
            ),
        }
    return report


# -- symmetry and criteria agreement ------------------------------------------------


@dataclass(frozen=True)
class AntipodalReport:
    samples: int
    residual: float  # max |v(X) - v(-X)|
    worst_X: list
    applicable: bool


def antipodal_symmetry_check(spec: HomogeneousSpaceSpec, samples: int = 200, seed: int = 0) -> AntipodalReport:
    pts = spiral_points(spec.dim, samples, seed)
    worst, where = -1.0, None
    for X in pts:
        r = float(np.max(np.abs(v_field(spec, X) - v_field(spec, -X))))
        if r > worst:
            worst, where = r, X
    return AntipodalReport(samples, worst, where.tolist(), spec.berwald or spec.reversible)


@dataclass(frozen=True)
class AgreementReport:
    t_zeros: int
    lemma2_zeros: int
    max_angle_t_to_lemma2: float
    max_angle_lemma2_to_t: float
    max_lemma2_at_t_zeros: float
    max_t_at_lemma2_zeros: float
    agree: bool


def criteria_agreement(spec: HomogeneousSpaceSpec, config: SearchConfig = SearchConfig(samples=400)) -> AgreementReport:
    """Compare zero sets of t and of the Lemma-2 residual in both directions.

    Each zero of one criterion seeds a refinement of the other; the angle
    moved and the resulting residual measure the agreement.
    """
    cfg = config
    tol = cfg.tol
    pts = spiral_points(spec.dim, cfg.samples, cfg.seed)
    t_res = lambda X: t_field(spec, X)
    l_res = lambda X: lemma2_vector(spec, X)
    t_score = np.array([np.linalg.norm(t_res(X)) for X in pts])
    l_score = np.array([np.linalg.norm(l_res(X)) for X in pts])
    tz = [X for X, r in _zeros_of(t_res, pts, t_score, cfg) if r <= tol.t_residual]
    lz = [X for X, r in _zeros_of(l_res, pts, l_score, cfg) if r <= tol.lemma2]
    # traced curves of each zero set are checked point by point as well
    tz = [P for comp in zero_components(t_res, tz, cfg) for P in comp.points or comp.representatives]
    lz = [P for comp in zero_components(l_res, lz, cfg) for P in comp.points or comp.representatives]
    ang_tl = ang_lt = res_l = res_t = 0.0
    for X in tz:
        Y, r, _ = refine_on_sphere(l_res, X, cfg.refine_tol, cfg.max_newton_iters)
        ang_tl, res_l = max(ang_tl, angular_distance(X, Y)), max(res_l, r)
    for X in lz:
        Y, r, _ = refine_on_sphere(t_res, X, cfg.refine_tol, cfg.max_newton_iters)
        ang_lt, res_t = max(ang_lt, angular_distance(X, Y)), max(res_t, r)
    agree = (
        bool(tz) == bool(lz)
        and ang_tl <= tol.angular and ang_lt <= tol.angular
        and res_l <= tol.lemma2 and res_t <= tol.t_residual
    )
    return AgreementReport(len(tz), len(lz), ang_tl, ang_lt, res_l, res_t, agree)


# -- Killing-form operator -----------------------------------------------------------


@dataclass(frozen=True)
class AlphaOperator:
    X: np.ndarray
    matrix: np.ndarray  # alpha^X on m-coordinates
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, unit in the auxiliary product
    self_adjoint_residual: float
    applicable: bool  # False on the rad(K) = m branch


def alpha_operator(spec: HomogeneousSpaceSpec, X) -> AlphaOperator:
    """alpha^X = g_X^{-1} K on m, defined by g_X(alpha U, V) = K(U, V)."""
    dec = spec.decomposition
    Xm = dec.m_coords(np.asarray(X, float))
    g = _m_metric(spec, Xm)
    K = dec.killing_on_m()
    try:
        cho = scipy.linalg.cho_factor(g)
    except np.linalg.LinAlgError:
        raise MetricValidityError("g_X is not positive definite") from None
    alpha = scipy.linalg.cho_solve(cho, K)
    lam, vecs = scipy.linalg.eigh(K, g)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i, j] < 0:
            vecs[:, j] = -vecs[:, j]
    ga = g @ alpha
    sa = float(np.max(np.abs(ga - ga.T))) if ga.size else 0.0
    return AlphaOperator(np.asarray(X, float), alpha, lam, vecs, sa, dec.branch != "rad=m")


def dominant_eigenvector(op: AlphaOperator):
    """Eigenvector with the largest |eigenvalue| and the relative gap to the next one."""
    mags = np.abs(op.eigenvalues)
    order = np.argsort(-mags)
    top = mags[order[0]]
    gap = (top - mags[order[1]]) / top if len(mags) > 1 and top > 0 else 1.0
    return op.eigenvectors[:, order[0]], float(gap)


@dataclass
class GapProbeReport:
    paths: int
    points_per_path: int
    min_gap: float
    jumps: list
    near_crossings: list

    @property
    def jumps_found(self) -> bool:
        return bool(self.jumps)

    def as_dict(self):
        return {
            "paths": self.paths,
            "points_per_path": self.points_per_path,
            "min_gap": self.min_gap,
            "jumps_found": self.jumps_found,
            "jumps": self.jumps,
            "near_crossings": self.near_crossings,
        }


def great_circles(n: int, extra: int = 0, seed: int = 0):
    """Coordinate-plane great circles plus ``extra`` seeded random ones."""
    E = np.eye(n)
    circles = [(E[i], E[j]) for i in range(n) for j in range(i + 1, n)]
    rng = np.random.default_rng(seed)
    for _ in range(extra):
        a = _unit(rng.normal(size=n))
        b = rng.normal(size=n)
        b = _unit(b - (b @ a) * a)
        circles.append((a, b))
    return circles


def alpha_selection_probe(spec: HomogeneousSpaceSpec, points_per_path: int = 720, extra_paths: int = 3,
                          seed: int = 0, jump_angle: float = 0.3, gap_tol: float = 1e-3) -> GapProbeReport:
    """Follow the max-|eigenvalue| eigenvector of alpha^X along great circles.

    Records selection jumps (consecutive eigenvector lines further apart than
    ``jump_angle`` radians) and near-crossings (relative gap below ``gap_tol``).
    Says nothing about whether some other continuous selection exists.
    """
    circles = great_circles(spec.decomposition.m_dim, extra_paths, seed)
    s = 2 * np.pi * np.arange(points_per_path + 1) / points_per_path
    jumps, near, min_gap = [], [], np.inf
    for k, (a, b) in enumerate(circles):
        prev = None
        for sv in s:
            Xm = math.cos(sv) * a + math.sin(sv) * b
            op = alpha_operator(spec, spec.decomposition.from_m(Xm))
            if not op.applicable:
                return GapProbeReport(len(circles), points_per_path, float("nan"), [], [])
            vec, gap = dominant_eigenvector(op)
            min_gap = min(min_gap, gap)
            if gap < gap_tol:
                near.append({"path": k, "s": float(sv), "X": Xm.tolist(), "gap": gap})
            if prev is not None:
                c = min(1.0, abs(float(vec @ prev)))
                ang = math.acos(c)
                if ang > jump_angle:
                    jumps.append({"path": k, "s": float(sv), "X": Xm.tolist(), "gap": gap, "angle": ang})
            prev = vec
    return GapProbeReport(len(circles), points_per_path, float(min_gap), jumps, near)


def fixed_branch_vector(spec: HomogeneousSpaceSpec, tol: Tolerances = DEFAULT):
    """Unit X with g_X(X, [g, g]_m) = 0 on the rad(K) = m branch, or None.

    Starts from the auxiliary-orthogonal complement vector; for a quadratic
    norm that is already the answer.  Otherwise the condition depends on X
    through g_X and is solved on the sphere from that start.
    """
    dec = spec.decomposition
    if dec.branch != "rad=m":
        return None
    X = commutator_complement_vector(dec)
    if X is None:
        return None
    W = commutator_span_m(dec)
    if W.shape[0] == 0:
        return X

    def residual(Y):
        Ym = dec.m_coords(Y)
        return W @ (_m_metric(spec, Ym) @ Ym)

    if float(np.max(np.abs(residual(X)))) <= tol.lemma2:
        return X
    Y, r, _ = refine_on_sphere(residual, X)
    return Y if r <= tol.lemma2 else X


def fixed_branch_candidate(spec: HomogeneousSpaceSpec, tol: Tolerances = DEFAULT,
                           step: float = DEFAULT_STEP) -> GeodesicVectorCandidate | None:
    """Certified candidate from the rad(K) = m branch, None when it does not apply."""
    X = fixed_branch_vector(spec, tol)
    if X is None:
        return None
    return certify(spec, X, ("commutator-complement",), tol, step=step)
