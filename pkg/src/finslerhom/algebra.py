"""Lie algebra data: brackets, Killing form, reductive split.

Structure constants are stored as ``c[i, j, k] = c^k_{ij}`` so that
``[e_i, e_j] = c^k_{ij} e_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DecompositionError

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    c: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError("structure constants must be an n x n x n array")
        object.__setattr__(self, "c", c)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(c.shape[0])))
        if self.antisymmetry_residual() > 1e-12:
            raise ValueError("structure constants are not antisymmetric in the lower indices")
        if self.jacobi_residual() > 1e-10:
            raise ValueError(f"Jacobi identity fails (residual {self.jacobi_residual():.3g})")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def bracket(self, X, Y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(X, float), np.asarray(Y, float), self.c)

    def ad(self, X) -> np.ndarray:
        """Matrix of ad_X: (ad_X)_{kj} = X^i c^k_{ij}."""
        return np.einsum("i,ijk->kj", np.asarray(X, float), self.c)

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.c + self.c.transpose(1, 0, 2)))) if self.c.size else 0.0

    def jacobi_residual(self) -> float:
        n = self.dim
        E = np.eye(n)
        worst = 0.0
        for a in range(n):
            for b in range(n):
                for d in range(n):
                    r = (
                        self.bracket(E[a], self.bracket(E[b], E[d]))
                        + self.bracket(E[b], self.bracket(E[d], E[a]))
                        + self.bracket(E[d], self.bracket(E[a], E[b]))
                    )
                    worst = max(worst, float(np.max(np.abs(r))))
        return worst


def abelian(n: int) -> LieAlgebraData:
    return LieAlgebraData(np.zeros((n, n, n)))


def heisenberg_algebra() -> LieAlgebraData:
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    return LieAlgebraData(c)


def su2_algebra() -> LieAlgebraData:
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k], c[j, i, k] = 1.0, -1.0
    return LieAlgebraData(c)


def affine_line_algebra() -> LieAlgebraData:
    """aff(1): e1 translation, e2 dilation, [e1, e2] = -e1."""
    c = np.zeros((2, 2, 2))
    c[0, 1, 0], c[1, 0, 0] = -1.0, 1.0
    return LieAlgebraData(c)


def killing_form(algebra: LieAlgebraData) -> np.ndarray:
    """K(e_i, e_j) = tr(ad e_i ad e_j) = c^m_{il} c^l_{jm}."""
    return np.einsum("ilm,jml->ij", algebra.c, algebra.c)


def _null_space(M, n):
    if M.size == 0:
        return np.eye(n)
    return scipy.linalg.null_space(np.atleast_2d(M), rcond=RANK_TOL).T


def _canonical_sign(v):
    i = int(np.argmax(np.abs(v)))
    return v if v[i] >= 0 else -v


@dataclass(frozen=True, eq=False)
class ReductiveDecomposition:
    algebra: LieAlgebraData
    h_basis: np.ndarray  # rows
    m_basis: np.ndarray  # rows
    killing: np.ndarray
    rad_basis: np.ndarray  # rows, null space of K

    @property
    def m_dim(self) -> int:
        return self.m_basis.shape[0]

    @property
    def branch(self) -> str:
        """'rad=m' when rad(K) fills m, else 'rad<m'."""
        return "rad=m" if self.rad_basis.shape[0] == self.m_dim else "rad<m"

    def split(self, X):
        """Coordinates of X in (h_basis, m_basis)."""
        basis = np.vstack([self.h_basis, self.m_basis]) if self.h_basis.size else self.m_basis
        coef = np.linalg.solve(basis.T, np.asarray(X, float))
        k = self.h_basis.shape[0]
        return coef[:k], coef[k:]

    def m_coords(self, X) -> np.ndarray:
        return self.split(X)[1]

    def project_m(self, X) -> np.ndarray:
        return self.m_coords(X) @ self.m_basis

    def from_m(self, coords) -> np.ndarray:
        return np.asarray(coords, float) @ self.m_basis

    def killing_on_m(self) -> np.ndarray:
        return self.m_basis @ self.killing @ self.m_basis.T

    def ad_invariance_residual(self) -> float:
        """max |[h, m]_h|; zero means [h, m] lies in m."""
        worst = 0.0
        for H in self.h_basis:
            for Mv in self.m_basis:
                h_part, _ = self.split(self.algebra.bracket(H, Mv))
                if h_part.size:
                    worst = max(worst, float(np.max(np.abs(h_part))))
        return worst

    def full_rank(self) -> bool:
        basis = np.vstack([self.h_basis, self.m_basis]) if self.h_basis.size else self.m_basis
        return np.linalg.matrix_rank(basis) == self.algebra.dim


def reductive_split(algebra: LieAlgebraData, h_basis=None) -> ReductiveDecomposition:
    """m = K-orthogonal complement of h; requires K nondegenerate on h."""
    n = algebra.dim
    K = killing_form(algebra)
    H = np.zeros((0, n)) if h_basis is None or len(h_basis) == 0 else np.atleast_2d(np.asarray(h_basis, float))
    if H.shape[0]:
        Kh = H @ K @ H.T
        if abs(np.linalg.det(Kh)) < RANK_TOL * max(1.0, np.max(np.abs(Kh))) ** H.shape[0]:
            raise DecompositionError(
                "Killing form is degenerate on h; supply the complement m explicitly"
            )
        M = _null_space(H @ K, n)
    else:
        M = np.eye(n)
    rad = _null_space(K, n) if np.any(np.abs(K) > RANK_TOL) else np.eye(n)
    return ReductiveDecomposition(algebra, H, M, K, rad)


def decomposition_with_m(algebra: LieAlgebraData, h_basis, m_basis) -> ReductiveDecomposition:
    """Decomposition with a user-supplied complement (no Killing-form requirement)."""
    n = algebra.dim
    K = killing_form(algebra)
    H = np.zeros((0, n)) if h_basis is None or len(h_basis) == 0 else np.atleast_2d(np.asarray(h_basis, float))
    M = np.atleast_2d(np.asarray(m_basis, float))
    rad = _null_space(K, n) if np.any(np.abs(K) > RANK_TOL) else np.eye(n)
    dec = ReductiveDecomposition(algebra, H, M, K, rad)
    if not dec.full_rank():
        raise DecompositionError("h and m do not span g")
    return dec


def commutator_span_m(dec: ReductiveDecomposition) -> np.ndarray:
    """Orthonormal basis (m-coordinates) of [g, g]_m."""
    n = dec.algebra.dim
    E = np.eye(n)
    rows = [dec.m_coords(dec.algebra.bracket(E[i], E[j])) for i in range(n) for j in range(i + 1, n)]
    rows = np.array(rows) if rows else np.zeros((0, dec.m_dim))
    if rows.size == 0 or np.max(np.abs(rows)) <= RANK_TOL:
        return np.zeros((0, dec.m_dim))
    return scipy.linalg.orth(rows.T, rcond=RANK_TOL).T


def commutator_complement_vector(dec: ReductiveDecomposition, inner=None):
    """Unit X in m orthogonal to [g, g]_m, or None when [g, g]_m = m.

    ``inner`` is the auxiliary scalar product on m-coordinates (default the
    identity).  The returned vector is in g-coordinates.
    """
    P = np.eye(dec.m_dim) if inner is None else np.asarray(inner, float)
    span = commutator_span_m(dec)
    if span.shape[0] == dec.m_dim:
        return None
    comp = _null_space(span @ P, dec.m_dim) if span.shape[0] else np.eye(dec.m_dim)
    x = _canonical_sign(comp[0])
    x = x / np.sqrt(x @ P @ x)
    return dec.from_m(x)


def killing_invariance_residual(algebra: LieAlgebraData) -> float:
    """max |K([Z,U],V) + K(U,[Z,V])| over basis triples."""
    K = killing_form(algebra)
    n = algebra.dim
    E = np.eye(n)
    worst = 0.0
    for z in range(n):
        for u in range(n):
            for v in range(n):
                r = algebra.bracket(E[z], E[u]) @ K @ E[v] + E[u] @ K @ algebra.bracket(E[z], E[v])
                worst = max(worst, abs(float(r)))
    return worst
