"""Orthonormal subspaces, projections and principal-angle decomposition.

Principal angles are computed from the SVD of ``Qa.T @ Qb`` (Bjorck-Golub).
The sines are taken from the norms of the residuals ``v - P_A v`` so that
small angles keep full relative accuracy, and the angle itself is
``arctan2(sin, cos)``.

Principal vectors are only unique up to rotation inside a cluster of equal
angles.  Every cluster is rotated to a canonical basis (the first coordinate
axes, in order, that have a non-negligible projection on the cluster), which
makes axis-aligned constructions return axis vectors and keeps downstream
tie-breaking reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ClampWarning,
    DebateGeometryError,
    DimensionMismatchError,
    RankReductionWarning,
    RankZeroError,
)

DEFAULT_SHARED_TOL = 1e-8
ORTHONORMAL_TOL = 1e-10
CLAMP_WARN_TOL = 1e-9
# angles closer than this are treated as one degenerate cluster
CLUSTER_TOL = 1e-9
_AXIS_ACCEPT = 1e-6


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of R^d stored as a d x k matrix with orthonormal columns.

    ``reduced_from`` is the column count of the raw input when
    :func:`orthonormalize` had to drop dependent columns, otherwise None.
    """

    basis: np.ndarray
    reduced_from: int | None = None

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[1] < 1 or basis.shape[0] < basis.shape[1]:
            raise DebateGeometryError(f"basis must be d x k with 1 <= k <= d, got shape {basis.shape}")
        gram = basis.T @ basis
        err = np.abs(gram - np.eye(basis.shape[1])).max()
        if err > ORTHONORMAL_TOL:
            raise DebateGeometryError(f"basis columns are not orthonormal (max Gram error {err:.3g})")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def rank_reduced(self) -> bool:
        return self.reduced_from is not None

    def __repr__(self):
        return f"Subspace(d={self.ambient_dim}, k={self.k})"


@dataclass(frozen=True, eq=False)
class PrincipalDecomposition:
    """Principal angles and vectors between V_A and V_B.

    ``angles`` has ``min(k_A, k_B)`` entries in ascending order.
    ``u_vectors`` holds all k_A principal vectors of V_A and ``v_vectors``
    all k_B principal vectors of V_B (the first ``len(angles)`` columns are
    paired).  ``private_dirs`` are the unit components of V_B's principal
    vectors orthogonal to V_A, one per index whose sine is at least
    ``shared_tol``; when k_B > k_A the unpaired V_B vectors are included.
    """

    angles: np.ndarray
    u_vectors: np.ndarray
    v_vectors: np.ndarray
    private_dirs: np.ndarray
    private_index: tuple
    sines: np.ndarray
    shared_count: int
    clamp_excess: float

    @property
    def m(self) -> int:
        return self.private_dirs.shape[1]

    def assembled_basis(self) -> np.ndarray:
        """Orthonormal basis {u_1..u_kA, private dirs} of V_A + V_B."""
        return np.hstack([self.u_vectors, self.private_dirs])


def _qr_positive(a: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(a)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def orthonormalize(raw_basis) -> Subspace:
    """Orthonormal basis for the column space of ``raw_basis`` (d x k).

    Full-rank input goes through QR with a positive-diagonal sign convention,
    so the first column keeps the direction of the first input column.
    Rank-deficient input is reduced to its numerical rank with a
    :class:`RankReductionWarning`.
    """
    a = np.asarray(raw_basis, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.size == 0:
        raise DebateGeometryError(f"expected a non-empty d x k matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DebateGeometryError("basis contains non-finite entries")
    d, k = a.shape
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0.0:
        raise RankZeroError("rank zero input")
    tol = max(d, k) * np.finfo(float).eps * s[0]
    r = int(np.sum(s > tol))
    if r == k:
        return Subspace(_qr_positive(a))
    warnings.warn(f"input columns have rank {r} < {k}; reduced to rank {r}", RankReductionWarning, stacklevel=2)
    return Subspace(_qr_positive(u[:, :r]), reduced_from=k)


def _check_same_space(*spaces):
    dims = {s.ambient_dim for s in spaces}
    if len(dims) != 1:
        raise DimensionMismatchError(f"ambient dimensions differ: {sorted(dims)}")


def _as_vector(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise DimensionMismatchError(f"expected a vector of length {d}, got shape {x.shape}")
    return x


def project(v: Subspace, x) -> np.ndarray:
    """Orthogonal projection of ``x`` onto ``v``."""
    x = _as_vector(x, v.ambient_dim)
    return v.basis @ (v.basis.T @ x)


def _canonical_basis(p: np.ndarray) -> np.ndarray:
    """Canonical orthonormal basis of span(p), p orthonormal d x c.

    Scans coordinate axes in order and keeps the projections that add a new
    direction, so span{e_2, e_3} maps to (e_2, e_3) regardless of how p was
    rotated.
    """
    d, c = p.shape
    chosen = []
    for i in range(d):
        x = p @ p[i]
        for _ in range(2):
            for y in chosen:
                x = x - (y @ x) * y
        nrm = np.linalg.norm(x)
        if nrm > _AXIS_ACCEPT:
            chosen.append(x / nrm)
            if len(chosen) == c:
                break
    basis = np.column_stack(chosen)
    basis = p @ (p.T @ basis)
    return _qr_positive(basis)


def _clusters(theta: np.ndarray, private: np.ndarray):
    groups = []
    start = 0
    for j in range(1, len(theta) + 1):
        if (
            j == len(theta)
            or theta[j] - theta[j - 1] > CLUSTER_TOL
            or private[j] != private[j - 1]
        ):
            groups.append(list(range(start, j)))
            start = j
    return groups


def principal_decomposition(va: Subspace, vb: Subspace, shared_tol: float = DEFAULT_SHARED_TOL) -> PrincipalDecomposition:
    """Principal angles, principal vectors and private directions of V_B over V_A."""
    _check_same_space(va, vb)
    if not shared_tol > 0:
        raise DebateGeometryError("shared_tol must be positive")
    qa, qb = va.basis, vb.basis
    ka, kb = qa.shape[1], qb.shape[1]
    p = min(ka, kb)

    y, s, zt = np.linalg.svd(qa.T @ qb)
    u = qa @ y
    v = qb @ zt.T
    clamp_excess = float(max(s.max() - 1.0, 0.0))
    if clamp_excess > CLAMP_WARN_TOL:
        warnings.warn(f"singular value exceeds 1 by {clamp_excess:.3g}; ill-conditioned bases", ClampWarning, stacklevel=2)

    cos = np.zeros(kb)
    cos[:p] = np.clip(s[:p], 0.0, 1.0)
    resid = v - qa @ (qa.T @ v)
    resid = resid - qa @ (qa.T @ resid)
    sin = np.linalg.norm(resid, axis=0)
    theta = np.maximum.accumulate(np.arctan2(sin, cos))
    private = sin >= shared_tol

    dirs = np.zeros_like(resid)
    dirs[:, private] = resid[:, private] / sin[private]
    for group in _clusters(theta, private):
        if private[group[0]]:
            pc = dirs[:, group]
            canon = _canonical_basis(pc)
            rot = pc.T @ canon
            dirs[:, group] = canon
            v[:, group] = v[:, group] @ rot
            if group[-1] < p:
                u[:, group] = u[:, group] @ rot
        else:
            uc = u[:, group]
            canon = _canonical_basis(uc)
            rot = uc.T @ canon
            u[:, group] = canon
            v[:, group] = v[:, group] @ rot

    idx = tuple(int(j) for j in np.flatnonzero(private))
    return PrincipalDecomposition(
        angles=theta[:p].copy(),
        u_vectors=u,
        v_vectors=v,
        private_dirs=dirs[:, list(idx)],
        private_index=idx,
        sines=sin,
        shared_count=kb - len(idx),
        clamp_excess=clamp_excess,
    )


def sum_subspace(va: Subspace, vb: Subspace, shared_tol: float = DEFAULT_SHARED_TOL) -> Subspace:
    """Orthonormal basis of V_A + V_B: V_A's basis followed by B's private directions."""
    dec = principal_decomposition(va, vb, shared_tol)
    if dec.m == 0:
        return va
    return Subspace(_qr_positive(np.hstack([va.basis, dec.private_dirs])))


def random_subspace(d: int, k: int, seed) -> Subspace:
    """Haar-uniform random k-dimensional subspace of R^d.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if not 1 <= k <= d:
        raise DebateGeometryError(f"need 1 <= k <= d, got k={k}, d={d}")
    rng = np.random.default_rng(seed)
    return Subspace(_qr_positive(rng.standard_normal((d, k))))
