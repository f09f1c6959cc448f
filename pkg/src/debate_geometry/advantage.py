"""RLAIF and debate optimal scores, private information value and debate advantage."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DebateGeometryError, DimensionMismatchError
from .subspace import (
    DEFAULT_SHARED_TOL,
    PrincipalDecomposition,
    Subspace,
    _as_vector,
    principal_decomposition,
    sum_subspace,
)

UNIT_TOL = 1e-10
DEFAULT_BAND = 0.25

QUADRATIC = "quadratic"
TRANSITION = "transition"
LINEAR = "linear"


def preference_direction(w, d: int | None = None) -> np.ndarray:
    """Validate a unit-norm preference vector and return it as a float array."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1:
        raise DebateGeometryError(f"preference direction must be a vector, got shape {w.shape}")
    if d is not None and w.shape[0] != d:
        raise DimensionMismatchError(f"preference has length {w.shape[0]}, ambient dimension is {d}")
    nrm = np.linalg.norm(w)
    if abs(nrm - 1.0) > UNIT_TOL:
        raise DebateGeometryError(f"preference direction must have unit norm, got {nrm!r}")
    return w


def rlaif_score(v: Subspace, w) -> float:
    """K* = ||P_V w||, the best score a single model with subspace V reaches."""
    w = _as_vector(w, v.ambient_dim)
    return float(np.linalg.norm(v.basis.T @ w))


def debate_score(va: Subspace, vb: Subspace, w, shared_tol: float = DEFAULT_SHARED_TOL) -> float:
    """K_AB* = ||P_{V_A + V_B} w||."""
    return rlaif_score(sum_subspace(va, vb, shared_tol), w)


def private_loadings(decomp: PrincipalDecomposition, w) -> np.ndarray:
    """<w, v~_i> for every private direction."""
    w = _as_vector(w, decomp.private_dirs.shape[0])
    return decomp.private_dirs.T @ w


def private_info_value(decomp: PrincipalDecomposition, w) -> float:
    """eta = sqrt(sum_i <w, v~_i>^2) over the private directions of V_B beyond V_A.

    Linear in ``w``, so non-unit vectors are accepted.
    """
    return float(np.linalg.norm(private_loadings(decomp, w)))


def advantage_from_scores(k_a: float, eta: float) -> float:
    """sqrt(k_a^2 + eta^2) - k_a evaluated in the cancellation-free form."""
    denom = math.hypot(k_a, eta) + k_a
    return eta * eta / denom if denom > 0 else 0.0


def lower_bound(k_a: float, eta: float) -> float:
    denom = 2.0 * k_a + eta
    return eta * eta / denom if denom > 0 else 0.0


def regime_classify(eta: float, k_a_star: float, transition_band: float = DEFAULT_BAND) -> str:
    """Label the scaling regime: quadratic (eta << K_A*), linear (eta >> K_A*) or transition."""
    if eta < 0 or k_a_star < 0:
        raise DebateGeometryError("eta and k_a_star must be non-negative")
    if not 0 <= transition_band < 1:
        raise DebateGeometryError("transition_band must lie in [0, 1)")
    if eta == 0 and k_a_star == 0:
        return QUADRATIC
    if eta < (1 - transition_band) * k_a_star:
        return QUADRATIC
    if eta > (1 + transition_band) * k_a_star:
        return LINEAR
    return TRANSITION


@dataclass(frozen=True)
class AdvantageReport:
    """Scores and debate advantage for a pair of models.

    The model with the larger single-model score is labelled A; ``a_index``
    records which input (0 or 1) that was.
    """

    k_a_star: float
    k_b_star: float
    k_ab_star: float
    eta: float
    delta: float
    lower_bound: float
    upper_bound: float
    regime: str
    ratio_eta_over_k: float
    a_index: int
    angles: tuple
    m: int


def debate_advantage(
    va: Subspace,
    vb: Subspace,
    w,
    shared_tol: float = DEFAULT_SHARED_TOL,
    band: float = DEFAULT_BAND,
) -> AdvantageReport:
    if va.ambient_dim != vb.ambient_dim:
        raise DimensionMismatchError(f"ambient dimensions differ: {va.ambient_dim} vs {vb.ambient_dim}")
    w = preference_direction(w, va.ambient_dim)
    k_first, k_second = rlaif_score(va, w), rlaif_score(vb, w)
    a_index = 0
    if k_second > k_first:
        va, vb = vb, va
        k_first, k_second = k_second, k_first
        a_index = 1
    dec = principal_decomposition(va, vb, shared_tol)
    eta = private_info_value(dec, w)
    if eta > 0 and k_first > 0:
        ratio = eta / k_first
    elif eta > 0:
        ratio = math.inf
    else:
        ratio = 0.0
    return AdvantageReport(
        k_a_star=k_first,
        k_b_star=k_second,
        k_ab_star=math.hypot(k_first, eta),
        eta=eta,
        delta=advantage_from_scores(k_first, eta),
        lower_bound=lower_bound(k_first, eta),
        upper_bound=eta,
        regime=regime_classify(eta, k_first, band),
        ratio_eta_over_k=ratio,
        a_index=a_index,
        angles=tuple(float(t) for t in dec.angles),
        m=dec.m,
    )


def isotropic_eta(alpha: float, k: int, theta: float) -> float:
    """eta when w loads alpha on every principal pair and all k angles equal theta."""
    if alpha < 0:
        raise DebateGeometryError("alpha must be non-negative")
    if k < 1:
        raise DebateGeometryError("k must be at least 1")
    if not 0 <= theta <= math.pi / 2:
        raise DebateGeometryError("theta must lie in [0, pi/2]")
    return alpha * math.sqrt(k) * math.tan(theta / 2)
