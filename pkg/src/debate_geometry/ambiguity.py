"""Constitutional ambiguity on a finite output space and the beta -> infinity policy limit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DebateGeometryError, DimensionMismatchError

TIE_TOL = 1e-12
PROB_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FiniteOutputSpace:
    """Outputs with scores K(y) and base probabilities P(y).

    ``representations`` is kept when the scores came from linear scoring.
    """

    scores: np.ndarray
    base_prob: np.ndarray
    representations: np.ndarray | None = None

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        prob = np.asarray(self.base_prob, dtype=float)
        if scores.ndim != 1 or scores.size == 0:
            raise DebateGeometryError("output space is empty")
        if prob.shape != scores.shape:
            raise DimensionMismatchError(f"{prob.size} base probabilities for {scores.size} outputs")
        if np.any(prob < 0) or abs(prob.sum() - 1.0) > PROB_TOL:
            raise DebateGeometryError("base probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "base_prob", prob)

    @classmethod
    def from_linear(cls, representations, w, base_prob=None) -> "FiniteOutputSpace":
        """Scores K(y) = <w, h(y)> for representations given one per row."""
        h = np.asarray(representations, dtype=float)
        w = np.asarray(w, dtype=float)
        if h.ndim != 2 or h.shape[1] != w.shape[0]:
            raise DimensionMismatchError(f"representations {h.shape} do not match preference length {w.shape[0]}")
        if base_prob is None:
            base_prob = np.full(h.shape[0], 1.0 / h.shape[0])
        return cls(h @ w, base_prob, h)

    @property
    def n(self) -> int:
        return self.scores.size


def ambiguity_set(space: FiniteOutputSpace, epsilon: float, tie_tol: float = TIE_TOL) -> frozenset:
    """Indices y with K(y) >= K* - epsilon (ties within ``tie_tol``)."""
    if epsilon < 0:
        raise DebateGeometryError("epsilon must be non-negative")
    top = space.scores.max()
    return frozenset(int(i) for i in np.flatnonzero(space.scores >= top - epsilon - tie_tol))


def is_ambiguous(space: FiniteOutputSpace) -> bool:
    return len(ambiguity_set(space, 0.0)) > 1


def tempered_policy(space: FiniteOutputSpace, beta: float) -> np.ndarray:
    """pi(y) proportional to P(y) exp(beta K(y)), shifted by the max logit for stability."""
    if beta < 0:
        raise DebateGeometryError("beta must be non-negative")
    support = space.base_prob > 0
    if not support.any():
        raise DebateGeometryError("base distribution has empty support")
    logits = np.full(space.n, -np.inf)
    logits[support] = np.log(space.base_prob[support]) + beta * space.scores[support]
    weights = np.exp(logits - logits[support].max())
    return weights / weights.sum()


def limiting_policy(space: FiniteOutputSpace, tie_tol: float = TIE_TOL) -> np.ndarray:
    """Base distribution restricted to the argmax set A(0) and renormalised."""
    top = np.zeros(space.n, dtype=bool)
    top[list(ambiguity_set(space, 0.0, tie_tol))] = True
    mass = space.base_prob[top].sum()
    if mass <= 0:
        raise DebateGeometryError("limit undefined: every maximiser has zero base probability")
    out = np.where(top, space.base_prob, 0.0)
    return out / mass


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


@dataclass(frozen=True)
class ConvergenceReport:
    betas: tuple
    tv: tuple
    gap: float
    monotone: bool
    decay_rate: float | None


def score_gap(space: FiniteOutputSpace, tie_tol: float = TIE_TOL) -> float:
    """K* minus the best score outside A(0); 0 when every output is a maximiser."""
    top = ambiguity_set(space, 0.0, tie_tol)
    rest = [space.scores[i] for i in range(space.n) if i not in top]
    return float(space.scores.max() - max(rest)) if rest else 0.0


def limit_convergence_check(space: FiniteOutputSpace, beta_grid) -> ConvergenceReport:
    """TV distance to the limiting policy along ``beta_grid`` plus a fitted exponential rate.

    The rate is the negated slope of log TV against beta, fitted on grid
    points with TV > 0; it is None when the gap is zero or too few points
    remain.
    """
    betas = np.asarray(beta_grid, dtype=float)
    if betas.ndim != 1 or np.any(np.diff(betas) <= 0):
        raise DebateGeometryError("beta_grid must be strictly increasing")
    limit = limiting_policy(space)
    # both policies are proportional to P on A(0), so the TV distance is the
    # tempered mass outside A(0); summing that directly avoids 1 - pi cancellation
    outside = limit == 0
    tv = np.array([float(tempered_policy(space, b)[outside].sum()) for b in betas])
    gap = score_gap(space)
    rate = None
    keep = tv > 1e-300
    if gap > TIE_TOL and keep.sum() >= 2:
        slope = np.polyfit(betas[keep], np.log(tv[keep]), 1)[0]
        rate = float(-slope)
    monotone = bool(np.all(np.diff(tv) <= 1e-15))
    return ConvergenceReport(tuple(betas.tolist()), tuple(tv.tolist()), gap, monotone, rate)
