"""Worked constructions and regime labelling.

Two built-in scenarios:

* ``one_sided``: V_A = span{e1, e2}, V_B = span{e1, e3} in R^3 with
  w = (e2 + e3)/sqrt(2).  Each model reaches 1/sqrt(2) alone, the pooled
  optimum is 1.
* ``compositional``: V_A = span{e1, e2}, V_B = span{e3, e4} in R^4 scored by
  K(h) = min(<h, e1>, <h, e3>) over the unit ball.  Neither model scores
  above 0 alone; a two-round exchange reaches 1/sqrt(2).

Outputs under min-pair scoring are restricted to the unit ball, otherwise
the maximum is unbounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .advantage import private_loadings, rlaif_score
from .errors import DebateGeometryError
from .subspace import DEFAULT_SHARED_TOL, Subspace, orthonormalize, principal_decomposition, project, sum_subspace

SHARED = "shared"
ONE_SIDED = "one_sided"
COMPOSITIONAL = "compositional"


@dataclass(frozen=True, eq=False)
class MinPairScoring:
    """K(h) = min(<h, axis_a>, <h, axis_b>)."""

    axis_a: np.ndarray
    axis_b: np.ndarray

    def __call__(self, h) -> float:
        h = np.asarray(h, dtype=float)
        return float(min(h @ self.axis_a, h @ self.axis_b))


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    va: Subspace
    vb: Subspace
    w: np.ndarray | None = None
    scoring: MinPairScoring | None = None
    expected: dict = field(default_factory=dict)

    @property
    def is_linear(self) -> bool:
        return self.scoring is None


def _axes(d, *idx):
    return np.eye(d)[:, list(idx)]


def one_sided_construction() -> Scenario:
    r2 = math.sqrt(2)
    w = np.array([0.0, 1.0, 1.0]) / r2
    return Scenario(
        name="one_sided",
        va=orthonormalize(_axes(3, 0, 1)),
        vb=orthonormalize(_axes(3, 0, 2)),
        w=w,
        expected={
            "k_a_star": 1 / r2,
            "k_b_star": 1 / r2,
            "k_ab_star": 1.0,
            "delta": 1 - 1 / r2,
            "angles": (0.0, math.pi / 2),
        },
    )


def compositional_construction() -> Scenario:
    e = np.eye(4)
    return Scenario(
        name="compositional",
        va=orthonormalize(_axes(4, 0, 1)),
        vb=orthonormalize(_axes(4, 2, 3)),
        scoring=MinPairScoring(e[0], e[2]),
        expected={"k_a_star": 0.0, "k_b_star": 0.0, "two_round_score": 1 / math.sqrt(2)},
    )


def min_pair_optimum(v: Subspace, scoring: MinPairScoring) -> float:
    """max of min(<h, a>, <h, b>) over h in V with ||h|| <= 1.

    By minimax duality this equals the distance from the origin to the
    segment between P_V a and P_V b.
    """
    pa, pb = project(v, scoring.axis_a), project(v, scoring.axis_b)
    diff = pa - pb
    dd = diff @ diff
    t = 0.0 if dd == 0 else min(1.0, max(0.0, -(pb @ diff) / dd))
    return float(np.linalg.norm(pb + t * diff))


def _in_span(v: Subspace, x: np.ndarray, tol=1e-10) -> bool:
    return np.linalg.norm(x - project(v, x)) <= tol * max(1.0, np.linalg.norm(x))


def two_round_protocol(scenario: Scenario):
    """A proposes its best <h, axis_a> output, B adds its best axis_b direction.

    Returns (round-1 output, combined output, final score).
    """
    sc = scenario.scoring
    if sc is None:
        raise DebateGeometryError("two-round protocol needs min_pair scoring")
    if not _in_span(scenario.va, sc.axis_a) or not _in_span(scenario.vb, sc.axis_b):
        raise DebateGeometryError("min_pair axes must lie in V_A and V_B respectively")
    r1 = project(scenario.va, sc.axis_a)
    r1 = r1 / np.linalg.norm(r1)
    r2 = project(scenario.vb, sc.axis_b)
    r2 = r2 / np.linalg.norm(r2)
    combined = r1 + r2
    nrm = np.linalg.norm(combined)
    combined = r1 if nrm == 0 else combined / nrm
    return r1, combined, sc(combined)


@dataclass(frozen=True)
class RegimeLabel:
    """Knowledge regime of (V_A, V_B, w).

    ``eta_b_over_a`` is w's loading on B's private directions relative to A,
    ``eta_a_over_b`` the converse.  ``side`` names the model holding the
    private loading when the label is one_sided.
    """

    label: str
    w_a_norm: float
    w_b_norm: float
    w_perp_norm: float
    eta_b_over_a: float
    eta_a_over_b: float
    loadings_b_over_a: tuple
    loadings_a_over_b: tuple
    side: str | None = None


def classify_regime(va: Subspace, vb: Subspace, w, tol: float = 1e-8,
                    shared_tol: float = DEFAULT_SHARED_TOL) -> RegimeLabel:
    w = np.asarray(w, dtype=float)
    lb = private_loadings(principal_decomposition(va, vb, shared_tol), w)
    la = private_loadings(principal_decomposition(vb, va, shared_tol), w)
    eta_b, eta_a = float(np.linalg.norm(lb)), float(np.linalg.norm(la))
    both = sum_subspace(va, vb, shared_tol)
    w_perp = float(np.linalg.norm(w - project(both, w)))
    side = None
    if eta_a < tol and eta_b < tol:
        label = SHARED
    elif eta_a >= tol and eta_b >= tol:
        label = COMPOSITIONAL
    else:
        label = ONE_SIDED
        side = "b" if eta_b >= tol else "a"
    return RegimeLabel(
        label=label,
        w_a_norm=rlaif_score(va, w),
        w_b_norm=rlaif_score(vb, w),
        w_perp_norm=w_perp,
        eta_b_over_a=eta_b,
        eta_a_over_b=eta_a,
        loadings_b_over_a=tuple(float(x) for x in lb),
        loadings_a_over_b=tuple(float(x) for x in la),
        side=side,
    )


BUILTIN = {
    "one_sided": one_sided_construction,
    "compositional": compositional_construction,
}
