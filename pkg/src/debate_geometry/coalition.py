"""n-model debate: cumulative subspaces, marginal private information and coalition sizing."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .advantage import advantage_from_scores, rlaif_score
from .errors import DebateGeometryError, NumericalWarning
from .subspace import DEFAULT_SHARED_TOL, Subspace, _check_same_space, sum_subspace

NEGATIVE_WARN_TOL = 1e-9
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Coalition:
    """Models added in ``order``; ``cumulative[j]`` is S_{j+1} = V_1 + ... + V_{j+1}.

    ``scores[j]`` is ||P_{S_{j+1}} w||.  ``marginal_eta_sq`` and
    ``marginal_delta`` start at the second model (n - 1 entries each).
    """

    members: tuple
    order: tuple
    cumulative: tuple
    scores: tuple
    marginal_eta_sq: tuple
    marginal_delta: tuple

    @property
    def total_score(self) -> float:
        return self.scores[-1]

    @property
    def first_score(self) -> float:
        return self.scores[0]


def _check_models(models):
    models = list(models)
    if not models:
        raise DebateGeometryError("coalition needs at least one model")
    _check_same_space(*models)
    return models


def _marginal(prev: float, new: float) -> float:
    eta_sq = new * new - prev * prev
    if eta_sq < 0:
        if eta_sq < -NEGATIVE_WARN_TOL:
            warnings.warn(f"negative marginal eta^2 {eta_sq:.3g} clamped to 0", NumericalWarning, stacklevel=3)
        eta_sq = 0.0
    return eta_sq


def build_coalition(models, w, order=None, shared_tol: float = DEFAULT_SHARED_TOL) -> Coalition:
    models = _check_models(models)
    n = len(models)
    order = tuple(range(n)) if order is None else tuple(int(i) for i in order)
    if sorted(order) != list(range(n)):
        raise DebateGeometryError(f"order {order} is not a permutation of 0..{n - 1}")

    first = models[order[0]]
    cumulative = [first]
    scores = [rlaif_score(first, w)]
    eta_sq, deltas = [], []
    for i in order[1:]:
        s = sum_subspace(cumulative[-1], models[i], shared_tol)
        score = rlaif_score(s, w)
        e2 = _marginal(scores[-1], score)
        eta_sq.append(e2)
        deltas.append(advantage_from_scores(scores[-1], float(np.sqrt(e2))))
        cumulative.append(s)
        scores.append(score)
    return Coalition(
        members=tuple(models[i] for i in order),
        order=order,
        cumulative=tuple(cumulative),
        scores=tuple(scores),
        marginal_eta_sq=tuple(eta_sq),
        marginal_delta=tuple(deltas),
    )


def _argmax_lowest(values):
    best = 0
    for i, v in enumerate(values):
        if v > values[best] + TIE_TOL:
            best = i
    return best


def greedy_order(models, w, shared_tol: float = DEFAULT_SHARED_TOL) -> tuple:
    """Start from the best single model, then repeatedly add the largest marginal eta."""
    models = _check_models(models)
    remaining = list(range(len(models)))
    first = remaining[_argmax_lowest([rlaif_score(m, w) for m in models])]
    order = [first]
    remaining.remove(first)
    current = models[first]
    base = rlaif_score(current, w) ** 2
    while remaining:
        sums = [sum_subspace(current, models[i], shared_tol) for i in remaining]
        gains = [rlaif_score(s, w) ** 2 - base for s in sums]
        pick = _argmax_lowest(gains)
        order.append(remaining.pop(pick))
        current = sums[pick]
        base = rlaif_score(current, w) ** 2
    return tuple(order)


def greedy_coalition(models, w, shared_tol: float = DEFAULT_SHARED_TOL) -> Coalition:
    return build_coalition(models, w, greedy_order(models, w, shared_tol), shared_tol)


def diminishing_schedule(coalition: Coalition) -> list:
    """Marginal debate advantages delta_2..delta_n of the coalition."""
    return list(coalition.marginal_delta)


def optimal_coalition_size(models, w, cost_per_debater: float, shared_tol: float = DEFAULT_SHARED_TOL) -> int:
    """Greedy-ordered coalition size, stopping at the first debater whose delta_j <= cost."""
    if cost_per_debater < 0:
        raise DebateGeometryError("cost_per_debater must be non-negative")
    return _size_for(greedy_coalition(models, w, shared_tol), cost_per_debater)


def _size_for(coalition: Coalition, cost: float) -> int:
    size = 1
    for delta in coalition.marginal_delta:
        if delta - cost <= 0:
            break
        size += 1
    return size


def approximate_stop_size(coalition: Coalition, cost: float) -> int:
    """Size under the small-eta rule: stop once ||P_{S_{j-1}} w|| >= eta_j^2 / (2c).

    Reported next to the exact rule for comparison only.
    """
    if cost < 0:
        raise DebateGeometryError("cost must be non-negative")
    size = 1
    for prev, e2 in zip(coalition.scores[:-1], coalition.marginal_eta_sq):
        if cost > 0 and prev >= e2 / (2 * cost):
            break
        if cost == 0 and e2 == 0:
            break
        size += 1
    return size
