"""Round-based absorption of B's private directions into A's subspace.

Each round B reveals one of the current private directions of V_B over
V_A (the canonical principal ones, see ``subspace``) and A absorbs it.
Cooperative play reveals the direction with the largest |<w, d>|.
Adversarial play with rate gamma reveals a unit direction d inside the
private subspace with <w, d>^2 = gamma * max_i <w, v~_i>^2, built by
rotating the greedy direction towards a w-orthogonal private direction.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .advantage import private_loadings, rlaif_score
from .errors import DebateGeometryError
from .subspace import (
    DEFAULT_SHARED_TOL,
    Subspace,
    _qr_positive,
    principal_decomposition,
    sum_subspace,
)

DEFAULT_CONV_TOL = 1e-8
_TIE_TOL = 1e-12
_RESID_TOL = 1e-9

COOPERATIVE = "cooperative"
ADVERSARIAL = "adversarial"

TRACE_COLUMNS = ("t", "k_a_star", "eta", "delta", "alignment_sq", "gamma")


@dataclass(frozen=True, eq=False)
class StepResult:
    va: Subspace
    revealed: np.ndarray | None
    alignment_sq: float
    gamma: float
    converged: bool = False


@dataclass(frozen=True, eq=False)
class RoundRecord:
    t: int
    k_a_star: float
    eta: float
    delta: float
    revealed_direction: np.ndarray | None
    alignment_sq: float
    gamma: float
    private_count: int


@dataclass(eq=False)
class DynamicsTrace:
    rounds: list = field(default_factory=list)
    converged_at: int | None = None
    m_initial: int = 0
    k_ab_star: float = 0.0
    notes: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for r in self.rounds:
            writer.writerow([r.t, _fmt(r.k_a_star), _fmt(r.eta), _fmt(r.delta), _fmt(r.alignment_sq), _fmt(r.gamma)])
        return buf.getvalue()


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _absorb(va: Subspace, d: np.ndarray) -> Subspace:
    return Subspace(_qr_positive(np.column_stack([va.basis, d])))


def _leading_index(x: np.ndarray) -> int:
    return int(np.flatnonzero(np.abs(x) > 1e-9)[0])


def _greedy_pick(dirs: np.ndarray, loads: np.ndarray) -> int:
    """Largest squared loading; ties go to the direction with the smallest leading coordinate."""
    sq = loads ** 2
    best = sq.max()
    ties = [i for i in range(len(sq)) if sq[i] >= best - _TIE_TOL]
    return min(ties, key=lambda i: (_leading_index(dirs[:, i]), i))


def _private_state(va, vb, w, shared_tol):
    dec = principal_decomposition(va, vb, shared_tol)
    loads = private_loadings(dec, w)
    return dec.private_dirs, loads


def cooperative_step(va: Subspace, vb: Subspace, w, shared_tol: float = DEFAULT_SHARED_TOL,
                     conv_tol: float = DEFAULT_CONV_TOL) -> StepResult:
    """Reveal the private direction most aligned with w and absorb it into V_A."""
    dirs, loads = _private_state(va, vb, w, shared_tol)
    if dirs.shape[1] == 0 or np.linalg.norm(loads) < conv_tol:
        return StepResult(va, None, 0.0, 1.0, converged=True)
    i = _greedy_pick(dirs, loads)
    d = dirs[:, i]
    return StepResult(_absorb(va, d), d, float((w @ d) ** 2), 1.0)


def _withholding_partner(dirs: np.ndarray, loads: np.ndarray, star: int):
    """Unit f in span(private dirs), f orthogonal to d*, preferring f orthogonal to w.

    Among the other private directions, the one with the largest residual
    after removing w's remaining loading is used.  When no such residual
    survives (exactly one other direction, and it carries loading) the other
    loaded direction is returned and the rotation solves for the ratio.
    """
    others = [j for j in range(dirs.shape[1]) if j != star]
    if not others:
        return None
    g = dirs[:, others] @ loads[others]
    gnorm2 = g @ g
    best, best_norm, best_vec = None, -1.0, None
    for j in others:
        r = dirs[:, j]
        if gnorm2 > 0:
            r = r - (r @ g) / gnorm2 * g
        nrm = np.linalg.norm(r)
        if nrm > best_norm + _TIE_TOL:
            best, best_norm, best_vec = j, nrm, r
    if best_norm > _RESID_TOL:
        return best_vec / best_norm
    return g / math.sqrt(gnorm2)


def adversarial_step(va: Subspace, vb: Subspace, w, gamma: float, shared_tol: float = DEFAULT_SHARED_TOL,
                     conv_tol: float = DEFAULT_CONV_TOL) -> StepResult:
    """Reveal a private direction capturing fraction ``gamma`` of the greedy alignment.

    With a single private direction left no unit vector can hit a ratio
    strictly between 0 and 1.  Then gamma = 0 reveals nothing and any
    gamma > 0 reveals the greedy direction in full (recorded gamma_t = 1).
    """
    if not 0 <= gamma <= 1:
        raise DebateGeometryError("gamma must lie in [0, 1]")
    dirs, loads = _private_state(va, vb, w, shared_tol)
    if dirs.shape[1] == 0 or np.linalg.norm(loads) < conv_tol:
        return StepResult(va, None, 0.0, gamma, converged=True)
    star = _greedy_pick(dirs, loads)
    d_star = dirs[:, star] * (1.0 if loads[star] >= 0 else -1.0)
    c_star = abs(float(loads[star]))
    if gamma == 1:
        return StepResult(_absorb(va, d_star), d_star, float((w @ d_star) ** 2), 1.0)

    f = _withholding_partner(dirs, loads, star)
    if f is None:
        if gamma == 0:
            return StepResult(va, None, 0.0, 0.0)
        return StepResult(_absorb(va, d_star), d_star, float((w @ d_star) ** 2), 1.0)

    # <w, cos(phi) d* + sin(phi) f> = R cos(phi - psi); pick the smaller rotation
    c_f = float(w @ f)
    big_r = math.hypot(c_star, c_f)
    psi = math.atan2(c_f, c_star)
    off = math.acos(min(1.0, math.sqrt(gamma) * c_star / big_r))
    phi = min((psi + off, psi - off), key=abs)
    d = math.cos(phi) * d_star + math.sin(phi) * f
    d = d / np.linalg.norm(d)
    return StepResult(_absorb(va, d), d, float((w @ d) ** 2), gamma)


def run_dynamics(va: Subspace, vb: Subspace, w, mode: str = COOPERATIVE, gamma: float = 1.0,
                 max_rounds: int = 100, shared_tol: float = DEFAULT_SHARED_TOL,
                 conv_tol: float = DEFAULT_CONV_TOL) -> DynamicsTrace:
    """Simulate up to ``max_rounds`` rounds and record one row per visited state.

    ``converged_at`` is the first round with eta < conv_tol, or None.
    """
    if max_rounds < 1:
        raise DebateGeometryError("max_rounds must be at least 1")
    if mode not in (COOPERATIVE, ADVERSARIAL):
        raise DebateGeometryError(f"unknown mode {mode!r}")
    w = np.asarray(w, dtype=float)
    k_ab = rlaif_score(sum_subspace(va, vb, shared_tol), w)
    trace = DynamicsTrace(k_ab_star=k_ab)

    for t in range(max_rounds + 1):
        dirs, loads = _private_state(va, vb, w, shared_tol)
        eta = float(np.linalg.norm(loads))
        k_a = rlaif_score(va, w)
        if t == 0:
            trace.m_initial = dirs.shape[1]
        done = eta < conv_tol
        step = None
        if not done and t < max_rounds:
            if mode == COOPERATIVE:
                step = cooperative_step(va, vb, w, shared_tol, conv_tol)
            else:
                step = adversarial_step(va, vb, w, gamma, shared_tol, conv_tol)
                if step.revealed is not None and step.gamma != gamma:
                    trace.notes.append(f"round {t}: single private direction left, revealed in full")
                elif step.revealed is None and gamma == 0 and dirs.shape[1] == 1:
                    if not trace.notes or "withheld" not in trace.notes[-1]:
                        trace.notes.append(f"round {t}: single private direction left, withheld")
        trace.rounds.append(RoundRecord(
            t=t,
            k_a_star=k_a,
            eta=eta,
            delta=k_ab - k_a,
            revealed_direction=None if step is None else step.revealed,
            alignment_sq=0.0 if step is None else step.alignment_sq,
            gamma=(1.0 if mode == COOPERATIVE else gamma) if step is None else step.gamma,
            private_count=dirs.shape[1],
        ))
        if done:
            trace.converged_at = t
            break
        if step is not None:
            va = step.va
    return trace
