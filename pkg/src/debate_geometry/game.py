"""Sequential generous/strategic debate game solved by backward induction.

A moves first, B observes A's action.  Constitutional scores are
K(g, g) = R, K(s, s) = P and K(g, s) = K(s, g) = S with R > P > S >= 0;
each player also earns lambda for playing s.
"""

from __future__ import annotations

from dataclasses import dataclass

from .advantage import debate_score
from .errors import DebateGeometryError, KnifeEdgeError

GENEROUS = "g"
STRATEGIC = "s"
ACTIONS = (GENEROUS, STRATEGIC)
KNIFE_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class GameSpec:
    r: float
    p: float
    s: float
    lam: float = 0.0

    def __post_init__(self):
        if not (self.r > self.p > self.s >= 0):
            raise DebateGeometryError(f"need R > P > S >= 0, got R={self.r}, P={self.p}, S={self.s}")
        if self.lam < 0:
            raise DebateGeometryError(f"lambda must be non-negative, got {self.lam}")

    def score(self, a: str, b: str) -> float:
        if a == b:
            return self.r if a == GENEROUS else self.p
        return self.s

    def payoffs(self, a: str, b: str) -> tuple:
        k = self.score(a, b)
        return k + self.lam * (a == STRATEGIC), k + self.lam * (b == STRATEGIC)


@dataclass(frozen=True)
class SPEOutcome:
    action_a: str
    action_b_after_g: str
    action_b_after_s: str
    constitutional_score: float
    payoff_a: float
    payoff_b: float
    regime: str

    @property
    def path(self) -> tuple:
        b = self.action_b_after_g if self.action_a == GENEROUS else self.action_b_after_s
        return self.action_a, b


def threshold(spec: GameSpec) -> tuple:
    """(lambda*, upper) = (R - P, R - S)."""
    return spec.r - spec.p, spec.r - spec.s


def regime_of(spec: GameSpec) -> str:
    lam_star, lam_upper = threshold(spec)
    if spec.lam < lam_star:
        return "a"
    if spec.lam < lam_upper:
        return "b"
    return "c"


def _check_knife_edge(spec: GameSpec):
    for edge in threshold(spec):
        if abs(spec.lam - edge) <= KNIFE_EDGE_TOL:
            raise KnifeEdgeError(f"indifference at lambda={spec.lam}; perturb lambda")


def _best(options: dict) -> str:
    (a, ua), (b, ub) = options.items()
    if ua == ub:
        raise KnifeEdgeError("indifference; perturb lambda")
    return a if ua > ub else b


def solve_spe(spec: GameSpec) -> SPEOutcome:
    _check_knife_edge(spec)
    b_reply = {
        a: _best({b: spec.payoffs(a, b)[1] for b in ACTIONS})
        for a in ACTIONS
    }
    a_move = _best({a: spec.payoffs(a, b_reply[a])[0] for a in ACTIONS})
    b_move = b_reply[a_move]
    ua, ub = spec.payoffs(a_move, b_move)
    return SPEOutcome(
        action_a=a_move,
        action_b_after_g=b_reply[GENEROUS],
        action_b_after_s=b_reply[STRATEGIC],
        constitutional_score=spec.score(a_move, b_move),
        payoff_a=ua,
        payoff_b=ub,
        regime=regime_of(spec),
    )


@dataclass(frozen=True)
class SweepRow:
    lam: float
    score: float
    regime: str
    action_a: str
    action_b_after_g: str


def lambda_sweep(r: float, p: float, s: float, lambdas) -> list:
    rows = []
    for lam in lambdas:
        out = solve_spe(GameSpec(r, p, s, float(lam)))
        rows.append(SweepRow(float(lam), out.constitutional_score, out.regime, out.action_a, out.action_b_after_g))
    return rows


def game_from_geometry(va, vb, w, p_safe: float, s_penalty: float, lam: float) -> GameSpec:
    """Game whose compositional optimum R is the debate-optimal score K_AB*.

    P and S have no geometric definition and are supplied by the caller;
    max(K_A*, K_B*) is a reasonable choice for P.
    """
    r = debate_score(va, vb, w)
    return GameSpec(r, p_safe, s_penalty, lam)
