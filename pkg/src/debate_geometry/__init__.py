"""Geometry of debate advantage between model representation subspaces."""

from .advantage import (
    AdvantageReport,
    debate_advantage,
    debate_score,
    isotropic_eta,
    preference_direction,
    private_info_value,
    regime_classify,
    rlaif_score,
)
from .ambiguity import (
    FiniteOutputSpace,
    ambiguity_set,
    limit_convergence_check,
    limiting_policy,
    tempered_policy,
)
from .coalition import (
    Coalition,
    build_coalition,
    diminishing_schedule,
    greedy_coalition,
    greedy_order,
    optimal_coalition_size,
)
from .dynamics import DynamicsTrace, adversarial_step, cooperative_step, run_dynamics
from .errors import DebateGeometryError, DimensionMismatchError, KnifeEdgeError, RankZeroError
from .game import GameSpec, SPEOutcome, game_from_geometry, lambda_sweep, solve_spe, threshold
from .scenarios import (
    Scenario,
    classify_regime,
    compositional_construction,
    one_sided_construction,
    two_round_protocol,
)
from .subspace import (
    PrincipalDecomposition,
    Subspace,
    orthonormalize,
    principal_decomposition,
    project,
    random_subspace,
    sum_subspace,
)

__version__ = "0.1.0"
