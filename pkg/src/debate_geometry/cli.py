"""Command-line interface: ``debate-geometry <command> [flags]``.

Exit codes: 0 success, 1 input error, 2 numerical invariant violation,
3 dynamics did not converge.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import scenarios
from .advantage import DEFAULT_BAND, debate_advantage, debate_score
from .ambiguity import is_ambiguous, limit_convergence_check, limiting_policy
from .coalition import _size_for, approximate_stop_size, build_coalition, greedy_order
from .dynamics import run_dynamics
from .errors import DebateGeometryError, KnifeEdgeError
from .game import GameSpec, solve_spe, threshold
from .report import EXIT_INPUT, EXIT_INVARIANT, EXIT_NONCONVERGENCE, RunReport, Table, fmt
from .scenario_file import ScenarioFileError, load_scenario_file, write_scenario
from .scenarios import classify_regime, min_pair_optimum, two_round_protocol
from .subspace import DEFAULT_SHARED_TOL, random_subspace, sum_subspace

INVARIANT_TOL = 1e-10
SWEEP_COLUMNS = ("seed_i", "k_a_star", "k_b_star", "eta", "delta", "lower", "upper", "regime", "min_angle", "max_angle")


class InputError(DebateGeometryError):
    pass


def _resolve_seed(args, sf=None) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    if sf is not None and sf.seed is not None:
        return sf.seed
    return 0


def _load(args):
    if not args.input:
        raise InputError("--input is required")
    return load_scenario_file(args.input)


def _pair(sf):
    if len(sf.subspaces) < 2:
        raise InputError("subspaces: need at least two models")
    (na, va), (nb, vb) = list(sf.subspaces.items())[:2]
    return na, va, nb, vb


def _preference(sf, seed):
    w = sf.resolve_preference(seed)
    if w is None:
        raise InputError("preference: missing")
    return w


def cmd_advantage(args, report: RunReport) -> None:
    sf = _load(args)
    seed = report.seed = _resolve_seed(args, sf)
    na, va, nb, vb = _pair(sf)

    if sf.scoring is not None:
        scen = scenarios.Scenario("file", va, vb, scoring=sf.scoring)
        r1, r2, score = two_round_protocol(scen)
        single = max(min_pair_optimum(va, sf.scoring), min_pair_optimum(vb, sf.scoring))
        report.add("scoring", "min_pair")
        report.add("k_a_star", min_pair_optimum(va, sf.scoring))
        report.add("k_b_star", min_pair_optimum(vb, sf.scoring))
        report.add("k_ab_star", min_pair_optimum(sum_subspace(va, vb, args.shared_tol), sf.scoring))
        report.add("two_round_score", score)
        report.add("two_round_gain", score - single)
        report.tables.append(Table("two_round_outputs", ("round",) + tuple(f"x{i}" for i in range(sf.ambient_dim)),
                                   [(1, *r1.tolist()), (2, *r2.tolist())]))
        return

    w = _preference(sf, seed)
    rep = debate_advantage(va, vb, w, args.shared_tol, args.band)
    label = classify_regime(va, vb, w, shared_tol=args.shared_tol)
    report.add("model_a", na if rep.a_index == 0 else nb)
    report.add("model_b", nb if rep.a_index == 0 else na)
    for key in ("k_a_star", "k_b_star", "k_ab_star", "eta", "delta", "lower_bound", "upper_bound"):
        report.add(key, getattr(rep, key))
    report.add("scaling_regime", rep.regime)
    report.add("knowledge_regime", label.label)
    report.add("ratio_eta_over_k", rep.ratio_eta_over_k)
    report.add("private_directions", rep.m)
    report.tables.append(Table("principal_angles", ("index", "angle"), list(enumerate(rep.angles))))
    if sf.outputs is not None:
        _add_ambiguity(sf.output_space(seed), report)

    ok = (rep.lower_bound <= rep.delta + INVARIANT_TOL
          and rep.delta <= rep.upper_bound + INVARIANT_TOL
          and abs(rep.k_ab_star ** 2 - rep.k_a_star ** 2 - rep.eta ** 2) <= INVARIANT_TOL)
    if not ok:
        report.warnings.append("bound sandwich or score identity violated")
        report.exit_code = EXIT_INVARIANT


AMBIGUITY_BETAS = (0.0, 1.0, 10.0, 50.0)


def _add_ambiguity(space, report: RunReport) -> None:
    conv = limit_convergence_check(space, AMBIGUITY_BETAS)
    report.add("ambiguous", is_ambiguous(space))
    report.add("score_gap", conv.gap)
    report.add("tv_decay_rate", conv.decay_rate)
    limit = limiting_policy(space)
    report.tables.append(Table("outputs", ("y", "score", "base_prob", "limit_prob"),
                               [(i, float(space.scores[i]), float(space.base_prob[i]), float(limit[i]))
                                for i in range(space.n)]))
    report.tables.append(Table("tempered_tv", ("beta", "tv"), list(zip(conv.betas, conv.tv))))


def _coalition_rows(names, coal, cost):
    rows = [(1, names[coal.order[0]], 0.0, 0.0, coal.scores[0], None)]
    for j, (e2, dl, score) in enumerate(zip(coal.marginal_eta_sq, coal.marginal_delta, coal.scores[1:]), start=2):
        rows.append((j, names[coal.order[j - 1]], e2, dl, score, dl - cost))
    return rows


def cmd_coalition(args, report: RunReport) -> None:
    sf = _load(args)
    seed = report.seed = _resolve_seed(args, sf)
    if args.cost < 0:
        raise InputError("--cost must be non-negative")
    models, names = sf.models(), sf.names()
    w = _preference(sf, seed)
    greedy = build_coalition(models, w, greedy_order(models, w, args.shared_tol), args.shared_tol)
    coal = build_coalition(models, w, None, args.shared_tol) if args.order == "given" else greedy

    report.add("order", args.order)
    report.add("total_score", coal.total_score)
    report.add("optimal_size", _size_for(greedy, args.cost))
    report.add("approximate_stop_size", approximate_stop_size(greedy, args.cost))
    report.tables.append(Table("coalition", ("step", "model", "eta_sq", "delta", "cumulative_score", "net_value"),
                               _coalition_rows(names, coal, args.cost)))

    if args.order == "all_permutations":
        if len(models) > 8:
            raise InputError("all_permutations supports at most 8 models")
        totals = [build_coalition(models, w, perm, args.shared_tol).total_score
                  for perm in itertools.permutations(range(len(models)))]
        dev = max(totals) - min(totals)
        report.add("permutations", len(totals))
        report.add("max_deviation", dev)
        if dev > INVARIANT_TOL:
            report.warnings.append(f"ordering invariance violated: deviation {dev:.3g}")
            report.exit_code = EXIT_INVARIANT


def cmd_dynamics(args, report: RunReport) -> None:
    sf = _load(args)
    seed = report.seed = _resolve_seed(args, sf)
    if sf.dynamics is None:
        raise InputError("dynamics: block missing")
    _, va, _, vb = _pair(sf)
    w = _preference(sf, seed)
    mode = sf.dynamics["mode"]
    gamma = args.gamma if args.gamma is not None else sf.dynamics["gamma"]
    if args.gamma is not None and mode == "cooperative" and gamma != 1.0:
        mode = "adversarial"
    max_rounds = args.max_rounds if args.max_rounds is not None else sf.dynamics["max_rounds"]
    trace = run_dynamics(va, vb, w, mode, gamma, max_rounds, args.shared_tol)
    report.add("mode", mode)
    report.add("gamma", float(gamma))
    report.add("m_initial", trace.m_initial)
    report.add("converged_at", "none" if trace.converged_at is None else trace.converged_at)
    report.add("k_ab_star", trace.k_ab_star)
    report.warnings.extend(trace.notes)
    report.tables.append(Table("trace", ("t", "k_a_star", "eta", "delta", "alignment_sq", "gamma"),
                               [(r.t, r.k_a_star, r.eta, r.delta, r.alignment_sq, r.gamma) for r in trace.rounds]))
    if trace.converged_at is None:
        report.exit_code = EXIT_NONCONVERGENCE


def cmd_game(args, report: RunReport) -> None:
    sf = _load(args)
    seed = report.seed = _resolve_seed(args, sf)
    if sf.game is None:
        raise InputError("game: block missing")
    g = sf.game
    if "r" in g:
        r = g["r"]
    else:
        _, va, _, vb = _pair(sf)
        r = debate_score(va, vb, _preference(sf, seed), args.shared_tol)
    try:
        base = GameSpec(r, g["p"], g["s"], 0.0)
    except DebateGeometryError as exc:
        raise InputError(f"game: {exc}") from None
    lam_star, lam_upper = threshold(base)
    report.add("r", r)
    report.add("lambda_star", lam_star)
    report.add("r_minus_s", lam_upper)
    rows = []
    for lam in g["lambda_grid"]:
        try:
            out = solve_spe(GameSpec(base.r, base.p, base.s, lam))
        except KnifeEdgeError:
            report.warnings.append(f"knife-edge lambda {lam!r}: indifference, row flagged")
            rows.append((lam, None, "knife_edge", None, None))
            continue
        except DebateGeometryError as exc:
            raise InputError(f"game: {exc}") from None
        rows.append((lam, out.constitutional_score, out.regime, out.action_a, out.action_b_after_g))
    report.tables.append(Table("lambda_sweep", ("lambda", "score", "regime", "action_a", "action_b_after_g"), rows))


def _sweep_instance(d, k, seed_i, shared_tol, band):
    rng = np.random.default_rng(seed_i)
    va = random_subspace(d, k, rng)
    vb = random_subspace(d, k, rng)
    w = rng.standard_normal(d)
    w = w / np.linalg.norm(w)
    rep = debate_advantage(va, vb, w, shared_tol, band)
    violated = not (rep.lower_bound <= rep.delta + INVARIANT_TOL and rep.delta <= rep.upper_bound + INVARIANT_TOL)
    row = (seed_i, rep.k_a_star, rep.k_b_star, rep.eta, rep.delta, rep.lower_bound, rep.upper_bound,
           rep.regime, min(rep.angles), max(rep.angles))
    return row, violated


def run_sweep(d: int, k: int, n_instances: int, seed: int, jobs: int = 1,
              shared_tol: float = DEFAULT_SHARED_TOL, band: float = DEFAULT_BAND):
    """Rows for instances seed, seed+1, ...; order is independent of ``jobs``."""
    if not 1 <= k <= d:
        raise InputError(f"need 1 <= k <= d, got k={k}, d={d}")
    if n_instances < 1:
        raise InputError("n_instances must be positive")
    seeds = range(seed, seed + n_instances)
    work = lambda s: _sweep_instance(d, k, s, shared_tol, band)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, seeds))
    else:
        results = [work(s) for s in seeds]
    return [r for r, _ in results], sum(v for _, v in results)


def cmd_sweep(args, report: RunReport) -> None:
    report.seed = _resolve_seed(args)
    rows, violations = run_sweep(args.d, args.k, args.n_instances, report.seed, args.jobs, args.shared_tol, args.band)
    report.add("d", args.d)
    report.add("k", args.k)
    report.add("n_instances", args.n_instances)
    report.add("bound_violations", violations)
    report.add("mean_delta", math.fsum(r[4] for r in rows) / len(rows))
    report.tables.append(Table("sweep", SWEEP_COLUMNS, rows))
    if violations:
        report.warnings.append(f"{violations} bound-sandwich violations")
        report.exit_code = EXIT_INVARIANT


def cmd_scenario_export(args, report: RunReport) -> None:
    report.seed = _resolve_seed(args)
    out = Path(args.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    names = list(scenarios.BUILTIN) if args.name == "all" else [args.name]
    rows = []
    for name in names:
        path = out / f"{name}.json"
        write_scenario(scenarios.BUILTIN[name](), path, report.seed)
        rows.append((name, str(path)))
    report.tables.append(Table("exported", ("name", "path"), rows))


COMMANDS = {
    "advantage": cmd_advantage,
    "coalition": cmd_coalition,
    "dynamics": cmd_dynamics,
    "game": cmd_game,
    "sweep": cmd_sweep,
    "scenario-export": cmd_scenario_export,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="scenario JSON file")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--shared-tol", type=float, default=DEFAULT_SHARED_TOL)
    common.add_argument("--band", type=float, default=DEFAULT_BAND)
    common.add_argument("--format", choices=("text", "csv"), default="text")

    parser = argparse.ArgumentParser(prog="debate-geometry", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("advantage", parents=[common], help="two-model debate advantage")
    p = sub.add_parser("coalition", parents=[common], help="n-model coalition analysis")
    p.add_argument("--cost", type=float, default=0.0)
    p.add_argument("--order", choices=("greedy", "given", "all_permutations"), default="greedy")
    p = sub.add_parser("dynamics", parents=[common], help="round-based revelation dynamics")
    p.add_argument("--gamma", type=float)
    p.add_argument("--max-rounds", type=int)
    sub.add_parser("game", parents=[common], help="adversarial debate game")
    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo sweep over random subspaces")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-instances", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p = sub.add_parser("scenario-export", parents=[common], help="write built-in scenarios to a directory")
    p.add_argument("--name", choices=("all", *scenarios.BUILTIN), default="all")
    return parser


def run(argv=None) -> tuple:
    """Execute a command; returns (report, rendered output, parsed args)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    report = RunReport(command=" ".join(argv))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            COMMANDS[args.command](args, report)
        except (DebateGeometryError, ScenarioFileError) as exc:
            report.warnings.append(f"error: {exc}")
            report.exit_code = EXIT_INPUT
    report.warnings[:0] = [str(w.message) for w in caught]
    rendered = report.render(args.format)
    if args.output and args.command != "scenario-export" and report.exit_code != EXIT_INPUT:
        Path(args.output).write_text(rendered)
    return report, rendered, args


def main(argv=None) -> int:
    report, rendered, args = run(argv)
    if report.exit_code == EXIT_INPUT:
        for w in report.warnings:
            print(w, file=sys.stderr)
        return report.exit_code
    if args.output and args.command != "scenario-export":
        summary = [f"{k} = {fmt(v)}" for k, v in report.summary]
        print("\n".join([f"wrote {args.output}", *summary]))
    else:
        sys.stdout.write(rendered)
        if args.format == "csv":
            for w in report.warnings:
                print(f"warning: {w}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
