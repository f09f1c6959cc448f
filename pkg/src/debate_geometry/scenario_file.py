"""JSON scenario files.

Example::

    {
      "ambient_dim": 3,
      "subspaces": {"A": [[1, 0, 0], [0, 1, 0]], "B": [[1, 0, 0], [0, 0, 1]]},
      "preference": [0, 0.7071067811865476, 0.7071067811865476],
      "scoring": {"type": "linear"},
      "game": {"p": 0.5, "s": 0.1, "lambda_grid": [0.1, 0.3, 0.6]},
      "dynamics": {"mode": "cooperative", "max_rounds": 10},
      "outputs": {"representations": [[1, 0, 0], [0, 1, 1]], "base_prob": [0.5, 0.5]},
      "seed": 0
    }

Subspaces are lists of basis row vectors.  ``preference`` may be the string
"random", in which case it is drawn from the resolved seed.  A non-unit
preference is normalised with a warning.  ``outputs`` describes a finite
output space either by representations (scored with the preference) or by
a ``scores`` list; ``base_prob`` defaults to uniform.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ambiguity import FiniteOutputSpace
from .errors import DebateGeometryError, NormalizationWarning
from .scenarios import MinPairScoring, Scenario
from .subspace import Subspace, orthonormalize

_UNIT_TOL = 1e-10


class ScenarioFileError(DebateGeometryError):
    pass


@dataclass(eq=False)
class ScenarioFile:
    ambient_dim: int
    subspaces: dict
    preference: object = None
    scoring: MinPairScoring | None = None
    game: dict | None = None
    dynamics: dict | None = None
    seed: int | None = None
    source: str = field(default="<memory>")
    outputs: dict | None = None

    def names(self) -> list:
        return list(self.subspaces)

    def models(self) -> list:
        return list(self.subspaces.values())

    def resolve_preference(self, seed: int) -> np.ndarray | None:
        if self.preference is None:
            return None
        if isinstance(self.preference, str):
            rng = np.random.default_rng(seed)
            w = rng.standard_normal(self.ambient_dim)
            return w / np.linalg.norm(w)
        return self.preference

    def output_space(self, seed: int) -> FiniteOutputSpace | None:
        if self.outputs is None:
            return None
        prob = self.outputs.get("base_prob")
        if "scores" in self.outputs:
            scores = self.outputs["scores"]
            if prob is None:
                prob = np.full(scores.size, 1.0 / scores.size)
            return FiniteOutputSpace(scores, prob)
        w = self.resolve_preference(seed)
        if w is None:
            raise ScenarioFileError("outputs.representations: needs a preference to score them")
        try:
            return FiniteOutputSpace.from_linear(self.outputs["representations"], w, prob)
        except DebateGeometryError as exc:
            raise ScenarioFileError(f"outputs: {exc}") from None


def _vector(value, d: int, key: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ScenarioFileError(f"{key}: expected a list of {d} numbers")
    if len(value) != d:
        raise ScenarioFileError(f"{key}: expected {d} entries, got {len(value)}")
    for x in value:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ScenarioFileError(f"{key}: entries must be finite numbers, got {x!r}")
    return np.array(value, dtype=float)


def _number(block: dict, name: str, key: str, default=None, integer=False):
    if name not in block:
        if default is None:
            raise ScenarioFileError(f"{key}.{name}: missing")
        return default
    x = block[name]
    ok = isinstance(x, int) if integer else isinstance(x, (int, float))
    if isinstance(x, bool) or not ok:
        raise ScenarioFileError(f"{key}.{name}: expected {'an integer' if integer else 'a number'}, got {x!r}")
    return x


def _outputs(block, d: int) -> dict:
    if not isinstance(block, dict):
        raise ScenarioFileError("outputs: expected an object")
    if ("scores" in block) == ("representations" in block):
        raise ScenarioFileError("outputs: give exactly one of scores or representations")
    out = {}
    if "scores" in block:
        scores = block["scores"]
        if not isinstance(scores, list) or not scores:
            raise ScenarioFileError("outputs.scores: expected a non-empty list")
        out["scores"] = _vector(scores, len(scores), "outputs.scores")
        n = len(scores)
    else:
        rows = block["representations"]
        if not isinstance(rows, list) or not rows:
            raise ScenarioFileError("outputs.representations: expected a non-empty list of rows")
        out["representations"] = np.array([_vector(r, d, f"outputs.representations[{i}]") for i, r in enumerate(rows)])
        n = len(rows)
    if "base_prob" in block:
        prob = _vector(block["base_prob"], n, "outputs.base_prob")
        if np.any(prob < 0) or abs(prob.sum() - 1.0) > 1e-10:
            raise ScenarioFileError("outputs.base_prob: must be non-negative and sum to 1")
        out["base_prob"] = prob
    return out


def parse_scenario(doc, source: str = "<memory>") -> ScenarioFile:
    if not isinstance(doc, dict):
        raise ScenarioFileError("top level must be a JSON object")
    d = doc.get("ambient_dim")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ScenarioFileError(f"ambient_dim: expected a positive integer, got {d!r}")

    raw = doc.get("subspaces")
    if not isinstance(raw, dict) or not raw:
        raise ScenarioFileError("subspaces: expected a non-empty object of name -> rows")
    subspaces = {}
    for name, rows in raw.items():
        key = f"subspaces.{name}"
        if not isinstance(rows, list) or not rows:
            raise ScenarioFileError(f"{key}: expected a non-empty list of rows")
        mat = np.column_stack([_vector(r, d, f"{key}[{i}]") for i, r in enumerate(rows)])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                sub = orthonormalize(mat)
            except DebateGeometryError as exc:
                raise ScenarioFileError(f"{key}: {exc}") from None
        for wmsg in caught:
            warnings.warn(f"{key}: {wmsg.message}", wmsg.category, stacklevel=2)
        subspaces[name] = sub

    pref = doc.get("preference")
    if pref is not None and pref != "random":
        w = _vector(pref, d, "preference")
        nrm = np.linalg.norm(w)
        if nrm == 0:
            raise ScenarioFileError("preference: zero vector")
        if abs(nrm - 1) > _UNIT_TOL:
            warnings.warn(f"preference: norm {nrm:.17g} normalised to 1", NormalizationWarning, stacklevel=2)
            w = w / nrm
        pref = w
    elif pref is not None and not isinstance(pref, str):
        raise ScenarioFileError("preference: expected a vector or \"random\"")

    scoring = None
    sblock = doc.get("scoring", {"type": "linear"})
    if not isinstance(sblock, dict):
        raise ScenarioFileError("scoring: expected an object")
    stype = sblock.get("type", "linear")
    if stype == "min_pair":
        scoring = MinPairScoring(_vector(sblock.get("axis_a"), d, "scoring.axis_a"),
                                 _vector(sblock.get("axis_b"), d, "scoring.axis_b"))
    elif stype != "linear":
        raise ScenarioFileError(f"scoring.type: unknown scoring {stype!r}")

    game = doc.get("game")
    if game is not None:
        if not isinstance(game, dict):
            raise ScenarioFileError("game: expected an object")
        g = {"p": _number(game, "p", "game"), "s": _number(game, "s", "game")}
        if "r" in game:
            g["r"] = _number(game, "r", "game")
        if "lambda_grid" in game:
            grid = game["lambda_grid"]
            if not isinstance(grid, list) or not grid:
                raise ScenarioFileError("game.lambda_grid: expected a non-empty list")
            g["lambda_grid"] = [float(_number({"x": x}, "x", f"game.lambda_grid[{i}]")) for i, x in enumerate(grid)]
        elif "lambda" in game:
            g["lambda_grid"] = [float(_number(game, "lambda", "game"))]
        else:
            raise ScenarioFileError("game: needs lambda or lambda_grid")
        game = g

    dyn = doc.get("dynamics")
    if dyn is not None:
        if not isinstance(dyn, dict):
            raise ScenarioFileError("dynamics: expected an object")
        mode = dyn.get("mode", "cooperative")
        if mode not in ("cooperative", "adversarial"):
            raise ScenarioFileError(f"dynamics.mode: unknown mode {mode!r}")
        dyn = {
            "mode": mode,
            "gamma": float(_number(dyn, "gamma", "dynamics", 1.0)),
            "max_rounds": _number(dyn, "max_rounds", "dynamics", 100, integer=True),
        }

    outputs = doc.get("outputs")
    if outputs is not None:
        outputs = _outputs(outputs, d)

    seed = doc.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ScenarioFileError(f"seed: expected an integer, got {seed!r}")

    return ScenarioFile(d, subspaces, pref, scoring, game, dyn, seed, source, outputs)


def load_scenario_file(path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioFileError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_scenario(doc, str(path))


def _floats(x) -> list:
    # adding 0.0 turns -0.0 into 0.0
    return [float(v) + 0.0 for v in x]


def _rows(sub: Subspace) -> list:
    return [_floats(col) for col in sub.basis.T]


def scenario_to_dict(scenario: Scenario, seed: int = 0) -> dict:
    doc = {
        "name": scenario.name,
        "ambient_dim": scenario.va.ambient_dim,
        "subspaces": {"A": _rows(scenario.va), "B": _rows(scenario.vb)},
    }
    if scenario.w is not None:
        doc["preference"] = _floats(scenario.w)
    if scenario.scoring is None:
        doc["scoring"] = {"type": "linear"}
    else:
        doc["scoring"] = {
            "type": "min_pair",
            "axis_a": _floats(scenario.scoring.axis_a),
            "axis_b": _floats(scenario.scoring.axis_b),
        }
    doc["seed"] = seed
    return doc


def write_scenario(scenario: Scenario, path, seed: int = 0) -> None:
    # json writes floats with repr, which round-trips exactly
    Path(path).write_text(json.dumps(scenario_to_dict(scenario, seed), indent=2) + "\n")
