import math

import numpy as np
import pytest

from debate_geometry.advantage import debate_advantage
from debate_geometry.errors import DebateGeometryError
from debate_geometry.scenarios import (
    BUILTIN,
    COMPOSITIONAL,
    ONE_SIDED,
    SHARED,
    MinPairScoring,
    Scenario,
    classify_regime,
    compositional_construction,
    min_pair_optimum,
    one_sided_construction,
    two_round_protocol,
)
from debate_geometry.subspace import orthonormalize, random_subspace, sum_subspace

from .helpers import random_pair, unit

R2 = math.sqrt(2)


def brute_force_min_pair(v, scoring, n=20000, seed=0):
    """Best sampled min-score over unit vectors of V (the optimum sits on the sphere)."""
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((n, v.k))
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    h = coeffs @ v.basis.T
    return float(np.max(np.minimum(h @ scoring.axis_a, h @ scoring.axis_b)))


class TestOneSided:
    def test_report_values(self):
        sc = one_sided_construction()
        rep = debate_advantage(sc.va, sc.vb, sc.w)
        for key in ("k_a_star", "k_b_star", "k_ab_star", "delta"):
            assert getattr(rep, key) == pytest.approx(sc.expected[key], abs=1e-12)
        assert rep.angles == pytest.approx(sc.expected["angles"], abs=1e-12)

    def test_label_is_compositional(self):
        sc = one_sided_construction()
        label = classify_regime(sc.va, sc.vb, sc.w)
        assert label.label == COMPOSITIONAL
        assert label.eta_b_over_a == pytest.approx(1 / R2)
        assert label.eta_a_over_b == pytest.approx(1 / R2)
        assert label.w_perp_norm == pytest.approx(0.0, abs=1e-15)


class TestCompositional:
    def test_single_model_optima_zero(self):
        sc = compositional_construction()
        assert min_pair_optimum(sc.va, sc.scoring) == 0.0
        assert min_pair_optimum(sc.vb, sc.scoring) == 0.0

    def test_two_round(self):
        sc = compositional_construction()
        r1, r2, score = two_round_protocol(sc)
        e = np.eye(4)
        np.testing.assert_allclose(r1, e[0], atol=1e-15)
        np.testing.assert_allclose(r2, (e[0] + e[2]) / R2, atol=1e-15)
        assert score == pytest.approx(1 / R2, abs=1e-12)

    def test_joint_optimum_matches_brute_force(self):
        sc = compositional_construction()
        both = sum_subspace(sc.va, sc.vb)
        exact = min_pair_optimum(both, sc.scoring)
        assert exact == pytest.approx(1 / R2, abs=1e-12)
        sampled = brute_force_min_pair(both, sc.scoring)
        assert exact - 1e-2 < sampled <= exact + 1e-12

    def test_degenerate_axis_b_in_va(self):
        e = np.eye(3)
        va = orthonormalize(e[:, [0, 1]])
        sc = Scenario("deg", va, va, scoring=MinPairScoring(e[0], e[1]))
        _, _, score = two_round_protocol(sc)
        assert score == pytest.approx(1 / R2, abs=1e-12)

    def test_linear_scenario_rejected(self):
        with pytest.raises(DebateGeometryError):
            two_round_protocol(one_sided_construction())

    def test_axis_outside_span_rejected(self):
        sc = compositional_construction()
        bad = Scenario("bad", sc.vb, sc.va, scoring=sc.scoring)
        with pytest.raises(DebateGeometryError):
            two_round_protocol(bad)

    @pytest.mark.parametrize("seed", range(20))
    def test_min_pair_optimum_against_sampling(self, seed):
        rng = np.random.default_rng(seed)
        v = random_subspace(5, int(rng.integers(1, 4)), rng)
        scoring = MinPairScoring(unit(rng.standard_normal(5)), unit(rng.standard_normal(5)))
        exact = min_pair_optimum(v, scoring)
        sampled = brute_force_min_pair(v, scoring, seed=seed)
        # sampled unit vectors can only do worse; they may be negative when the optimum is 0 at h = 0
        assert sampled <= exact + 1e-12
        assert exact - 5e-2 < max(sampled, 0.0)


class TestClassify:
    def test_identical_is_shared(self):
        v = random_subspace(6, 3, 1)
        assert classify_regime(v, v, unit(np.ones(6))).label == SHARED

    def test_extension_is_one_sided(self):
        e = np.eye(4)
        va = orthonormalize(e[:, [0, 1]])
        vb = orthonormalize(e[:, [0, 1, 2]])
        label = classify_regime(va, vb, unit([1, 1, 1, 0]))
        assert label.label == ONE_SIDED and label.side == "b"
        swapped = classify_regime(vb, va, unit([1, 1, 1, 0]))
        assert swapped.label == ONE_SIDED and swapped.side == "a"

    def test_symmetric_up_to_side(self):
        for seed in range(100):
            va, vb, w = random_pair(seed)
            a, b = classify_regime(va, vb, w), classify_regime(vb, va, w)
            assert a.label == b.label
            assert a.eta_b_over_a == pytest.approx(b.eta_a_over_b, abs=1e-12)


def test_builtin_registry():
    assert set(BUILTIN) == {"one_sided", "compositional"}
    assert BUILTIN["compositional"]().scoring is not None
