import math

import numpy as np
import pytest

from debate_geometry.advantage import debate_score
from debate_geometry.dynamics import (
    TRACE_COLUMNS,
    adversarial_step,
    cooperative_step,
    run_dynamics,
)
from debate_geometry.errors import DebateGeometryError
from debate_geometry.subspace import orthonormalize, random_subspace

from .helpers import random_pair, unit

E3 = np.eye(3)


def m2_example():
    return orthonormalize(E3[:, [0]]), orthonormalize(E3[:, [1, 2]]), unit([1, 1, 1])


def uniform_instance(m):
    e = np.eye(m + 2)
    va = orthonormalize(e[:, [0]])
    vb = orthonormalize(e[:, 1:m + 1])
    return va, vb, unit(np.r_[1.0, np.ones(m), 0.5])


class TestCooperativeStep:
    def test_tie_breaks_to_e2(self):
        va, vb, w = m2_example()
        step = cooperative_step(va, vb, w)
        np.testing.assert_allclose(step.revealed, E3[1], atol=1e-15)
        assert step.alignment_sq == pytest.approx(1 / 3, abs=1e-15)
        assert step.va.k == 2

    def test_nested_converged(self):
        va = orthonormalize(E3[:, [0, 1]])
        step = cooperative_step(va, orthonormalize(E3[:, [0]]), unit([1, 1, 1]))
        assert step.converged and step.revealed is None and step.va is va

    def test_single_private_direction(self):
        step = cooperative_step(orthonormalize(E3[:, [0]]), orthonormalize(E3[:, [1]]), E3[1])
        np.testing.assert_allclose(step.revealed, E3[1], atol=1e-15)
        assert step.alignment_sq == pytest.approx(1.0)


class TestAdversarialStep:
    def test_gamma_one_matches_cooperative(self):
        va, vb, w = m2_example()
        a = adversarial_step(va, vb, w, 1.0)
        c = cooperative_step(va, vb, w)
        np.testing.assert_allclose(a.revealed, c.revealed, atol=1e-15)
        assert a.alignment_sq == c.alignment_sq

    def test_gamma_half(self):
        va, vb, w = m2_example()
        step = adversarial_step(va, vb, w, 0.5)
        assert step.alignment_sq == pytest.approx(1 / 6, abs=1e-12)
        assert np.linalg.norm(step.revealed) == pytest.approx(1.0, abs=1e-14)
        # revealed direction lies in V_B and is orthogonal to V_A
        assert abs(step.revealed[0]) < 1e-15
        trace = run_dynamics(va, vb, w, "adversarial", 0.5, max_rounds=1)
        eta0, eta1 = trace.rounds[0].eta, trace.rounds[1].eta
        assert eta0**2 - eta1**2 == pytest.approx(1 / 6, abs=1e-12)

    def test_gamma_zero_reveals_orthogonal_direction(self):
        va, vb, w = m2_example()
        step = adversarial_step(va, vb, w, 0.0)
        assert step.revealed is not None
        assert abs(w @ step.revealed) < 1e-15

    def test_gamma_zero_single_direction_withheld(self):
        step = adversarial_step(orthonormalize(E3[:, [0]]), orthonormalize(E3[:, [1]]), unit([1, 1, 0]), 0.0)
        assert step.revealed is None and not step.converged

    def test_single_direction_partial_gamma_reveals_fully(self):
        step = adversarial_step(orthonormalize(E3[:, [0]]), orthonormalize(E3[:, [1]]), unit([1, 1, 0]), 0.3)
        assert step.gamma == 1.0
        assert step.alignment_sq == pytest.approx(0.5)

    def test_ratio_exact_on_random_instances(self):
        for seed in range(100):
            va, vb, w = random_pair(seed, d=10, k=4)
            coop = cooperative_step(va, vb, w)
            for g in (0.1, 0.5, 0.9):
                step = adversarial_step(va, vb, w, g)
                assert step.alignment_sq == pytest.approx(g * coop.alignment_sq, abs=1e-12)

    def test_invalid_gamma(self):
        va, vb, w = m2_example()
        with pytest.raises(DebateGeometryError):
            adversarial_step(va, vb, w, 1.5)


class TestRunDynamics:
    def test_m2_example(self):
        va, vb, w = m2_example()
        tr = run_dynamics(va, vb, w)
        assert tr.converged_at == 2 and tr.m_initial == 2
        assert tr.rounds[-1].k_a_star == pytest.approx(1.0, abs=1e-12)
        assert [r.alignment_sq for r in tr.rounds[:2]] == pytest.approx([1 / 3, 1 / 3], abs=1e-15)
        np.testing.assert_allclose(tr.rounds[1].revealed_direction, E3[2], atol=1e-15)

    def test_identical_subspaces(self):
        v = random_subspace(5, 2, 0)
        tr = run_dynamics(v, v, unit(np.ones(5)))
        assert tr.converged_at == 0 and len(tr.rounds) == 1

    def test_nonconvergence_reported(self):
        va, vb, w = m2_example()
        tr = run_dynamics(va, vb, w, "adversarial", 0.0, max_rounds=5)
        assert tr.converged_at is None
        assert len(tr.rounds) == 6
        assert any("withheld" in n for n in tr.notes)

    def test_invalid_args(self):
        va, vb, w = m2_example()
        with pytest.raises(DebateGeometryError):
            run_dynamics(va, vb, w, max_rounds=0)
        with pytest.raises(DebateGeometryError):
            run_dynamics(va, vb, w, mode="chaotic")

    @pytest.mark.parametrize("m", [1, 2, 3, 5])
    def test_uniform_loading_linear_decay(self, m):
        va, vb, w = uniform_instance(m)
        tr = run_dynamics(va, vb, w)
        eta0 = tr.rounds[0].eta
        assert tr.converged_at == m
        for r in tr.rounds:
            assert r.eta**2 == pytest.approx(eta0**2 * (m - r.t) / m, abs=1e-9)

    @pytest.mark.parametrize("seed", range(40))
    def test_trace_invariants(self, seed):
        va, vb, w = random_pair(seed, d=12, k=int(np.random.default_rng(seed).integers(1, 6)))
        tr = run_dynamics(va, vb, w)
        rounds = tr.rounds
        assert tr.converged_at is not None and tr.converged_at <= tr.m_initial
        k_ab = debate_score(va, vb, w)
        eta0 = rounds[0].eta
        m = tr.m_initial
        for a, b in zip(rounds, rounds[1:]):
            assert b.k_a_star > a.k_a_star or a.eta < 1e-8
            assert b.eta**2 == pytest.approx(a.eta**2 - a.alignment_sq, abs=1e-9)
            drop = a.alignment_sq / (a.k_a_star + b.k_a_star)
            assert a.delta - b.delta == pytest.approx(drop, abs=1e-9)
        for r in rounds:
            assert r.delta == pytest.approx(k_ab - r.k_a_star, abs=1e-10)
            assert r.eta**2 <= eta0**2 * max(m - r.t, 0) / m + 1e-9
        assert sum(r.alignment_sq for r in rounds) == pytest.approx(eta0**2, abs=1e-9)

    def test_k_ab_constant_across_rounds(self):
        va, vb, w = random_pair(9, d=10, k=3)
        tr = run_dynamics(va, vb, w)
        a = va
        for r in tr.rounds:
            assert debate_score(a, vb, w) == pytest.approx(tr.k_ab_star, abs=1e-10)
            if r.revealed_direction is not None:
                a = orthonormalize(np.column_stack([a.basis, r.revealed_direction]))

    def test_csv_columns(self):
        va, vb, w = m2_example()
        lines = run_dynamics(va, vb, w).to_csv().splitlines()
        assert lines[0] == ",".join(TRACE_COLUMNS)
        assert len(lines) == 4
        assert lines[1].split(",")[0] == "0"

    def test_adversarial_bound(self):
        va, vb, w = random_pair(3, d=14, k=5)
        tr = run_dynamics(va, vb, w, "adversarial", 0.5)
        m = tr.m_initial
        bound = tr.rounds[0].eta ** 2
        for r in tr.rounds:
            assert r.eta**2 <= bound + 1e-9
            bound = bound * (1 - 0.5 / (m - r.t)) if r.t < m else 0.0
        assert tr.converged_at is not None and tr.converged_at <= m
        assert math.isfinite(tr.rounds[-1].eta)
