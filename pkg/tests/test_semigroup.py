import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import scalar_root
from r0fde.delay_op import DelayLinearOperator, HistorySegment
from r0fde.errors import BlowUp, DelayExceedsHistory, NotCooperative, NotStable
from r0fde.semigroup import (
    DelayRhs,
    aligned_step,
    integrate,
    linear_rhs,
    monodromy_radius,
    solution_operator,
    spectral_mapping_check,
    verify_vhat_inverse,
)
from r0fde.tick import linearize


def scalar(a0, c, tau=1.0):
    return DelayLinearOperator([[a0]], [(tau, [[c]])])


def decay():
    return DelayLinearOperator([[-1.0]])


class TestIntegrate:
    def test_zero_dynamics(self):
        L = DelayLinearOperator(np.zeros((2, 2)), [(1.0, np.zeros((2, 2)))])
        traj = integrate(linear_rhs(L), HistorySegment.constant([3.0, -1.0], 1.0, 8), 5.0, 0.1)
        assert np.allclose(traj.states, [3.0, -1.0])

    def test_exponential(self):
        traj = integrate(linear_rhs(decay()), HistorySegment.constant([1.0], 0.0, 0), 1.0, 0.01)
        assert traj.states[-1, 0] == pytest.approx(math.exp(-1), abs=1e-6)

    def test_method_of_steps(self):
        # u' = u(t-1), u = 1 on [-1, 0]: u = 1 + t on [0, 1], then 2 + (t-1) + (t-1)^2/2 on [1, 2]
        L = DelayLinearOperator([[0.0]], [(1.0, [[1.0]])])
        traj = integrate(linear_rhs(L), HistorySegment.constant([1.0], 1.0, 16), 2.0, 0.05)
        assert traj.at(1.0)[0] == pytest.approx(2.0, abs=1e-12)
        assert traj.at(1.5)[0] == pytest.approx(2.625, abs=1e-10)
        assert traj.states[-1, 0] == pytest.approx(3.5, abs=1e-10)

    def test_rk4_order(self):
        err = []
        for h in (0.1, 0.05, 0.025):
            traj = integrate(linear_rhs(decay()), HistorySegment.constant([1.0], 0.0, 0), 1.0, h)
            err.append(abs(traj.states[-1, 0] - math.exp(-1)))
        assert err[0] / err[1] >= 14 and err[1] / err[2] >= 14

    def test_delayed_order(self):
        # fourth order also with history lookups: compare against a fine reference
        L = scalar(-1.0, 0.5, 0.7)
        phi = HistorySegment.from_function(lambda th: [np.cos(th)], 0.7, 512)
        ref = integrate(linear_rhs(L), phi, 3.5, 0.7 / 256).states[-1, 0]
        e1 = abs(integrate(linear_rhs(L), phi, 3.5, 0.7 / 8).states[-1, 0] - ref)
        e2 = abs(integrate(linear_rhs(L), phi, 3.5, 0.7 / 16).states[-1, 0] - ref)
        assert e1 / e2 >= 12

    def test_dense_output_matches_nodes(self):
        traj = integrate(linear_rhs(scalar(-1, 0.5)), HistorySegment.constant([1.0], 1.0, 8), 2.0, 0.1)
        for k in (0, 5, 13):
            assert traj.at(traj.t[k])[0] == pytest.approx(traj.states[k, 0])

    def test_dense_output_in_history(self):
        phi = HistorySegment.from_function(lambda th: [th], 1.0, 8)
        traj = integrate(linear_rhs(scalar(-1, 0.5)), phi, 1.0, 0.1)
        assert traj.at(-0.5)[0] == pytest.approx(-0.5)

    def test_step_aligned_to_delay(self):
        assert aligned_step(0.3, (1.0,)) == pytest.approx(0.25)
        assert aligned_step(0.3, ()) == 0.3

    def test_blowup(self):
        with pytest.raises(BlowUp):
            integrate(linear_rhs(DelayLinearOperator([[50.0]])), HistorySegment.constant([1.0], 0.0, 0), 100.0, 0.1)

    def test_short_history(self):
        with pytest.raises(DelayExceedsHistory):
            integrate(linear_rhs(scalar(-1, 1, 2.0)), HistorySegment.constant([1.0], 1.0, 8), 1.0, 0.1)

    def test_nonlinear_rhs(self):
        # logistic u' = u (1 - u): u(t) = 1 / (1 + e^{-t}) from u(0) = 1/2
        rhs = DelayRhs(1, (), lambda u, lag: u * (1 - u))
        traj = integrate(rhs, HistorySegment.constant([0.5], 0.0, 0), 2.0, 0.01)
        assert traj.states[-1, 0] == pytest.approx(1 / (1 + math.exp(-2)), abs=1e-9)

    def test_csv(self, tmp_path):
        traj = integrate(linear_rhs(decay()), HistorySegment.constant([1.0], 0.0, 0), 1.0, 0.25)
        path = tmp_path / "out.csv"
        traj.to_csv(path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["t", "u1"]
        assert len(rows) == 6
        assert float(rows[-1][0]) == 1.0

    def test_batched_states(self, rng):
        L = scalar(-1.0, 0.8)
        cols = rng.normal(size=(9, 1, 3))
        batched = integrate(linear_rhs(L), HistorySegment(1.0, cols), 2.0, 0.125).states[-1]
        for k in range(3):
            single = integrate(linear_rhs(L), HistorySegment(1.0, cols[:, :, k]), 2.0, 0.125).states[-1]
            assert np.allclose(batched[:, k], single)


class TestSolutionOperator:
    def test_zero_system(self, rng):
        op = solution_operator(DelayLinearOperator([[0.0]], [(1.0, [[0.0]])]), 1.0, 16)
        phi = HistorySegment(1.0, rng.normal(size=(17, 1)))
        assert np.allclose(op.apply(phi).values, phi.values[-1])

    def test_decay(self):
        op = solution_operator(decay(), 1.0, 32, tau=1.0)
        out = op.apply(HistorySegment.constant([1.0], 1.0, 32))
        assert np.allclose(out.values[:, 0], np.exp(-(1 + out.grid)), atol=1e-6)

    def test_additive(self, rng):
        op = solution_operator(scalar(-1.0, 0.7), 1.0, 16)
        phi = HistorySegment(1.0, rng.normal(size=(17, 1)))
        psi = HistorySegment(1.0, rng.normal(size=(17, 1)))
        total = op.apply(HistorySegment(1.0, phi.values + psi.values)).values
        assert np.allclose(total, op.apply(phi).values + op.apply(psi).values, atol=1e-8)

    def test_matrix_matches_apply(self, rng):
        L = DelayLinearOperator([[-1.0, 0.2], [0.1, -0.5]], [(1.0, [[0.3, 0], [0.2, 0.1]])])
        op = solution_operator(L, 1.5, 8)
        phi = HistorySegment(1.0, rng.normal(size=(9, 2)))
        assert np.allclose(op.matrix @ phi.values.ravel(), op.apply(phi).values.ravel())

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            solution_operator(decay(), 1.0, 4)
        with pytest.raises(DelayExceedsHistory):
            solution_operator(scalar(-1, 1, 2.0), 1.0, 16, tau=1.0)


class TestMonodromy:
    def test_decay(self):
        r = monodromy_radius(solution_operator(decay(), 1.0, 64, tau=1.0))
        assert r == pytest.approx(math.exp(-1), abs=1e-4)

    def test_identity(self):
        r = monodromy_radius(solution_operator(DelayLinearOperator([[0.0]]), 1.0, 16, tau=1.0))
        assert r == 1.0

    def test_critical(self):
        r = monodromy_radius(solution_operator(scalar(-1.0, 1.0), 1.0, 128))
        assert r == pytest.approx(1.0, abs=1e-3)

    def test_dense_matrix_input(self):
        assert monodromy_radius(np.diag([0.5, 0.25])) == pytest.approx(0.5)


class TestSpectralMapping:
    def test_no_delay(self):
        chk = spectral_mapping_check(decay(), t0=1.0, n=32, tau=1.0)
        assert chk.rhs == pytest.approx(math.exp(-1))
        assert chk.gap < 1e-6

    def test_critical(self):
        chk = spectral_mapping_check(scalar(-1.0, 1.0), n=64)
        assert chk.rhs == pytest.approx(1.0, abs=1e-9)
        assert chk.gap < 1e-9

    def test_decaying_scalar(self):
        chk = spectral_mapping_check(scalar(-2.0, 1.0), n=64)
        assert chk.rhs == pytest.approx(math.exp(scalar_root(-2.0, 1.0) * chk.t0), abs=1e-9)
        assert chk.gap < 1e-3 and chk.gap_refined < chk.gap

    def test_requires_cooperative(self):
        with pytest.raises(NotCooperative):
            spectral_mapping_check(scalar(-1.0, -0.5))

    @settings(max_examples=10, deadline=None)
    @given(st.floats(-3, 0.5), st.floats(0, 2), st.floats(0.5, 2))
    def test_scalar_family(self, a0, c, tau):
        chk = spectral_mapping_check(scalar(a0, c, tau), n=32)
        assert chk.gap <= 1e-3 * max(1.0, chk.rhs)


class TestVhatInverse:
    def test_instant(self):
        chk = verify_vhat_inverse(DelayLinearOperator([[1.0]]), [1.0])
        assert chk.exact[0] == 1.0
        assert chk.gap < 1e-9

    def test_zero_forcing(self, tick):
        chk = verify_vhat_inverse(linearize(tick).V, np.zeros(4))
        assert np.all(chk.numeric == 0) and np.all(chk.exact == 0)

    def test_tick(self, tick, rng):
        V = linearize(tick).V
        for _ in range(2):
            chk = verify_vhat_inverse(V, rng.uniform(0, 5, 4))
            assert chk.gap < 1e-6

    def test_unstable(self):
        with pytest.raises(NotStable):
            verify_vhat_inverse(DelayLinearOperator([[-1.0]]), [1.0])

    def test_not_cooperative(self):
        with pytest.raises(NotCooperative):
            verify_vhat_inverse(DelayLinearOperator([[1.0, 1.0], [0, 1.0]]), [1.0, 1.0])
