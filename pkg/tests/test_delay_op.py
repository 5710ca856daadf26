import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from r0fde import randomized
from r0fde.delay_op import (
    DelayLinearOperator,
    HistorySegment,
    check_cooperative,
    check_positive,
    evaluate,
    hat,
    scale,
)
from r0fde.errors import DelayExceedsHistory
from r0fde.tick import linearize


def scalar(a0, c, tau=1.0):
    return DelayLinearOperator([[a0]], [(tau, [[c]])])


class TestOperator:
    def test_terms_sorted_and_merged(self):
        L = DelayLinearOperator([[0.0]], [(2.0, [[1.0]]), (1.0, [[3.0]]), (2.0, [[0.5]])])
        assert L.delays == (1.0, 2.0)
        assert L.terms[1][1][0, 0] == pytest.approx(1.5)
        assert L.max_delay == 2.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            DelayLinearOperator(np.eye(2), [(1.0, np.eye(3))])

    @pytest.mark.parametrize("tau", [0.0, -1.0, math.inf])
    def test_bad_delay(self, tau):
        with pytest.raises(ValueError):
            DelayLinearOperator([[0.0]], [(tau, [[1.0]])])

    def test_arithmetic(self):
        F = scalar(0.0, 2.0)
        V = DelayLinearOperator([[1.0]])
        L = F - V
        assert L == scalar(-1.0, 2.0)
        assert -(-L) == L
        assert hat(F + V)[0, 0] == pytest.approx(3.0)


class TestHistorySegment:
    def test_constant(self):
        phi = HistorySegment.constant([1.0, 2.0], 1.0, 4)
        assert phi.n == 4 and phi.dim == 2
        assert np.allclose(phi.at(-0.37), [1, 2])

    def test_out_of_range(self):
        phi = HistorySegment.constant([1.0], 1.0, 4)
        with pytest.raises(DelayExceedsHistory):
            phi.at(-1.5)

    def test_cubic_exact_on_cubics(self):
        f = lambda th: 1 + 2 * th - th ** 2 + 0.5 * th ** 3  # noqa: E731
        phi = HistorySegment.from_function(f, 2.0, 10)
        for th in np.linspace(-2, 0, 37):
            assert phi.at(th)[0] == pytest.approx(f(th), abs=1e-12)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            HistorySegment(1.0, np.array([[0.0], [np.nan]]))

    def test_is_nonnegative(self):
        assert HistorySegment.constant([0.0, 1.0], 1.0, 3).is_nonnegative()
        assert not HistorySegment.constant([-1e-3], 1.0, 3).is_nonnegative()


class TestEvaluate:
    def test_no_terms(self):
        L = DelayLinearOperator(-np.eye(2))
        assert np.allclose(evaluate(L, HistorySegment.constant([1, 1], 1.0, 8)), [-1, -1])

    def test_exponential_history(self):
        L = DelayLinearOperator([[0.0]], [(1.0, [[1.0]])])
        phi = HistorySegment.from_function(np.exp, 1.0, 256)
        assert evaluate(L, phi)[0] == pytest.approx(math.exp(-1), abs=1e-8)

    def test_linear(self, rng):
        L = randomized.cooperative_operator(rng)
        phi = HistorySegment(2.0, rng.normal(size=(33, L.dim)))
        psi = HistorySegment(2.0, rng.normal(size=(33, L.dim)))
        both = HistorySegment(2.0, 2 * phi.values - psi.values)
        assert np.allclose(evaluate(L, both), 2 * evaluate(L, phi) - evaluate(L, psi))

    def test_short_history(self):
        with pytest.raises(DelayExceedsHistory):
            evaluate(scalar(0, 1, tau=2.0), HistorySegment.constant([1.0], 1.0, 8))

    def test_constant_history_gives_hat(self, rng):
        L = randomized.cooperative_operator(rng)
        x = rng.normal(size=L.dim)
        phi = HistorySegment.constant(x, 2.0, 16)
        assert np.allclose(evaluate(L, phi), hat(L) @ x)


class TestHat:
    def test_scalar(self):
        assert hat(scalar(-1.0, 2.0))[0, 0] == pytest.approx(1.0)

    def test_no_terms(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(hat(DelayLinearOperator(A)), A)

    def test_tick_F(self, tick):
        Fh = hat(linearize(tick).F)
        expected = np.zeros((4, 4))
        expected[0, 3] = tick.b * tick.r[3] * math.exp(-tick.d[3] * tick.tau1)
        assert np.allclose(Fh, expected)


class TestSignChecks:
    def test_cooperative(self):
        L = DelayLinearOperator(-np.eye(2), [(1.0, [[0, 1], [1, 0]])])
        assert check_cooperative(L)
        assert not check_cooperative(DelayLinearOperator([[-1, -0.5], [0, -1]]))

    def test_negative_delayed_entry(self):
        assert not check_cooperative(scalar(-1.0, -0.1))

    def test_tick(self, tick):
        model = linearize(tick)
        assert check_cooperative(-model.V)
        assert check_positive(model.F)

    def test_positive(self):
        assert not check_positive(DelayLinearOperator(-np.eye(2)))
        assert check_positive(DelayLinearOperator(np.zeros((3, 3))))


class TestScale:
    def test_identity_scale(self, tick):
        F = linearize(tick).F
        assert scale(F, 1) == F
        assert scale(scale(F, 2), 0.5) == F

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 100))
    def test_hat_linear(self, seed, c):
        L = randomized.cooperative_operator(np.random.default_rng(seed))
        assert np.allclose(hat(scale(L, c)), c * hat(L))
