"""Method-of-steps integration and the discretized solution semigroup.

The integrator is classical fixed-step RK4.  Delayed arguments inside the
computed range come from cubic Hermite dense output built from the stored
states and slopes; arguments in ``[-tau, 0]`` come from the initial
history's cubic interpolant.  Every state array may carry a trailing batch
axis, which is how a discretized solution operator is assembled as a
matrix in one pass.
"""
import csv
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .delay_op import HistorySegment, check_cooperative, hat
from .errors import BlowUp, DelayExceedsHistory, NoConvergence, NotCooperative, NotStable
from .linalg import lu_solve, stability_modulus
from .spectral import principal_eigenvalue

BLOWUP_GUARD = 1e151


@dataclass(frozen=True)
class DelayRhs:
    """``u'(t) = func(u(t), [u(t - tau) for tau in delays])``."""

    dim: int
    delays: tuple
    func: Callable


def linear_rhs(L, forcing=None):
    """Right-hand side of ``u' = L(u_t)`` (plus a constant ``forcing`` vector)."""
    if forcing is None:
        return DelayRhs(L.dim, L.delays, L.apply)
    x = np.asarray(forcing, dtype=float)

    def func(u, delayed):
        return L.apply(u, delayed) + (x if u.ndim == 1 else x[:, None])

    return DelayRhs(L.dim, L.delays, func)


def _hermite(theta, dt, y0, f0, y1, f1):
    t2 = theta * theta
    t3 = t2 * theta
    return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + theta) * dt * f0
            + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * dt * f1)


@dataclass
class DdeTrajectory:
    t: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    history: HistorySegment
    h: float

    def at(self, s):
        """Dense output ``u(s)`` for ``-tau <= s <= t[-1]``."""
        if s <= 1e-12 * self.h:
            return self.history.at(min(s, 0.0))
        last = len(self.t) - 1
        if s > self.t[-1] * (1 + 1e-12):
            raise ValueError(f"s={s} beyond integrated range {self.t[-1]}")
        j = min(int(s / self.h), last - 1)
        dt = self.t[j + 1] - self.t[j]
        return _hermite((s - self.t[j]) / dt, dt, self.states[j], self.derivs[j],
                        self.states[j + 1], self.derivs[j + 1])

    def segment(self, t, n, tau=None):
        """Sampled ``u_t`` on the uniform grid of ``n + 1`` points over ``[-tau, 0]``."""
        tau = self.history.tau if tau is None else tau
        thetas = np.linspace(-tau, 0.0, n + 1) if tau > 0 else np.zeros(1)
        return HistorySegment(tau, np.array([self.at(t + th) for th in thetas]))

    def to_csv(self, path):
        m = self.states.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"u{i + 1}" for i in range(m)])
            for t, u in zip(self.t, self.states):
                w.writerow([repr(float(t))] + [repr(float(v)) for v in u])


def aligned_step(h, delays):
    """Shrink ``h`` so it divides the smallest delay (keeps lookups behind the front)."""
    if not delays:
        return float(h)
    tmin = min(delays)
    return tmin / math.ceil(tmin / h - 1e-9)


def integrate(rhs, phi0, t_end, h, guard=BLOWUP_GUARD):
    if t_end <= 0 or h <= 0:
        raise ValueError("t_end and h must be positive")
    if rhs.delays and phi0.tau < max(rhs.delays) * (1 - 1e-12):
        raise DelayExceedsHistory(f"history length {phi0.tau} shorter than max delay {max(rhs.delays)}")
    if phi0.dim != rhs.dim:
        raise ValueError(f"history has {phi0.dim} components, system has {rhs.dim}")
    h = aligned_step(h, rhs.delays)
    N = max(1, math.ceil(t_end / h - 1e-9))
    t = np.arange(N + 1) * h
    t[-1] = t_end
    u0 = phi0.values[-1]
    states = np.empty((N + 1,) + u0.shape)
    derivs = np.empty_like(states)
    states[0] = u0
    known = 0
    delays = rhs.delays
    hist = phi0

    def lookup(s):
        if s <= 1e-12 * h:
            return hist.at(min(s, 0.0))
        j = min(int(s / h), known - 2)
        dt = t[j + 1] - t[j]
        return _hermite((s - t[j]) / dt, dt, states[j], derivs[j], states[j + 1], derivs[j + 1])

    f = rhs.func
    for i in range(N):
        ti, ui = t[i], states[i]
        dt = t[i + 1] - ti
        k1 = f(ui, [lookup(ti - tau) for tau in delays])
        derivs[i] = k1
        known = i + 1
        mid = [lookup(ti + 0.5 * dt - tau) for tau in delays]
        k2 = f(ui + 0.5 * dt * k1, mid)
        k3 = f(ui + 0.5 * dt * k2, mid)
        k4 = f(ui + dt * k3, [lookup(ti + dt - tau) for tau in delays])
        nxt = ui + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.abs(nxt) < guard):
            raise BlowUp(f"|u| exceeded {guard:.3g} at t={t[i + 1]:.6g}")
        states[i + 1] = nxt
    known = N + 1
    derivs[N] = f(states[N], [lookup(t[N] - tau) for tau in delays])
    return DdeTrajectory(t, states, derivs, phi0, h)


class DiscretizedOperator:
    """Time-``t0`` solution map of ``u' = L(u_t)`` on ``(n + 1)``-point histories."""

    def __init__(self, L, t0, n, tau=None):
        if t0 <= 0:
            raise ValueError("t0 must be positive")
        if n < 8:
            raise ValueError("grid count n must be at least 8")
        self.L = L
        self.t0 = float(t0)
        self.n = int(n)
        self.tau = float(tau) if tau is not None else (L.max_delay or 1.0)
        if self.tau < L.max_delay:
            raise DelayExceedsHistory(f"history length {self.tau} shorter than max delay {L.max_delay}")
        h = self.tau / self.n
        self.h = self.t0 / math.ceil(self.t0 / h - 1e-9)
        self.rhs = linear_rhs(L)

    def _run(self, values):
        phi = HistorySegment(self.tau, values)
        traj = integrate(self.rhs, phi, self.t0, self.h)
        return traj.segment(self.t0, self.n, self.tau).values

    def apply(self, phi):
        if phi.n != self.n or abs(phi.tau - self.tau) > 1e-12 * self.tau:
            raise ValueError("history grid does not match the operator grid")
        return HistorySegment(self.tau, self._run(phi.values))

    @cached_property
    def matrix(self):
        """Dense ``(n+1)m x (n+1)m`` matrix; row/column index ``j*m + i`` is sample j, component i."""
        m, size = self.L.dim, (self.n + 1) * self.L.dim
        basis = np.eye(size).reshape(self.n + 1, m, size)
        out = self._run(basis)
        return out.reshape(size, size)


def solution_operator(L, t0=None, n=128, tau=None):
    if t0 is None:
        t0 = max(L.max_delay if tau is None else tau, 1.0)
    return DiscretizedOperator(L, t0, n, tau)


def monodromy_radius(op, tol=1e-8, max_iter=2000):
    """Spectral radius of the discretized operator by sup-norm power iteration from ones."""
    T = op.matrix if isinstance(op, DiscretizedOperator) else np.asarray(op, dtype=float)
    x = np.ones(T.shape[0])
    est = None
    bracket = (0.0, math.inf)
    for _ in range(max_iter):
        y = T @ x
        ny = float(np.max(np.abs(y)))
        if ny < 1e-300:
            return 0.0
        pos = x > 0
        if np.any(pos):
            ratios = y[pos] / x[pos]
            bracket = (float(ratios.min()), float(ratios.max()))
        if est is not None and abs(ny - est) < tol * max(1.0, ny):
            return ny
        est = ny
        x = y / ny
    raise NoConvergence(f"power iteration did not settle in {max_iter} iterations", bracket)


@dataclass(frozen=True)
class SpectralMapCheck:
    t0: float
    n: int
    lhs: float
    rhs: float
    gap: float
    lhs_refined: float
    gap_refined: float

    def to_dict(self):
        return dict(self.__dict__)


def spectral_mapping_check(L, t0=None, n=128, tau=None, tol=1e-13):
    """Compare ``r(T(t0))`` at grids n and 2n with ``exp(s(L) t0)``."""
    if not check_cooperative(L):
        raise NotCooperative("spectral mapping check needs a cooperative operator")
    op = solution_operator(L, t0, n, tau)
    rhs = math.exp(principal_eigenvalue(L) * op.t0)
    lhs = monodromy_radius(op, tol=tol)
    lhs2 = monodromy_radius(solution_operator(L, op.t0, 2 * n, op.tau), tol=tol)
    return SpectralMapCheck(op.t0, n, lhs, rhs, abs(lhs - rhs), lhs2, abs(lhs2 - rhs))


@dataclass(frozen=True)
class VhatInverseCheck:
    numeric: np.ndarray
    exact: np.ndarray
    gap: float
    t_end: float
    decay_rate: float


def verify_vhat_inverse(V, x, t_end=None, h=None):
    """Integrate ``u' = -V(u_t) + x`` from zero history and compare ``u(t_end)`` with ``hat(V)^{-1} x``."""
    minus_v = -V
    if not check_cooperative(minus_v):
        raise NotCooperative("-V must be cooperative")
    rate = stability_modulus(-hat(V))
    if rate >= 0:
        raise NotStable(f"s(-hat V) = {rate:.6g} is not negative")
    x = np.asarray(x, dtype=float)
    if t_end is None:
        t_end = 40.0 / abs(rate)
    if h is None:
        fastest = float(np.max(np.abs(np.diag(V.A0)))) or 1.0
        h = min(0.25 / fastest, t_end / 100.0)
    tau = V.max_delay
    phi = HistorySegment.constant(np.zeros(V.dim), tau, 8 if tau > 0 else 0)
    traj = integrate(linear_rhs(minus_v, forcing=x), phi, t_end, h)
    numeric = traj.states[-1]
    exact = lu_solve(hat(V), x)
    return VhatInverseCheck(numeric, exact, float(np.max(np.abs(numeric - exact))), float(t_end), rate)

