"""Stage-structured black-legged tick model with maturation delays.

State order is ``(L, N, A_q, A_f)``: larvae, nymphs, questing adults and
fed adult females.  Recruitment of larvae uses ``A_f(t - tau1)``; adults
become fed females through ``A_q(t - tau2)``; nymph recruitment saturates
through ``g(L) = N_cap L / (h + L)``.
"""
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .delay_op import DelayLinearOperator, HistorySegment
from .errors import HorizonExceeded
from .r0_engine import NextGenModel
from .semigroup import DelayRhs, integrate

CRITICAL_BAND = 1e-6


@dataclass(frozen=True)
class TickParams:
    b: float
    r: tuple
    d: tuple
    tau1: float
    tau2: float
    N_cap: float
    h: float

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if len(self.r) != 4 or len(self.d) != 4:
            raise ValueError("r and d need exactly four entries each")
        vals = (self.b, *self.r, *self.d, self.tau1, self.tau2, self.N_cap, self.h)
        if not all(math.isfinite(v) and v > 0 for v in vals):
            raise ValueError("all tick parameters must be finite and strictly positive")

    @property
    def tau(self):
        return max(self.tau1, self.tau2)

    def g(self, L):
        return self.N_cap * L / (self.h + L)

    @property
    def g_prime0(self):
        return self.N_cap / self.h

    @property
    def larva_recruit(self):
        """Coefficient of ``A_f(t - tau1)`` in the larva equation."""
        return self.b * self.r[3] * math.exp(-self.d[3] * self.tau1)

    @property
    def female_recruit(self):
        """Coefficient of ``A_q(t - tau2)`` in the fed-female equation."""
        return 0.5 * self.r[2] * math.exp(-self.d[2] * self.tau2)

    def with_b(self, b):
        return replace(self, b=float(b))

    def to_dict(self):
        out = asdict(self)
        out["r"], out["d"] = list(self.r), list(self.d)
        return out

    @classmethod
    def from_dict(cls, data):
        if "tau" in data:
            tau1, tau2 = data["tau"]
        else:
            tau1, tau2 = data["tau1"], data["tau2"]
        return cls(data["b"], data["r"], data["d"], tau1, tau2, data["N_cap"], data["h"])


def rhs(p, current, delayed):
    """Time derivative given the current state and ``(A_f(t - tau1), A_q(t - tau2))``."""
    L, N, Aq, Af = current
    af_lag, aq_lag = delayed
    d, r = p.d, p.r
    return np.array([
        p.larva_recruit * af_lag - (d[0] + r[0]) * L,
        r[0] * p.g(L) - (d[1] + r[1]) * N,
        r[1] * N - (d[2] + r[2]) * Aq,
        p.female_recruit * aq_lag - (d[3] + r[3]) * Af,
    ])


def delay_rhs(p):
    return DelayRhs(4, (p.tau1, p.tau2), lambda u, lag: rhs(p, u, (lag[0][3], lag[1][2])))


def linearize(p):
    """Next-generation split ``(F, V)`` of the linearization at the origin."""
    F1 = np.zeros((4, 4))
    F1[0, 3] = p.larva_recruit
    F = DelayLinearOperator(np.zeros((4, 4)), [(p.tau1, F1)])
    d, r = p.d, p.r
    V0 = np.diag([d[i] + r[i] for i in range(4)])
    V0[1, 0] = -r[0] * p.g_prime0
    V0[2, 1] = -r[1]
    V2 = np.zeros((4, 4))
    V2[3, 2] = -p.female_recruit
    V = DelayLinearOperator(V0, [(p.tau2, V2)])
    return NextGenModel(F, V)


def r0_closed_form(p):
    prod = 1.0
    for ri, di in zip(p.r, p.d):
        prod *= ri / (di + ri)
    return 0.5 * p.b * p.g_prime0 * math.exp(-(p.d[3] * p.tau1 + p.d[2] * p.tau2)) * prod


def params_for_r0(p, target):
    """Rescale ``b`` so the closed-form R0 equals ``target`` (R0 is linear in b)."""
    return p.with_b(p.b * target / r0_closed_form(p))


def equilibrium(p):
    """Positive steady state, or ``None`` when R0 <= 1.

    Eliminating N, A_q and A_f from the steady-state equations leaves
    ``L = K g(L)`` with ``K N_cap = R0 h``, whose positive root is
    ``L* = h (R0 - 1)``.
    """
    R0 = r0_closed_form(p)
    if R0 <= 1.0:
        return None
    d, r = p.d, p.r
    L = p.h * (R0 - 1.0)
    N = r[0] * p.g(L) / (d[1] + r[1])
    Aq = r[1] * N / (d[2] + r[2])
    Af = p.female_recruit * Aq / (d[3] + r[3])
    u = np.array([L, N, Aq, Af])
    res = np.max(np.abs(rhs(p, u, (Af, Aq))))
    if res > 1e-10 * max(1.0, float(np.max(u))):
        raise ArithmeticError(f"equilibrium residual {res:.3e} exceeds 1e-10")
    return u


def simulate(p, phi0, t_end, h_step=0.05):
    if not phi0.is_nonnegative():
        raise ValueError("tick histories must be nonnegative")
    return integrate(delay_rhs(p), phi0, t_end, h_step)


def random_trials(p, count=8, seed=0, n=64, scale=(1e-3, 10.0)):
    """Random positive initial segments on ``[-tau, 0]``.

    Each component is ``a (1 + 0.5 sin(w theta + c))`` with log-uniform
    amplitude ``a`` in ``scale``; every fourth trial keeps only one
    component nonzero to exercise sparse seeding.
    """
    rng = np.random.default_rng(seed)
    thetas = np.linspace(-p.tau, 0.0, n + 1)
    out = []
    for k in range(count):
        amp = np.exp(rng.uniform(np.log(scale[0]), np.log(scale[1]), size=4))
        w = rng.uniform(0.5, 3.0, size=4)
        c = rng.uniform(0, 2 * np.pi, size=4)
        if k % 4 == 3:
            keep = rng.integers(4)
            amp = np.where(np.arange(4) == keep, amp, 0.0)
        vals = amp * (1 + 0.5 * np.sin(np.outer(thetas, w) + c))
        out.append(HistorySegment(p.tau, vals))
    return out


@dataclass
class ThresholdReport:
    r0: float
    regime: str
    t_end: float
    equilibrium: list
    distances: list
    verdicts: list
    passed: bool

    def to_dict(self):
        return dict(self.__dict__)


def threshold_verdict(p, trials, t_end=200.0, tol=None, h_step=0.05, max_doublings=6):
    """Check the extinction / persistence dichotomy on a finite set of initial segments.

    Below threshold every nonzero trial must satisfy ``|u(T)|_inf < tol``
    (default 1e-6); above it ``|u(T) - u*|_inf < tol |u*|_inf`` (default
    1e-4).  Zero trials must stay zero in both regimes.  The horizon doubles
    while some trial is non-conforming but still moving (relative change
    above ``tol`` over the last tenth of the horizon).
    """
    R0 = r0_closed_form(p)
    if abs(R0 - 1.0) <= CRITICAL_BAND:
        return ThresholdReport(R0, "critical", 0.0, None, [], ["skipped"] * len(trials), True)
    ustar = equilibrium(p)
    above = ustar is not None
    if tol is None:
        tol = 1e-4 if above else 1e-6
    target = ustar if above else np.zeros(4)
    scale_ = float(np.max(ustar)) if above else 1.0
    n = min(t.n for t in trials)
    values = np.stack([t.values if t.n == n else _resample(t, n).values for t in trials], axis=-1)
    phi = HistorySegment(p.tau, values)
    zero = np.all(values == 0, axis=(0, 1))

    T = float(t_end)
    regime = "persistence" if above else "extinction"
    eq = None if ustar is None else ustar.tolist()
    for attempt in range(max_doublings + 1):
        traj = simulate(p, phi, T, h_step)
        final = traj.states[-1]
        earlier = traj.at(0.9 * T)
        dist = np.max(np.abs(final - np.where(zero, 0.0, 1.0) * target[:, None]), axis=0) / scale_
        moving = np.max(np.abs(final - earlier), axis=0) / np.maximum(np.max(np.abs(final), axis=0), 1e-300)
        ok = np.where(zero, dist == 0.0, dist < tol)
        if np.all(ok) or not np.any(~ok & (moving > tol)):
            break
        if attempt == max_doublings:
            partial = ThresholdReport(R0, regime, T, eq, dist.tolist(),
                                      ["conforms" if o else "inconclusive" for o in ok], False)
            raise HorizonExceeded(f"trials still moving at horizon cap T={T}", partial)
        T *= 2.0

    verdicts = []
    for z, o in zip(zero, ok):
        if z:
            verdicts.append("stays-zero" if o else "left-zero")
        elif above:
            verdicts.append("converged" if o else "not-converged")
        else:
            verdicts.append("extinct" if o else "not-extinct")
    return ThresholdReport(R0, regime, T, eq, dist.tolist(), verdicts, bool(np.all(ok)))


def _resample(seg, n):
    thetas = np.linspace(-seg.tau, 0.0, n + 1)
    return HistorySegment(seg.tau, np.array([seg.at(th) for th in thetas]))
