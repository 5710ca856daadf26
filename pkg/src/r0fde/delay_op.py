"""Linear delay operators ``L(phi) = A0 phi(0) + sum_k A_k phi(-tau_k)`` and sampled histories."""
from dataclasses import dataclass

import numpy as np

from .errors import DelayExceedsHistory
from .linalg import as_matrix, is_metzler, is_nonnegative


class DelayLinearOperator:
    """Instantaneous matrix ``A0`` plus discrete delayed terms ``(tau_k, A_k)``.

    Terms are kept sorted by delay; repeated delays are merged by summing
    their matrices.  Instances are treated as immutable.
    """

    def __init__(self, A0, terms=()):
        A0 = as_matrix(A0)
        m = A0.shape[0]
        merged = {}
        for tau, A in terms:
            tau = float(tau)
            if not np.isfinite(tau) or tau <= 0:
                raise ValueError(f"delays must be finite and positive, got {tau}")
            A = as_matrix(A)
            if A.shape != (m, m):
                raise ValueError(f"delayed matrix at tau={tau} has shape {A.shape}, expected {(m, m)}")
            merged[tau] = merged[tau] + A if tau in merged else A.copy()
        self.A0 = A0.copy()
        self.terms = tuple((tau, merged[tau]) for tau in sorted(merged))
        self.A0.setflags(write=False)
        for _, A in self.terms:
            A.setflags(write=False)

    @property
    def dim(self):
        return self.A0.shape[0]

    @property
    def delays(self):
        return tuple(tau for tau, _ in self.terms)

    @property
    def max_delay(self):
        return self.terms[-1][0] if self.terms else 0.0

    def __repr__(self):
        return f"DelayLinearOperator(dim={self.dim}, delays={self.delays})"

    def __eq__(self, other):
        if not isinstance(other, DelayLinearOperator):
            return NotImplemented
        return (
            np.array_equal(self.A0, other.A0)
            and self.delays == other.delays
            and all(np.array_equal(a, b) for (_, a), (_, b) in zip(self.terms, other.terms))
        )

    def __add__(self, other):
        return DelayLinearOperator(self.A0 + other.A0, self.terms + other.terms)

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        return self + (-other)

    def apply(self, current, delayed):
        """Evaluate on explicit samples: ``current = phi(0)``, ``delayed[k] = phi(-tau_k)``."""
        out = self.A0 @ current
        for (_, A), d in zip(self.terms, delayed):
            out = out + A @ d
        return out


@dataclass(frozen=True)
class HistorySegment:
    """Samples of ``phi`` on the uniform grid ``theta_j = -tau + j tau / n``.

    ``values`` has shape ``(n + 1, m)``; a trailing batch axis
    ``(n + 1, m, B)`` is allowed and carried through by the integrator.
    """

    tau: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim < 2:
            raise ValueError("history values must be at least 2-D (samples, components)")
        if self.tau < 0:
            raise ValueError("history length tau must be nonnegative")
        if self.tau > 0 and v.shape[0] < 2:
            raise ValueError("a history of positive length needs at least two samples")
        if not np.all(np.isfinite(v)):
            raise ValueError("history values must be finite")
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, x, tau, n):
        x = np.asarray(x, dtype=float)
        if tau == 0:
            n = 0
        return cls(tau, np.broadcast_to(x, (n + 1,) + x.shape).copy())

    @classmethod
    def from_function(cls, f, tau, n):
        """Sample ``f(theta)`` (returning an m-vector) on the grid."""
        thetas = np.linspace(-tau, 0.0, n + 1) if tau > 0 else np.zeros(1)
        return cls(tau, np.array([np.atleast_1d(f(th)) for th in thetas], dtype=float))

    @property
    def n(self):
        return self.values.shape[0] - 1

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def grid(self):
        if self.n == 0:
            return np.zeros(1)
        return np.linspace(-self.tau, 0.0, self.n + 1)

    def is_nonnegative(self):
        return bool(np.all(self.values >= 0))

    def at(self, theta):
        """Cubic interpolation through the four nearest samples (clamped at the ends)."""
        n = self.n
        if n == 0:
            return self.values[0]
        if theta < -self.tau * (1 + 1e-12) or theta > 1e-12 * self.tau:
            raise DelayExceedsHistory(f"theta={theta} outside [-{self.tau}, 0]")
        x = (theta + self.tau) * n / self.tau
        j = int(round(x))
        if abs(x - j) <= 1e-12 * max(1.0, x):
            return self.values[min(max(j, 0), n)]
        if n < 3:
            i = min(int(x), n - 1)
            w = x - i
            return (1 - w) * self.values[i] + w * self.values[i + 1]
        i0 = min(max(int(np.floor(x)) - 1, 0), n - 3)
        s = x - i0
        # Lagrange weights on nodes 0, 1, 2, 3
        w0 = -(s - 1) * (s - 2) * (s - 3) / 6.0
        w1 = s * (s - 2) * (s - 3) / 2.0
        w2 = -s * (s - 1) * (s - 3) / 2.0
        w3 = s * (s - 1) * (s - 2) / 6.0
        v = self.values
        return w0 * v[i0] + w1 * v[i0 + 1] + w2 * v[i0 + 2] + w3 * v[i0 + 3]


def evaluate(L, phi):
    if phi.tau < L.max_delay * (1 - 1e-12):
        raise DelayExceedsHistory(f"history length {phi.tau} shorter than max delay {L.max_delay}")
    return L.apply(phi.at(0.0), [phi.at(-tau) for tau in L.delays])


def hat(L):
    """Matrix of ``L`` acting on constant histories: ``A0 + sum_k A_k``."""
    out = L.A0.copy()
    for _, A in L.terms:
        out = out + A
    return out


def check_cooperative(L, eps=0.0):
    """Quasimonotonicity for the discrete-delay class: A0 Metzler and every A_k >= 0."""
    return is_metzler(L.A0, eps) and all(is_nonnegative(A, eps) for _, A in L.terms)


def check_positive(L, eps=0.0):
    return is_nonnegative(L.A0, eps) and all(is_nonnegative(A, eps) for _, A in L.terms)


def scale(L, c):
    c = float(c)
    return DelayLinearOperator(c * L.A0, [(tau, c * A) for tau, A in L.terms])
