"""Independent reference computations built on scipy/numpy only."""
import math

import numpy as np
from scipy.optimize import brentq


def scalar_root(a0, c, tau=1.0):
    """Real root of lam = a0 + c exp(-lam tau) for c >= 0."""
    f = lambda lam: a0 + c * math.exp(-lam * tau) - lam  # noqa: E731
    hi = max(a0 + c, 0.0) + 1.0
    lo = min(a0, 0.0) - 1.0
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)


def s_numpy(M):
    return float(np.max(np.linalg.eigvals(np.asarray(M, dtype=float)).real))


def principal_root(A0, terms):
    """Rightmost real root of s(A0 + sum A_k e^{-lam tau_k}) = lam using numpy eigensolves."""
    def f(lam):
        M = np.array(A0, dtype=float) + sum(np.asarray(A) * math.exp(-lam * tau) for tau, A in terms)
        return s_numpy(M) - lam
    hi = max(s_numpy(np.array(A0) + sum(np.asarray(A) for _, A in terms)), 0.0) + 1.0
    lo = -1.0
    while f(lo) <= 0:
        lo *= 2
    return brentq(f, lo, hi, xtol=1e-14)
