"""Principal eigenvalue of cooperative delay systems via the characteristic matrix."""
import math
from dataclasses import dataclass

from .delay_op import check_cooperative, hat
from .errors import BracketFailure, NotCooperative, Overflow
from .linalg import stability_modulus

ZERO_BAND = 1e-8
MAX_BISECT = 200
LAMBDA_TOL = 1e-10
BRACKET_DOUBLINGS = 60


def char_matrix(L, lam):
    """``A0 + sum_k A_k exp(-lam tau_k)``; ``lam`` is a real number."""
    out = L.A0.copy()
    for tau, A in L.terms:
        try:
            w = math.exp(-lam * tau)
        except OverflowError:
            raise Overflow(f"exp({-lam * tau:.4g}) overflows at lambda={lam}") from None
        if math.isinf(w):
            raise Overflow(f"exp({-lam * tau:.4g}) overflows at lambda={lam}")
        out = out + w * A
    return out


def _g(L, lam):
    return stability_modulus(char_matrix(L, lam)) - lam


def principal_eigenvalue(L, tol=LAMBDA_TOL, max_iter=MAX_BISECT, eps=0.0):
    """Real root of ``s(char_matrix(L, lam)) = lam`` for cooperative ``L``.

    The left side minus ``lam`` is strictly decreasing, so plain bisection
    applies.  For ``lam >= 0`` the characteristic matrix is dominated by
    ``hat(L)``, giving the upper bracket ``max(s(hat L), 0) + 1``; the lower
    bracket is found by doubling.  ``eps`` relaxes the sign checks on the
    coefficients (round-off from parsed files).
    """
    if not check_cooperative(L, eps):
        raise NotCooperative("principal_eigenvalue requires A0 Metzler and all delayed matrices >= 0")
    if not L.terms:
        return stability_modulus(L.A0)
    hi = max(stability_modulus(hat(L)), 0.0) + 1.0
    if _g(L, hi) > 0:
        raise BracketFailure(f"g({hi}) > 0 at the analytic upper bracket")
    lo = -1.0
    for _ in range(BRACKET_DOUBLINGS):
        if _g(L, lo) > 0:
            break
        hi = lo
        lo *= 2.0
    else:
        raise BracketFailure(f"no sign change down to lambda={lo}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        g = _g(L, mid)
        if g == 0.0:
            return mid
        if g > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * 1e-2 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def sign_with_band(x, band=ZERO_BAND):
    if abs(x) <= band:
        return 0
    return 1 if x > 0 else -1


@dataclass(frozen=True)
class SignEquivalence:
    s_L: float
    s_hat: float
    consistent: bool

    def to_dict(self):
        return {"s_L": self.s_L, "s_hat": self.s_hat, "consistent": self.consistent}


def sign_equivalence_report(L):
    s_L = principal_eigenvalue(L)
    s_hat = stability_modulus(hat(L))
    return SignEquivalence(s_L, s_hat, sign_with_band(s_L) == sign_with_band(s_hat))
