"""Basic reproduction number for ``u' = F(u_t) - V(u_t)``: direct, sign test and bisection."""
import logging
from dataclasses import dataclass, field

import numpy as np

from .delay_op import check_cooperative, check_positive, hat, scale
from .errors import AssumptionViolated, R0FdeError, Singular, ZeroR0
from .linalg import is_nonnegative, solve_right, spectral_radius, stability_modulus
from .semigroup import monodromy_radius, solution_operator
from .spectral import ZERO_BAND, principal_eigenvalue, sign_with_band

log = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-3


@dataclass
class NextGenModel:
    F: object
    V: object
    a1_ok: bool = None
    a2_cooperative_ok: bool = None
    a2_stable_ok: bool = None
    order_eps: float = 0.0

    def __post_init__(self):
        if self.F.dim != self.V.dim:
            raise AssumptionViolated("dimension", f"F is {self.F.dim}-dimensional but V is {self.V.dim}-dimensional")

    @property
    def dim(self):
        return self.F.dim

    @property
    def validated(self):
        return bool(self.a1_ok and self.a2_cooperative_ok and self.a2_stable_ok)

    @property
    def combined(self):
        return self.F - self.V


def validate(model, raise_on_failure=True):
    """Fill the assumption flags; raise ``AssumptionViolated`` naming the first failure."""
    model.a1_ok = check_positive(model.F, model.order_eps)
    model.a2_cooperative_ok = check_cooperative(-model.V, model.order_eps)
    model.a2_stable_ok = stability_modulus(-hat(model.V)) < 0
    if raise_on_failure:
        if not model.a1_ok:
            raise AssumptionViolated("A1", "(A1) violated: F has a negative coefficient, so F(C+) is not inside R^m_+")
        if not model.a2_cooperative_ok:
            raise AssumptionViolated(
                "A2-cooperative",
                "(A2) violated: -V is not quasimonotone "
                "(instantaneous part not Metzler or a delayed coefficient negative)",
            )
        if not model.a2_stable_ok:
            raise AssumptionViolated("A2-stability", "(A2) violated: s(-V) >= 0")
    return model


def _require_valid(model, force):
    if not force:
        validate(model)
        return
    validate(model, raise_on_failure=False)
    if not model.validated:
        log.warning("model violates the next-generation assumptions; results are computed anyway (forced)")


def next_generation_matrix(model, force=False):
    _require_valid(model, force)
    try:
        K = solve_right(hat(model.F), hat(model.V))
    except Singular as exc:
        raise R0FdeError(f"internal inconsistency: hat(V) singular after validation ({exc})") from exc
    if not force and not is_nonnegative(K, 1e-12 * max(1.0, float(np.max(np.abs(K))))):
        raise R0FdeError("internal inconsistency: next-generation matrix has negative entries")
    return K


def r0_direct(model, force=False):
    return spectral_radius(next_generation_matrix(model, force))


def lambda_star(model, force=False):
    _require_valid(model, force)
    return principal_eigenvalue(model.combined, eps=model.order_eps)


def probe_radius(model, mu, t0=None, n=128, tol=1e-13):
    """``r(Q_mu(t0))`` for the system ``u' = F(u_t)/mu - V(u_t)``."""
    L = scale(model.F, 1.0 / mu) - model.V
    tau = max(model.F.max_delay, model.V.max_delay) or 1.0
    op = solution_operator(L, t0 if t0 is not None else max(tau, 1.0), n, tau)
    return monodromy_radius(op, tol=tol)


@dataclass
class BisectionResult:
    mu: float
    t0: float
    n: int
    probes: list = field(default_factory=list)


def bisect_r0(model, t0=None, n=128, tol_mu=1e-4, force=False, power_tol=1e-13, max_doublings=60):
    """Root ``mu`` of ``r(Q_mu(t0)) = 1``, bracketed by doubling/halving from ``mu = 1``.

    ``tol_mu`` is relative to the bracket midpoint.  Returns a
    ``BisectionResult`` whose ``probes`` list holds every ``(mu, radius)``
    evaluated, in order.
    """
    _require_valid(model, force)
    if not np.any(hat(model.F)):
        raise ZeroR0("hat(F) = 0: r(Q_mu) < 1 for every mu, no bracket exists")
    tau = max(model.F.max_delay, model.V.max_delay) or 1.0
    t0 = max(tau, 1.0) if t0 is None else float(t0)
    probes = []

    def radius(mu):
        r = probe_radius(model, mu, t0, n, power_tol)
        probes.append((mu, r))
        log.debug("mu=%.12g r(Q_mu)=%.15g", mu, r)
        return r

    lo = hi = 1.0
    r = radius(1.0)
    if r > 1.0:
        for _ in range(max_doublings):
            lo, hi = hi, hi * 2.0
            if radius(hi) <= 1.0:
                break
        else:
            raise R0FdeError("could not bracket mu from above")
    else:
        for _ in range(max_doublings):
            hi, lo = lo, lo / 2.0
            if radius(lo) > 1.0:
                break
        else:
            raise ZeroR0("r(Q_mu) stays below 1 for tiny mu")
    # invariant: r(lo) > 1 >= r(hi)
    while hi - lo > tol_mu * 0.5 * (lo + hi):
        mid = 0.5 * (lo + hi)
        if radius(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return BisectionResult(0.5 * (lo + hi), t0, n, probes)


def r0_bisection(model, t0=None, n=128, tol_mu=1e-4, force=False):
    return bisect_r0(model, t0, n, tol_mu, force).mu


@dataclass
class R0Report:
    r0_direct: float
    lambda_star: float
    r0_bisection: float = None
    t0: float = None
    n: int = None
    consistency: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "r0_direct": self.r0_direct,
            "lambda_star": self.lambda_star,
            "r0_bisection": self.r0_bisection,
            "t0": self.t0,
            "n": self.n,
            "consistency": dict(self.consistency),
        }


def classify(r0, band=ZERO_BAND):
    """Threshold regime of ``r0`` with a zero band around ``r0 = 1``."""
    s = sign_with_band(r0 - 1.0, band)
    return {1: "supercritical (R0 > 1)", -1: "subcritical (R0 < 1)", 0: "critical (R0 ~ 1)"}[s]


def consistency_report(model, t0=None, n=128, tol_mu=1e-4, method="both", force=False):
    """Run the requested R0 computations and cross-check them.

    ``consistency`` holds ``r0_sign_matches_lambda`` (R0 - 1 against
    lambda*) and, when bisection runs, ``bisection_matches_direct``
    (relative agreement within 1e-3) and ``unit_radius_at_r0``.
    """
    _require_valid(model, force)
    r0 = r0_direct(model, force)
    lam = lambda_star(model, force)
    report = R0Report(r0, lam)
    report.consistency["r0_sign_matches_lambda"] = sign_with_band(r0 - 1.0) == sign_with_band(lam)
    report.consistency["r0_class"] = classify(r0)
    if method in ("bisect", "both") and r0 > 0:
        res = bisect_r0(model, t0, n, tol_mu, force)
        report.r0_bisection, report.t0, report.n = res.mu, res.t0, res.n
        report.consistency["bisection_matches_direct"] = abs(res.mu - r0) <= AGREEMENT_TOL * max(1.0, r0)
        r_at = probe_radius(model, r0, res.t0, n)
        report.consistency["unit_radius_at_r0"] = abs(r_at - 1.0) <= AGREEMENT_TOL
        report.consistency["radius_monotone_in_mu"] = _monotone(res.probes)
    return report


def _monotone(probes):
    pts = sorted(probes)
    return all(b[1] <= a[1] + 1e-10 for a, b in zip(pts, pts[1:]))


def homogeneity_check(model, mu):
    """``r0`` of ``(F/mu, V)`` against ``r0_direct / mu``."""
    scaled = NextGenModel(scale(model.F, 1.0 / mu), model.V)
    return r0_direct(scaled), r0_direct(model) / mu

