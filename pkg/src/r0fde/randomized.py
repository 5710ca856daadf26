"""Seeded generators of random cooperative operators, next-generation models and tick parameters."""
import numpy as np

from .delay_op import DelayLinearOperator
from .r0_engine import NextGenModel, r0_direct, validate
from .tick import TickParams


def _delays(rng, k, upper=2.0):
    taus = set()
    while len(taus) < k:
        taus.add(float(rng.uniform(0.05, upper)))
    return sorted(taus)


def _sparse(rng, m, density, low=0.0, high=1.0):
    return rng.uniform(low, high, size=(m, m)) * (rng.random((m, m)) < density)


def cooperative_operator(rng, max_dim=5, max_delays=3):
    """Metzler ``A0`` (diagonal in [-3, 0.5]) plus nonnegative delayed terms with delays in (0, 2]."""
    m = int(rng.integers(1, max_dim + 1))
    A0 = _sparse(rng, m, 0.6)
    np.fill_diagonal(A0, rng.uniform(-3.0, 0.5, size=m))
    k = int(rng.integers(0, max_delays + 1))
    terms = [(tau, _sparse(rng, m, 0.5)) for tau in _delays(rng, k)]
    return DelayLinearOperator(A0, terms)


def nextgen_model(rng, max_dim=5, max_delays=2, r0_range=(0.2, 5.0)):
    """A valid model (F positive, -V cooperative and stable) whose R0 is log-uniform in ``r0_range``."""
    m = int(rng.integers(1, max_dim + 1))
    F0 = _sparse(rng, m, 0.3)
    f_terms = [(tau, _sparse(rng, m, 0.5)) for tau in _delays(rng, int(rng.integers(0, max_delays + 1)))]
    if not f_terms and not F0.any():
        F0[rng.integers(m), rng.integers(m)] = 1.0
    V0 = -_sparse(rng, m, 0.4)
    v_terms = [(tau, -_sparse(rng, m, 0.4)) for tau in _delays(rng, int(rng.integers(0, max_delays + 1)))]
    np.fill_diagonal(V0, 0.0)
    load = np.abs(V0).sum(axis=1) + sum(np.abs(A).sum(axis=1) for _, A in v_terms)
    np.fill_diagonal(V0, load + rng.uniform(0.1, 2.0, size=m))
    F = DelayLinearOperator(F0, f_terms)
    V = DelayLinearOperator(V0, v_terms)
    model = validate(NextGenModel(F, V))
    r0 = r0_direct(model)
    if r0 == 0.0:
        return model
    target = float(np.exp(rng.uniform(*np.log(r0_range))))
    c = target / r0
    F = DelayLinearOperator(c * F0, [(tau, c * A) for tau, A in f_terms])
    return validate(NextGenModel(F, V))


def tick_params(rng):
    return TickParams(
        b=float(np.exp(rng.uniform(np.log(0.5), np.log(50.0)))),
        r=rng.uniform(0.1, 2.0, size=4),
        d=rng.uniform(0.01, 0.5, size=4),
        tau1=float(rng.uniform(0.1, 3.0)),
        tau2=float(rng.uniform(0.1, 3.0)),
        N_cap=float(np.exp(rng.uniform(np.log(0.1), np.log(100.0)))),
        h=float(np.exp(rng.uniform(np.log(0.1), np.log(10.0)))),
    )


def nonneg_vector(rng, m, high=10.0):
    return rng.uniform(0.0, high, size=m)

