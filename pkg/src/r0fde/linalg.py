"""Small dense real matrices: eigenvalues, spectral bounds, LU solves, order predicates.

Matrices are plain ``numpy`` arrays of shape ``(m, m)``.  The eigenvalue
solver is a self-contained balance / Householder-Hessenberg / Francis
double-shift QR pipeline working on Python floats, which is faster than
element-wise numpy access for the m <= ~50 sizes used here.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, NotMetzler, Singular

ITER_CAP_FACTOR = 100
PIVOT_FLOOR = 1e-12
RADIX = 2.0


def as_matrix(M):
    """Validate and return ``M`` as a float ``(m, m)`` array."""
    A = np.asarray(M, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    residual_bound: float


def _balance(a, n):
    # Parlett-Reinsch balancing, in place on a 1-based padded list matrix.
    sqrdx = RADIX * RADIX
    done = False
    while not done:
        done = True
        for i in range(1, n + 1):
            r = c = 0.0
            for j in range(1, n + 1):
                if j != i:
                    c += abs(a[j][i])
                    r += abs(a[i][j])
            if c and r:
                g = r / RADIX
                f = 1.0
                s = c + r
                while c < g:
                    f *= RADIX
                    c *= sqrdx
                g = r * RADIX
                while c > g:
                    f /= RADIX
                    c /= sqrdx
                if (c + r) / f < 0.95 * s:
                    done = False
                    g = 1.0 / f
                    for j in range(1, n + 1):
                        a[i][j] *= g
                    for j in range(1, n + 1):
                        a[j][i] *= f


def _hessenberg(a, n):
    # Householder reduction to upper Hessenberg form, in place (1-based).
    for k in range(1, n - 1):
        x = [a[i][k] for i in range(k + 1, n + 1)]
        scl = max(abs(v) for v in x)
        if scl == 0.0:
            continue
        # the reflector is scale invariant; build it from x / scl so squares cannot underflow
        v = [t / scl for t in x]
        norm = math.sqrt(sum(t * t for t in v))
        alpha = -norm if v[0] >= 0 else norm
        v[0] -= alpha
        beta = 2.0 / sum(t * t for t in v)
        alpha *= scl
        for j in range(k, n + 1):
            s = 0.0
            for i, vi in enumerate(v):
                s += vi * a[k + 1 + i][j]
            s *= beta
            for i, vi in enumerate(v):
                a[k + 1 + i][j] -= s * vi
        for i in range(1, n + 1):
            row = a[i]
            s = 0.0
            for j, vj in enumerate(v):
                s += row[k + 1 + j] * vj
            s *= beta
            for j, vj in enumerate(v):
                row[k + 1 + j] -= s * vj
        a[k + 1][k] = alpha
        for i in range(k + 2, n + 1):
            a[i][k] = 0.0


_SMLNUM = np.finfo(float).tiny / np.finfo(float).eps


def _sign(a, b):
    return abs(a) if b >= 0 else -abs(a)


def _hqr(a, n, cap):
    """Francis double-shift QR on an upper Hessenberg matrix (1-based, in place)."""
    wr = [0.0] * (n + 1)
    wi = [0.0] * (n + 1)
    anorm = 0.0
    for i in range(1, n + 1):
        for j in range(max(i - 1, 1), n + 1):
            anorm += abs(a[i][j])
    # absolute deflation floor, as in LAPACK's dlahqr: subdiagonals this small are zero for all purposes
    smlnum = _SMLNUM * n
    nn = n
    t = 0.0
    total = 0
    while nn >= 1:
        its = 0
        while True:
            l = 1
            for ll in range(nn, 1, -1):
                s = abs(a[ll - 1][ll - 1]) + abs(a[ll][ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll][ll - 1]) <= smlnum or abs(a[ll][ll - 1]) + s == s:
                    a[ll][ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn][nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
            else:
                y = a[nn - 1][nn - 1]
                w = a[nn][nn - 1] * a[nn - 1][nn]
                if l == nn - 1:
                    p = 0.5 * (y - x)
                    q = p * p + w
                    z = math.sqrt(abs(q))
                    x += t
                    if q >= 0.0:
                        z = p + _sign(z, p)
                        wr[nn - 1] = wr[nn] = x + z
                        if z:
                            wr[nn] = x - w / z
                        wi[nn - 1] = wi[nn] = 0.0
                    else:
                        wr[nn - 1] = wr[nn] = x + p
                        wi[nn - 1] = -z
                        wi[nn] = z
                    nn -= 2
                else:
                    if total >= cap:
                        raise NonConvergence(f"QR iteration exceeded cap of {cap} sweeps")
                    if its and its % 10 == 0:
                        # exceptional shift
                        t += x
                        for i in range(1, nn + 1):
                            a[i][i] -= x
                        s = abs(a[nn][nn - 1]) + abs(a[nn - 1][nn - 2])
                        y = x = 0.75 * s
                        w = -0.4375 * s * s
                    its += 1
                    total += 1
                    m = nn - 2
                    while m >= l:
                        z = a[m][m]
                        r = x - z
                        s = y - z
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1]
                        q = a[m + 1][m + 1] - z - r - s
                        r = a[m + 2][m + 1]
                        s = abs(p) + abs(q) + abs(r)
                        p /= s
                        q /= s
                        r /= s
                        if m == l:
                            break
                        u = abs(a[m][m - 1]) * (abs(q) + abs(r))
                        v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]))
                        if u + v == v:
                            break
                        m -= 1
                    for i in range(m + 2, nn + 1):
                        a[i][i - 2] = 0.0
                        if i != m + 2:
                            a[i][i - 3] = 0.0
                    for k in range(m, nn):
                        if k != m:
                            p = a[k][k - 1]
                            q = a[k + 1][k - 1]
                            r = 0.0
                            if k != nn - 1:
                                r = a[k + 2][k - 1]
                            x = abs(p) + abs(q) + abs(r)
                            if x != 0.0:
                                p /= x
                                q /= x
                                r /= x
                        s = _sign(math.sqrt(p * p + q * q + r * r), p)
                        if s != 0.0:
                            if k == m:
                                if l != m:
                                    a[k][k - 1] = -a[k][k - 1]
                            else:
                                a[k][k - 1] = -s * x
                            p += s
                            x = p / s
                            y = q / s
                            z = r / s
                            q /= p
                            r /= p
                            for j in range(k, nn + 1):
                                p = a[k][j] + q * a[k + 1][j]
                                if k != nn - 1:
                                    p += r * a[k + 2][j]
                                    a[k + 2][j] -= p * z
                                a[k + 1][j] -= p * y
                                a[k][j] -= p * x
                            mmin = nn if nn < k + 3 else k + 3
                            for i in range(l, mmin + 1):
                                p = x * a[i][k] + y * a[i][k + 1]
                                if k != nn - 1:
                                    p += z * a[i][k + 2]
                                    a[i][k + 2] -= p * r
                                a[i][k + 1] -= p * q
                                a[i][k] -= p
            if l >= nn - 1:
                break
    return wr[1:], wi[1:]


def eigvals(M, cap=None):
    """All eigenvalues of ``M`` as a complex array (no residual check)."""
    A = as_matrix(M)
    n = A.shape[0]
    if n == 1:
        return np.array([complex(A[0, 0])])
    big = float(np.max(np.abs(A)))
    if big == 0.0:
        return np.zeros(n, dtype=complex)
    # power-of-two rescale to unit magnitude is exact and keeps tiny/huge inputs off the under/overflow edges
    shift = math.frexp(big)[1]
    A = np.ldexp(A, -shift)
    # entries this far below the unit scale only feed subnormal arithmetic that stalls the sweeps;
    # zeroing them perturbs A by far less than the backward error of the iteration itself
    A[np.abs(A) < _SMLNUM * n] = 0.0
    a = [[0.0] * (n + 1)] + [[0.0] + row for row in A.tolist()]
    _balance(a, n)
    _hessenberg(a, n)
    wr, wi = _hqr(a, n, cap if cap is not None else ITER_CAP_FACTOR * n * n)
    return np.ldexp(np.array(wr), shift) + 1j * np.ldexp(np.array(wi), shift)


def residual_bound(M, lams):
    """Largest ``min_{|v|=1} |(M - lam I) v|`` over ``lams`` (smallest singular value)."""
    A = as_matrix(M)
    eye = np.eye(A.shape[0])
    worst = 0.0
    for lam in lams:
        sv = np.linalg.svd(A - lam * eye, compute_uv=False)
        worst = max(worst, float(sv[-1]))
    return worst


def eigenvalues(M, cap=None):
    A = as_matrix(M)
    lams = eigvals(A, cap)
    return Spectrum(lams, residual_bound(A, lams))


def spectral_radius(M):
    return float(np.max(np.abs(eigvals(M))))


def stability_modulus(M):
    return float(np.max(eigvals(M).real))


def is_nonnegative(M, eps=0.0):
    return bool(np.all(as_matrix(M) >= -eps))


def is_metzler(M, eps=0.0):
    A = as_matrix(M)
    off = A[~np.eye(A.shape[0], dtype=bool)]
    return bool(np.all(off >= -eps))


def perron_value_metzler(M, tol=1e-13, max_iter=200_000):
    """Stability modulus of a Metzler matrix by power iteration on ``M + aI``.

    Iterates until the Collatz-Wielandt bounds ``min(Bx/x) <= r <= max(Bx/x)``
    agree to ``tol`` (relative).  For reducible ``M`` the last iterate's
    estimate is returned once successive estimates stop moving.
    """
    A = as_matrix(M)
    if not is_metzler(A):
        raise NotMetzler("perron_value_metzler needs nonnegative off-diagonal entries")
    n = A.shape[0]
    a = max(0.0, -float(np.min(np.diag(A)))) + 1.0
    B = A + a * np.eye(n)
    x = np.ones(n)
    est = np.inf
    for _ in range(max_iter):
        y = B @ x
        pos = x > 0
        ratios = y[pos] / x[pos]
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= tol * max(1.0, abs(hi)):
            return 0.5 * (lo + hi) - a
        new = float(y.max() / x.max())
        if abs(new - est) <= 1e-15 * max(1.0, new):
            return new - a
        est = new
        x = y / y.max()
    raise NonConvergence("Perron power iteration did not converge")


def lu_factor(M):
    """Partial-pivoting LU; returns ``(LU, perm)``.  Raises Singular below the pivot floor."""
    A = as_matrix(M).copy()
    n = A.shape[0]
    floor = PIVOT_FLOOR * max(np.linalg.norm(A, np.inf), np.finfo(float).tiny)
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) < floor:
            raise Singular(f"pivot {A[p, k]:.3e} below floor {floor:.3e} at column {k}")
        if p != k:
            A[[k, p]] = A[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        A[k + 1:, k] /= A[k, k]
        A[k + 1:, k + 1:] -= np.outer(A[k + 1:, k], A[k, k + 1:])
    return A, perm


def lu_solve(M, b, factors=None):
    LU, perm = factors if factors is not None else lu_factor(M)
    b = np.asarray(b, dtype=float)
    n = LU.shape[0]
    if b.shape[0] != n:
        raise ValueError(f"rhs length {b.shape[0]} does not match matrix size {n}")
    x = b[perm].copy()
    for i in range(1, n):
        x[i] -= LU[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - LU[i, i + 1:] @ x[i + 1:]) / LU[i, i]
    return x


def solve_right(A, M):
    """``A @ inv(M)`` computed column-wise through the LU of ``M.T``."""
    A = as_matrix(A)
    fac = lu_factor(as_matrix(M).T)
    return np.array([lu_solve(None, row, fac) for row in A])
