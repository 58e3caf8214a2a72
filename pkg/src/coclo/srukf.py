"""Square-root unscented Kalman filter primitives.

The belief is carried as a mean plus the lower-triangular Cholesky factor
``S`` of the covariance (``P = S @ S.T``), which is propagated directly:
QR factorization of stacked weighted deviations replaces covariance
addition, and rank-one Cholesky updates handle the (possibly negative)
central sigma-point weight and the measurement-gain correction.

Process and measurement callables are vectorized: they receive the sigma
points stacked as rows ``(2N+1, N)`` and must return the transformed rows.

Per-component gating: ``update`` takes a boolean mask over measurement
components.  Masked-out components have their innovation forced to exactly
zero before the gain is applied, so they cannot move the mean; the
covariance update keeps the full gain structure regardless of the mask.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NumericalError

logger = logging.getLogger(__name__)

# A GateMask is a boolean array with one entry per measurement component.
GateMask = np.ndarray

DEFAULT_ALPHA = 0.1
DEFAULT_BETA = 2.0
DEFAULT_KAPPA = 0.0

# Diagonal inflation used to rescue a failed rank-one downdate.
DOWNDATE_RESCUE_EPS = 1e-12


@dataclass(frozen=True)
class SqrtBelief:
    """Gaussian belief as mean and lower-triangular covariance factor."""

    mean: np.ndarray  # (N,)
    chol: np.ndarray  # (N, N) lower triangular, strictly positive diagonal

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        chol = np.asarray(self.chol, dtype=float)
        if mean.ndim != 1 or chol.shape != (mean.size, mean.size):
            raise ValueError(f"inconsistent belief shapes {mean.shape} / {chol.shape}")
        if np.any(np.triu(chol, k=1) != 0.0):
            raise ValueError("belief factor must be lower triangular")
        if np.any(np.diag(chol) <= 0.0):
            raise ValueError("belief factor must have a strictly positive diagonal")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "chol", chol)

    @property
    def dim(self) -> int:
        return self.mean.size

    def cov(self) -> np.ndarray:
        return self.chol @ self.chol.T


@dataclass(frozen=True)
class SigmaSet:
    """Sigma points (rows) with their mean and covariance weights."""

    points: np.ndarray  # (2N+1, N); row 0 is the central point
    mean_weights: np.ndarray  # (2N+1,)
    cov_weights: np.ndarray  # (2N+1,)


def ut_weights(n: int, alpha: float, beta: float, kappa: float):
    """Scaled unscented-transform scaling factor and weights."""
    lam = alpha * alpha * (n + kappa) - n
    if n + lam <= 0.0:
        raise ValueError(f"invalid UT scaling: n+lambda = {n + lam} <= 0")
    wm = np.full(2 * n + 1, 1.0 / (2.0 * (n + lam)))
    wc = wm.copy()
    wm[0] = lam / (n + lam)
    wc[0] = lam / (n + lam) + (1.0 - alpha * alpha + beta)
    return np.sqrt(n + lam), wm, wc


def sigma_points(
    belief: SqrtBelief,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    kappa: float = DEFAULT_KAPPA,
) -> SigmaSet:
    """Generate 2N+1 scaled sigma points from a square-root belief."""
    n = belief.dim
    gamma, wm, wc = ut_weights(n, alpha, beta, kappa)
    pts = np.empty((2 * n + 1, n))
    pts[0] = belief.mean
    spread = gamma * belief.chol.T  # row i is gamma * (column i of S)
    pts[1 : n + 1] = belief.mean[None, :] + spread
    pts[n + 1 :] = belief.mean[None, :] - spread
    return SigmaSet(points=pts, mean_weights=wm, cov_weights=wc)


def chol_rank1(S: np.ndarray, v: np.ndarray, sign: int) -> np.ndarray:
    """Rank-one update (+1) or downdate (-1) of a lower Cholesky factor.

    Returns the lower-triangular factor of ``S @ S.T + sign * outer(v, v)``.
    Raises NumericalError when a downdate would destroy positive
    definiteness.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    S = np.array(S, dtype=float)
    v = np.array(v, dtype=float)
    n = v.size
    if S.shape != (n, n):
        raise ValueError(f"factor shape {S.shape} does not match vector size {n}")
    for k in range(n):
        d2 = S[k, k] * S[k, k] + sign * v[k] * v[k]
        if d2 <= 0.0:
            raise NumericalError("rank-one downdate lost positive definiteness")
        r = np.sqrt(d2)
        c = r / S[k, k]
        s = v[k] / S[k, k]
        S[k, k] = r
        if k + 1 < n:
            S[k + 1 :, k] = (S[k + 1 :, k] + sign * s * v[k + 1 :]) / c
            v[k + 1 :] = c * v[k + 1 :] - s * S[k + 1 :, k]
    return S


def _downdate_with_rescue(S: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Downdate that falls back to a regularized refactorization.

    When the fast rank-one pass fails, the full matrix
    ``S S^T - v v^T + eps I`` is refactorized once; only if that is still
    not positive definite does the failure propagate.
    """
    try:
        return chol_rank1(S, v, -1)
    except NumericalError:
        logger.warning("rank-one downdate failed; refactorizing with eps=%.1e", DOWNDATE_RESCUE_EPS)
        P = S @ S.T - np.outer(v, v) + DOWNDATE_RESCUE_EPS * np.eye(S.shape[0])
        try:
            return np.linalg.cholesky(P)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("covariance downdate is not positive definite") from exc


def _apply_central_weight(S: np.ndarray, dev0: np.ndarray, wc0: float) -> np.ndarray:
    """Fold the central sigma-point deviation into a QR-built factor."""
    if wc0 == 0.0 or not np.any(dev0):
        return S
    u = np.sqrt(abs(wc0)) * dev0
    if wc0 > 0.0:
        return chol_rank1(S, u, 1)
    return _downdate_with_rescue(S, u)


def _qr_factor(rows: np.ndarray) -> np.ndarray:
    """Lower-triangular factor with positive diagonal from stacked rows.

    ``rows.T @ rows`` is the matrix being factorized.
    """
    r = np.linalg.qr(rows, mode="r")
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return (r * signs[:, None]).T


def predict(
    belief: SqrtBelief,
    process: Callable[[np.ndarray], np.ndarray],
    process_noise_sqrt: np.ndarray,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    kappa: float = DEFAULT_KAPPA,
) -> SqrtBelief:
    """Unscented prediction through ``process`` with additive noise.

    ``process_noise_sqrt`` is a square root of the process-noise covariance
    (lower triangular or diagonal); it enters the QR stack by columns.
    """
    n = belief.dim
    sig = sigma_points(belief, alpha, beta, kappa)
    Y = np.asarray(process(sig.points), dtype=float)
    if Y.shape != sig.points.shape:
        raise ValueError(f"process must map {sig.points.shape} to itself, got {Y.shape}")
    mean = sig.mean_weights @ Y
    dev = Y - mean[None, :]
    rows = np.vstack([
        np.sqrt(sig.cov_weights[1]) * dev[1:],
        np.asarray(process_noise_sqrt, dtype=float).T,
    ])
    S = _qr_factor(rows)
    S = _apply_central_weight(S, dev[0], sig.cov_weights[0])
    return SqrtBelief(mean=mean, chol=S)


def update(
    belief: SqrtBelief,
    measure: Callable[[np.ndarray], np.ndarray],
    meas_noise_sqrt: np.ndarray,
    observed: np.ndarray,
    gate: GateMask | None = None,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    kappa: float = DEFAULT_KAPPA,
) -> tuple[SqrtBelief, np.ndarray]:
    """Measurement update; returns the posterior and the gated innovation.

    The posterior factor comes from a QR over the gain-corrected state
    deviations plus the scaled noise columns, which equals the standard
    ``P - K Pzz K^T`` but stays positive semidefinite by construction.
    """
    observed = np.asarray(observed, dtype=float)
    sig = sigma_points(belief, alpha, beta, kappa)
    Z = np.asarray(measure(sig.points), dtype=float)
    if Z.ndim != 2 or Z.shape[0] != sig.points.shape[0]:
        raise ValueError(f"measure must return one row per sigma point, got {Z.shape}")
    m = Z.shape[1]
    if observed.shape != (m,):
        raise ValueError(f"observed shape {observed.shape} does not match measurement dim {m}")
    if gate is None:
        gate = np.ones(m, dtype=bool)
    gate = np.asarray(gate, dtype=bool)
    if gate.shape != (m,):
        raise ValueError(f"gate shape {gate.shape} does not match measurement dim {m}")
    R_sqrt = np.asarray(meas_noise_sqrt, dtype=float)
    if R_sqrt.shape != (m, m):
        raise ValueError(f"meas_noise_sqrt must be ({m}, {m}), got {R_sqrt.shape}")

    z_mean = sig.mean_weights @ Z
    z_dev = Z - z_mean[None, :]
    Sz = _qr_factor(np.vstack([np.sqrt(sig.cov_weights[1]) * z_dev[1:], R_sqrt.T]))
    Sz = _apply_central_weight(Sz, z_dev[0], sig.cov_weights[0])

    x_dev = sig.points - belief.mean[None, :]
    Pxz = (sig.cov_weights[:, None] * x_dev).T @ z_dev
    # K = Pxz (Sz Sz^T)^-1 via two triangular solves
    tmp = solve_triangular(Sz, Pxz.T, lower=True)
    K = solve_triangular(Sz.T, tmp, lower=False).T

    innovation = observed - z_mean
    innovation[~gate] = 0.0
    mean = belief.mean + K @ innovation

    joseph = x_dev - z_dev @ K.T  # rows: (x_i - mean) - K (z_i - z_mean)
    rows = np.vstack([np.sqrt(sig.cov_weights[1]) * joseph[1:], (K @ R_sqrt).T])
    S = _qr_factor(rows)
    S = _apply_central_weight(S, joseph[0], sig.cov_weights[0])
    return SqrtBelief(mean=mean, chol=S), innovation
