"""Comparison Gaussianizers: Box-Cox (BCG), radial (RG) and RBIG with PCA.

Also exposes the Box-Cox transform family (classic, Manly exponential,
generalized, arcsinh) as element-wise maps.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import specfn
from .errors import DomainError, FitError, InputError
from .marginal import ecdf, fit_marginal, gaussianize, inverse_gaussianize

__all__ = [
    "box_cox",
    "manly",
    "generalized_box_cox",
    "arcsinh_box_cox",
    "BoxCoxParams",
    "boxcox_profile_loglik",
    "fit_bcg",
    "bcg_transform",
    "whiten",
    "radial_gaussianize",
    "RbigModel",
    "rbig",
    "rbig_inverse",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SMALL_LAMBDA = 1e-10


def _out(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def box_cox(u, lam):
    """Classic Box-Cox: ``(u**lam - 1) / lam``, or ``log(u)`` at ``lam = 0``."""
    u = np.asarray(u, dtype=float)
    if not np.all(u > 0):
        raise DomainError("box_cox requires u > 0")
    log_u = np.log(u)
    if abs(lam) < _SMALL_LAMBDA:
        # Series form; lam * log(u) would underflow for subnormal lam.
        return _out(log_u * (1.0 + 0.5 * lam * log_u))
    # expm1 keeps the map continuous in lam near 0.
    return _out(np.expm1(lam * log_u) / lam)


def manly(u, lam):
    """Exponential transform ``(exp(lam u) - 1) / lam``; identity at 0."""
    u = np.asarray(u, dtype=float)
    if lam == 0:
        return _out(u.copy())
    return _out(np.expm1(lam * u) / lam)


def generalized_box_cox(u, alpha, beta, lam):
    """Box-Cox applied to ``(u - alpha) / beta``."""
    if not beta > 0:
        raise DomainError("generalized_box_cox requires beta > 0")
    u = np.asarray(u, dtype=float)
    if not np.all(u > alpha):
        raise DomainError("generalized_box_cox requires u > alpha")
    return box_cox((u - alpha) / beta, lam)


def arcsinh_box_cox(u, lam, t):
    """Arcsinh-Box-Cox transform.

    ``sinh(t g) / t`` for ``t > 0``, ``g`` for ``t = 0`` and ``arcsinh(t g)``
    for ``t < 0``, where ``g = box_cox(u, lam)``. The negative branch carries
    no ``1/t`` factor.
    """
    g = np.asarray(box_cox(u, lam), dtype=float)
    if t > 0:
        return _out(np.sinh(t * g) / t)
    if t == 0:
        return _out(g)
    return _out(np.arcsinh(t * g))


@dataclass(frozen=True, eq=False)
class BoxCoxParams:
    lam: np.ndarray
    shift: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    converged: bool = True
    sweeps: int = 0


def _positivity_shift(data):
    lo = data.min(axis=0)
    span = data.max(axis=0) - lo
    return np.where(lo <= 0, -lo + span * 1e-3, 0.0)


def _box_cox_columns(x, lam):
    return np.column_stack([box_cox(x[:, i], float(lam[i]))
                            for i in range(x.shape[1])])


def boxcox_profile_loglik(x, lam):
    """Profile log-likelihood of Box-Cox exponents ``lam`` on positive data.

    ``mu`` and ``Sigma`` are replaced by their MLEs, leaving
    ``-n/2 log|Sigma_hat| + sum_i (lam_i - 1) sum_l log x_li``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    n = x.shape[0]
    g = _box_cox_columns(x, lam)
    g = g - g.mean(axis=0)
    cov = g.T @ g / n
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0 or not np.isfinite(logdet):
        return -math.inf
    return -0.5 * n * logdet + float(((lam - 1.0) * np.log(x).sum(axis=0)).sum())


def _golden_max(f, lo, hi, tol):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    # Golden section assumes unimodality; keep the best endpoint otherwise.
    best = max((f(x), x), (f(lo), lo), (f(hi), hi))
    return best[1]


def fit_bcg(data, lambda_range=(-2.0, 2.0), max_iters=30, tol=1e-4):
    """Fit per-column Box-Cox exponents by maximum profile likelihood.

    Columns containing non-positive values are first shifted by
    ``-min + 1e-3 * range``. The exponents are optimized by coordinate-wise
    golden-section search over ``lambda_range`` for at most ``max_iters``
    sweeps; ``mu`` and ``sigma`` are the MLEs of the transformed data.

    Raises
    ------
    FitError
        If the transformed covariance is degenerate.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, p = x.shape
    if n <= p:
        raise FitError(f"fit_bcg requires n > p (n={n}, p={p})")
    if not np.all(np.isfinite(x)):
        raise InputError("data contains non-finite values")
    lo, hi = map(float, lambda_range)
    shift = _positivity_shift(x)
    xs = x + shift
    lam = np.clip(np.ones(p), lo, hi)
    best = boxcox_profile_loglik(xs, lam)
    if not np.isfinite(best):
        raise FitError("degenerate covariance at the starting exponents")
    converged = False
    sweeps = 0
    for sweeps in range(1, max_iters + 1):
        old = lam.copy()
        for i in range(p):
            def f(v, i=i):
                trial = lam.copy()
                trial[i] = v
                return boxcox_profile_loglik(xs, trial)
            cand = _golden_max(f, lo, hi, tol)
            val = f(cand)
            if val >= best:
                lam[i], best = cand, val
        if p == 1 or np.max(np.abs(lam - old)) < tol:
            converged = True
            break
    g = _box_cox_columns(xs, lam)
    mu = g.mean(axis=0)
    centered = g - mu
    sigma = centered.T @ centered / n
    if np.linalg.matrix_rank(sigma) < p:
        raise FitError("degenerate covariance of the transformed data")
    return BoxCoxParams(lam, shift, mu, sigma, converged, sweeps)


def _inv_sqrt_psd(sigma):
    w, v = np.linalg.eigh(sigma)
    if w.min() <= w.max() * 1e-12:
        raise FitError("covariance matrix is singular")
    return (v / np.sqrt(w)) @ v.T


def bcg_transform(params, data):
    """Box-Cox each column and whiten: ``Sigma^-1/2 (g(x) - mu)``."""
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    xs = x + params.shift
    if not np.all(xs > 0):
        raise DomainError("shifted data must be positive for Box-Cox")
    g = _box_cox_columns(xs, params.lam)
    return (g - params.mu) @ _inv_sqrt_psd(np.atleast_2d(params.sigma))


def whiten(data):
    """Zero-mean, identity-covariance version of ``data`` (symmetric root)."""
    x = np.asarray(data, dtype=float)
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (x.shape[0] - 1)
    return centered @ _inv_sqrt_psd(cov)


def radial_gaussianize(data):
    """Radial Gaussianization.

    Whitens the data, then rescales each row so that its radius follows the
    chi law with ``p`` degrees of freedom: ``r -> F_chi^-1(F_r(r))`` where
    ``F_r`` is the empirical CDF of the radii (``rank / (n + 1)``).
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise InputError("radial_gaussianize expects an n x p matrix")
    n, p = x.shape
    if n <= p:
        raise InputError(f"radial_gaussianize requires n > p (n={n}, p={p})")
    w = whiten(x)
    r = np.linalg.norm(w, axis=1)
    target = specfn.chi_quantile(ecdf(fit_marginal(r), r), p)
    scale = np.divide(target, r, out=np.zeros_like(r), where=r > 0)
    return w * scale[:, None]


@dataclass(frozen=True, eq=False)
class RbigModel:
    """Recorded RBIG stages: ``(marginals, rotation)`` per iteration."""
    iterations: tuple

    @property
    def iter_count(self):
        return len(self.iterations)


def _pca_rotation(x, it):
    cov = np.cov(x, rowvar=False)
    w, v = np.linalg.eigh(cov)
    if not np.all(np.isfinite(w)) or w.min() <= w.max() * 1e-12:
        raise FitError(f"degenerate covariance at RBIG iteration {it}")
    v = v[:, np.argsort(w)[::-1]]
    # Fix signs: largest-magnitude component of each eigenvector positive.
    lead = v[np.argmax(np.abs(v), axis=0), np.arange(v.shape[1])]
    return v * np.where(lead < 0, -1.0, 1.0)


def rbig(data, max_iters=50):
    """Rotation-based iterative Gaussianization with PCA rotations.

    Each iteration Gaussianizes every column with its empirical CDF and then
    rotates onto the principal axes of the result.

    Returns
    -------
    out : ndarray
        Transformed data.
    model : RbigModel
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise InputError("rbig expects an n x p matrix")
    n, p = x.shape
    if n <= p:
        raise InputError(f"rbig requires n > p (n={n}, p={p})")
    stages = []
    for it in range(max_iters):
        marginals = tuple(fit_marginal(x[:, i]) for i in range(p))
        g = np.column_stack([gaussianize(m, x[:, i])
                             for i, m in enumerate(marginals)])
        rot = _pca_rotation(g, it)
        x = g @ rot
        stages.append((marginals, rot))
    return x, RbigModel(tuple(stages))


def rbig_inverse(model, z):
    """Invert RBIG stages, with interpolated marginal quantiles."""
    x = np.atleast_2d(np.asarray(z, dtype=float))
    for marginals, rot in reversed(model.iterations):
        g = x @ rot.T
        x = np.column_stack([inverse_gaussianize(m, g[:, i], interpolate=True)
                             for i, m in enumerate(marginals)])
    return x
