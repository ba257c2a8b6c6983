"""Scalar special functions and univariate distribution functions.

Everything here accepts scalars or numpy arrays and broadcasts. The normal
CDF/quantile, log-gamma, Student-t and inverse incomplete gamma are thin
wrappers over the Cephes routines in :mod:`scipy.special`; the regularized
incomplete gamma and the bivariate normal CDF are computed here.
"""
import math

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "std_normal_pdf",
    "std_normal_cdf",
    "std_normal_quantile",
    "ln_gamma",
    "regularized_gamma_p",
    "chi_cdf",
    "chi_quantile",
    "student_t_cdf",
    "student_t_quantile",
    "bivariate_normal_cdf",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_GAMMA_EPS = 1e-15
_GAMMA_MAXITER = 10_000
_TINY = 1e-300

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(200)


def _scalar_or_array(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def std_normal_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(_INV_SQRT_2PI * np.exp(-0.5 * x * x))


def std_normal_cdf(x):
    """Standard normal CDF, accurate to full double precision."""
    return _scalar_or_array(special.ndtr(np.asarray(x, dtype=float)))


def std_normal_quantile(p):
    """Inverse of the standard normal CDF.

    Parameters
    ----------
    p : float or array_like
        Probabilities strictly inside (0, 1).

    Raises
    ------
    DomainError
        If any ``p`` lies outside the open unit interval.
    """
    p = np.asarray(p, dtype=float)
    if not np.all((p > 0.0) & (p < 1.0)):
        raise DomainError("std_normal_quantile requires 0 < p < 1")
    return _scalar_or_array(special.ndtri(p))


def ln_gamma(a):
    """Natural log of the gamma function for positive arguments."""
    a = np.asarray(a, dtype=float)
    if not np.all(a > 0):
        raise DomainError("ln_gamma requires a > 0")
    return _scalar_or_array(special.gammaln(a))


def _gamma_p_series(a, x):
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_GAMMA_MAXITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a, x):
    # Modified Lentz evaluation of the continued fraction for Q(a, x).
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAXITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def _gamma_p_scalar(a, x):
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_contfrac(a, x)


def regularized_gamma_p(a, x):
    """Lower regularized incomplete gamma function P(a, x).

    Uses the power series for ``x < a + 1`` and the Legendre continued
    fraction for the complement otherwise.
    """
    a_arr, x_arr = np.broadcast_arrays(np.asarray(a, dtype=float),
                                       np.asarray(x, dtype=float))
    if not np.all(a_arr > 0):
        raise DomainError("regularized_gamma_p requires a > 0")
    if not np.all(x_arr >= 0):
        raise DomainError("regularized_gamma_p requires x >= 0")
    out = np.empty(a_arr.shape)
    for idx in np.ndindex(a_arr.shape):
        out[idx] = _gamma_p_scalar(float(a_arr[idx]), float(x_arr[idx]))
    return _scalar_or_array(out)


def chi_cdf(r, dof):
    """CDF of the chi distribution with ``dof`` degrees of freedom."""
    r = np.asarray(r, dtype=float)
    if not np.all(r >= 0):
        raise DomainError("chi_cdf requires r >= 0")
    if not np.all(np.asarray(dof) > 0):
        raise DomainError("chi_cdf requires dof > 0")
    return regularized_gamma_p(np.asarray(dof, dtype=float) / 2.0, 0.5 * r * r)


def chi_quantile(p, dof):
    """Inverse of :func:`chi_cdf` for ``0 <= p < 1``."""
    p = np.asarray(p, dtype=float)
    if not np.all((p >= 0.0) & (p < 1.0)):
        raise DomainError("chi_quantile requires 0 <= p < 1")
    dof = np.asarray(dof, dtype=float)
    if not np.all(dof > 0):
        raise DomainError("chi_quantile requires dof > 0")
    return _scalar_or_array(np.sqrt(2.0 * special.gammaincinv(dof / 2.0, p)))


def student_t_cdf(x, dof):
    """CDF of Student's t distribution."""
    if not np.all(np.asarray(dof) > 0):
        raise DomainError("student_t_cdf requires dof > 0")
    return _scalar_or_array(special.stdtr(np.asarray(dof, dtype=float),
                                          np.asarray(x, dtype=float)))


def student_t_quantile(p, dof):
    """Quantile function of Student's t distribution, ``0 < p < 1``."""
    p = np.asarray(p, dtype=float)
    if not np.all((p > 0.0) & (p < 1.0)):
        raise DomainError("student_t_quantile requires 0 < p < 1")
    if not np.all(np.asarray(dof) > 0):
        raise DomainError("student_t_quantile requires dof > 0")
    dof = np.asarray(dof, dtype=float)
    # Evaluate on the lower half only so the result is exactly antisymmetric.
    lower = np.minimum(p, 1.0 - p)
    q = special.stdtrit(dof, lower)
    q = np.where(p > 0.5, -q, q)
    return _scalar_or_array(np.where(p == 0.5, 0.0, q))


def bivariate_normal_cdf(x, y, rho):
    """P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.

    Integrates the density along the correlation path (Plackett's identity)
    with the substitution ``r = sin(t)``, which leaves a smooth bounded
    integrand on ``[0, arcsin(rho)]``; 200 Gauss-Legendre nodes give close to
    machine precision.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError("bivariate_normal_cdf requires |rho| < 1")
    x = float(x)
    y = float(y)
    base = special.ndtr(x) * special.ndtr(y)
    if rho == 0.0:
        return float(base)
    half = 0.5 * math.asin(rho)
    theta = half * (_GL_NODES + 1.0)
    s = np.sin(theta)
    c2 = np.cos(theta) ** 2
    f = np.exp(-(x * x - 2.0 * x * y * s + y * y) / (2.0 * c2))
    integral = half * np.dot(_GL_WEIGHTS, f) / (2.0 * math.pi)
    return float(min(max(base + integral, 0.0), 1.0))
