"""Normality tests, kernel density estimates and KL divergence to N(0, I).

The univariate Shapiro-Wilk test follows Royston's AS R94 approximations for
the coefficients and for the null distribution of W. Royston's H test
combines the per-column Shapiro-Wilk z-scores through an equivalent degrees
of freedom correction.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from . import specfn
from .errors import FitError, InputError, NormalityTestError
from .sampling import make_rng

__all__ = [
    "KdeModel",
    "EvalReport",
    "kde_fit",
    "kde_pdf",
    "kld_vs_standard_normal",
    "shapiro_wilk",
    "royston_mvn_test",
    "shapiro_projection_test",
    "max_abs_cross_correlation",
    "kendall_tau",
]

_PDF_FLOOR = 1e-300

# AS R94 polynomial coefficients, lowest order first.
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582663)
_G = (-2.273, 0.459)
_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)


def _poly(coef, x):
    return sum(c * x ** k for k, c in enumerate(coef))


def _sw_coefficients(n):
    """Upper-half Shapiro-Wilk weights, largest order statistic first."""
    if n == 3:
        return np.array([math.sqrt(0.5)])
    half = n // 2
    i = np.arange(1, half + 1)
    m = specfn.std_normal_quantile((i - 0.375) / (n + 0.25))
    summ2 = 2.0 * np.dot(m, m)
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a1 = _poly(_C1, rsn) - m[0] / ssumm2
    if n > 5:
        a2 = -m[1] / ssumm2 + _poly(_C2, rsn)
        fac = math.sqrt((summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2)
                        / (1.0 - 2.0 * a1 ** 2 - 2.0 * a2 ** 2))
        a = -m / fac
        a[1] = a2
    else:
        fac = math.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1 ** 2))
        a = -m / fac
    a[0] = a1
    return a


def _shapiro_wilk_core(x):
    """Return ``(W, z, pvalue)``; ``z`` is the upper-tail normal score."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InputError("shapiro_wilk expects a 1-D sample")
    n = x.size
    if not 3 <= n <= 5000:
        raise NormalityTestError(f"shapiro_wilk requires 3 <= n <= 5000, got {n}")
    if not np.all(np.isfinite(x)):
        raise InputError("sample contains non-finite values")
    xs = np.sort(x)
    if xs[-1] - xs[0] <= 1e-10 * max(1.0, abs(xs[-1])):
        raise NormalityTestError("sample has zero range")
    a = _sw_coefficients(n)
    half = a.size
    diff = xs[::-1][:half] - xs[:half]
    centered = xs - xs.mean()
    w = float(np.dot(a, diff) ** 2 / np.dot(centered, centered))
    w = min(w, 1.0)
    if n == 3:
        pw = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        pw = min(max(pw, 0.0), 1.0)
        z = float(special.ndtri(min(max(1.0 - pw, 1e-300), 1.0 - 1e-16)))
        return w, z, pw
    w1 = math.log(max(1.0 - w, 1e-300))
    if n <= 11:
        gamma = _poly(_G, n)
        if w1 >= gamma:
            return w, math.inf, 0.0
        y = -math.log(gamma - w1)
        mean = _poly(_C3, n)
        sd = math.exp(_poly(_C4, n))
    else:
        ln = math.log(n)
        y = w1
        mean = _poly(_C5, ln)
        sd = math.exp(_poly(_C6, ln))
    z = (y - mean) / sd
    return w, z, float(special.ndtr(-z))


def shapiro_wilk(sample):
    """Shapiro-Wilk test of univariate normality.

    Parameters
    ----------
    sample : array_like
        1-D sample with ``3 <= n <= 5000`` and nonzero range.

    Returns
    -------
    W : float
        Test statistic in (0, 1].
    pvalue : float
    """
    w, _, pw = _shapiro_wilk_core(sample)
    return w, pw


def royston_mvn_test(sample):
    """Royston's H test of multivariate normality.

    Returns
    -------
    H : float
        Test statistic, approximately chi-square with ``e`` degrees of freedom
        under the null, where ``e`` is the equivalent degrees of freedom.
    pvalue : float
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise InputError("royston_mvn_test expects an n x p matrix with p >= 2")
    n, p = x.shape
    if not 3 <= n <= 5000:
        raise NormalityTestError(f"royston_mvn_test requires 3 <= n <= 5000, got {n}")
    z = np.array([_shapiro_wilk_core(x[:, j])[1] for j in range(p)])
    corr = np.corrcoef(x, rowvar=False)
    if not np.all(np.isfinite(corr)):
        raise NormalityTestError("constant column")
    if np.linalg.matrix_rank(corr) < p:
        raise NormalityTestError("singular covariance")
    ln = math.log(n)
    u = 0.715
    v = 0.21364 + 0.015124 * ln ** 2 - 0.0018034 * ln ** 3
    nc = corr ** 5 * (1.0 - u * (1.0 - corr) ** u / v)
    mean_c = (nc.sum() - p) / (p * p - p)
    edf = p / (1.0 + (p - 1) * mean_c)
    res = special.ndtri(special.ndtr(-z) / 2.0) ** 2
    h = float(edf * res.sum() / p)
    return h, float(special.gammaincc(edf / 2.0, h / 2.0))


def shapiro_projection_test(sample):
    """Shapiro-Wilk test on the projection towards the most outlying point.

    The sample is projected on ``S^-1 (x_k - mean)`` where ``x_k`` has the
    largest Mahalanobis distance, and the projection is tested with the
    univariate Shapiro-Wilk test.

    Returns
    -------
    W, pvalue : float
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim != 2:
        raise InputError("shapiro_projection_test expects an n x p matrix")
    r = x - x.mean(axis=0)
    scatter = r.T @ r
    try:
        m = np.linalg.inv(scatter)
    except np.linalg.LinAlgError as exc:
        raise NormalityTestError("singular covariance") from exc
    dist = np.einsum("ij,jk,ik->i", r, m, r)
    direction = m @ r[np.argmax(dist)]
    return shapiro_wilk(x @ direction)


def max_abs_cross_correlation(sample):
    """Largest absolute Pearson correlation between distinct columns."""
    x = np.asarray(sample, dtype=float)
    if x.ndim != 2 or x.shape[0] < 3 or x.shape[1] < 2:
        raise InputError("need an n x p matrix with n >= 3 and p >= 2")
    if np.any(np.ptp(x, axis=0) == 0):
        raise InputError("constant column")
    c = np.corrcoef(x, rowvar=False)
    iu = np.triu_indices(c.shape[0], k=1)
    return float(np.max(np.abs(c[iu])))


def kendall_tau(x, y):
    """Kendall's tau-b between two samples (O(n log n))."""
    return float(stats.kendalltau(x, y).statistic)


@dataclass(frozen=True, eq=False)
class KdeModel:
    points: np.ndarray
    bandwidths: np.ndarray


@dataclass(frozen=True)
class EvalReport:
    """Aggregated evaluation of one transform on one configuration."""
    kld_mean: float
    kld_sd: float
    pvalue: float
    statistic: float
    reps: int

    def __post_init__(self):
        if self.reps < 1:
            raise InputError("reps must be >= 1")
        if not self.kld_sd >= 0:
            raise InputError("kld_sd must be nonnegative")


def kde_fit(sample):
    """Product-Gaussian KDE with Silverman bandwidths ``1.06 sd n^(-1/(p+4))``."""
    x = np.asarray(sample, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, p = x.shape
    if n < 2:
        raise InputError("kde_fit requires n >= 2")
    sd = x.std(axis=0, ddof=1)
    if np.any(sd <= 0):
        raise FitError("kde_fit: zero-variance column")
    h = 1.06 * sd * n ** (-1.0 / (p + 4))
    return KdeModel(x.copy(), h)


def kde_pdf(model, x, chunk=256):
    """Evaluate the KDE at one point (length p) or many (``m x p``)."""
    pts = model.points / model.bandwidths
    xq = np.asarray(x, dtype=float)
    single = xq.ndim <= 1
    xq = np.atleast_2d(xq.reshape(1, -1) if single else xq) / model.bandwidths
    p = pts.shape[1]
    norm = (2.0 * math.pi) ** (-0.5 * p) / np.prod(model.bandwidths)
    out = np.empty(xq.shape[0])
    for start in range(0, xq.shape[0], chunk):
        block = xq[start:start + chunk]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        out[start:start + chunk] = np.exp(-0.5 * d2).mean(axis=1)
    out = np.maximum(out * norm, _PDF_FLOOR)
    return float(out[0]) if single else out


def kld_vs_standard_normal(sample, n_eval=1000, box_halfwidth=5.0, seed=0,
                           density=None):
    """Monte-Carlo estimate of ``KLD(phi || phi_hat)``.

    ``phi_hat`` is the KDE of ``sample`` unless ``density`` (a callable on an
    ``m x p`` array) is supplied. Evaluation points are uniform on the box
    ``[-b, b]^p``.
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if n_eval < 1:
        raise InputError("n_eval must be >= 1")
    p = x.shape[1]
    b = float(box_halfwidth)
    pts = make_rng(seed).uniform(-b, b, size=(n_eval, p))
    log_phi = -0.5 * (pts ** 2).sum(axis=1) - 0.5 * p * math.log(2.0 * math.pi)
    if density is None:
        est = kde_pdf(kde_fit(x), pts)
    else:
        est = np.maximum(np.asarray(density(pts), dtype=float), _PDF_FLOOR)
    integrand = np.exp(log_phi) * (log_phi - np.log(est))
    return float((2.0 * b) ** p * integrand.mean())
