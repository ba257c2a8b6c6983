"""Seeded generators for copulas, the four simulation cases and toy data.

All randomness flows through :class:`numpy.random.Generator` backed by the
PCG64 bit generator. Normal variates come from numpy's ziggurat sampler and
gamma variates from its Marsaglia-Tsang implementation (with the
``U**(1/shape)`` boost for shapes below one). Streams for independent
replications are derived with :class:`numpy.random.SeedSequence` spawn keys,
so a stream is a pure function of ``(master_seed, key...)``.
"""
from dataclasses import dataclass

import numpy as np

from . import specfn
from .errors import DecompositionError, InputError

__all__ = [
    "make_rng",
    "stream_seed",
    "ar_correlation",
    "cholesky",
    "GaussianCopula",
    "StudentTCopula",
    "ClaytonCopula",
    "CaseSpec",
    "sample_std_normal",
    "sample_copula",
    "make_case_dataset",
    "make_fig2_dataset",
]


def make_rng(seed):
    """Return a PCG64-backed generator.

    ``seed`` may be an int, a :class:`~numpy.random.SeedSequence` or an
    existing generator (returned unchanged).
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(seed))


def stream_seed(master_seed, *key):
    """Derive an independent seed sequence from a master seed and an int key."""
    return np.random.SeedSequence(int(master_seed),
                                  spawn_key=tuple(int(k) for k in key))


def ar_correlation(p, base=2.0):
    """Correlation matrix with entries ``base ** -|a - b|``."""
    idx = np.arange(p)
    return base ** (-np.abs(idx[:, None] - idx[None, :]).astype(float))


def cholesky(corr):
    """Lower-triangular Cholesky factor ``L`` with ``L @ L.T == corr``.

    Raises
    ------
    DecompositionError
        Naming the first non-positive pivot.
    """
    a = np.asarray(corr, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError("cholesky requires a square matrix")
    p = a.shape[0]
    L = np.zeros_like(a)
    for j in range(p):
        d = a[j, j] - np.dot(L[j, :j], L[j, :j])
        if not d > 0.0:
            raise DecompositionError(j, float(d))
        L[j, j] = np.sqrt(d)
        if j + 1 < p:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


@dataclass(frozen=True)
class GaussianCopula:
    corr: np.ndarray

    @property
    def dim(self):
        return np.asarray(self.corr).shape[0]


@dataclass(frozen=True)
class StudentTCopula:
    corr: np.ndarray
    # Degrees of freedom are not pinned down by the source setup; 6 matches
    # the t(6) marginals used elsewhere.
    nu: float = 6.0

    def __post_init__(self):
        if not self.nu > 0:
            raise InputError("StudentTCopula requires nu > 0")

    @property
    def dim(self):
        return np.asarray(self.corr).shape[0]


@dataclass(frozen=True)
class ClaytonCopula:
    theta: float
    dim: int = 2

    def __post_init__(self):
        if not self.theta > 0:
            raise InputError("ClaytonCopula requires theta > 0")
        if self.dim < 1:
            raise InputError("ClaytonCopula requires dim >= 1")


@dataclass(frozen=True)
class CaseSpec:
    """One of the four benchmark distributions.

    Case 1: Gaussian copula, t(6) marginals. Case 2: Gaussian copula, Exp(1)
    marginals. Case 3: Student-t copula, N(0, 1) marginals. Case 4: Clayton
    copula (theta = 3), Exp(1) marginals. The Gaussian and t copulas use
    correlation ``2 ** -|a - b|``.
    """
    case_id: int
    n: int
    p: int
    seed: int
    t_copula_nu: float = 6.0

    def __post_init__(self):
        if self.case_id not in (1, 2, 3, 4):
            raise InputError(f"unknown case_id {self.case_id!r}")
        if self.p < 2:
            raise InputError("CaseSpec requires p >= 2")
        if self.n <= self.p:
            raise InputError("CaseSpec requires n > p")


def sample_std_normal(n, p, seed):
    """``n x p`` matrix of i.i.d. standard normal draws."""
    return make_rng(seed).standard_normal((n, p))


def _sample_copula(spec, n, rng):
    if isinstance(spec, GaussianCopula):
        L = cholesky(spec.corr)
        z = rng.standard_normal((n, spec.dim)) @ L.T
        return specfn.std_normal_cdf(z)
    if isinstance(spec, StudentTCopula):
        L = cholesky(spec.corr)
        z = rng.standard_normal((n, spec.dim)) @ L.T
        w = rng.chisquare(spec.nu, size=n)
        t = z * np.sqrt(spec.nu / w)[:, None]
        return specfn.student_t_cdf(t, spec.nu)
    if isinstance(spec, ClaytonCopula):
        # Marshall-Olkin: frailty V ~ Gamma(1/theta), E_i ~ Exp(1).
        v = rng.standard_gamma(1.0 / spec.theta, size=n)
        e = rng.standard_exponential((n, spec.dim))
        return (1.0 + e / v[:, None]) ** (-1.0 / spec.theta)
    raise InputError(f"unsupported copula spec {spec!r}")


def sample_copula(spec, n, seed):
    """Draw ``n`` rows of copula uniforms.

    Values that round to exactly 0 or 1 in double precision (possible in the
    far tails) are nudged inward so downstream quantile maps stay finite.
    """
    u = _sample_copula(spec, n, make_rng(seed))
    return np.clip(u, np.finfo(float).tiny, np.nextafter(1.0, 0.0))


def _exp_quantile(u):
    return -np.log1p(-u)


def make_case_dataset(spec):
    """Materialize a benchmark case as an ``n x p`` data matrix."""
    corr = ar_correlation(spec.p)
    if spec.case_id in (1, 2):
        copula = GaussianCopula(corr)
    elif spec.case_id == 3:
        copula = StudentTCopula(corr, spec.t_copula_nu)
    else:
        copula = ClaytonCopula(3.0, spec.p)
    u = sample_copula(copula, spec.n, spec.seed)
    if spec.case_id == 1:
        return specfn.student_t_quantile(u, 6.0)
    if spec.case_id == 3:
        return specfn.std_normal_quantile(u)
    return _exp_quantile(u)


def make_fig2_dataset(n, seed):
    """Toy data: ``X1 ~ U(-1, 1)``, ``X2 = |Z| sign(X1)`` with ``Z ~ chi2(2)``."""
    if n < 10:
        raise InputError("make_fig2_dataset requires n >= 10")
    rng = make_rng(seed)
    x1 = rng.uniform(-1.0, 1.0, size=n)
    z = rng.chisquare(2.0, size=n)
    return np.column_stack([x1, np.abs(z) * np.sign(x1)])
