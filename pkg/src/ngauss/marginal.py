"""Empirical marginal models and marginal Gaussianization.

The empirical CDF uses the ``rank / (n + 1)`` convention so that every
Gaussianized value is finite; ties get midranks.
"""
from dataclasses import dataclass

import numpy as np

from . import specfn
from .errors import DomainError, InputError

__all__ = [
    "MarginalModel",
    "fit_marginal",
    "ecdf",
    "quantile",
    "gaussianize",
    "inverse_gaussianize",
]

# Slack for recovering an integer rank from u * (n + 1) after rounding.
_RANK_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class MarginalModel:
    sorted_values: np.ndarray

    def __post_init__(self):
        v = self.sorted_values
        if v.ndim != 1 or v.size < 2:
            raise InputError("MarginalModel requires at least 2 values")
        if np.any(np.diff(v) < 0):
            raise InputError("sorted_values must be nondecreasing")
        v.setflags(write=False)

    @property
    def n(self):
        return self.sorted_values.size


def fit_marginal(column):
    """Fit an empirical marginal model to a 1-D sample."""
    column = np.asarray(column, dtype=float)
    if column.ndim != 1:
        raise InputError("fit_marginal expects a 1-D column")
    if column.size < 2:
        raise InputError("fit_marginal requires n >= 2")
    if not np.all(np.isfinite(column)):
        raise InputError("column contains non-finite values")
    return MarginalModel(np.sort(column, kind="stable"))


def _midrank(model, x):
    v = model.sorted_values
    below = np.searchsorted(v, x, side="left")
    upto = np.searchsorted(v, x, side="right")
    ties = upto - below
    rank = np.where(ties > 0, below + 0.5 * (ties + 1), upto)
    # A point below the sample minimum gets half a rank, never zero.
    return np.maximum(rank, 0.5)


def ecdf(model, x):
    """Empirical CDF ``rank(x) / (n + 1)``, always strictly inside (0, 1)."""
    x = np.asarray(x, dtype=float)
    out = _midrank(model, x) / (model.n + 1)
    return out.item() if out.ndim == 0 else out


def _quantile_unchecked(model, u, interpolate):
    v = model.sorted_values
    n = v.size
    pos = np.asarray(u, dtype=float) * (n + 1)
    if interpolate:
        return np.interp(pos, np.arange(1, n + 1, dtype=float), v)
    k = np.ceil(pos - _RANK_SLACK).astype(np.int64)
    return v[np.clip(k, 1, n) - 1]


def quantile(model, u, interpolate=False):
    """Empirical quantile.

    Parameters
    ----------
    model : MarginalModel
    u : float or array_like
        Probabilities in (0, 1).
    interpolate : bool
        If False, the generalized inverse ``inf{x : F(x) >= u}`` of the
        ``rank / (n + 1)`` step CDF. If True, piecewise-linear between
        adjacent order statistics placed at ``k / (n + 1)``, flat beyond
        the extremes.
    """
    u = np.asarray(u, dtype=float)
    if not np.all((u > 0.0) & (u < 1.0)):
        raise DomainError("quantile requires 0 < u < 1")
    out = _quantile_unchecked(model, u, interpolate)
    return out.item() if np.ndim(out) == 0 else out


def gaussianize(model, x):
    """Map data values to standard normal scores ``Phi^-1(ecdf(x))``."""
    return specfn.std_normal_quantile(ecdf(model, x))


def inverse_gaussianize(model, z, interpolate=False):
    """Map normal scores back to data space via ``quantile(Phi(z))``."""
    u = np.asarray(specfn.std_normal_cdf(z), dtype=float)
    out = _quantile_unchecked(model, u, interpolate)
    return out.item() if np.ndim(out) == 0 else out
