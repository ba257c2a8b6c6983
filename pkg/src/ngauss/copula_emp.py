"""Empirical copula represented by its rank matrix.

The rank matrix is a sufficient statistic for the empirical copula: it is
unchanged by any strictly increasing transform of a column.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "RankMatrix",
    "rank_matrix",
    "empirical_copula",
    "copula_diagonal",
    "checkerboard_sample",
]

_GRID_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class RankMatrix:
    """``n x p`` integer ranks; every column is a permutation of ``1..n``."""
    ranks: np.ndarray

    def __post_init__(self):
        r = self.ranks
        if r.ndim != 2:
            raise InputError("RankMatrix requires a 2-D array")
        n = r.shape[0]
        expected = np.arange(1, n + 1)
        for j in range(r.shape[1]):
            if not np.array_equal(np.sort(r[:, j]), expected):
                raise InputError(f"column {j} is not a permutation of 1..{n}")
        r.setflags(write=False)

    @property
    def n(self):
        return self.ranks.shape[0]

    @property
    def p(self):
        return self.ranks.shape[1]


def rank_matrix(data):
    """Column-wise ordinal ranks (1-based), ties broken by row order."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise InputError("rank_matrix expects an n x p matrix")
    if data.shape[0] < 2:
        raise InputError("rank_matrix requires n >= 2")
    if not np.all(np.isfinite(data)):
        raise InputError("data contains non-finite values")
    n, p = data.shape
    ranks = np.empty((n, p), dtype=np.int64)
    order = np.argsort(data, axis=0, kind="stable")
    cols = np.arange(p)
    ranks[order, cols[None, :]] = np.arange(1, n + 1)[:, None]
    return RankMatrix(ranks)


def _cell_index(u, n):
    # ceil(u * n) with slack for u that are exact multiples of 1/n.
    return np.ceil(np.asarray(u, dtype=float) * n - _GRID_SLACK).astype(np.int64)


def empirical_copula(ranks, u):
    """Evaluate the empirical copula at ``u`` (length p, or ``m x p``).

    ``C(u) = (1/n) #{l : rank_li <= ceil(u_i n) for all i}``.
    """
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    u2 = np.atleast_2d(u)
    if u2.shape[1] != ranks.p:
        raise InputError(f"expected {ranks.p} coordinates, got {u2.shape[1]}")
    if np.any((u2 < 0.0) | (u2 > 1.0)):
        raise InputError("copula arguments must lie in [0, 1]")
    cut = _cell_index(u2, ranks.n)
    out = np.empty(u2.shape[0])
    for m in range(u2.shape[0]):
        out[m] = np.count_nonzero(np.all(ranks.ranks <= cut[m], axis=1))
    out /= ranks.n
    return float(out[0]) if single else out


def copula_diagonal(ranks, grid=101):
    """Diagonal section ``t -> C(t, ..., t)`` on an even grid of [0, 1].

    Returns
    -------
    t, c : ndarray
        Grid points and copula values.
    """
    if grid < 2:
        raise InputError("grid must be >= 2")
    t = np.linspace(0.0, 1.0, grid)
    # C(t,...,t) counts rows whose largest rank is within the cell cut.
    row_max = ranks.ranks.max(axis=1)
    counts = np.bincount(row_max, minlength=ranks.n + 1).cumsum()
    cut = np.clip(_cell_index(t, ranks.n), 0, ranks.n)
    return t, counts[cut] / ranks.n


def checkerboard_sample(ranks, u, pivot=0):
    """Map uniforms to a draw from the checkerboard extension of the copula.

    The pivot coordinate selects the training row whose pivot rank owns the
    cell ``ceil(u_pivot * n)``; every other coordinate is placed uniformly
    inside that row's rank cell using its own input uniform.

    Parameters
    ----------
    ranks : RankMatrix
    u : array_like
        Length-p vector or ``m x p`` matrix of values in (0, 1).
    pivot : int
        Column used to pick the training row.
    """
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    u2 = np.atleast_2d(u)
    n, p = ranks.n, ranks.p
    if u2.shape[1] != p:
        raise InputError(f"expected {p} coordinates, got {u2.shape[1]}")
    if not 0 <= pivot < p:
        raise InputError(f"pivot {pivot} out of range for p={p}")
    if np.any((u2 <= 0.0) | (u2 >= 1.0)):
        raise InputError("checkerboard_sample requires 0 < u < 1")
    row_of_rank = np.empty(n, dtype=np.int64)
    row_of_rank[ranks.ranks[:, pivot] - 1] = np.arange(n)
    cell = np.clip(_cell_index(u2[:, pivot], n), 1, n)
    rows = row_of_rank[cell - 1]
    v = (ranks.ranks[rows] - 1 + u2) / n
    v[:, pivot] = u2[:, pivot]
    return v[0] if single else v
