"""Non-iterative copula-based Gaussianization.

Fitting stores the per-column empirical marginals, the rank matrix (the
empirical copula) and a re-ranking plan. The forward transform Gaussianizes
each column with its empirical CDF and then rotates column ``i`` cyclically
by its shift ``s_i``, so that every output row draws each coordinate from a
different training row. On the training sample the transform is an exact
bijection; new points are generated from the checkerboard extension of the
stored copula.
"""
import json
import math
from dataclasses import dataclass

import numpy as np

from . import specfn
from .copula_emp import RankMatrix, checkerboard_sample, rank_matrix
from .errors import (InputError, NgaussError, NormalityTestError, ParseError,
                     PlanError, SelectionError)
from .evaluate import royston_mvn_test
from .marginal import (MarginalModel, _quantile_unchecked, fit_marginal,
                       gaussianize, inverse_gaussianize)

__all__ = [
    "RerankPlan",
    "NgModel",
    "make_rerank_plan",
    "default_delta_candidates",
    "rerank",
    "unrerank",
    "fit_ng",
    "fit_synthesis_model",
    "ng_forward",
    "ng_forward_out_of_sample",
    "ng_inverse_training",
    "ng_synthesize",
    "select_delta",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

MODEL_FORMAT = "ngauss-model"
MODEL_VERSION = 1
_MAX_DEFAULT_DELTA = 10


@dataclass(frozen=True)
class RerankPlan:
    shifts: tuple
    deltas: tuple
    n: int

    @property
    def p(self):
        return len(self.shifts)


def make_rerank_plan(n, p, deltas=None):
    """Build the cyclic re-ranking plan ``s_i = (i - 1 + delta_i) mod n``.

    Parameters
    ----------
    n, p : int
        Sample size and dimension, ``n >= p``.
    deltas : sequence of int, optional
        Offsets with ``delta_1 = 0`` and ``0 <= delta_i <= floor(n / p)``.
        Defaults to all zeros.

    Raises
    ------
    PlanError
        On invalid offsets or when two columns would share a shift.
    """
    n = int(n)
    p = int(p)
    if p < 1:
        raise PlanError("p must be >= 1")
    if n < p:
        raise PlanError(f"re-ranking needs n >= p (n={n}, p={p})")
    deltas = (0,) * p if deltas is None else tuple(int(d) for d in deltas)
    if len(deltas) != p:
        raise PlanError(f"expected {p} deltas, got {len(deltas)}")
    if deltas[0] != 0:
        raise PlanError("delta_1 must be 0")
    cap = n // p
    for i, d in enumerate(deltas):
        if not 0 <= d <= cap:
            raise PlanError(f"delta_{i + 1} = {d} outside [0, {cap}]")
    shifts = tuple((i + d) % n for i, d in enumerate(deltas))
    if len(set(shifts)) != p:
        raise PlanError(f"shifts {shifts} coincide modulo n={n}")
    return RerankPlan(shifts, deltas, n)


def default_delta_candidates(n, p, max_delta=_MAX_DEFAULT_DELTA):
    """Candidates ``(0, c, ..., c)`` for ``c = 0..min(floor(n/p), max_delta)``."""
    top = min(n // p, max_delta)
    return [(0,) + (c,) * (p - 1) for c in range(top + 1)]


def _check_plan_dims(matrix, plan):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape != (plan.n, plan.p):
        raise InputError(
            f"matrix shape {matrix.shape} does not match plan ({plan.n}, {plan.p})")
    return matrix


def rerank(matrix, plan):
    """Output row ``m`` of column ``i`` is input row ``(m + s_i) mod n``."""
    matrix = _check_plan_dims(matrix, plan)
    out = np.empty_like(matrix)
    for i, s in enumerate(plan.shifts):
        out[:, i] = np.roll(matrix[:, i], -s)
    return out


def unrerank(matrix, plan):
    """Inverse of :func:`rerank`."""
    matrix = _check_plan_dims(matrix, plan)
    out = np.empty_like(matrix)
    for i, s in enumerate(plan.shifts):
        out[:, i] = np.roll(matrix[:, i], s)
    return out


@dataclass(frozen=True, eq=False)
class NgModel:
    """Fitted transform.

    ``plan`` is None for synthesis-only models fitted with ``n <= p``.
    """
    marginals: tuple
    plan: object
    ranks: RankMatrix

    def __post_init__(self):
        n, p = self.ranks.ranks.shape
        if len(self.marginals) != p:
            raise InputError("number of marginals does not match rank matrix")
        if any(m.n != n for m in self.marginals):
            raise InputError("marginals do not share the sample size")
        if self.plan is not None and (self.plan.n, self.plan.p) != (n, p):
            raise InputError("plan dimensions do not match rank matrix")

    @property
    def n(self):
        return self.ranks.n

    @property
    def p(self):
        return self.ranks.p


def _as_matrix(data):
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise InputError("expected an n x p data matrix")
    if not np.all(np.isfinite(data)):
        raise InputError("data contains non-finite values")
    return data


def _gaussianize_columns(marginals, data):
    return np.column_stack([gaussianize(m, data[:, i])
                            for i, m in enumerate(marginals)])


def fit_ng(data, deltas=None, candidates=None):
    """Fit the transform on an ``n x p`` sample.

    Parameters
    ----------
    data : array_like
        Training matrix with ``n > p >= 2``.
    deltas : sequence of int, optional
        Fixed re-ranking offsets. When omitted they are chosen by
        :func:`select_delta` among ``candidates`` (default
        :func:`default_delta_candidates`).
    """
    data = _as_matrix(data)
    n, p = data.shape
    if p < 2:
        raise InputError("fit_ng requires p >= 2")
    if n <= p:
        raise InputError(f"fit_ng requires n > p (n={n}, p={p})")
    if deltas is None:
        if candidates is None:
            candidates = default_delta_candidates(n, p)
        deltas = select_delta(data, candidates)
    plan = make_rerank_plan(n, p, deltas)
    marginals = tuple(fit_marginal(data[:, i]) for i in range(p))
    return NgModel(marginals, plan, rank_matrix(data))


def fit_synthesis_model(data):
    """Fit marginals and copula only; allows ``n <= p`` (e.g. images)."""
    data = _as_matrix(data)
    if data.shape[0] < 2:
        raise InputError("need at least 2 observations")
    marginals = tuple(fit_marginal(data[:, i]) for i in range(data.shape[1]))
    return NgModel(marginals, None, rank_matrix(data))


def _require_plan(model):
    if model.plan is None:
        raise InputError("model has no re-ranking plan (synthesis-only)")
    return model.plan


def ng_forward(model, data):
    """Transform the training sample to pseudo-observations.

    Every output column is a permutation of ``Phi^-1(k / (n + 1))``,
    ``k = 1..n`` (for distinct training values).
    """
    plan = _require_plan(model)
    data = _as_matrix(data)
    _check_plan_dims(data, plan)
    return rerank(_gaussianize_columns(model.marginals, data), plan)


def ng_forward_out_of_sample(model, data):
    """Marginal Gaussianization of new points.

    Re-ranking is only defined on a whole sample, so new points receive the
    fitted marginal maps alone; their dependence is not removed.
    """
    data = _as_matrix(data)
    if data.shape[1] != model.p:
        raise InputError(f"expected {model.p} columns, got {data.shape[1]}")
    return _gaussianize_columns(model.marginals, data)


def ng_inverse_training(model, pseudo):
    """Exact inverse of :func:`ng_forward` on its output."""
    plan = _require_plan(model)
    pseudo = _as_matrix(pseudo)
    z = unrerank(pseudo, plan)
    return np.column_stack([inverse_gaussianize(m, z[:, i], interpolate=False)
                            for i, m in enumerate(model.marginals)])


def ng_synthesize(model, z, pivot=0):
    """Map fresh standard normal draws to new data-space samples.

    Each row is pushed through ``Phi``, then through the checkerboard
    extension of the stored copula, and finally through the interpolated
    empirical quantiles of the training marginals.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[1] != model.p:
        raise InputError(f"expected {model.p} columns, got {z.shape[1]}")
    eps = np.finfo(float).eps
    u = np.clip(specfn.std_normal_cdf(z), eps, 1.0 - eps)
    v = checkerboard_sample(model.ranks, u, pivot=pivot)
    return np.column_stack([_quantile_unchecked(m, v[:, i], True)
                            for i, m in enumerate(model.marginals)])


def select_delta(data, candidates):
    """Pick the offsets whose forward output has the largest Royston p-value.

    Invalid candidates are skipped; ties keep the earliest candidate.

    Raises
    ------
    SelectionError
        If no candidate yields a valid plan and a computable test.
    """
    data = _as_matrix(data)
    n, p = data.shape
    candidates = list(candidates)
    if not candidates:
        raise SelectionError("no delta candidates given")
    gauss = None
    best, best_p = None, -math.inf
    for cand in candidates:
        try:
            plan = make_rerank_plan(n, p, cand)
        except PlanError:
            continue
        if len(candidates) == 1:
            return plan.deltas
        if gauss is None:
            gauss = _gaussianize_columns(
                [fit_marginal(data[:, i]) for i in range(p)], data)
        try:
            _, pval = royston_mvn_test(rerank(gauss, plan))
        except (NormalityTestError, InputError):
            continue
        if pval > best_p:
            best, best_p = plan.deltas, pval
    if best is None:
        raise SelectionError("all delta candidates are invalid")
    return best


def model_to_dict(model):
    """Plain-JSON representation of a fitted model.

    Schema (version 1)::

        {"format": "ngauss-model", "version": 1, "n": int, "p": int,
         "deltas": [int] | null, "shifts": [int] | null,
         "sorted_values": [[float, ...] per column],
         "ranks": [[int, ...] per row]}

    Floats are written with Python's shortest round-trip repr, so a
    save/load cycle is bit-exact.
    """
    plan = model.plan
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "n": model.n,
        "p": model.p,
        "deltas": None if plan is None else list(plan.deltas),
        "shifts": None if plan is None else list(plan.shifts),
        "sorted_values": [m.sorted_values.tolist() for m in model.marginals],
        "ranks": model.ranks.ranks.tolist(),
    }


def model_from_dict(obj):
    try:
        if obj.get("format") != MODEL_FORMAT or obj.get("version") != MODEL_VERSION:
            raise ParseError("not an ngauss model (format/version mismatch)")
        n, p = int(obj["n"]), int(obj["p"])
        marginals = tuple(MarginalModel(np.array(col, dtype=float))
                          for col in obj["sorted_values"])
        ranks = RankMatrix(np.array(obj["ranks"], dtype=np.int64).reshape(n, p))
        plan = None
        if obj.get("deltas") is not None:
            plan = make_rerank_plan(n, p, obj["deltas"])
            if list(plan.shifts) != list(obj["shifts"]):
                raise ParseError("stored shifts disagree with deltas")
        return NgModel(marginals, plan, ranks)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, NgaussError) as exc:
        raise ParseError(f"invalid model file: {exc}") from exc


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return model_from_dict(obj)
