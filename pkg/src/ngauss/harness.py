"""Experiment orchestration: benchmark sweeps, figure data and image synthesis."""
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import baselines, evaluate, ng_core, sampling, specfn
from .copula_emp import copula_diagonal, rank_matrix
from .errors import InputError, NgaussError

__all__ = [
    "METHODS",
    "ExperimentConfig",
    "apply_method",
    "run_replication",
    "run_simulation",
    "SUMMARY_COLUMNS",
    "REPLICATION_COLUMNS",
    "run_fig1",
    "run_fig2",
    "make_blob_corpus",
    "run_synth",
]

# Stable method codes; seeds depend on these, never on list position.
METHODS = {"ng": 0, "rbig": 1, "bcg": 2, "rg": 3}
NORMALITY_TESTS = ("royston", "projection")

SUMMARY_COLUMNS = ("case", "n", "p", "method", "reps_ok", "reps_failed",
                   "pvalue_median", "statistic_median", "kld_mean", "kld_sd")
REPLICATION_COLUMNS = ("case", "n", "p", "method", "rep", "status", "reason",
                       "pvalue", "statistic", "kld")

_DATA_STREAM = 0
_KLD_STREAM = 1


@dataclass(frozen=True)
class ExperimentConfig:
    cases: tuple = (1, 2, 3, 4)
    n_list: tuple = (1000, 1500, 2000)
    p: int = 2
    reps: int = 50
    methods: tuple = ("ng", "rbig", "bcg", "rg")
    master_seed: int = 0
    n_eval: int = 1000
    box: float = 5.0
    bcg_iters: int = 30
    rbig_iters: int = 50
    t_copula_nu: float = 6.0
    ng_deltas: object = None
    normality_test: str = "royston"

    def __post_init__(self):
        if self.reps < 1:
            raise InputError("reps must be >= 1")
        if any(n <= self.p for n in self.n_list):
            raise InputError("every n must exceed p")
        if any(c not in (1, 2, 3, 4) for c in self.cases):
            raise InputError(f"unknown case in {self.cases}")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise InputError(f"unknown methods {unknown}")
        if self.normality_test not in NORMALITY_TESTS:
            raise InputError(f"unknown normality test {self.normality_test!r}")

    def to_dict(self):
        d = asdict(self)
        d["pvalue_aggregation"] = "median"
        return d


def apply_method(method, data, config=None):
    """Gaussianize ``data`` with one of the benchmark methods."""
    config = config or ExperimentConfig(n_list=(data.shape[0],), p=data.shape[1])
    if method == "ng":
        model = ng_core.fit_ng(data, deltas=config.ng_deltas)
        return ng_core.ng_forward(model, data)
    if method == "rbig":
        return baselines.rbig(data, config.rbig_iters)[0]
    if method == "bcg":
        params = baselines.fit_bcg(data, max_iters=config.bcg_iters)
        return baselines.bcg_transform(params, data)
    if method == "rg":
        return baselines.radial_gaussianize(data)
    raise InputError(f"unknown method {method!r}")


def normality_test(sample, which="royston"):
    if which == "royston":
        return evaluate.royston_mvn_test(sample)
    if which == "projection":
        return evaluate.shapiro_projection_test(sample)
    raise InputError(f"unknown normality test {which!r}")


def run_replication(config, case, n, rep):
    """Run every configured method on one simulated dataset.

    Returns a list of ``(row, seconds)`` pairs in method order; failures are
    recorded in the row instead of raised.
    """
    data = sampling.make_case_dataset(sampling.CaseSpec(
        case, n, config.p,
        sampling.stream_seed(config.master_seed, _DATA_STREAM, case, n, config.p, rep),
        config.t_copula_nu))
    out = []
    for method in config.methods:
        row = {"case": case, "n": n, "p": config.p, "method": method, "rep": rep,
               "status": "ok", "reason": "", "pvalue": math.nan,
               "statistic": math.nan, "kld": math.nan}
        t0 = time.perf_counter()
        try:
            y = apply_method(method, data, config)
            if not np.all(np.isfinite(y)):
                raise NgaussError("transform produced non-finite values")
            row["statistic"], row["pvalue"] = normality_test(y, config.normality_test)
            row["kld"] = evaluate.kld_vs_standard_normal(
                y, config.n_eval, config.box,
                sampling.stream_seed(config.master_seed, _KLD_STREAM, case, n,
                                     config.p, METHODS[method], rep))
        except (NgaussError, np.linalg.LinAlgError, FloatingPointError) as exc:
            row["status"] = "failed"
            row["reason"] = f"{type(exc).__name__}: {exc}"
        out.append((row, time.perf_counter() - t0))
    return out


def _replication_task(args):
    return run_replication(*args)


def run_simulation(config, jobs=1):
    """Run the benchmark sweep.

    Returns
    -------
    summary : list of dict
        One row per (case, n, method) with the median p-value and the KLD
        mean / sd over successful replications (columns ``SUMMARY_COLUMNS``).
    replications : list of dict
        One row per replication (columns ``REPLICATION_COLUMNS``).
    timing : list of dict
        Wall-clock seconds per (case, n, method); not deterministic.
    """
    tasks = [(config, case, n, rep)
             for case in config.cases for n in config.n_list
             for rep in range(config.reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_replication_task, tasks))
    else:
        results = [_replication_task(t) for t in tasks]

    replications = []
    seconds = {}
    for res in results:
        for row, sec in res:
            replications.append(row)
            key = (row["case"], row["n"], row["method"])
            seconds[key] = seconds.get(key, 0.0) + sec

    summary = []
    timing = []
    for case in config.cases:
        for n in config.n_list:
            for method in config.methods:
                rows = [r for r in replications
                        if (r["case"], r["n"], r["method"]) == (case, n, method)]
                ok = [r for r in rows if r["status"] == "ok"]
                kld = np.array([r["kld"] for r in ok])
                summary.append({
                    "case": case, "n": n, "p": config.p, "method": method,
                    "reps_ok": len(ok), "reps_failed": len(rows) - len(ok),
                    "pvalue_median": _median([r["pvalue"] for r in ok]),
                    "statistic_median": _median([r["statistic"] for r in ok]),
                    "kld_mean": float(kld.mean()) if kld.size else math.nan,
                    "kld_sd": float(kld.std(ddof=1)) if kld.size > 1 else math.nan,
                })
                timing.append({"case": case, "n": n, "p": config.p,
                               "method": method,
                               "seconds": seconds[(case, n, method)]})
    return summary, replications, timing


def _median(values):
    return float(np.median(values)) if values else math.nan


def _true_gaussian_diagonal(t, rho):
    out = np.empty_like(t)
    for k, tk in enumerate(t):
        if tk <= 0.0:
            out[k] = 0.0
        elif tk >= 1.0:
            out[k] = 1.0
        else:
            q = specfn.std_normal_quantile(tk)
            out[k] = specfn.bivariate_normal_cdf(q, q, rho)
    return out


def run_fig1(n, seed, grid=101):
    """Empirical versus true diagonal of a bivariate Gaussian copula.

    The sample is ``N(0, Sigma)`` with ``Sigma_ab = 2^-|a-b|``.

    Returns
    -------
    dict
        ``data`` (n x 2 sample), ``t``, ``empirical``, ``true`` and
        ``sup_gap``.
    """
    if n < 10:
        raise InputError("run_fig1 requires n >= 10")
    sigma = sampling.ar_correlation(2)
    rho = sigma[0, 1] / math.sqrt(sigma[0, 0] * sigma[1, 1])
    L = sampling.cholesky(sigma)
    data = sampling.sample_std_normal(n, 2, seed) @ L.T
    t, emp = copula_diagonal(rank_matrix(data), grid)
    true = _true_gaussian_diagonal(t, rho)
    return {"data": data, "t": t, "empirical": emp, "true": true,
            "sup_gap": float(np.max(np.abs(emp - true)))}


def run_fig2(n=1000, seed=0, n_fresh=None):
    """Round trip of the transform on the two-dimensional toy distribution.

    Returns
    -------
    dict
        ``data``, ``forward``, ``recovered``, ``roundtrip_max_error``,
        ``quantile_grid_match`` (bool), ``statistic``, ``pvalue`` (Royston),
        ``fresh`` (new N(0, I) draws) and ``synthesized``.
    """
    if n < 100:
        raise InputError("run_fig2 requires n >= 100")
    data = sampling.make_fig2_dataset(n, sampling.stream_seed(seed, 0))
    model = ng_core.fit_ng(data, deltas=(0, 0))
    fwd = ng_core.ng_forward(model, data)
    back = ng_core.ng_inverse_training(model, fwd)
    grid = specfn.std_normal_quantile(np.arange(1, n + 1) / (n + 1))
    match = all(np.array_equal(np.sort(fwd[:, i]), grid) for i in range(2))
    h, pval = evaluate.royston_mvn_test(fwd)
    fresh = sampling.sample_std_normal(n_fresh or n, 2, sampling.stream_seed(seed, 1))
    return {"data": data, "forward": fwd, "recovered": back,
            "roundtrip_max_error": float(np.max(np.abs(back - data))),
            "quantile_grid_match": match, "statistic": h, "pvalue": pval,
            "fresh": fresh, "synthesized": ng_core.ng_synthesize(model, fresh)}


def make_blob_corpus(m, h=8, w=8, seed=0):
    """Synthetic grayscale corpus of random Gaussian blobs plus noise."""
    rng = sampling.make_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w].astype(float)
    cy = rng.uniform(0.25 * h, 0.75 * h, size=m)
    cx = rng.uniform(0.25 * w, 0.75 * w, size=m)
    width = rng.uniform(0.12, 0.3, size=m) * min(h, w)
    amp = rng.uniform(0.5, 1.0, size=m)
    d2 = (yy[None] - cy[:, None, None]) ** 2 + (xx[None] - cx[:, None, None]) ** 2
    imgs = amp[:, None, None] * np.exp(-0.5 * d2 / width[:, None, None] ** 2)
    imgs += rng.normal(0.0, 0.03, size=imgs.shape)
    return np.clip(imgs, 0.0, 1.0)


def run_synth(images, count, seed, pivot=0):
    """Learn the pixel distribution of ``images`` and synthesize new frames.

    Parameters
    ----------
    images : array_like
        ``m x h x w`` grayscale frames in [0, 1], ``m >= 2``; the number of
        pixels may exceed ``m``.
    count : int
        Number of frames to synthesize.
    seed : int
        Seed for the standard normal draws.
    """
    imgs = np.asarray(images, dtype=float)
    if imgs.ndim != 3:
        raise InputError("images must be an m x h x w array")
    m, h, w = imgs.shape
    if m < 2:
        raise InputError("need at least 2 frames")
    if np.any((imgs < 0) | (imgs > 1)):
        raise InputError("pixel values must lie in [0, 1]")
    model = ng_core.fit_synthesis_model(imgs.reshape(m, h * w))
    z = sampling.sample_std_normal(count, h * w, seed)
    out = ng_core.ng_synthesize(model, z, pivot=pivot)
    return np.clip(out.reshape(count, h, w), 0.0, 1.0)
