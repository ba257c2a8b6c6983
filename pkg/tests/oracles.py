"""Independent brute-force oracles shared by the tests."""
import numpy as np


def brute_force_tau(x, y, chunk=500):
    """Kendall's tau-a by explicit pair counting (O(n^2), chunked)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    total = 0
    for start in range(0, n, chunk):
        xs = x[start:start + chunk, None]
        ys = y[start:start + chunk, None]
        total += int(np.sum(np.sign(xs - x[None, :]) * np.sign(ys - y[None, :])))
    return total / (n * (n - 1))


def ks_distance_uniform(u):
    """Sup distance between the empirical CDF of ``u`` and Uniform(0, 1)."""
    u = np.sort(np.asarray(u, dtype=float))
    n = u.size
    k = np.arange(1, n + 1)
    return float(max(np.max(k / n - u), np.max(u - (k - 1) / n)))


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov distance by merging both samples."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n, alpha=0.01):
    """Asymptotic one-sample KS critical value."""
    return np.sqrt(-0.5 * np.log(alpha / 2)) / np.sqrt(n)
