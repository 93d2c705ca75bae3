"""Independent naive re-implementations used as oracles by the tests.

These deliberately avoid the package's solver and neighbour machinery so
that agreement is evidence, not tautology.
"""

from __future__ import annotations

import numpy as np


def lstsq_oracle(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least squares via the explicit Moore-Penrose pseudo-inverse."""
    return np.linalg.pinv(x) @ y


def naive_normal_solve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Normal equations solved by numpy's LAPACK wrapper."""
    return np.linalg.solve(x.T @ x, x.T @ y)


def naive_loo_errors(records, spec) -> list[float]:
    """Literal delete-row-and-refit leave-one-out, percent signed errors."""
    x = np.array([spec.feature_row(rec) for rec in records], dtype=float)
    y = np.array([spec.response(rec) for rec in records], dtype=float)
    errors = []
    for i in range(len(records)):
        xi = np.delete(x, i, axis=0)
        yi = np.delete(y, i)
        w = naive_normal_solve(xi, yi)
        predicted = spec.inverse_response(float(x[i] @ w))
        actual = getattr(records[i], spec.dependent_var)
        errors.append((actual - predicted) / actual * 100.0)
    return errors


def naive_r_values(records, variables, dependent, k) -> np.ndarray:
    """Brute-force weighted relative errors for the K-NN outlier screen."""
    vals = np.array([[getattr(r, v) for v in variables] for r in records], dtype=float)
    q1 = np.percentile(vals, 25, axis=0)
    q3 = np.percentile(vals, 75, axis=0)
    w = 10.0 / (q3 - q1)
    dep = np.array([getattr(r, dependent) for r in records], dtype=float)
    n = len(records)
    out = []
    for i in range(n):
        d = np.sqrt((((vals - vals[i]) * w) ** 2).sum(axis=1))
        order = [j for j in np.argsort(d, kind="stable") if j != i][:k]
        dist = d[order]
        total = dist.sum()
        if k == 1 or total == 0.0:
            wr = np.full(k, 1.0 / k)
        else:
            wr = (total - dist) / ((k - 1) * total)
        numerator = float(wr @ np.abs(dep[i] - dep[order]))
        denominator = min(float(dep[order].mean()), float(dep[i]))
        out.append(numerator / denominator)
    return np.array(out)
