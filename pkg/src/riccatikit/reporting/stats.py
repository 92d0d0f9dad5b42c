"""Summary statistics for solution errors."""

from __future__ import annotations

import numpy as np

# Probe errors above this count as failures.
ERROR_TOL = 1e-6


def error_stats(values: list[float], tol: float = ERROR_TOL) -> dict[str, float]:
    """Compute summary statistics from a list of sup-errors.

    NaN entries stand for probes that failed outright.

    Returns:
        Dict with: mean, median, max, p90, failure_rate, count.
    """
    if not values:
        return {
            "mean": 0.0,
            "median": 0.0,
            "max": 0.0,
            "p90": 0.0,
            "failure_rate": 0.0,
            "count": 0.0,
        }

    arr = np.array(values, dtype=np.float64)
    ok = arr[np.isfinite(arr)]
    failures = np.count_nonzero(~np.isfinite(arr)) + np.count_nonzero(ok > tol)
    if ok.size == 0:
        return {
            "mean": float("nan"),
            "median": float("nan"),
            "max": float("nan"),
            "p90": float("nan"),
            "failure_rate": 1.0,
            "count": float(arr.size),
        }
    return {
        "mean": float(np.mean(ok)),
        "median": float(np.median(ok)),
        "max": float(np.max(ok)),
        "p90": float(np.percentile(ok, 90)),
        "failure_rate": float(failures) / float(arr.size),
        "count": float(arr.size),
    }


def probe_values(
    n: int, seed: int, probe_range: tuple[float, float] = (-1.5, 1.5)
) -> list[float]:
    """``n`` initial values drawn uniformly from ``probe_range``, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    lo, hi = probe_range
    return [float(x) for x in rng.uniform(lo, hi, size=n)]
