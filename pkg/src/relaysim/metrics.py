"""Empirical throughput distributions, percentiles, and relative gains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedGainError


@dataclass(frozen=True)
class ThroughputDistribution:
    """Sorted per-terminal throughput samples pooled over drops and sectors."""

    samples: np.ndarray
    label: str = ""

    @classmethod
    def from_samples(cls, samples, label: str = "") -> "ThroughputDistribution":
        arr = np.sort(np.asarray(samples, dtype=float).ravel())
        if arr.size < 1:
            raise ValueError("a distribution needs at least one sample")
        return cls(arr, label)

    @property
    def n(self) -> int:
        return int(self.samples.size)


def quantiles(samples, qs) -> np.ndarray:
    """Order-statistic quantiles with linear interpolation at rank q(n-1)+1.

    This is the plain linear quantile convention, fixed here so that every
    reported number is reproducible bit for bit.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size < 2:
        raise ValueError("quantiles need at least 2 samples")
    qs = np.atleast_1d(np.asarray(qs, dtype=float))
    if np.any((qs <= 0.0) | (qs >= 1.0)):
        raise ValueError(f"quantiles {qs} outside (0, 1)")
    h = qs * (x.size - 1)
    lo = np.floor(h).astype(int)
    hi = np.minimum(lo + 1, x.size - 1)
    return x[lo] + (h - lo) * (x[hi] - x[lo])


def percentile(dist: ThroughputDistribution, q: float) -> float:
    """Single percentile of a distribution; see :func:`quantiles`."""
    return float(quantiles(dist.samples, (q,))[0])


def gain(reference: ThroughputDistribution, candidate: ThroughputDistribution,
         q: float) -> float:
    """Relative percentile gain of candidate over reference, percent."""
    ref = percentile(reference, q)
    cand = percentile(candidate, q)
    if ref == 0.0:
        raise UndefinedGainError(
            f"reference {q:.0%} percentile is zero (outage); gain is undefined"
        )
    return 100.0 * (cand - ref) / ref


def cdf_points(dist: ThroughputDistribution):
    """(values, fractions) of the empirical CDF, fractions at i/(n-1).

    This convention is the exact inverse of :func:`percentile`, so
    cdf(percentile(q)) == q up to interpolation.
    """
    n = dist.n
    if n == 1:
        return dist.samples.copy(), np.zeros(1)
    return dist.samples.copy(), np.arange(n) / (n - 1)


def percentile_stderr(samples_by_drop, q: float) -> float:
    """Across-drop standard error of a percentile (diagnostic only)."""
    per_drop = [percentile(ThroughputDistribution.from_samples(s), q)
                for s in samples_by_drop if len(s) >= 2]
    if len(per_drop) < 2:
        return float("nan")
    return float(np.std(per_drop, ddof=1) / np.sqrt(len(per_drop)))
