"""Localization error statistics, CDF exports and k-sweep tuning curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import EmptyDatasetError, FingerprintDataset, PowedConfig
from .geo import haversine_array
from .positioning import PositioningModel, fit, neighbor_indices, predict_batch

SUMMARY_STATS = ("mean", "median", "p75")


@dataclass(frozen=True)
class ErrorReport:
    """Per-query geodesic errors (meters) with summary statistics.

    Quantiles use linear interpolation between closest ranks (numpy's
    default), which shifts the median by well under a meter at the sample
    sizes involved here.
    """

    errors: np.ndarray
    mean: float
    median: float
    p75: float

    def __post_init__(self):
        errors = np.asarray(self.errors, dtype=np.float64)
        if errors.size == 0:
            raise EmptyDatasetError("an error report needs at least one error")
        if (errors < 0).any():
            raise ValueError("errors must be non-negative")
        errors.flags.writeable = False
        object.__setattr__(self, "errors", errors)

    @classmethod
    def from_errors(cls, errors) -> "ErrorReport":
        errors = np.asarray(errors, dtype=np.float64)
        if errors.size == 0:
            raise EmptyDatasetError("an error report needs at least one error")
        median, p75 = np.percentile(errors, [50.0, 75.0])
        return cls(errors=errors, mean=float(np.mean(errors)), median=float(median), p75=float(p75))

    def summary(self) -> dict[str, float]:
        return {"mean": self.mean, "median": self.median, "p75": self.p75}


def evaluate(model: PositioningModel, queries: FingerprintDataset, threads: int = 1) -> ErrorReport:
    """Predict every query and report haversine errors against ground truth."""
    predictions = predict_batch(model, queries, threads=threads)
    pred_lats = np.array([p.lat for p in predictions])
    pred_lons = np.array([p.lon for p in predictions])
    errors = haversine_array(pred_lats, pred_lons, queries.lats, queries.lons)
    return ErrorReport.from_errors(errors)


def cdf_points(report: ErrorReport) -> np.ndarray:
    """Empirical CDF as an (n, 2) array of (error_m, cumulative probability).

    Point i is (e_(i), (i+1)/n) over ascending errors; both columns are
    non-decreasing and the last probability is exactly 1.
    """
    errors = np.sort(report.errors)
    probs = np.arange(1, errors.size + 1) / errors.size
    return np.column_stack([errors, probs])


def k_sweep(
    train: FingerprintDataset,
    validation: FingerprintDataset,
    ks: list[int],
    powed_cfg: PowedConfig,
    threads: int = 1,
) -> list[tuple[int, float, float]]:
    """(k, mean error, median error) on the validation set for each k.

    The model is fitted once; every query's neighbor ranking is computed once
    up to max(ks) and prefix-averaged for each k.
    """
    if not ks:
        raise ValueError("ks must be non-empty")
    for k in ks:
        if not 1 <= k <= len(train):
            raise ValueError(f"invalid k: {k} (training set has {len(train)} fingerprints)")
    max_k = max(ks)
    model = fit(train, max_k, powed_cfg)
    if len(validation) == 0:
        raise EmptyDatasetError("validation set is empty")

    def ranked(i: int) -> np.ndarray:
        return neighbor_indices(model, validation.rssi[i], max_k)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            orders = np.stack(list(pool.map(ranked, range(len(validation)))))
    else:
        orders = np.stack([ranked(i) for i in range(len(validation))])

    # prefix means over the ranked neighbor locations: column k-1 of the
    # cumulative sums divided by k gives the k-NN estimate for every query
    lat_cums = np.cumsum(model.train_lats[orders], axis=1)
    lon_cums = np.cumsum(model.train_lons[orders], axis=1)
    rows = []
    for k in ks:
        pred_lats = lat_cums[:, k - 1] / k
        pred_lons = lon_cums[:, k - 1] / k
        errors = haversine_array(pred_lats, pred_lons, validation.lats, validation.lons)
        report = ErrorReport.from_errors(errors)
        rows.append((k, report.mean, report.median))
    return rows


def compare(original: ErrorReport, augmented: ErrorReport) -> dict[str, dict]:
    """Relative improvement of each summary statistic, in whole percent.

    ``improvement_pct`` is ``round(100 * (orig - aug) / orig)``; it is None
    (undefined) when the original statistic is zero.
    """
    table: dict[str, dict] = {}
    for stat in SUMMARY_STATS:
        orig = original.summary()[stat]
        aug = augmented.summary()[stat]
        pct = None if orig == 0.0 else int(round(100.0 * (orig - aug) / orig))
        table[stat] = {"original": orig, "augmented": aug, "improvement_pct": pct}
    return table
