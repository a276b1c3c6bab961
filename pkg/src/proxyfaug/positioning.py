"""Bray-Curtis kNN positioning over powed-transformed RSSI vectors.

A model stores the transformed training matrix (values in [0, 1]) and the
training locations. Queries are given in the raw dBm domain; the model
applies its own floor clamp and powed transform, so the same preprocessing
is guaranteed on both sides of the dissimilarity.

The neighbor search is an exact, vectorized linear scan. Nothing approximate:
with tens of thousands of rows and under a hundred basestations, exact search
is fast enough and keeps results reproducible.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datasets import (
    EmptyDatasetError,
    Fingerprint,
    FingerprintDataset,
    PowedConfig,
    SchemaError,
    count_below_floor,
    powed_transform,
)
from .geo import GeoPoint, mean_location

logger = logging.getLogger(__name__)


def bray_curtis(u, v) -> float:
    """``sum(|u - v|) / sum(u + v)``, in [0, 1] for non-negative inputs.

    Identical all-zero vectors would give 0/0; that pair is defined to have
    dissimilarity 0 (two all-floor fingerprints are indistinguishable).
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    denom = float(np.sum(u + v))
    if denom == 0.0:
        return 0.0
    return float(np.sum(np.abs(u - v)) / denom)


@dataclass(frozen=True)
class PositioningModel:
    """Immutable fitted model: transformed training matrix plus kNN config."""

    train_matrix: np.ndarray    # (M, B) powed values in [0, 1]
    train_lats: np.ndarray      # (M,)
    train_lons: np.ndarray      # (M,)
    k: int
    powed_cfg: PowedConfig
    row_sums: np.ndarray        # (M,) per-row sums, reused by every query
    n_clamped: int = 0          # training entries clamped to the floor

    def __post_init__(self):
        for arr in (self.train_matrix, self.train_lats, self.train_lons, self.row_sums):
            arr.flags.writeable = False

    @property
    def size(self) -> int:
        return self.train_matrix.shape[0]

    @property
    def n_basestations(self) -> int:
        return self.train_matrix.shape[1]


def fit(train: FingerprintDataset, k: int, powed_cfg: PowedConfig) -> PositioningModel:
    """Transform the training set and freeze it into a model."""
    if len(train) == 0:
        raise EmptyDatasetError("cannot fit on an empty training set")
    if not 1 <= k <= len(train):
        raise ValueError(f"k must be in [1, {len(train)}], got {k}")
    n_clamped = count_below_floor(train.rssi, powed_cfg)
    if n_clamped:
        logger.warning("%d training values below the floor were clamped", n_clamped)
    matrix = powed_transform(train.rssi, powed_cfg)
    return PositioningModel(
        train_matrix=matrix,
        train_lats=np.array(train.lats),
        train_lons=np.array(train.lons),
        k=k,
        powed_cfg=powed_cfg,
        row_sums=matrix.sum(axis=1),
        n_clamped=n_clamped,
    )


def _transform_query(model: PositioningModel, rssi_dbm: np.ndarray) -> np.ndarray:
    q = np.asarray(rssi_dbm, dtype=np.float64)
    if q.shape != (model.n_basestations,):
        raise SchemaError(
            f"query has {q.shape[0] if q.ndim == 1 else q.shape} values, "
            f"model expects {model.n_basestations}"
        )
    return powed_transform(q, model.powed_cfg)


def dissimilarities(model: PositioningModel, rssi_dbm: np.ndarray) -> np.ndarray:
    """Bray-Curtis dissimilarity of one dBm query against every training row.

    Row sums are precomputed, so only the |u - v| numerator needs a pass over
    the matrix. Zero denominators (all-floor query meeting an all-floor row)
    map to dissimilarity 0.
    """
    q = _transform_query(model, rssi_dbm)
    num = np.abs(model.train_matrix - q).sum(axis=1)
    den = model.row_sums + q.sum()
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den != 0.0)
    return out


def neighbor_indices(model: PositioningModel, rssi_dbm: np.ndarray, k: int | None = None) -> np.ndarray:
    """Indices of the k nearest training rows; ties break toward lower index."""
    if k is None:
        k = model.k
    d = dissimilarities(model, rssi_dbm)
    return np.argsort(d, kind="stable")[:k]


def predict(model: PositioningModel, query: Fingerprint) -> GeoPoint:
    """Estimate the query location as the unweighted mean of the k nearest
    training locations."""
    nearest = neighbor_indices(model, query.rssi)
    return mean_location(model.train_lats[nearest], model.train_lons[nearest])


def predict_batch(
    model: PositioningModel, queries: FingerprintDataset, threads: int = 1
) -> list[GeoPoint]:
    """Elementwise :func:`predict` over a dataset; parallel execution allowed.

    Queries are independent, so the result never depends on ``threads``.
    """
    if len(queries) == 0:
        raise EmptyDatasetError("cannot predict on an empty query set")
    if queries.n_basestations != model.n_basestations:
        raise SchemaError(
            f"queries have {queries.n_basestations} basestations, "
            f"model expects {model.n_basestations}"
        )

    def one(i: int) -> GeoPoint:
        try:
            return predict(model, queries[i])
        except Exception as exc:
            raise type(exc)(f"query {i}: {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(len(queries))))
    return [one(i) for i in range(len(queries))]
