"""Proximity-based fingerprint augmentation and Bray-Curtis kNN positioning.

The package augments RSSI fingerprint training sets by breeding new
fingerprints from pairs of spatially proximal ones (uniform crossover plus
bounded uniform mutation, placed at the parents' spherical midpoint) and
quantifies the effect on positioning accuracy with a Bray-Curtis kNN engine
and error-distribution reports.
"""

from .augmentation import (
    AugmentationParams,
    Cluster,
    augment_dataset,
    crossover,
    crossover_and_mutate,
    enumerate_pairs,
    form_clusters,
    mutate,
    size_upper_bound,
)
from .datasets import (
    CsvSchema,
    DatasetError,
    EmptyDatasetError,
    Fingerprint,
    FingerprintDataset,
    NoSignalError,
    Origin,
    ParseError,
    PowedConfig,
    SchemaError,
    compute_floor,
    load_csv,
    load_schema,
    powed_transform,
    replace_sentinels,
    write_csv,
)
from .evaluation import ErrorReport, cdf_points, compare, evaluate, k_sweep
from .geo import GeoPoint, haversine_distance, midpoint
from .positioning import PositioningModel, bray_curtis, fit, predict, predict_batch

__version__ = "0.1.0"

__all__ = [
    "AugmentationParams",
    "Cluster",
    "CsvSchema",
    "DatasetError",
    "EmptyDatasetError",
    "ErrorReport",
    "Fingerprint",
    "FingerprintDataset",
    "GeoPoint",
    "NoSignalError",
    "Origin",
    "ParseError",
    "PositioningModel",
    "PowedConfig",
    "SchemaError",
    "augment_dataset",
    "bray_curtis",
    "cdf_points",
    "compare",
    "compute_floor",
    "crossover",
    "crossover_and_mutate",
    "enumerate_pairs",
    "evaluate",
    "fit",
    "form_clusters",
    "haversine_distance",
    "k_sweep",
    "load_csv",
    "load_schema",
    "midpoint",
    "mutate",
    "powed_transform",
    "predict",
    "predict_batch",
    "replace_sentinels",
    "size_upper_bound",
    "write_csv",
]
