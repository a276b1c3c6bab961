"""Fingerprint dataset loading, validation, preprocessing and serialization.

A fingerprint is one RSSI vector (dBm, one value per basestation) with a
geodetic ground-truth location. Datasets carry a shared basestation schema,
the sentinel value that marks "basestation not heard" (-200 in the public
Sigfox data) and, once computed, the replacement floor (the experimental
minimum received RSSI of the training set).

Preprocessing for positioning is two steps: sentinel replacement by the
training floor, then the powed transform that maps dBm values into [0, 1].
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace as dc_replace
from enum import Enum
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .geo import GeoPoint

DEFAULT_SENTINEL = -200.0


class DatasetError(Exception):
    """Base class for dataset input problems."""


class SchemaError(DatasetError):
    """A required column is missing or the column mapping is inconsistent."""


class ParseError(DatasetError):
    """A cell could not be parsed; message carries row and column."""


class EmptyDatasetError(DatasetError):
    """The operation needs at least one fingerprint."""


class NoSignalError(DatasetError):
    """Every RSSI entry equals the sentinel, so no floor can be computed."""


class Origin(str, Enum):
    ORIGINAL = "original"
    AUGMENTED = "augmented"


@dataclass(frozen=True, eq=False)
class Fingerprint:
    """One RSSI vector plus its ground-truth location and provenance tag."""

    rssi: np.ndarray
    lat: float
    lon: float
    origin: Origin = Origin.ORIGINAL

    def __post_init__(self):
        arr = np.asarray(self.rssi, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"rssi must be a 1-D vector, got shape {arr.shape}")
        object.__setattr__(self, "rssi", arr)
        GeoPoint(self.lat, self.lon)  # range validation

    @property
    def location(self) -> GeoPoint:
        return GeoPoint(self.lat, self.lon)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return (
            np.array_equal(self.rssi, other.rssi)
            and self.lat == other.lat
            and self.lon == other.lon
            and self.origin == other.origin
        )


@dataclass(frozen=True, eq=False)
class FingerprintDataset:
    """Ordered fingerprint collection with a shared basestation schema.

    Immutable after construction: the backing arrays are copied in and marked
    read-only, so a dataset is safe to share across threads.
    """

    rssi: np.ndarray                    # (M, B) dBm values
    lats: np.ndarray                    # (M,) decimal degrees
    lons: np.ndarray                    # (M,)
    origins: tuple[Origin, ...]         # length M
    basestation_ids: tuple[str, ...]    # length B, unique
    sentinel: float = DEFAULT_SENTINEL
    floor: float | None = None

    def __post_init__(self):
        rssi = np.array(self.rssi, dtype=np.float64)
        lats = np.array(self.lats, dtype=np.float64)
        lons = np.array(self.lons, dtype=np.float64)
        if rssi.ndim != 2:
            raise ValueError(f"rssi must be 2-D (rows, basestations), got shape {rssi.shape}")
        m, b = rssi.shape
        if lats.shape != (m,) or lons.shape != (m,):
            raise ValueError("lat/lon arrays must have one entry per fingerprint")
        if len(self.origins) != m:
            raise ValueError("origins must have one entry per fingerprint")
        ids = tuple(self.basestation_ids)
        if len(ids) != b:
            raise ValueError(f"{len(ids)} basestation ids for {b} RSSI columns")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate basestation ids")
        if m and (np.abs(lats) > 90.0).any():
            raise ValueError("latitude out of range [-90, 90]")
        if m and (np.abs(lons) > 180.0).any():
            raise ValueError("longitude out of range [-180, 180]")
        for arr in (rssi, lats, lons):
            arr.flags.writeable = False
        object.__setattr__(self, "rssi", rssi)
        object.__setattr__(self, "lats", lats)
        object.__setattr__(self, "lons", lons)
        object.__setattr__(self, "origins", tuple(self.origins))
        object.__setattr__(self, "basestation_ids", ids)

    def __len__(self) -> int:
        return self.rssi.shape[0]

    @property
    def n_basestations(self) -> int:
        return self.rssi.shape[1]

    def __getitem__(self, i: int) -> Fingerprint:
        return Fingerprint(self.rssi[i], float(self.lats[i]), float(self.lons[i]), self.origins[i])

    def __iter__(self) -> Iterator[Fingerprint]:
        for i in range(len(self)):
            yield self[i]

    def location(self, i: int) -> GeoPoint:
        return GeoPoint(float(self.lats[i]), float(self.lons[i]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FingerprintDataset):
            return NotImplemented
        return (
            np.array_equal(self.rssi, other.rssi)
            and np.array_equal(self.lats, other.lats)
            and np.array_equal(self.lons, other.lons)
            and self.origins == other.origins
            and self.basestation_ids == other.basestation_ids
            and self.sentinel == other.sentinel
            and self.floor == other.floor
        )

    @classmethod
    def from_fingerprints(
        cls,
        fingerprints: Sequence[Fingerprint],
        basestation_ids: Sequence[str],
        sentinel: float = DEFAULT_SENTINEL,
        floor: float | None = None,
    ) -> "FingerprintDataset":
        if not fingerprints:
            raise EmptyDatasetError("cannot build a dataset from zero fingerprints")
        return cls(
            rssi=np.stack([fp.rssi for fp in fingerprints]),
            lats=np.array([fp.lat for fp in fingerprints]),
            lons=np.array([fp.lon for fp in fingerprints]),
            origins=tuple(fp.origin for fp in fingerprints),
            basestation_ids=tuple(basestation_ids),
            sentinel=sentinel,
            floor=floor,
        )


@dataclass(frozen=True)
class CsvSchema:
    """Column mapping for fingerprint CSV files.

    RSSI columns are either named explicitly, selected by prefix, or (default)
    inferred as every column that is not the coordinate/origin column.
    """

    rssi_columns: tuple[str, ...] | None = None
    rssi_prefix: str | None = None
    lat_column: str = "lat"
    lon_column: str = "lon"
    origin_column: str = "origin"
    sentinel: float = DEFAULT_SENTINEL

    def resolve_rssi_columns(self, header: Sequence[str]) -> list[str]:
        if self.rssi_columns is not None:
            missing = [c for c in self.rssi_columns if c not in header]
            if missing:
                raise SchemaError(f"missing RSSI column(s): {', '.join(missing)}")
            return list(self.rssi_columns)
        if self.rssi_prefix is not None:
            cols = [c for c in header if c.startswith(self.rssi_prefix)]
            if not cols:
                raise SchemaError(f"no column starts with RSSI prefix {self.rssi_prefix!r}")
            return cols
        reserved = {self.lat_column, self.lon_column, self.origin_column}
        cols = [c for c in header if c not in reserved]
        if not cols:
            raise SchemaError("no RSSI columns left after removing coordinate columns")
        return cols


def load_schema(path: str | Path) -> CsvSchema:
    """Parse a key-value schema file (``key = value``, ``#`` comments)."""
    kwargs: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sep = "=" if "=" in line else (":" if ":" in line else None)
        if sep is None:
            raise SchemaError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split(sep, 1))
        if key == "rssi_columns":
            kwargs[key] = tuple(c.strip() for c in value.split(",") if c.strip())
        elif key == "rssi_prefix":
            kwargs[key] = value
        elif key in ("lat_column", "lon_column", "origin_column"):
            kwargs[key] = value
        elif key == "sentinel":
            try:
                kwargs[key] = float(value)
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: sentinel must be numeric, got {value!r}")
        else:
            raise SchemaError(f"{path}:{lineno}: unknown schema key {key!r}")
    return CsvSchema(**kwargs)


def _parse_cell(value: str, line: int, column: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"line {line}, column {column!r}: not a number: {value!r}") from None


def load_csv(path: str | Path, schema: CsvSchema | None = None) -> FingerprintDataset:
    """Load a fingerprint CSV.

    Requires a header row; rows are kept in file order. Rows lacking an
    origin column default to ``original``.
    """
    schema = schema or CsvSchema()
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: file is empty") from None
        rssi_cols = schema.resolve_rssi_columns(header)
        for col in (schema.lat_column, schema.lon_column):
            if col not in header:
                raise SchemaError(f"{path}: missing coordinate column {col!r}")
        col_index = {c: header.index(c) for c in header}
        rssi_idx = [col_index[c] for c in rssi_cols]
        lat_idx = col_index[schema.lat_column]
        lon_idx = col_index[schema.lon_column]
        origin_idx = col_index.get(schema.origin_column)

        rows, lats, lons, origins = [], [], [], []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"line {line}: expected {len(header)} cells, got {len(row)}")
            rows.append([_parse_cell(row[j], line, header[j]) for j in rssi_idx])
            lats.append(_parse_cell(row[lat_idx], line, schema.lat_column))
            lons.append(_parse_cell(row[lon_idx], line, schema.lon_column))
            if origin_idx is None:
                origins.append(Origin.ORIGINAL)
            else:
                tag = row[origin_idx].strip().lower()
                try:
                    origins.append(Origin(tag))
                except ValueError:
                    raise ParseError(
                        f"line {line}, column {schema.origin_column!r}: "
                        f"unknown origin {row[origin_idx]!r}"
                    ) from None
    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")
    return FingerprintDataset(
        rssi=np.array(rows),
        lats=np.array(lats),
        lons=np.array(lons),
        origins=tuple(origins),
        basestation_ids=tuple(rssi_cols),
        sentinel=schema.sentinel,
    )


# Serialization precision: integer-valued dBm survives a round trip exactly,
# and 8 coordinate decimals keep sub-centimeter fidelity.
RSSI_DECIMALS = 6
COORD_DECIMALS = 8


def write_csv(ds: FingerprintDataset, path: str | Path) -> None:
    """Write a dataset with lat/lon/origin columns appended after the RSSI block."""
    if len(ds) == 0:
        raise EmptyDatasetError("refusing to write an empty dataset")
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(ds.basestation_ids) + ["lat", "lon", "origin"])
        for i in range(len(ds)):
            row = [f"{v:.{RSSI_DECIMALS}f}" for v in ds.rssi[i]]
            row.append(f"{ds.lats[i]:.{COORD_DECIMALS}f}")
            row.append(f"{ds.lons[i]:.{COORD_DECIMALS}f}")
            row.append(ds.origins[i].value)
            writer.writerow(row)


def compute_floor(train: FingerprintDataset) -> float:
    """Minimum RSSI over all non-sentinel entries of the training set."""
    mask = train.rssi != train.sentinel
    if not mask.any():
        raise NoSignalError("every RSSI value is the sentinel; no floor exists")
    return float(train.rssi[mask].min())


def replace_sentinels(ds: FingerprintDataset, floor: float) -> FingerprintDataset:
    """Replace every sentinel entry by the floor value; idempotent."""
    if floor <= ds.sentinel:
        raise ValueError(f"floor {floor} must exceed the sentinel {ds.sentinel}")
    rssi = np.where(ds.rssi == ds.sentinel, floor, ds.rssi)
    return dc_replace(ds, rssi=rssi, floor=floor)


@dataclass(frozen=True)
class PowedConfig:
    """Exponent and normalization floor of the powed transform."""

    beta: float = 2.6
    min_value: float = -157.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.min_value >= 0:
            raise ValueError(f"min_value must be negative, got {self.min_value}")


def powed_transform(value, cfg: PowedConfig):
    """Map dBm values to [0, 1] via ``((v - min) / -min) ** beta``.

    Accepts scalars or arrays. Values below ``cfg.min_value`` (possible in
    validation/test data when the floor comes from the training set) clamp
    to 0; use :func:`count_below_floor` to surface how often that happened.
    """
    arr = np.asarray(value, dtype=np.float64)
    clamped = np.maximum(arr, cfg.min_value)
    out = ((clamped - cfg.min_value) / -cfg.min_value) ** cfg.beta
    return float(out) if np.isscalar(value) else out


def count_below_floor(value, cfg: PowedConfig) -> int:
    """Number of entries the powed transform would clamp to the floor."""
    return int(np.sum(np.asarray(value, dtype=np.float64) < cfg.min_value))
