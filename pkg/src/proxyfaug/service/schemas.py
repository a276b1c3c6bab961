"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..augmentation import AugmentationParams
from ..datasets import CsvSchema


class ColumnMapping(BaseModel):
    """CSV column mapping; omitted fields fall back to the defaults."""

    rssi_columns: list[str] | None = None
    rssi_prefix: str | None = None
    lat_column: str = "lat"
    lon_column: str = "lon"
    origin_column: str = "origin"
    sentinel: float = -200.0

    def to_schema(self) -> CsvSchema:
        return CsvSchema(
            rssi_columns=tuple(self.rssi_columns) if self.rssi_columns else None,
            rssi_prefix=self.rssi_prefix,
            lat_column=self.lat_column,
            lon_column=self.lon_column,
            origin_column=self.origin_column,
            sentinel=self.sentinel,
        )


class AugmentationSettings(BaseModel):
    range_m: float = Field(default=20.0, gt=0)
    max_cluster_size: int = Field(default=2, ge=2)
    crossovers_per_pair: int = Field(default=8, ge=1)
    mutation_prob: float = Field(default=0.3, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, lt=2**64)

    def to_params(self) -> AugmentationParams:
        return AugmentationParams(**self.model_dump())


class AugmentRequest(BaseModel):
    train_csv: str
    out_dir: str
    params: AugmentationSettings = AugmentationSettings()
    columns: ColumnMapping | None = None
    threads: int = Field(default=1, ge=1)


class AugmentResult(BaseModel):
    train_csv: str
    output_csv: str
    manifest_path: str
    params: AugmentationSettings
    sentinel: float
    floor: float
    input_size: int
    output_size: int
    size_bound: int
    elapsed_s: float


class EvaluateRequest(BaseModel):
    train_csv: str
    queries_csv: str
    out_dir: str
    k: int = Field(default=6, ge=1)
    beta: float = Field(default=2.6, gt=0)
    columns: ColumnMapping | None = None
    threads: int = Field(default=1, ge=1)


class EvaluateResult(BaseModel):
    report_path: str
    cdf_path: str
    counts: dict[str, int]
    mean: float
    median: float
    p75: float
    floor: float
    elapsed_s: float


class TuneRequest(BaseModel):
    train_csv: str
    validation_csv: str
    out_dir: str
    ks: list[int] = Field(min_length=1)
    beta: float = Field(default=2.6, gt=0)
    columns: ColumnMapping | None = None
    threads: int = Field(default=1, ge=1)


class KSweepEntry(BaseModel):
    k: int
    mean_m: float
    median_m: float


class TuneResult(BaseModel):
    csv_path: str
    manifest_path: str
    rows: list[KSweepEntry]
    elapsed_s: float


class FitRequest(BaseModel):
    train_csv: str
    k: int = Field(default=6, ge=1)
    beta: float = Field(default=2.6, gt=0)
    columns: ColumnMapping | None = None


class ModelInfo(BaseModel):
    model_id: str
    train_size: int
    n_basestations: int
    k: int
    beta: float
    floor: float


class PredictRequest(BaseModel):
    rssi: list[float] = Field(min_length=1)


class PredictResult(BaseModel):
    lat: float
    lon: float
