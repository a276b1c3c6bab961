"""End-to-end runs wiring ingestion, augmentation, positioning and evaluation.

Each run writes its artifacts under an output directory and returns a
manifest dict that embeds the full configuration (including the seed), so
any run is replayable from its outputs alone.

Preprocessing convention: the replacement floor is always computed on the
training set and applied uniformly to training and query splits.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict
from pathlib import Path

from .augmentation import AugmentationParams, augment_dataset, size_upper_bound
from .datasets import (
    CsvSchema,
    FingerprintDataset,
    PowedConfig,
    SchemaError,
    compute_floor,
    load_csv,
    replace_sentinels,
    write_csv,
)
from .evaluation import ErrorReport, cdf_points, evaluate, k_sweep
from .positioning import fit

AUGMENTED_CSV = "augmented.csv"
AUGMENT_MANIFEST = "augment_manifest.json"
REPORT_JSON = "report.json"
CDF_CSV = "cdf.csv"
KSWEEP_CSV = "ksweep.csv"
TUNE_MANIFEST = "tune_manifest.json"


def _out_dir(path: str | Path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    with path.open("w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _load_preprocessed(path: str | Path, schema: CsvSchema | None, floor: float | None = None):
    """Load a CSV and replace sentinels; returns (dataset, floor used)."""
    ds = load_csv(path, schema)
    if floor is None:
        floor = compute_floor(ds)
    return replace_sentinels(ds, floor), floor


def _check_same_schema(train: FingerprintDataset, queries: FingerprintDataset) -> None:
    if train.n_basestations != queries.n_basestations:
        raise SchemaError(
            f"training set has {train.n_basestations} basestations, "
            f"query set has {queries.n_basestations}"
        )


def run_augment(
    train_csv: str | Path,
    out_dir: str | Path,
    params: AugmentationParams | None = None,
    schema: CsvSchema | None = None,
    threads: int = 1,
) -> dict:
    """Augment a training CSV; writes the augmented CSV plus a JSON manifest."""
    params = params or AugmentationParams()
    out = _out_dir(out_dir)
    started = time.perf_counter()
    train, floor = _load_preprocessed(train_csv, schema)
    augmented = augment_dataset(train, params, threads=threads)
    out_csv = out / AUGMENTED_CSV
    write_csv(augmented, out_csv)
    manifest = {
        "command": "augment",
        "train_csv": str(train_csv),
        "output_csv": str(out_csv),
        "manifest_path": str(out / AUGMENT_MANIFEST),
        "params": asdict(params),
        "sentinel": train.sentinel,
        "floor": floor,
        "input_size": len(train),
        "output_size": len(augmented),
        "size_bound": size_upper_bound(len(train), params.max_cluster_size, params.crossovers_per_pair),
        "threads": threads,
        "elapsed_s": round(time.perf_counter() - started, 3),
    }
    _write_json(out / AUGMENT_MANIFEST, manifest)
    return manifest


def _report_payload(report: ErrorReport) -> dict:
    return {
        "mean": report.mean,
        "median": report.median,
        "p75": report.p75,
        "errors": report.errors.tolist(),
    }


def run_evaluate(
    train_csv: str | Path,
    queries_csv: str | Path,
    out_dir: str | Path,
    k: int = 6,
    beta: float = 2.6,
    schema: CsvSchema | None = None,
    threads: int = 1,
) -> dict:
    """Fit on the training CSV, evaluate the query split, write report + CDF."""
    out = _out_dir(out_dir)
    started = time.perf_counter()
    train, floor = _load_preprocessed(train_csv, schema)
    queries, _ = _load_preprocessed(queries_csv, schema, floor=floor)
    _check_same_schema(train, queries)
    model = fit(train, k, PowedConfig(beta=beta, min_value=floor))
    report = evaluate(model, queries, threads=threads)

    cdf_path = out / CDF_CSV
    with cdf_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["error_m", "cum_prob"])
        for error_m, cum_prob in cdf_points(report):
            writer.writerow([f"{error_m:.6f}", f"{cum_prob:.9f}"])

    payload = {
        "command": "evaluate",
        "params": {
            "train_csv": str(train_csv),
            "queries_csv": str(queries_csv),
            "k": k,
            "beta": beta,
            "floor": floor,
            "sentinel": train.sentinel,
            "threads": threads,
        },
        "counts": {"train": len(train), "queries": len(queries)},
        **_report_payload(report),
        "report_path": str(out / REPORT_JSON),
        "cdf_path": str(cdf_path),
        "elapsed_s": round(time.perf_counter() - started, 3),
    }
    _write_json(out / REPORT_JSON, payload)
    return payload


def run_tune(
    train_csv: str | Path,
    validation_csv: str | Path,
    ks: list[int],
    out_dir: str | Path,
    beta: float = 2.6,
    schema: CsvSchema | None = None,
    threads: int = 1,
) -> dict:
    """Sweep k over the validation split; writes a ksweep CSV plus manifest."""
    out = _out_dir(out_dir)
    started = time.perf_counter()
    train, floor = _load_preprocessed(train_csv, schema)
    validation, _ = _load_preprocessed(validation_csv, schema, floor=floor)
    _check_same_schema(train, validation)
    rows = k_sweep(train, validation, ks, PowedConfig(beta=beta, min_value=floor), threads=threads)

    csv_path = out / KSWEEP_CSV
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "mean_m", "median_m"])
        for k_value, mean_m, median_m in rows:
            writer.writerow([k_value, f"{mean_m:.6f}", f"{median_m:.6f}"])

    manifest = {
        "command": "tune",
        "params": {
            "train_csv": str(train_csv),
            "validation_csv": str(validation_csv),
            "ks": list(ks),
            "beta": beta,
            "floor": floor,
            "sentinel": train.sentinel,
            "threads": threads,
        },
        "rows": [{"k": k_value, "mean_m": m, "median_m": md} for k_value, m, md in rows],
        "csv_path": str(csv_path),
        "manifest_path": str(out / TUNE_MANIFEST),
        "elapsed_s": round(time.perf_counter() - started, 3),
    }
    _write_json(out / TUNE_MANIFEST, manifest)
    return manifest
