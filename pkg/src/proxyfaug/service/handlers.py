"""Request-model to pipeline translation, shared by HTTP routes and the
in-process client path."""

from __future__ import annotations

from .. import pipeline
from .schemas import (
    AugmentRequest,
    AugmentResult,
    EvaluateRequest,
    EvaluateResult,
    TuneRequest,
    TuneResult,
)


def handle_augment(req: AugmentRequest) -> AugmentResult:
    manifest = pipeline.run_augment(
        req.train_csv,
        req.out_dir,
        params=req.params.to_params(),
        schema=req.columns.to_schema() if req.columns else None,
        threads=req.threads,
    )
    return AugmentResult(**{f: manifest[f] for f in AugmentResult.model_fields})


def handle_evaluate(req: EvaluateRequest) -> EvaluateResult:
    payload = pipeline.run_evaluate(
        req.train_csv,
        req.queries_csv,
        req.out_dir,
        k=req.k,
        beta=req.beta,
        schema=req.columns.to_schema() if req.columns else None,
        threads=req.threads,
    )
    return EvaluateResult(
        report_path=payload["report_path"],
        cdf_path=payload["cdf_path"],
        counts=payload["counts"],
        mean=payload["mean"],
        median=payload["median"],
        p75=payload["p75"],
        floor=payload["params"]["floor"],
        elapsed_s=payload["elapsed_s"],
    )


def handle_tune(req: TuneRequest) -> TuneResult:
    manifest = pipeline.run_tune(
        req.train_csv,
        req.validation_csv,
        req.ks,
        req.out_dir,
        beta=req.beta,
        schema=req.columns.to_schema() if req.columns else None,
        threads=req.threads,
    )
    return TuneResult(
        csv_path=manifest["csv_path"],
        manifest_path=manifest["manifest_path"],
        rows=manifest["rows"],
        elapsed_s=manifest["elapsed_s"],
    )
