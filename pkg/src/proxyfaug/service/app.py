"""FastAPI service exposing augmentation/evaluation jobs and live positioning.

Job endpoints (/augment, /evaluate, /tune) run the batch pipeline on CSV
files reachable from the server and write artifacts to the requested output
directory. The model registry (/models) keeps fitted positioning models in
memory so many clients can ask for location estimates without refitting.

Dataset and input problems map to HTTP 400 with a one-line detail; unknown
model ids map to 404.
"""

from __future__ import annotations

import threading
import uuid

import numpy as np
from fastapi import FastAPI, HTTPException

from ..datasets import DatasetError, Fingerprint, PowedConfig, compute_floor, load_csv, replace_sentinels
from ..positioning import PositioningModel, fit, predict
from . import handlers
from .schemas import (
    AugmentRequest,
    AugmentResult,
    EvaluateRequest,
    EvaluateResult,
    FitRequest,
    ModelInfo,
    PredictRequest,
    PredictResult,
    TuneRequest,
    TuneResult,
)

INPUT_ERRORS = (DatasetError, OSError, ValueError)


class ModelRegistry:
    """Thread-safe in-memory store of fitted positioning models."""

    def __init__(self):
        self._lock = threading.Lock()
        self._models: dict[str, tuple[PositioningModel, ModelInfo]] = {}

    def add(self, model: PositioningModel, floor: float) -> ModelInfo:
        info = ModelInfo(
            model_id=uuid.uuid4().hex,
            train_size=model.size,
            n_basestations=model.n_basestations,
            k=model.k,
            beta=model.powed_cfg.beta,
            floor=floor,
        )
        with self._lock:
            self._models[info.model_id] = (model, info)
        return info

    def get(self, model_id: str) -> tuple[PositioningModel, ModelInfo]:
        with self._lock:
            entry = self._models.get(model_id)
        if entry is None:
            raise KeyError(model_id)
        return entry

    def drop(self, model_id: str) -> None:
        with self._lock:
            if self._models.pop(model_id, None) is None:
                raise KeyError(model_id)

    def list(self) -> list[ModelInfo]:
        with self._lock:
            return [info for _, info in self._models.values()]


def create_app() -> FastAPI:
    app = FastAPI(title="proxyfaug", version="0.1.0")
    registry = ModelRegistry()
    app.state.registry = registry

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/augment", response_model=AugmentResult)
    def augment(req: AugmentRequest) -> AugmentResult:
        try:
            return handlers.handle_augment(req)
        except INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/evaluate", response_model=EvaluateResult)
    def evaluate(req: EvaluateRequest) -> EvaluateResult:
        try:
            return handlers.handle_evaluate(req)
        except INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/tune", response_model=TuneResult)
    def tune(req: TuneRequest) -> TuneResult:
        try:
            return handlers.handle_tune(req)
        except INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/models", response_model=ModelInfo)
    def fit_model(req: FitRequest) -> ModelInfo:
        try:
            train = load_csv(req.train_csv, req.columns.to_schema() if req.columns else None)
            floor = compute_floor(train)
            train = replace_sentinels(train, floor)
            model = fit(train, req.k, PowedConfig(beta=req.beta, min_value=floor))
        except INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return registry.add(model, floor)

    @app.get("/models", response_model=list[ModelInfo])
    def list_models() -> list[ModelInfo]:
        return registry.list()

    @app.post("/models/{model_id}/predict", response_model=PredictResult)
    def predict_location(model_id: str, req: PredictRequest) -> PredictResult:
        try:
            model, _ = registry.get(model_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown model id {model_id!r}")
        try:
            query = Fingerprint(rssi=np.asarray(req.rssi, dtype=np.float64), lat=0.0, lon=0.0)
            estimate = predict(model, query)
        except INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return PredictResult(lat=estimate.lat, lon=estimate.lon)

    @app.delete("/models/{model_id}")
    def drop_model(model_id: str) -> dict:
        try:
            registry.drop(model_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown model id {model_id!r}")
        return {"status": "deleted", "model_id": model_id}

    return app


app = create_app()
