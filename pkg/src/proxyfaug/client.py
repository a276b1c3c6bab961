"""Thin client for the proxyfaug service.

With a ``base_url`` the client talks HTTP to a running server; without one it
executes the same request handlers in-process, so the CLI works standalone.
Either way the caller sends the pydantic request models and gets the pydantic
result models back.
"""

from __future__ import annotations

import httpx

from .service import handlers
from .service.schemas import (
    AugmentRequest,
    AugmentResult,
    EvaluateRequest,
    EvaluateResult,
    TuneRequest,
    TuneResult,
)


class ServiceClient:
    def __init__(self, base_url: str | None = None, timeout: float = 3600.0, transport=None):
        self._http = None
        if base_url is not None:
            self._http = httpx.Client(base_url=base_url, timeout=timeout, transport=transport)

    def close(self) -> None:
        if self._http is not None:
            self._http.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _post(self, path: str, request, result_model):
        resp = self._http.post(path, json=request.model_dump())
        if resp.is_error:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise httpx.HTTPStatusError(
                f"server returned {resp.status_code}: {detail}",
                request=resp.request,
                response=resp,
            )
        return result_model.model_validate(resp.json())

    def augment(self, request: AugmentRequest) -> AugmentResult:
        if self._http is None:
            return handlers.handle_augment(request)
        return self._post("/augment", request, AugmentResult)

    def evaluate(self, request: EvaluateRequest) -> EvaluateResult:
        if self._http is None:
            return handlers.handle_evaluate(request)
        return self._post("/evaluate", request, EvaluateResult)

    def tune(self, request: TuneRequest) -> TuneResult:
        if self._http is None:
            return handlers.handle_tune(request)
        return self._post("/tune", request, TuneResult)
