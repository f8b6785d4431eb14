"""HTTP surface: mask filling, sentence embeddings, classification, info.

All bodies are JSON; errors come back as ``{"error", "detail"}`` with
status 400 (bad request), 404 (no classifier mounted), or 503 (model not
ready).  Handlers are stateless between requests.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .classifier import BowClassifier
from .encoder import HashedSentenceEncoder
from .model import MaskedWordModel


class MaskFillRequest(BaseModel):
    tokens: list[str]
    position: int
    action: str = Field(pattern="^(substitute|insert)$")
    top: int = Field(gt=0)


class TextRequest(BaseModel):
    text: str


def _error(status: int, error: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": error, "detail": detail})


def create_app(
    model: MaskedWordModel | None,
    encoder: HashedSentenceEncoder | None = None,
    classifier: BowClassifier | None = None,
) -> FastAPI:
    app = FastAPI(title="mlm-sidecar")
    encoder = encoder or HashedSentenceEncoder()

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception) -> JSONResponse:
        return _error(503, "internal", str(exc))

    @app.post("/v1/mask_fill")
    def mask_fill(req: MaskFillRequest) -> JSONResponse:
        if model is None:
            return _error(503, "model_not_ready", "no masked language model loaded")
        if any((not t) or any(ch.isspace() for ch in t) for t in req.tokens):
            return _error(400, "bad_request", "tokens must be non-empty, whitespace-free")
        try:
            candidates = model.mask_fill(req.tokens, req.position, req.action, req.top)
        except ValueError as exc:
            return _error(400, "bad_request", str(exc))
        return JSONResponse(
            {
                "candidates": [
                    {
                        "word": c.word,
                        "log_prob": c.log_prob,
                        "perplexity": c.perplexity,
                    }
                    for c in candidates
                ],
                "model_id": model.model_id,
            }
        )

    @app.post("/v1/embed")
    def embed(req: TextRequest) -> JSONResponse:
        vector = encoder.encode(req.text)
        return JSONResponse(
            {
                "vector": [float(x) for x in vector],
                "dim": encoder.dim,
                "model_id": encoder.model_id,
            }
        )

    @app.post("/v1/classify")
    def classify(req: TextRequest) -> JSONResponse:
        if classifier is None:
            return _error(404, "no_classifier", "no classifier checkpoint mounted")
        probs, logits = classifier.classify(req.text)
        return JSONResponse(
            {
                "probs": probs,
                "logits": logits,
                "label_names": classifier.label_names,
                "model_id": classifier.model_id,
            }
        )

    @app.get("/v1/info")
    def info() -> JSONResponse:
        return JSONResponse(
            {
                "model_id": model.model_id if model is not None else None,
                "encoder_id": encoder.model_id,
                "dim": encoder.dim,
                "labels": classifier.label_names if classifier is not None else None,
            }
        )

    return app
