"""The embedding HTTP service.

POST /embed  {"texts": [...]} -> {"vectors": [[...]], "dim": D, "model": NAME}
GET  /health                  -> {"status": "ok", "model": NAME, "dim": D}

Responses: 400 for malformed bodies, 413 when the batch exceeds the cap,
503 while no model is loaded.  Vectors preserve request order and the
service is stateless beyond the loaded model.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

DEFAULT_BATCH_CAP = 256
ENV_BATCH_CAP = "EMBED_SIDECAR_BATCH_CAP"


class EmbedRequest(BaseModel):
    texts: list[str]


def create_app(encoder=None, batch_cap: int | None = None) -> FastAPI:
    """Build the app around an encoder object (anything with name/dim/
    loaded/load/encode).  Pass an unloaded encoder to expose 503s until
    load() is called."""
    cap = batch_cap if batch_cap is not None else int(os.environ.get(ENV_BATCH_CAP, DEFAULT_BATCH_CAP))
    app = FastAPI(title="embed-sidecar")
    app.state.encoder = encoder

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        detail = [
            {"loc": [str(p) for p in err.get("loc", [])], "msg": str(err.get("msg", ""))}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": detail})

    def ready():
        enc = app.state.encoder
        if enc is None or not getattr(enc, "loaded", False):
            raise HTTPException(status_code=503, detail="model not loaded")
        return enc

    @app.get("/health")
    def health():
        enc = ready()
        return {"status": "ok", "model": enc.name, "dim": enc.dim}

    @app.post("/embed")
    def embed(req: EmbedRequest):
        enc = ready()
        if len(req.texts) > cap:
            raise HTTPException(status_code=413, detail=f"batch exceeds cap of {cap}")
        vectors = enc.encode(req.texts)
        return {"vectors": vectors, "dim": enc.dim, "model": enc.name}

    return app
