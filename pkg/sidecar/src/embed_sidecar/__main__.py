"""Serve the embedding service: `python -m embed_sidecar` or `embed-sidecar`.

Environment: EMBED_SIDECAR_MODEL (model name), EMBED_SIDECAR_PORT,
EMBED_SIDECAR_HOST, EMBED_SIDECAR_BATCH_CAP.
"""

from __future__ import annotations

import os
import sys

import uvicorn

from .encoders import SentenceTransformerEncoder
from .service import create_app


def main() -> int:
    encoder = SentenceTransformerEncoder()
    app = create_app(encoder)

    @app.on_event("startup")
    def load_model():
        encoder.load()

    uvicorn.run(
        app,
        host=os.environ.get("EMBED_SIDECAR_HOST", "127.0.0.1"),
        port=int(os.environ.get("EMBED_SIDECAR_PORT", "8731")),
        log_level="info",
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
