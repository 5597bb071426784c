"""FastAPI application exposing the receiver simulations."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from . import handlers
from .models import CurveResponse, RunSpec, SelftestResponse


def create_app() -> FastAPI:
    app = FastAPI(
        title="qpskrx",
        version=__version__,
        description="Error-rate curves for QPSK coherent-state receivers.",
    )

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    @app.post("/run", response_model=CurveResponse | SelftestResponse)
    def run(spec: RunSpec) -> CurveResponse | SelftestResponse:
        try:
            return handlers.run(spec)
        except (ValueError, RuntimeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return app
