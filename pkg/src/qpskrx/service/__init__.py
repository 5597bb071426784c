"""HTTP service wrapping the receiver simulations."""

from .app import create_app
from .models import (
    COMMANDS,
    CurveResponse,
    CurveRowModel,
    RunSpec,
    SelftestCheck,
    SelftestResponse,
)

__all__ = [
    "COMMANDS",
    "CurveResponse",
    "CurveRowModel",
    "RunSpec",
    "SelftestCheck",
    "SelftestResponse",
    "create_app",
]
