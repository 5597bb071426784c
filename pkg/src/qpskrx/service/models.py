"""Request/response schemas for the receiver-simulation service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

COMMANDS = (
    "static-curve",
    "ff-curve",
    "dark-count-sweep",
    "efficiency-sweep",
    "bounds",
    "selftest",
)

# alpha^2 from 0.25 to 10 in steps of 0.25
DEFAULT_ALPHA_SQ_GRID = tuple(0.25 * k for k in range(1, 41))
DEFAULT_NU_VALUES = (0.0, 1e-3, 1e-2)
DEFAULT_ETA_VALUES = (1.0, 0.9, 0.7)
# nu default specific to the efficiency sweep (the global default stays 0)
EFFICIENCY_SWEEP_NU = 1e-3
DEFAULT_TRIALS = 100_000


class RunSpec(BaseModel):
    """One simulation run: which figure-style dataset to produce and with what knobs.

    Unset fields fall back to the defaults the corresponding command calls
    for; ``seed`` has no default on purpose - Monte Carlo commands refuse to
    run without one so results are always reproducible.
    """

    model_config = ConfigDict(extra="forbid")

    command: Literal[
        "static-curve",
        "ff-curve",
        "dark-count-sweep",
        "efficiency-sweep",
        "bounds",
        "selftest",
    ]
    alpha_sq_grid: Optional[list[float]] = None
    N: int = Field(default=3, ge=1)
    N_values: Optional[list[int]] = None
    mode: Literal["onoff", "pnrd", "both"] = "both"
    eta: float = Field(default=1.0, ge=0.0, le=1.0)
    nu: float = Field(default=0.0, ge=0.0)
    nu_values: Optional[list[float]] = None
    eta_values: Optional[list[float]] = None
    trials: int = Field(default=DEFAULT_TRIALS, ge=1)
    seed: Optional[int] = None
    het_photon_scale: float = Field(default=1.0, gt=0.0)
    output_path: Optional[str] = None

    @field_validator("alpha_sq_grid")
    @classmethod
    def _grid_ascending(cls, v: Optional[list[float]]) -> Optional[list[float]]:
        if v is None:
            return v
        if not v:
            raise ValueError("alpha_sq_grid must be nonempty")
        if any(x < 0.0 for x in v):
            raise ValueError("alpha_sq values must be >= 0")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("alpha_sq_grid must be strictly ascending")
        return v

    @field_validator("N_values")
    @classmethod
    def _n_values_positive(cls, v: Optional[list[int]]) -> Optional[list[int]]:
        if v is not None and (not v or any(n < 1 for n in v)):
            raise ValueError("N_values must be a nonempty list of integers >= 1")
        return v

    @field_validator("nu_values")
    @classmethod
    def _nu_values_valid(cls, v: Optional[list[float]]) -> Optional[list[float]]:
        if v is not None and (not v or any(x < 0.0 for x in v)):
            raise ValueError("nu_values must be a nonempty list of values >= 0")
        return v

    @field_validator("eta_values")
    @classmethod
    def _eta_values_valid(cls, v: Optional[list[float]]) -> Optional[list[float]]:
        if v is not None and (not v or any(not 0.0 <= x <= 1.0 for x in v)):
            raise ValueError("eta_values must be a nonempty list of values in [0, 1]")
        return v

    @property
    def grid(self) -> list[float]:
        return list(self.alpha_sq_grid) if self.alpha_sq_grid else list(DEFAULT_ALPHA_SQ_GRID)

    @property
    def n_list(self) -> list[int]:
        return list(self.N_values) if self.N_values else [self.N]

    @property
    def nu_list(self) -> list[float]:
        return list(self.nu_values) if self.nu_values else list(DEFAULT_NU_VALUES)

    @property
    def eta_list(self) -> list[float]:
        return list(self.eta_values) if self.eta_values else list(DEFAULT_ETA_VALUES)

    @property
    def modes(self) -> list[str]:
        return ["onoff", "pnrd"] if self.mode == "both" else [self.mode]

    @property
    def effective_nu(self) -> float:
        if self.command == "efficiency-sweep" and "nu" not in self.model_fields_set:
            return EFFICIENCY_SWEEP_NU
        return self.nu


class CurveRowModel(BaseModel):
    """One (alpha^2, error) sample of a named curve."""

    alpha_sq: float = Field(ge=0.0)
    p_error: float = Field(ge=0.0, le=1.0)
    std_err: float = Field(ge=0.0)
    method: str
    label: str


class CurveResponse(BaseModel):
    """Result rows plus their canonical CSV rendering."""

    command: str
    rows: list[CurveRowModel]
    csv: str


class SelftestCheck(BaseModel):
    """A single named check with its outcome and a short numeric detail."""

    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    """Outcome of the built-in consistency checks."""

    command: str = "selftest"
    passed: bool
    checks: list[SelftestCheck]
