"""
Observations and least-squares results.
"""
import math

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Observation(BaseModel):
    """
    One measured sample: x is the independent variable (field T, angle rad, time s
    or frequency Hz), y the observed value, sigma its standard error.
    branch optionally tags which optical branch ("+-", ...) a line position belongs to.
    """
    model_config = ConfigDict(frozen=True)

    x: float = Field(..., allow_inf_nan=False)
    y: float = Field(..., allow_inf_nan=False)
    sigma: float = Field(1.0, gt=0, allow_inf_nan=False)
    branch: str | None = None

    @field_validator("branch")
    @classmethod
    def _branch_tag(cls, v: str | None) -> str | None:
        if v is not None and v not in ("++", "+-", "-+", "--"):
            raise ValueError(f"branch tag must be one of ++, +-, -+, --; got {v!r}")
        return v


class FitResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: dict[str, float]
    uncertainties: dict[str, float] = Field(default_factory=dict)
    rms: float = math.nan
    chi2: float = math.nan
    reduced_chi2: float = math.nan
    converged: bool = False
    iterations: int = 0
    chi2_history: list[float] = Field(default_factory=list)
    condition_number: float = math.nan
    degenerate: bool = False
    message: str = ""
    warnings: list[str] = Field(default_factory=list)

    def summary(self) -> dict:
        """The JSON shape written by the CLI."""
        return {
            "estimates": self.params,
            "sigmas": self.uncertainties,
            "rms": self.rms,
            "converged": self.converged,
            "iterations": self.iterations,
            "condition_number": self.condition_number,
            "message": self.message,
            "warnings": self.warnings,
        }
