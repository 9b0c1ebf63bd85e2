"""
Transduction figures of merit and three-level (Lambda / V) configurations.
"""
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ervo.schemas.optical import Polarization


class MaterialFoM(BaseModel):
    """Inputs of zeta = (d31 d32 mu21 rho / (delta_o delta_mu))^2; detunings in Hz."""
    model_config = ConfigDict(frozen=True)

    name: str = ""
    d31: float = Field(..., gt=0)  # C*m
    d32: float = Field(..., gt=0)  # C*m
    mu21: float = Field(..., gt=0)  # J/T
    rho: float = Field(..., gt=0)  # m^-3
    delta_o: float = Field(..., ge=0)
    delta_mu: float = Field(..., ge=0)


class ThreeLevelConfig(BaseModel):
    """
    A Lambda (microwave on the ground doublet) or V (excited doublet) system at
    bias field B. legs are the two optical branch tags; pump_offset is where the
    pump leg sits relative to the zero-field line; optical_offset is the other
    doublet's splitting, i.e. the separation from the companion system.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["Lambda", "V"]
    field: float = Field(..., gt=0)
    microwave_doublet: Literal["ground", "excited"]
    legs: tuple[str, str]
    pump_offset: float
    optical_offset: float = Field(..., ge=0)

    @model_validator(mode="after")
    def _kind_matches_doublet(self) -> "ThreeLevelConfig":
        if (self.kind == "Lambda") != (self.microwave_doublet == "ground"):
            raise ValueError("a Lambda system drives the ground doublet, a V system the excited doublet")
        return self


class RamanMap(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fields: np.ndarray
    frequencies: np.ndarray
    intensity: np.ndarray  # shape (len(fields), len(frequencies)), arbitrary units
    polarization: Polarization | None = None
