"""
Resonator, spin-ensemble and FM-readout parameters. Every frequency is cyclic (Hz),
including Omega, kappa and the Gaussian inhomogeneity Delta, which is a HWHM.
"""
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

Probe = Literal["zero_crossing_shift", "fixed_probe_quadrature"]


class CavityParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega0: float = Field(..., gt=0)
    kappa: float = Field(..., gt=0)  # FWHM

    @computed_field
    @property
    def Q(self) -> float:
        return self.omega0 / self.kappa


class EnsembleParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    Omega: float = Field(..., ge=0)
    Delta: float = Field(..., ge=0)  # HWHM
    gamma: float = Field(0.0, ge=0)
    spin_center: float = 0.0


class FMParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega_m: float = Field(100e3, gt=0)
    beta: float = Field(1.0, ge=0)


class CouplingBudget(BaseModel):
    """Inputs of Omega = mu21 sqrt(rho dn eta omega0 mu0 / 2 hbar)."""
    model_config = ConfigDict(frozen=True)

    mu21: float = Field(..., ge=0)  # J/T
    rho: float = Field(..., ge=0)  # m^-3
    delta_n: float = Field(..., ge=0, le=1)
    eta: float = Field(..., ge=0, le=1)
    omega0: float = Field(..., gt=0)  # Hz


class SweepTrace(BaseModel):
    """Per-field EPR observable; flagged samples hold NaN."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fields: np.ndarray
    values: np.ndarray
    probe: Probe
    flagged: list[int] = Field(default_factory=list)
