"""
Host optics and per-channel photophysics (oscillator strength, dipole moment, radiative rate).
"""
import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ervo.core.constants import ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, SPEED_OF_LIGHT
from ervo.schemas.optical import DipoleType, Polarization

RateWeighting = Literal["naive_sum", "mode_weighted"]


class HostOptics(BaseModel):
    """Refractive indices along c and a, and the ion number density in cm^-3."""
    model_config = ConfigDict(frozen=True)

    n_c: float = Field(2.15, gt=1)
    n_a: float = Field(1.95, gt=1)
    number_density: float = Field(1.75e18, gt=0)

    @property
    def number_density_si(self) -> float:
        return self.number_density * 1e6


class TransitionPhotophysics(BaseModel):
    """One (transition, polarization, dipole type) channel. f is shared by absorption and emission."""
    model_config = ConfigDict(frozen=True)

    transition: str
    dipole_type: DipoleType
    polarization: Polarization
    wavelength: float = Field(..., gt=0)  # m
    integrated_alpha: float = Field(..., ge=0)  # Hz*cm^-1
    refractive_index: float = Field(..., gt=1)
    f: float = Field(..., ge=0)
    d: float = Field(..., ge=0)  # C*m
    radiative_rate: float = Field(..., ge=0)  # Hz

    @model_validator(mode="after")
    def _dipole_consistent(self) -> "TransitionPhotophysics":
        omega = 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength
        expected = HBAR * ELEMENTARY_CHARGE**2 / (2.0 * ELECTRON_MASS * omega) * self.f
        if abs(self.d**2 - expected) > 1e-12 * max(expected, 1e-300):
            raise ValueError("d^2 inconsistent with (hbar e^2 / 2 m omega) f")
        return self


class RateSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    transition: str
    weighting: RateWeighting
    total_rate: float
    radiative_lifetime: float
    d_ED: float
    d_MD: float
