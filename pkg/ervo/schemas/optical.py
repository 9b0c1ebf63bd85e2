"""
Optical level structure, D2d selection rules, line lists and transmission spectra.
Optical integrated absorption is kept in Hz*cm^-1 and sample length in cm, the
units the absorption data is quoted in.
"""
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ervo.schemas.spin import GTensor

Polarization = Literal["sigma", "pi"]
DipoleType = Literal["ED", "MD"]
Profile = Literal["gaussian", "lorentzian"]
BRANCH_TAGS = ("++", "+-", "-+", "--")

GAUSSIAN_NORM = 2.0 * math.sqrt(math.log(2.0) / math.pi)


def branch_sign(tag_char: str) -> int:
    return 1 if tag_char == "+" else -1


class OpticalLevel(BaseModel):
    """A crystal-field level: offset from Z1 at zero field, g-tensor and |mu| tag ("1/2", "3/2")."""
    model_config = ConfigDict(frozen=True)

    label: str
    zero_field_frequency: float = 0.0
    g: GTensor
    crystal_quantum_number: Literal["1/2", "3/2"]
    wavelength: float | None = Field(None, gt=0)  # vacuum wavelength of Z1 -> level, m
    optical_inhomogeneity: float | None = Field(None, gt=0)  # FWHM, Hz

    @model_validator(mode="after")
    def _ground_at_zero(self) -> "OpticalLevel":
        if self.label == "Z1" and self.zero_field_frequency != 0.0:
            raise ValueError("Z1 is the reference level and must have zero offset")
        return self

    def mu(self, branch: str) -> str:
        """Signed crystal quantum number of a Zeeman branch; + branch carries +|mu|."""
        return ("+" if branch == "+" else "-") + self.crystal_quantum_number


class SelectionRuleTable(BaseModel):
    """(mu_initial, mu_final, polarization) -> allowed dipole types. An empty set means forbidden."""
    model_config = ConfigDict(frozen=True)

    entries: dict[tuple[str, str, Polarization], frozenset[DipoleType]]

    @model_validator(mode="after")
    def _symmetric(self) -> "SelectionRuleTable":
        for (mi, mf, pol), kinds in self.entries.items():
            mirror = self.entries.get((mf, mi, pol))
            if mirror is not None and mirror != kinds:
                raise ValueError(f"selection rules not symmetric for ({mi}, {mf}, {pol})")
        return self

    def allowed(self, mu_initial: str, mu_final: str, pol: Polarization) -> frozenset[DipoleType] | None:
        return self.entries.get((mu_initial, mu_final, pol))

    def to_rows(self) -> list[dict]:
        return [
            {"mu_initial": mi, "mu_final": mf, "polarization": pol, "allowed": sorted(kinds) or ["forbidden"]}
            for (mi, mf, pol), kinds in sorted(self.entries.items())
        ]

    @classmethod
    def from_rows(cls, rows: list[dict]) -> "SelectionRuleTable":
        entries = {}
        for row in rows:
            kinds = frozenset(k for k in row["allowed"] if k != "forbidden")
            entries[(row["mu_initial"], row["mu_final"], row["polarization"])] = kinds
        return cls(entries=entries)


class OpticalTransitionLine(BaseModel):
    model_config = ConfigDict(frozen=True)

    offset: float  # Hz from the zero-field line center
    ground_branch: Literal["+", "-"]
    excited_branch: Literal["+", "-"]
    polarization: Polarization
    dipole_type: DipoleType
    relative_amplitude: float = Field(..., ge=0)

    @property
    def tag(self) -> str:
        return self.ground_branch + self.excited_branch

    @property
    def spin_conserving(self) -> bool:
        return self.ground_branch == self.excited_branch


class AbsorptionLine(BaseModel):
    """Inhomogeneous line; integrated_alpha in Hz*cm^-1, fwhm and center in Hz."""
    model_config = ConfigDict(frozen=True)

    center: float
    fwhm: float = Field(..., gt=0)
    integrated_alpha: float = Field(..., ge=0)
    profile: Profile = "gaussian"

    def alpha(self, nu: np.ndarray) -> np.ndarray:
        """Absorption coefficient in cm^-1."""
        x = np.asarray(nu, dtype=float) - self.center
        if self.profile == "gaussian":
            peak = self.integrated_alpha * GAUSSIAN_NORM / self.fwhm
            return peak * np.exp(-4.0 * math.log(2.0) * (x / self.fwhm) ** 2)
        half = 0.5 * self.fwhm
        return self.integrated_alpha * (half / math.pi) / (x**2 + half**2)

    @property
    def peak_alpha(self) -> float:
        if self.profile == "gaussian":
            return self.integrated_alpha * GAUSSIAN_NORM / self.fwhm
        return self.integrated_alpha * 2.0 / (math.pi * self.fwhm)


class Spectrum(BaseModel):
    """Transmission sampled on a strictly increasing grid (Hz); sample length in cm."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    frequency: np.ndarray
    transmission: np.ndarray
    length_cm: float = Field(..., gt=0)

    @field_validator("frequency", "transmission", mode="before")
    @classmethod
    def _as_array(cls, v) -> np.ndarray:
        return np.asarray(v, dtype=float)

    @model_validator(mode="after")
    def _grid(self) -> "Spectrum":
        if self.frequency.ndim != 1 or self.frequency.shape != self.transmission.shape:
            raise ValueError("frequency and transmission must be 1-D arrays of equal length")
        if self.frequency.size > 1 and np.any(np.diff(self.frequency) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        return self
