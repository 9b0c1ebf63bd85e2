"""
Pydantic schemas for the effective-spin model: g-tensors, field points, spin systems,
eigensystems and spin transitions. Internal units are SI (T, rad, Hz).
"""
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ervo.core.spin_operators import multiplicity

DriveAxis = Literal["x", "y", "z"]


class GTensor(BaseModel):
    """Axial electronic Zeeman tensor of one Kramers doublet."""
    model_config = ConfigDict(frozen=True)

    g_par: float = Field(..., ge=0, allow_inf_nan=False)
    g_perp: float = Field(..., ge=0, allow_inf_nan=False)

    def effective(self, theta: float) -> float:
        """g along a field at angle theta from c."""
        return math.hypot(self.g_par * math.cos(theta), self.g_perp * math.sin(theta))


class FieldPoint(BaseModel):
    """Static field: magnitude in tesla, theta measured from the crystal c-axis."""
    model_config = ConfigDict(frozen=True)

    magnitude: float = Field(..., ge=0, allow_inf_nan=False)
    theta: float = Field(0.0, ge=0, le=math.pi, allow_inf_nan=False)

    @classmethod
    def folded(cls, magnitude: float, theta: float) -> "FieldPoint":
        """Map any angle onto [0, pi]; energies only depend on cos^2 and sin^2."""
        return cls(magnitude=magnitude, theta=math.acos(max(-1.0, min(1.0, math.cos(theta)))))


class SpinSystem(BaseModel):
    """Electron S=1/2 plus an optional nuclear spin I. Hyperfine constants in Hz."""
    model_config = ConfigDict(frozen=True)

    g: GTensor
    nuclear_spin: float = 0.0
    A_par: float = Field(0.0, allow_inf_nan=False)
    A_perp: float = Field(0.0, allow_inf_nan=False)
    quadrupole_P: float = Field(0.0, allow_inf_nan=False)

    @field_validator("nuclear_spin")
    @classmethod
    def _half_integer(cls, v: float) -> float:
        multiplicity(v)
        return float(v)

    @property
    def dimension(self) -> int:
        return 2 * multiplicity(self.nuclear_spin)

    def to_json_dict(self) -> dict:
        return {
            "g_par": self.g.g_par,
            "g_perp": self.g.g_perp,
            "nuclear_spin": self.nuclear_spin,
            "A_par_MHz": self.A_par / 1e6,
            "A_perp_MHz": self.A_perp / 1e6,
            "quadrupole_P_MHz": self.quadrupole_P / 1e6,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SpinSystem":
        return cls(
            g=GTensor(g_par=data["g_par"], g_perp=data["g_perp"]),
            nuclear_spin=data.get("nuclear_spin", 0.0),
            A_par=float(data.get("A_par_MHz") or 0.0) * 1e6,
            A_perp=float(data.get("A_perp_MHz") or 0.0) * 1e6,
            quadrupole_P=float(data.get("quadrupole_P_MHz") or 0.0) * 1e6,
        )


class EigenSystem(BaseModel):
    """Ascending energies (Hz) and the matching orthonormal column vectors."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    energies: np.ndarray
    states: np.ndarray
    nuclear_spin: float = 0.0
    field: FieldPoint | None = None
    clusters: list[list[int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shapes(self) -> "EigenSystem":
        n = self.energies.shape[0]
        if self.states.shape != (n, n):
            raise ValueError(f"states must be {n}x{n}, got {self.states.shape}")
        if np.any(np.diff(self.energies) < 0):
            raise ValueError("energies must be ascending")
        return self

    @property
    def dimension(self) -> int:
        return int(self.energies.shape[0])


class SpinTransition(BaseModel):
    model_config = ConfigDict(frozen=True)

    lower_index: int = Field(..., ge=0)
    upper_index: int = Field(..., ge=0)
    frequency: float = Field(..., ge=0)
    strength: float = Field(..., ge=0, le=1)


class Crossing(BaseModel):
    """A field at which an allowed transition matches a target frequency."""
    model_config = ConfigDict(frozen=True)

    field: float
    transition: SpinTransition
