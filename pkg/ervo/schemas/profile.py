"""
Material profile (the bundled measured constants) and the per-run manifest.
"""
from datetime import datetime

from pydantic import BaseModel, ConfigDict, Field

from ervo.core.errors import ConfigurationError
from ervo.schemas.cavity import CavityParams, EnsembleParams, FMParams
from ervo.schemas.optical import OpticalLevel, SelectionRuleTable
from ervo.schemas.photo import HostOptics
from ervo.schemas.spin import GTensor, SpinSystem


class HyperfineParams(BaseModel):
    """Odd-isotope hyperfine constants in Hz. A values may be unknown (None)."""
    model_config = ConfigDict(frozen=True)

    isotope: str
    nuclear_spin: float
    A_par: float | None = None
    A_perp: float | None = None
    quadrupole_P: float = 0.0


class MaterialProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    temperature: float = Field(..., gt=0)  # K
    levels: dict[str, OpticalLevel]
    host: HostOptics
    excited_gap: float  # Hz
    spin_inhomogeneity: float = Field(..., gt=0)  # HWHM, Hz
    collective_coupling: float = Field(..., ge=0)  # Hz
    resonator: CavityParams
    fm: FMParams
    hyperfine: HyperfineParams | None = None
    fluorescence_lifetimes: dict[str, float] = Field(default_factory=dict)  # s
    sample_length_cm: float = Field(..., gt=0)
    filling_factor: float = Field(..., ge=0, le=1)
    selection_rules: SelectionRuleTable

    def level(self, label: str) -> OpticalLevel:
        try:
            return self.levels[label]
        except KeyError:
            raise ConfigurationError(f"profile {self.name!r} has no level {label!r}") from None

    @property
    def ground(self) -> OpticalLevel:
        return self.level("Z1")

    @property
    def number_density_si(self) -> float:
        return self.host.number_density_si

    def spin_system(self, g: GTensor | None = None) -> SpinSystem:
        """Even-isotope (I = 0) ground-state spin."""
        return SpinSystem(g=g or self.ground.g)

    def hyperfine_system(self, A_par: float | None = None, A_perp: float | None = None) -> SpinSystem:
        """Odd-isotope ground-state spin; explicit A values override the profile."""
        hf = self.hyperfine
        if hf is None:
            raise ConfigurationError(f"profile {self.name!r} carries no hyperfine block")
        a_par = hf.A_par if A_par is None else A_par
        a_perp = hf.A_perp if A_perp is None else A_perp
        if a_par is None or a_perp is None:
            raise ConfigurationError(
                f"{hf.isotope} hyperfine constants are not in the profile; supply A_par and A_perp"
            )
        return SpinSystem(
            g=self.ground.g,
            nuclear_spin=hf.nuclear_spin,
            A_par=a_par,
            A_perp=a_perp,
            quadrupole_P=hf.quadrupole_P,
        )

    def ensemble(self, spin_center: float = 0.0, gamma: float = 0.0) -> EnsembleParams:
        return EnsembleParams(
            Omega=self.collective_coupling,
            Delta=self.spin_inhomogeneity,
            gamma=gamma,
            spin_center=spin_center,
        )


class RunManifest(BaseModel):
    """Everything needed to re-run a CLI invocation and check its outputs."""
    command: list[str]
    resolved_config: dict
    constants_version: str
    constants: dict
    outputs: list[str] = Field(default_factory=list)
    # sha256 per output path, checked by `replay --check`
    digests: dict[str, str] = Field(default_factory=dict)
    seed: int | None = None
    started_at: datetime
    wall_clock_s: float = 0.0
