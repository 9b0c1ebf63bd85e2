"""
Command-line interface. Every subcommand writes its tables to --out as CSV
(or JSON with --format json) plus a <command>.manifest.json that `ervo replay`
re-executes and checks.

    ervo levels --b 0
    ervo photo table --alphas measured_alphas.csv
    ervo fom systems --resonator 2.4GHz
"""
import hashlib
import math
import sys
import time
from collections.abc import Sequence
from datetime import datetime, timezone
from pathlib import Path
from typing import ClassVar, Literal

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr, ValidationError
from pydantic_settings import BaseSettings, CliApp, CliSubCommand, SettingsConfigDict, SettingsError

from ervo.config import settings
from ervo.core.constants import BOHR_MAGNETON, CONSTANTS_VERSION, as_table
from ervo.core.errors import PhysicsInputError, ToolkitError
from ervo.core.log import configure_logging, get_logger
from ervo.core.units import parse_quantity
from ervo.schemas.cavity import EnsembleParams, Probe
from ervo.schemas.fit import FitResult, Observation
from ervo.schemas.fom import MaterialFoM
from ervo.schemas.optical import OpticalTransitionLine, Polarization, Spectrum
from ervo.schemas.photo import RateWeighting
from ervo.schemas.profile import MaterialProfile, RunManifest
from ervo.schemas.quantities import Angle, Dipole, Frequency, Length, MagneticField, Temperature
from ervo.schemas.spin import FieldPoint, SpinSystem
from ervo.services import data_io
from ervo.services.cavity_ensemble import epr_field_sweep
from ervo.services.estimation import (
    fit_epr,
    fit_exponential,
    fit_g_factors,
    fit_gaussian_lines,
    synthesize_decay,
    synthesize_ramp_observations,
    synthesize_rotation_observations,
)
from ervo.services.optical_model import (
    absorption_lines_from_transitions,
    integrate_absorption,
    line_positions,
    ramp_pattern,
    rotation_pattern,
    synthesize_transmission,
)
from ervo.services.photophysics import branching_ratio, photophysics_table, total_rate_and_dipoles
from ervo.services.spin_core import find_crossings, level_diagram
from ervo.services.transduction import (
    enumerate_systems,
    raman_map,
    select_leg_dipoles,
    zeta,
)

logger = get_logger(__name__)

BUNDLED_ALPHAS = settings.PROFILE_PATH.parent / "measured_alphas.csv"


class Command(BaseModel):
    """Options shared by every subcommand."""

    name: ClassVar[str] = ""

    profile: Path | None = Field(None, description="material profile JSON (default: bundled ervo4.json)")
    out: Path | None = Field(None, description="output directory (default: ERVO_OUTPUT_DIR)")
    format: Literal["csv", "json"] = "csv"
    seed: int | None = Field(None, description="seed for synthetic noise")

    _outputs: list[Path] = PrivateAttr(default_factory=list)
    _profile: MaterialProfile | None = PrivateAttr(None)
    _seed_drawn: bool = PrivateAttr(False)

    @property
    def out_dir(self) -> Path:
        return self.out if self.out is not None else settings.OUTPUT_DIR

    def material(self) -> MaterialProfile:
        if self._profile is None:
            self._profile = data_io.load_profile(self.profile or settings.PROFILE_PATH)
        return self._profile

    def rng(self) -> np.random.Generator:
        if self.seed is None:
            self.seed = int(np.random.SeedSequence().entropy % 2**32)
            self._seed_drawn = True
        return np.random.default_rng(self.seed)

    def emit(self, stem: str, columns: dict, metadata: dict | None = None) -> Path:
        if self.format == "json":
            path = data_io.write_json(self.out_dir / f"{stem}.json", {"metadata": metadata or {}, "columns": columns})
        else:
            path = data_io.write_csv(self.out_dir / f"{stem}.csv", columns, metadata)
        self._outputs.append(path)
        logger.info("wrote %s", path)
        return path

    def emit_fit(self, stem: str, result: FitResult) -> Path:
        if self.format == "json":
            path = data_io.write_json(self.out_dir / f"{stem}.json", result.summary())
            self._outputs.append(path)
            return path
        names = list(result.params)
        return self.emit(
            stem,
            {
                "parameter": names,
                "estimate": [result.params[n] for n in names],
                "sigma": [result.uncertainties.get(n, math.nan) for n in names],
            },
            {
                "rms": result.rms,
                "converged": result.converged,
                "iterations": result.iterations,
                "message": result.message or "-",
            },
        )

    def run(self) -> None:
        raise NotImplementedError

    def cli_cmd(self) -> None:
        self.run()


def _line_rows(lines: list[OpticalTransitionLine], rows: dict[str, list]) -> None:
    for line in lines:
        rows["tag"].append(line.tag)
        rows["dipole_type"].append(line.dipole_type)
        rows["offset_Hz"].append(line.offset)
        rows["relative_amplitude"].append(line.relative_amplitude)


# levels

class Levels(Command):
    """Zeeman or hyperfine level energies vs field, optionally with resonator crossings."""

    name: ClassVar[str] = "levels"

    b: MagneticField = Field(0.0, description="field, or start of the ramp (e.g. 10mT)")
    b_max: MagneticField | None = Field(None, description="end of the field ramp")
    points: int = Field(101, ge=2)
    theta: Angle = 0.0
    level: str = "Z1"
    a_par: Frequency | None = Field(None, description="odd-isotope A_par (Z1 only)")
    a_perp: Frequency | None = Field(None, description="odd-isotope A_perp (Z1 only)")
    target: Frequency | None = Field(None, description="report crossings of this frequency")

    def run(self) -> None:
        profile = self.material()
        if self.a_par is not None or self.a_perp is not None:
            system = profile.hyperfine_system(self.a_par, self.a_perp)
        else:
            system = SpinSystem(g=profile.level(self.level).g)
        fields = np.array([self.b]) if self.b_max is None else np.linspace(self.b, self.b_max, self.points)
        energies = level_diagram(system, fields, self.theta)
        columns = {"field_T": fields}
        for k in range(energies.shape[1]):
            columns[f"level_{k}_Hz"] = energies[:, k]
        columns["splitting_Hz"] = energies[:, -1] - energies[:, 0]
        self.emit("levels", columns, {"level": self.level, "theta_rad": self.theta})

        if self.target is not None:
            hi = self.b_max if self.b_max is not None else self.b
            found = find_crossings(system, self.target, (self.b, hi), self.theta)
            self.emit(
                "levels_crossings",
                {
                    "field_T": [c.field for c in found],
                    "lower_index": [c.transition.lower_index for c in found],
                    "upper_index": [c.transition.upper_index for c in found],
                    "frequency_Hz": [c.transition.frequency for c in found],
                    "strength": [c.transition.strength for c in found],
                },
            )


# optical

class OpticalRamp(Command):
    """Line positions across a field ramp."""

    name: ClassVar[str] = "optical-ramp"

    excited: str = "Y1"
    polarization: Polarization = "sigma"
    b_max: MagneticField
    points: int = Field(51, ge=2)
    theta: Angle = 0.0
    temperature: Temperature | None = None

    def run(self) -> None:
        profile = self.material()
        fields = np.linspace(0.0, self.b_max, self.points)
        pattern = ramp_pattern(
            profile.ground, profile.level(self.excited), fields, self.polarization, self.theta,
            profile.selection_rules, self.temperature or profile.temperature,
        )
        rows: dict[str, list] = {"field_T": [], "tag": [], "dipole_type": [], "offset_Hz": [], "relative_amplitude": []}
        for b, lines in zip(fields, pattern):
            rows["field_T"].extend([float(b)] * len(lines))
            _line_rows(lines, rows)
        self.emit("optical_ramp", rows, {"transition": f"Z1-{self.excited}", "polarization": self.polarization})


class OpticalRotate(Command):
    """Line positions as the field rotates from the c axis (0) to the a axis (pi/2) and back."""

    name: ClassVar[str] = "optical-rotate"

    excited: str = "Y1"
    polarization: Polarization = "sigma"
    b: MagneticField
    points: int = Field(37, ge=2)
    temperature: Temperature | None = None

    def run(self) -> None:
        profile = self.material()
        thetas = np.linspace(0.0, math.pi, self.points)
        pattern = rotation_pattern(
            profile.ground, profile.level(self.excited), self.b, thetas, self.polarization,
            profile.selection_rules, self.temperature or profile.temperature,
        )
        rows: dict[str, list] = {"angle_rad": [], "tag": [], "dipole_type": [], "offset_Hz": [], "relative_amplitude": []}
        for theta, lines in zip(thetas, pattern):
            rows["angle_rad"].extend([float(theta)] * len(lines))
            _line_rows(lines, rows)
        self.emit("optical_rotate", rows, {"transition": f"Z1-{self.excited}", "field_T": self.b})


class OpticalSpectrum(Command):
    """Synthetic transmission of the Zeeman-split line, Gaussian lines of the level's inhomogeneity."""

    name: ClassVar[str] = "optical-spectrum"

    excited: str = "Y2"
    polarization: Polarization = "pi"
    b: MagneticField = 0.0
    theta: Angle = 0.0
    fwhm: Frequency | None = None
    span: Frequency | None = None
    points: int = Field(2001, ge=3)
    length: Length | None = None
    alphas: Path | None = None
    noise: float = Field(0.0, ge=0, description="Gaussian noise on transmission")

    def run(self) -> None:
        profile = self.material()
        excited = profile.level(self.excited)
        fwhm = self.fwhm or excited.optical_inhomogeneity
        if fwhm is None:
            raise ToolkitError(f"level {self.excited} has no optical inhomogeneity; pass --fwhm")
        transition = f"Z1-{self.excited}"
        group_alpha: dict[str, float] = {}
        for row in data_io.load_alphas(self.alphas or BUNDLED_ALPHAS):
            if row["transition"] == transition and row["polarization"] == self.polarization:
                group_alpha[row["dipole_type"]] = group_alpha.get(row["dipole_type"], 0.0) + row["integrated_alpha"]

        lines = line_positions(
            profile.ground, excited, FieldPoint.folded(self.b, self.theta), self.polarization,
            profile.selection_rules, profile.temperature,
        )
        absorption = absorption_lines_from_transitions(lines, fwhm, group_alpha)
        reach = max((abs(line.offset) for line in lines), default=0.0)
        half = 0.5 * self.span if self.span else reach + 5.0 * fwhm
        grid = np.linspace(-half, half, self.points)
        length_cm = self.length * 100.0 if self.length else profile.sample_length_cm
        spec = synthesize_transmission(absorption, length_cm, grid)
        metadata = {"length_cm": float(length_cm)}
        if self.noise > 0:
            noisy = spec.transmission + self.rng().normal(0.0, self.noise, size=grid.shape)
            spec = Spectrum(frequency=grid, transmission=noisy, length_cm=length_cm)
        else:
            metadata["integrated_alpha_Hz_per_cm"] = integrate_absorption(spec)
        self.emit("optical_spectrum", {"frequency_Hz": spec.frequency, "transmission": spec.transmission}, metadata)


class OpticalCLI(BaseModel):
    """Zeeman-split optical lines and synthetic spectra."""

    ramp: CliSubCommand[OpticalRamp]
    rotate: CliSubCommand[OpticalRotate]
    spectrum: CliSubCommand[OpticalSpectrum]

    def cli_cmd(self) -> None:
        CliApp.run_subcommand(self)


# photophysics

class PhotoTable(Command):
    """Oscillator strength, dipole moment and radiative rate per channel, totals per transition."""

    name: ClassVar[str] = "photo-table"

    alphas: Path | None = Field(None, description="integrated absorption CSV (default: bundled measured set)")
    weighting: RateWeighting = "naive_sum"

    def run(self) -> None:
        profile = self.material()
        channels = photophysics_table(data_io.load_alphas(self.alphas or BUNDLED_ALPHAS), profile.host)
        self.emit(
            "photo_table",
            {
                "transition": [c.transition for c in channels],
                "polarization": [c.polarization for c in channels],
                "dipole_type": [c.dipole_type for c in channels],
                "integrated_alpha_Hz_per_cm": [c.integrated_alpha for c in channels],
                "refractive_index": [c.refractive_index for c in channels],
                "f": [c.f for c in channels],
                "d_Cm": [c.d for c in channels],
                "radiative_rate_Hz": [c.radiative_rate for c in channels],
            },
        )
        summary: dict[str, list] = {
            "transition": [], "total_rate_Hz": [], "radiative_lifetime_s": [],
            "d_ED_Cm": [], "d_MD_Cm": [], "branching_ratio": [],
        }
        for name in dict.fromkeys(c.transition for c in channels):
            s = total_rate_and_dipoles([c for c in channels if c.transition == name], self.weighting)
            tau_f = profile.fluorescence_lifetimes.get(name.split("-")[-1])
            summary["transition"].append(name)
            summary["total_rate_Hz"].append(s.total_rate)
            summary["radiative_lifetime_s"].append(s.radiative_lifetime)
            summary["d_ED_Cm"].append(s.d_ED)
            summary["d_MD_Cm"].append(s.d_MD)
            summary["branching_ratio"].append(branching_ratio(tau_f, s.radiative_lifetime) if tau_f else math.nan)
        self.emit("photo_summary", summary, {"weighting": self.weighting})


class PhotoCLI(BaseModel):
    """Photophysics from integrated absorption."""

    table: CliSubCommand[PhotoTable]

    def cli_cmd(self) -> None:
        CliApp.run_subcommand(self)


# EPR

def _sweep_column(probe: Probe) -> str:
    return "shift_Hz" if probe == "zero_crossing_shift" else "signal"


class EprSweep(Command):
    """Resonator-detected EPR trace of the ground-state ensemble."""

    name: ClassVar[str] = "epr-sweep"

    b_min: MagneticField
    b_max: MagneticField
    points: int = Field(401, ge=2)
    probe: Probe = "zero_crossing_shift"
    theta: Angle = 0.0
    omega: Frequency | None = Field(None, description="collective coupling (default: profile)")
    delta: Frequency | None = Field(None, description="spin inhomogeneity HWHM (default: profile)")
    noise: str = Field("0", description="Gaussian noise; Hz units for the shift probe (e.g. 200Hz)")

    def run(self) -> None:
        profile = self.material()
        ensemble = EnsembleParams(
            Omega=profile.collective_coupling if self.omega is None else self.omega,
            Delta=profile.spin_inhomogeneity if self.delta is None else self.delta,
        )
        fields = np.linspace(self.b_min, self.b_max, self.points)
        trace = epr_field_sweep(profile.resonator, ensemble, profile.ground.g, fields, self.probe, profile.fm, self.theta)
        values = trace.values
        kind = "frequency" if self.probe == "zero_crossing_shift" else "dimensionless"
        noise = parse_quantity(self.noise, kind)
        if noise > 0:
            values = values + self.rng().normal(0.0, noise, size=values.shape)
        self.emit(
            "epr_sweep",
            {"field_T": fields, _sweep_column(self.probe): values},
            {"probe": self.probe, "flagged": len(trace.flagged)},
        )


class EprFit(Command):
    """Fit Omega, Delta and the crossing field B0 to a measured or synthetic trace."""

    name: ClassVar[str] = "epr-fit"

    trace: Path
    probe: Probe = "zero_crossing_shift"
    theta: Angle = 0.0

    def run(self) -> None:
        profile = self.material()
        sweep = data_io.load_sweep(self.trace, self.probe)
        obs = [Observation(x=float(b), y=float(v)) for b, v in zip(sweep.fields, sweep.values) if v == v]
        result = fit_epr(obs, profile.resonator, profile.ground.g, self.probe, fm=profile.fm, theta=self.theta)
        self.emit_fit("epr_fit", result)


class EprCLI(BaseModel):
    """EPR field sweeps and fits."""

    sweep: CliSubCommand[EprSweep]
    fit: CliSubCommand[EprFit]

    def cli_cmd(self) -> None:
        CliApp.run_subcommand(self)


# fits

class FitG(Command):
    """Excited-level g-tensor from ramp and rotation line positions (synthetic when no files are given)."""

    name: ClassVar[str] = "fit-g"

    excited: str = "Y1"
    ramp: Path | None = Field(None, description="CSV: field_<unit>, frequency_<unit>[, sigma_<unit>][, branch]")
    rotation: Path | None = Field(None, description="CSV: angle_<unit>, frequency_<unit>[, sigma_<unit>][, branch]")
    rotation_b: MagneticField | None = None
    b_max: MagneticField = Field(0.1, description="synthetic ramp end field")
    noise: Frequency = Field(0.0, description="synthetic Gaussian noise on line offsets")
    exclude_window: list[Angle] = Field(default_factory=list, description="lo,hi angle pairs whose rotation points are masked")

    def run(self) -> None:
        profile = self.material()
        ground = profile.ground.g
        magnitude = self.rotation_b if self.rotation_b is not None else 0.5 * self.b_max
        if self.ramp is None and self.rotation is None:
            truth = profile.level(self.excited).g
            rng = self.rng()
            ramp = synthesize_ramp_observations(
                ground, truth, np.linspace(0.1 * self.b_max, self.b_max, 10), noise=self.noise, rng=rng
            )
            rotation = synthesize_rotation_observations(
                ground, truth, magnitude, np.linspace(0.0, math.pi, 19), noise=self.noise, rng=rng
            )
        else:
            ramp = data_io.load_observations(self.ramp, "ramp") if self.ramp else []
            rotation = data_io.load_observations(self.rotation, "rotation") if self.rotation else []
        if len(self.exclude_window) % 2:
            raise PhysicsInputError("--exclude-window takes lo,hi pairs")
        windows = list(zip(self.exclude_window[::2], self.exclude_window[1::2]))
        result = fit_g_factors(ramp, rotation, ground, magnitude if rotation else None, angle_windows=windows)
        self.emit_fit("fit_g", result)


class FitLifetime(Command):
    """Single-exponential fluorescence decay (synthetic from the profile lifetime when no file is given)."""

    name: ClassVar[str] = "fit-lifetime"

    decay: Path | None = Field(None, description="CSV: time_<unit>, counts[, sigma]")
    level: str = "Y1"
    points: int = Field(200, ge=4)
    amplitude: float = Field(1e4, gt=0)
    poisson: bool = False

    def run(self) -> None:
        if self.decay is not None:
            obs = data_io.load_observations(self.decay, "decay")
        else:
            tau = self.material().fluorescence_lifetimes.get(self.level)
            if tau is None:
                raise ToolkitError(f"profile has no fluorescence lifetime for {self.level}")
            times = np.linspace(0.0, 5.0 * tau, self.points)
            obs = synthesize_decay(self.amplitude, tau, 0.0, times, self.poisson, self.rng() if self.poisson else None)
        self.emit_fit("fit_lifetime", fit_exponential(obs))


class FitLines(Command):
    """Multi-Gaussian fit of a transmission spectrum."""

    name: ClassVar[str] = "fit-lines"

    spectrum: Path
    lines: int = Field(1, ge=1)

    def run(self) -> None:
        self.emit_fit("fit_lines", fit_gaussian_lines(data_io.read_spectrum(self.spectrum), self.lines))


class FitCLI(BaseModel):
    """Parameter estimation from observation files."""

    g: CliSubCommand[FitG]
    lifetime: CliSubCommand[FitLifetime]
    lines: CliSubCommand[FitLines]

    def cli_cmd(self) -> None:
        CliApp.run_subcommand(self)


# transduction figures of merit

def _leg_rows(profile: MaterialProfile, excited: str, alphas: Path | None):
    rows = photophysics_table(
        [r for r in data_io.load_alphas(alphas or BUNDLED_ALPHAS) if r["transition"] == f"Z1-{excited}"],
        profile.host,
    )
    if not rows:
        raise ToolkitError(f"no integrated absorption rows for Z1-{excited}")
    return rows


class FomZeta(Command):
    """zeta = (d31 d32 mu21 rho / (delta_o delta_mu))^2; dipoles default to the strongest leg pair."""

    name: ClassVar[str] = "fom-zeta"

    excited: str = "Y2"
    delta_o: Frequency | None = Field(None, description="optical detuning (default: level inhomogeneity)")
    delta_mu: Frequency | None = Field(None, description="microwave detuning (default: spin inhomogeneity)")
    d31: Dipole | None = None
    d32: Dipole | None = None
    alphas: Path | None = None

    def run(self) -> None:
        profile = self.material()
        d31, d32 = self.d31, self.d32
        pol = "-"
        if d31 is None or d32 is None:
            d_cons, d_flip, pol = select_leg_dipoles(
                profile.ground, profile.level(self.excited), _leg_rows(profile, self.excited, self.alphas),
                profile.selection_rules,
            )
            d31 = d_cons if d31 is None else d31
            d32 = d_flip if d32 is None else d32
        material = MaterialFoM(
            name=f"{profile.name} Z1-{self.excited}",
            d31=d31,
            d32=d32,
            mu21=0.5 * profile.ground.g.g_perp * BOHR_MAGNETON,
            rho=profile.number_density_si,
            delta_o=self.delta_o if self.delta_o is not None else profile.level(self.excited).optical_inhomogeneity,
            delta_mu=self.delta_mu if self.delta_mu is not None else profile.spin_inhomogeneity,
        )
        self.emit(
            "fom_zeta",
            {
                "name": [material.name],
                "d31_Cm": [material.d31],
                "d32_Cm": [material.d32],
                "mu21_J_per_T": [material.mu21],
                "rho_per_m3": [material.rho],
                "zeta": [zeta(material)],
            },
            {"polarization": pol},
        )


class FomSystems(Command):
    """Lambda and V systems whose microwave transition matches the resonator."""

    name: ClassVar[str] = "fom-systems"

    resonator: Frequency | None = Field(None, description="resonator frequency (default: profile)")
    excited: str = "Y2"
    b_max: MagneticField = 0.2
    theta: Angle = 0.0

    def run(self) -> None:
        profile = self.material()
        resonator = self.resonator if self.resonator is not None else profile.resonator.omega0
        configs = enumerate_systems(profile.ground, profile.level(self.excited), resonator, (0.0, self.b_max), self.theta)
        self.emit(
            "fom_systems",
            {
                "kind": [c.kind for c in configs],
                "field_T": [c.field for c in configs],
                "microwave_doublet": [c.microwave_doublet for c in configs],
                "pump_leg": [c.legs[0] for c in configs],
                "signal_leg": [c.legs[1] for c in configs],
                "pump_offset_Hz": [c.pump_offset for c in configs],
                "optical_offset_Hz": [c.optical_offset for c in configs],
            },
            {"resonator_Hz": resonator, "transition": f"Z1-{self.excited}"},
        )


class FomMap(Command):
    """Synthetic Raman-heterodyne intensity map over field and optical detuning."""

    name: ClassVar[str] = "fom-map"

    resonator: Frequency | None = None
    excited: str = "Y2"
    b_min: MagneticField = 0.0
    b_max: MagneticField = 0.1
    points_b: int = Field(101, ge=2)
    span: Frequency = Field(16e9, description="optical detuning span, centered on the zero-field line")
    points_nu: int = Field(401, ge=2)
    fwhm: Frequency | None = None
    theta: Angle = 0.0
    alphas: Path | None = None

    def run(self) -> None:
        profile = self.material()
        excited = profile.level(self.excited)
        resonator = self.resonator if self.resonator is not None else profile.resonator.omega0
        cav = profile.resonator.model_copy(update={"omega0": resonator})
        rows = _leg_rows(profile, self.excited, self.alphas)
        configs = enumerate_systems(profile.ground, excited, resonator, (max(self.b_min, 0.0), self.b_max), self.theta)
        fields = np.linspace(self.b_min, self.b_max, self.points_b)
        nu = np.linspace(-0.5 * self.span, 0.5 * self.span, self.points_nu)
        fwhm = self.fwhm or excited.optical_inhomogeneity or 1e8
        result = raman_map(
            configs, cav, profile.ground, excited, rows, fields, nu, fwhm, self.theta, profile.selection_rules
        )
        b_grid, nu_grid = np.meshgrid(result.fields, result.frequencies, indexing="ij")
        self.emit(
            "fom_map",
            {"field_T": b_grid.ravel(), "frequency_Hz": nu_grid.ravel(), "intensity": result.intensity.ravel()},
            {"polarization": result.polarization, "systems": len(configs)},
        )


class FomCLI(BaseModel):
    """Transduction figures of merit."""

    zeta: CliSubCommand[FomZeta]
    systems: CliSubCommand[FomSystems]
    map: CliSubCommand[FomMap]

    def cli_cmd(self) -> None:
        CliApp.run_subcommand(self)


# replay

class Replay(BaseModel):
    """Re-run the command recorded in a manifest and compare output digests."""

    manifest: Path
    out: Path | None = Field(None, description="write outputs here instead of the recorded directory")
    check: bool = True

    def cli_cmd(self) -> None:
        recorded = data_io.read_manifest(self.manifest)
        argv = list(recorded.command)
        if self.out is not None:
            if "--out" in argv:
                i = argv.index("--out")
                del argv[i:i + 2]
            argv += ["--out", str(self.out)]
        code = cli_dispatch(argv, configure=False)
        if code != 0:
            raise ToolkitError(f"replayed command exited with status {code}")
        if not self.check:
            return
        out_dir = self.out if self.out is not None else Path(recorded.outputs[0]).parent if recorded.outputs else Path(".")
        mismatched = [
            name for name, digest in recorded.digests.items()
            if _digest(out_dir / name) != digest
        ]
        if mismatched:
            raise ToolkitError(f"replay outputs differ from the manifest: {', '.join(sorted(mismatched))}")
        logger.info("replay: %d outputs match the manifest", len(recorded.digests))


# root

class ErvoCLI(BaseSettings):
    """Er:YVO4 spin, optical and transduction calculations."""

    model_config = SettingsConfigDict(
        cli_prog_name="ervo",
        cli_kebab_case=True,
        cli_implicit_flags=True,
        env_prefix="ERVO_CLI_",
    )

    levels: CliSubCommand[Levels]
    optical: CliSubCommand[OpticalCLI]
    photo: CliSubCommand[PhotoCLI]
    epr: CliSubCommand[EprCLI]
    fit: CliSubCommand[FitCLI]
    fom: CliSubCommand[FomCLI]
    replay: CliSubCommand[Replay]

    def cli_cmd(self) -> None:
        CliApp.run_subcommand(self)


def _digest(path: Path) -> str:
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except FileNotFoundError:
        return ""


def _leaf(model: BaseModel) -> BaseModel:
    """Follow the chosen subcommand chain down to the command that ran."""
    while True:
        child = next(
            (getattr(model, name) for name in type(model).model_fields if isinstance(getattr(model, name), BaseModel)),
            None,
        )
        if child is None:
            return model
        model = child


def _one_line(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        return "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'input'}: {err['msg']}" for err in exc.errors()
        )
    return f"{type(exc).__name__}: {exc}"


def _write_manifest(cmd: Command, argv: list[str], started: datetime, elapsed: float) -> Path:
    if cmd._seed_drawn:
        argv = argv + ["--seed", str(cmd.seed)]
    manifest = RunManifest(
        command=argv,
        resolved_config={
            "command": cmd.model_dump(mode="json"),
            "settings": settings.model_dump(mode="json"),
        },
        constants_version=CONSTANTS_VERSION,
        constants=as_table(),
        outputs=[str(p) for p in cmd._outputs],
        digests={p.name: _digest(p) for p in cmd._outputs},
        seed=cmd.seed,
        started_at=started,
        wall_clock_s=elapsed,
    )
    return data_io.write_manifest(cmd.out_dir / f"{cmd.name}.manifest.json", manifest)


def cli_dispatch(argv: Sequence[str] | None = None, configure: bool = True) -> int:
    """Parse argv, run the subcommand, write its manifest. Returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if configure:
        configure_logging(settings.LOG_LEVEL, settings.LOG_FILE)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    try:
        root = CliApp.run(ErvoCLI, cli_args=argv)
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 2
    except SettingsError as exc:
        print(f"ervo: error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ToolkitError) as exc:
        print(f"ervo: error: {_one_line(exc)}", file=sys.stderr)
        return 1

    leaf = _leaf(root)
    if isinstance(leaf, Command):
        path = _write_manifest(leaf, argv, started, time.perf_counter() - t0)
        logger.info("wrote %s", path)
    return 0
