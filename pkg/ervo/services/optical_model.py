"""
Optical transition maps vs field magnitude and angle, thermal ground-branch
populations, and synthesis/integration of polarized transmission spectra.
"""
import math
from functools import lru_cache

import numpy as np
from scipy.integrate import trapezoid

from ervo.config import settings
from ervo.core.constants import BOLTZMANN_HZ_PER_K
from ervo.core.errors import ConfigurationError, PhysicsInputError, SaturatedAbsorptionError
from ervo.core.log import get_logger
from ervo.schemas.optical import (
    BRANCH_TAGS,
    AbsorptionLine,
    DipoleType,
    OpticalLevel,
    OpticalTransitionLine,
    Polarization,
    Profile,
    SelectionRuleTable,
    Spectrum,
    branch_sign,
)
from ervo.schemas.spin import FieldPoint
from ervo.services.spin_core import zeeman_splitting

logger = get_logger(__name__)


@lru_cache(maxsize=4)
def _profile_selection_rules(path: str) -> SelectionRuleTable:
    from ervo.services.data_io import load_profile

    return load_profile(path).selection_rules


def default_selection_table() -> SelectionRuleTable:
    """Selection rules shipped with the configured material profile."""
    return _profile_selection_rules(str(settings.PROFILE_PATH))


def thermal_population_ratio(temperature: float, splitting: float) -> float:
    """Upper/lower ground-branch population, exp(-h nu / k_B T)."""
    if temperature <= 0:
        raise PhysicsInputError(f"temperature must be positive, got {temperature} K")
    if splitting < 0:
        raise PhysicsInputError(f"splitting must be non-negative, got {splitting} Hz")
    return math.exp(-splitting / (BOLTZMANN_HZ_PER_K * temperature))


def branch_offsets(ground: OpticalLevel, excited: OpticalLevel, field: FieldPoint) -> dict[str, float]:
    """Offset (s_e nu_e - s_g nu_g)/2 of every branch combination, keyed "<s_g><s_e>"."""
    nu_g = zeeman_splitting(ground.g, field)
    nu_e = zeeman_splitting(excited.g, field)
    return {
        tag: 0.5 * (branch_sign(tag[1]) * nu_e - branch_sign(tag[0]) * nu_g)
        for tag in BRANCH_TAGS
    }


def line_positions(
    ground: OpticalLevel,
    excited: OpticalLevel,
    field: FieldPoint,
    pol: Polarization,
    table: SelectionRuleTable | None = None,
    temperature: float | None = None,
) -> list[OpticalTransitionLine]:
    """
    Allowed lines of one polarization, one per (branch pair, dipole type).
    relative_amplitude is the normalized thermal population of the ground branch.
    """
    table = default_selection_table() if table is None else table
    temperature = settings.DEFAULT_TEMPERATURE_K if temperature is None else temperature
    ratio = thermal_population_ratio(temperature, zeeman_splitting(ground.g, field))
    population = {"+": ratio / (1.0 + ratio), "-": 1.0 / (1.0 + ratio)}

    lines = []
    for tag, offset in branch_offsets(ground, excited, field).items():
        mu_i, mu_f = ground.mu(tag[0]), excited.mu(tag[1])
        kinds = table.allowed(mu_i, mu_f, pol)
        if kinds is None:
            raise ConfigurationError(
                f"selection table has no entry for ({mu_i}, {mu_f}, {pol}) "
                f"({ground.label}->{excited.label})"
            )
        for kind in sorted(kinds):
            lines.append(
                OpticalTransitionLine(
                    offset=offset,
                    ground_branch=tag[0],
                    excited_branch=tag[1],
                    polarization=pol,
                    dipole_type=kind,
                    relative_amplitude=population[tag[0]],
                )
            )
    return lines


def ramp_pattern(
    ground: OpticalLevel,
    excited: OpticalLevel,
    fields: np.ndarray,
    pol: Polarization,
    theta: float = 0.0,
    table: SelectionRuleTable | None = None,
    temperature: float | None = None,
) -> list[list[OpticalTransitionLine]]:
    return [
        line_positions(ground, excited, FieldPoint.folded(float(b), theta), pol, table, temperature)
        for b in np.asarray(fields, dtype=float)
    ]


def rotation_pattern(
    ground: OpticalLevel,
    excited: OpticalLevel,
    magnitude: float,
    thetas: np.ndarray,
    pol: Polarization,
    table: SelectionRuleTable | None = None,
    temperature: float | None = None,
) -> list[list[OpticalTransitionLine]]:
    """line_positions across an angle grid. Lines keep their branch tag, so branches stay continuous."""
    return [
        line_positions(ground, excited, FieldPoint.folded(magnitude, float(t)), pol, table, temperature)
        for t in np.asarray(thetas, dtype=float)
    ]


def absorption_lines_from_transitions(
    lines: list[OpticalTransitionLine],
    fwhm: float,
    group_alpha: dict[DipoleType, float],
    center: float = 0.0,
    profile: Profile = "gaussian",
) -> list[AbsorptionLine]:
    """
    Split each dipole-type total (Hz*cm^-1) over its lines in proportion to
    relative_amplitude, so the per-type integrated absorption is preserved.
    """
    totals: dict[str, float] = {}
    for line in lines:
        totals[line.dipole_type] = totals.get(line.dipole_type, 0.0) + line.relative_amplitude
    out = []
    for line in lines:
        total = totals[line.dipole_type]
        alpha = group_alpha.get(line.dipole_type, 0.0)
        if total <= 0 or alpha <= 0:
            continue
        out.append(
            AbsorptionLine(
                center=center + line.offset,
                fwhm=fwhm,
                integrated_alpha=alpha * line.relative_amplitude / total,
                profile=profile,
            )
        )
    return out


def absorption_coefficient(lines: list[AbsorptionLine], grid: np.ndarray) -> np.ndarray:
    """Sum of line absorption coefficients in cm^-1."""
    grid = np.asarray(grid, dtype=float)
    alpha = np.zeros_like(grid)
    for line in lines:
        alpha += line.alpha(grid)
    return alpha


def synthesize_transmission(lines: list[AbsorptionLine], length_cm: float, grid: np.ndarray) -> Spectrum:
    """Beer-Lambert T = exp(-sum alpha_i L)."""
    grid = np.asarray(grid, dtype=float)
    if length_cm <= 0:
        raise PhysicsInputError(f"sample length must be positive, got {length_cm} cm")
    if grid.ndim != 1 or (grid.size > 1 and np.any(np.diff(grid) <= 0)):
        raise PhysicsInputError("frequency grid must be strictly increasing")
    transmission = np.exp(-absorption_coefficient(lines, grid) * length_cm)
    return Spectrum(frequency=grid, transmission=transmission, length_cm=length_cm)


def absorption_from_spectrum(spec: Spectrum, floor: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """alpha = -ln T / L and the mask of usable (unsaturated) samples."""
    floor = settings.SATURATION_FLOOR if floor is None else floor
    bad = np.flatnonzero(spec.transmission <= 0)
    if bad.size:
        raise SaturatedAbsorptionError(int(bad[0]), float(spec.transmission[bad[0]]))
    usable = spec.transmission >= floor
    alpha = -np.log(spec.transmission) / spec.length_cm
    return alpha, usable


def integrate_absorption(
    spec: Spectrum,
    baseline_windows: list[tuple[float, float]] | None = None,
    floor: float | None = None,
) -> float:
    """
    Trapezoidal integral of alpha(nu) over the grid, in Hz*cm^-1. A linear baseline
    fitted inside the off-resonance windows is subtracted first. Samples below the
    saturation floor are dropped with a warning.
    """
    alpha, usable = absorption_from_spectrum(spec, floor)
    dropped = int((~usable).sum())
    if dropped:
        logger.warning("integrate_absorption: excluded %d saturated samples", dropped)

    nu = spec.frequency
    if baseline_windows:
        in_window = np.zeros(nu.shape, dtype=bool)
        for lo, hi in baseline_windows:
            in_window |= (nu >= lo) & (nu <= hi)
        in_window &= usable
        if in_window.sum() < 2:
            raise PhysicsInputError("baseline windows must cover at least two usable samples")
        x = nu - nu.mean()
        slope, intercept = np.polyfit(x[in_window], alpha[in_window], 1)
        alpha = alpha - (slope * x + intercept)

    if usable.sum() < 2:
        return 0.0
    return float(trapezoid(alpha[usable], nu[usable]))
