"""
Microwave-to-optical transduction figures of merit: zeta, Lambda/V system
enumeration against a resonator frequency, leg-dipole selection and synthetic
Raman-heterodyne maps.
"""
import math

import numpy as np

from ervo.core.errors import PhysicsInputError
from ervo.core.log import get_logger
from ervo.schemas.cavity import CavityParams, EnsembleParams
from ervo.schemas.fom import MaterialFoM, RamanMap, ThreeLevelConfig
from ervo.schemas.optical import OpticalLevel, Polarization, SelectionRuleTable
from ervo.schemas.photo import TransitionPhotophysics
from ervo.schemas.spin import FieldPoint, SpinSystem
from ervo.services.cavity_ensemble import cavity_transfer
from ervo.services.optical_model import branch_offsets, default_selection_table
from ervo.services.spin_core import find_crossings, zeeman_splitting

logger = get_logger(__name__)

# raman_map intensities are reported in units of (1e-32 C m)^4
DIPOLE_UNIT = 1e-32


def zeta(m: MaterialFoM) -> float:
    if m.delta_o <= 0 or m.delta_mu <= 0:
        raise PhysicsInputError(f"detunings must be positive, got delta_o={m.delta_o}, delta_mu={m.delta_mu}")
    return (m.d31 * m.d32 * m.mu21 * m.rho / (m.delta_o * m.delta_mu)) ** 2


def zeta_ratio(a: MaterialFoM, b: MaterialFoM) -> float:
    """zeta(a) / zeta(b), formed from the ratio of the bases to stay in range."""
    if min(a.delta_o, a.delta_mu, b.delta_o, b.delta_mu) <= 0:
        raise PhysicsInputError("detunings must be positive")
    base = (
        (a.d31 / b.d31) * (a.d32 / b.d32) * (a.mu21 / b.mu21) * (a.rho / b.rho)
        * (b.delta_o / a.delta_o) * (b.delta_mu / a.delta_mu)
    )
    return base**2


def enumerate_systems(
    ground: OpticalLevel,
    excited: OpticalLevel,
    resonator: float,
    field_range: tuple[float, float] = (0.0, 0.2),
    theta: float = 0.0,
) -> list[ThreeLevelConfig]:
    """
    Two Lambda systems at every field where the ground splitting matches the
    resonator and two V systems where the excited splitting does. legs[0] is the
    pump leg: out of the lower ground branch (Lambda) or into the lower excited branch (V).
    """
    if resonator <= 0:
        return []
    configs: list[ThreeLevelConfig] = []
    for kind, level, doublet in (("Lambda", ground, "ground"), ("V", excited, "excited")):
        for crossing in find_crossings(SpinSystem(g=level.g), resonator, field_range, theta):
            b = crossing.field
            if b <= 0:
                continue
            field = FieldPoint.folded(b, theta)
            offsets = branch_offsets(ground, excited, field)
            if kind == "Lambda":
                companion = zeeman_splitting(excited.g, field)
                leg_sets = [("-" + s, "+" + s) for s in ("+", "-")]
            else:
                companion = zeeman_splitting(ground.g, field)
                leg_sets = [(s + "-", s + "+") for s in ("+", "-")]
            for legs in leg_sets:
                configs.append(
                    ThreeLevelConfig(
                        kind=kind,
                        field=b,
                        microwave_doublet=doublet,
                        legs=legs,
                        pump_offset=offsets[legs[0]],
                        optical_offset=companion,
                    )
                )
    logger.debug("enumerate_systems: %d configurations at %.6g Hz", len(configs), resonator)
    return configs


def relative_system_strength(legs_a: tuple[float, float], legs_b: tuple[float, float]) -> float:
    """((d31 d32)_A / (d31 d32)_B)^2."""
    if min(*legs_a, *legs_b) <= 0:
        raise PhysicsInputError("leg dipoles must be positive")
    return ((legs_a[0] * legs_a[1]) / (legs_b[0] * legs_b[1])) ** 2


def branch_dipoles(
    ground: OpticalLevel,
    excited: OpticalLevel,
    pol: Polarization,
    rows: list[TransitionPhotophysics],
    table: SelectionRuleTable | None = None,
) -> dict[str, float]:
    """Dipole moment (C m) driving each branch tag in one polarization; 0 when forbidden."""
    table = default_selection_table() if table is None else table
    by_channel = {(r.polarization, r.dipole_type): r.d for r in rows}
    out = {}
    for tag in ("++", "+-", "-+", "--"):
        kinds = table.allowed(ground.mu(tag[0]), excited.mu(tag[1]), pol) or frozenset()
        out[tag] = max((by_channel.get((pol, k), 0.0) for k in kinds), default=0.0)
    return out


def select_leg_dipoles(
    ground: OpticalLevel,
    excited: OpticalLevel,
    rows: list[TransitionPhotophysics],
    table: SelectionRuleTable | None = None,
) -> tuple[float, float, Polarization]:
    """
    Strongest (spin-conserving, spin-flip) leg pair driven in a single polarization.
    Returns (d_conserving, d_flip, polarization).
    """
    best: tuple[float, float, Polarization] | None = None
    for pol in ("sigma", "pi"):
        d = branch_dipoles(ground, excited, pol, rows, table)
        conserving, flip = max(d["++"], d["--"]), max(d["+-"], d["-+"])
        if conserving <= 0 or flip <= 0:
            continue
        if best is None or conserving * flip > best[0] * best[1]:
            best = (conserving, flip, pol)
    if best is None:
        raise PhysicsInputError(f"no polarization drives both legs of a {ground.label}-{excited.label} system")
    return best


def raman_map(
    configs: list[ThreeLevelConfig],
    cav: CavityParams,
    ground: OpticalLevel,
    excited: OpticalLevel,
    lines: list[TransitionPhotophysics],
    fields: np.ndarray,
    frequencies: np.ndarray,
    optical_fwhm: float,
    theta: float = 0.0,
    table: SelectionRuleTable | None = None,
) -> RamanMap:
    """
    Additive branch intensities |t(nu_spin(B))|^2 (d1 d2)^2 exp(-4 ln2 (nu - pump(B))^2 / fwhm^2),
    with dipoles in units of DIPOLE_UNIT and t the bare resonator response. The leg
    dipoles come from the characterized lines in the polarization select_leg_dipoles picks.
    """
    fields = np.asarray(fields, dtype=float)
    frequencies = np.asarray(frequencies, dtype=float)
    if np.any(np.diff(fields) < 0) or np.any(np.diff(frequencies) < 0):
        raise PhysicsInputError("raman_map grids must be ordered")
    if optical_fwhm <= 0:
        raise PhysicsInputError("optical_fwhm must be positive")
    _, _, pol = select_leg_dipoles(ground, excited, lines, table)
    leg_dipoles = branch_dipoles(ground, excited, pol, lines, table)
    bare = EnsembleParams(Omega=0.0, Delta=1.0)
    intensity = np.zeros((fields.size, frequencies.size))
    for cfg in configs:
        weight = (leg_dipoles.get(cfg.legs[0], 0.0) * leg_dipoles.get(cfg.legs[1], 0.0) / DIPOLE_UNIT**2) ** 2
        if weight == 0:
            continue
        level = ground if cfg.kind == "Lambda" else excited
        for i, b in enumerate(fields):
            field = FieldPoint.folded(float(b), theta)
            response = abs(complex(cavity_transfer(cav, bare, zeeman_splitting(level.g, field)))) ** 2
            center = branch_offsets(ground, excited, field)[cfg.legs[0]]
            intensity[i] += weight * response * np.exp(
                -4.0 * math.log(2.0) * ((frequencies - center) / optical_fwhm) ** 2
            )
    return RamanMap(fields=fields, frequencies=frequencies, intensity=intensity, polarization=pol)
