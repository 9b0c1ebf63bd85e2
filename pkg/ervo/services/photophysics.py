"""
Integrated absorption -> oscillator strength -> dipole moment and radiative rate,
channel totals and branching ratios.

Refractive-index convention: ED channels use the index along the optical E-field
(sigma -> n_a, pi -> n_c); MD channels use the index along the optical B-field
(sigma -> n_c, pi -> n_a) for light propagating along a.
"""
import math

from ervo.core.constants import (
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    HBAR,
    OSCILLATOR_PREFACTOR,
    RADIATIVE_PREFACTOR,
    SPEED_OF_LIGHT,
)
from ervo.core.errors import PhysicsInputError
from ervo.core.log import get_logger
from ervo.schemas.optical import DipoleType, Polarization
from ervo.schemas.photo import HostOptics, RateSummary, RateWeighting, TransitionPhotophysics

logger = get_logger(__name__)


def local_field_factor(n: float) -> float:
    """Virtual-cavity correction chi_L = ((n^2 + 2) / 3)^2."""
    return ((n * n + 2.0) / 3.0) ** 2


def channel_index(dipole_type: DipoleType, polarization: Polarization, host: HostOptics) -> float:
    if dipole_type == "ED":
        return host.n_a if polarization == "sigma" else host.n_c
    return host.n_c if polarization == "sigma" else host.n_a


def _absorption_factor(dipole_type: DipoleType, n: float) -> float:
    return n / local_field_factor(n) if dipole_type == "ED" else 1.0 / n


def _emission_factor(dipole_type: DipoleType, n: float) -> float:
    return local_field_factor(n) * n if dipole_type == "ED" else n**3


def oscillator_strength(
    dipole_type: DipoleType,
    integrated_alpha: float,
    host: HostOptics,
    n: float,
) -> float:
    """f = C (1/N) factor(n) int(alpha); integrated_alpha in Hz*cm^-1."""
    if integrated_alpha < 0:
        raise PhysicsInputError(f"integrated absorption must be non-negative, got {integrated_alpha}")
    alpha_si = integrated_alpha * 100.0  # Hz/m
    return OSCILLATOR_PREFACTOR / host.number_density_si * _absorption_factor(dipole_type, n) * alpha_si


def dipole_moment(f: float, wavelength: float) -> float:
    """d = sqrt((hbar e^2 / 2 m_e omega) f), omega = 2 pi c / lambda0."""
    if f < 0 or wavelength <= 0:
        raise PhysicsInputError(f"need f >= 0 and wavelength > 0, got f={f}, wavelength={wavelength}")
    omega = 2.0 * math.pi * SPEED_OF_LIGHT / wavelength
    return math.sqrt(HBAR * ELEMENTARY_CHARGE**2 / (2.0 * ELECTRON_MASS * omega) * f)


def radiative_rate(dipole_type: DipoleType, f: float, wavelength: float, n: float) -> float:
    """Spontaneous rate of one polarization/dipole channel, D factor(n) f / (3 lambda0^2)."""
    if f < 0 or wavelength <= 0:
        raise PhysicsInputError(f"need f >= 0 and wavelength > 0, got f={f}, wavelength={wavelength}")
    return RADIATIVE_PREFACTOR * _emission_factor(dipole_type, n) / wavelength**2 * f / 3.0


def radiative_lifetime(rate: float) -> float:
    if rate <= 0:
        raise PhysicsInputError(f"radiative rate must be positive, got {rate}")
    return 1.0 / rate


def channel(
    transition: str,
    dipole_type: DipoleType,
    polarization: Polarization,
    wavelength: float,
    integrated_alpha: float,
    host: HostOptics,
) -> TransitionPhotophysics:
    n = channel_index(dipole_type, polarization, host)
    f = oscillator_strength(dipole_type, integrated_alpha, host, n)
    return TransitionPhotophysics(
        transition=transition,
        dipole_type=dipole_type,
        polarization=polarization,
        wavelength=wavelength,
        integrated_alpha=integrated_alpha,
        refractive_index=n,
        f=f,
        d=dipole_moment(f, wavelength),
        radiative_rate=radiative_rate(dipole_type, f, wavelength, n),
    )


def photophysics_table(rows: list[dict], host: HostOptics) -> list[TransitionPhotophysics]:
    """
    Build the per-channel report. Each row needs transition, dipole_type,
    polarization, wavelength (m) and integrated_alpha (Hz*cm^-1).
    """
    return [
        channel(
            row["transition"],
            row["dipole_type"],
            row["polarization"],
            row["wavelength"],
            row["integrated_alpha"],
            host,
        )
        for row in rows
    ]


def total_rate_and_dipoles(
    rows: list[TransitionPhotophysics],
    weighting: RateWeighting = "naive_sum",
) -> RateSummary:
    """Total radiative rate and root-sum-square dipole per type. mode_weighted counts sigma twice."""
    if not rows:
        raise PhysicsInputError("total_rate_and_dipoles needs at least one channel")
    names = {r.transition for r in rows}
    if len(names) > 1:
        raise PhysicsInputError(f"rows mix transitions {sorted(names)}")

    total = 0.0
    d2 = {"ED": 0.0, "MD": 0.0}
    for r in rows:
        weight = 2.0 if weighting == "mode_weighted" and r.polarization == "sigma" else 1.0
        total += weight * r.radiative_rate
        d2[r.dipole_type] += r.d**2
    return RateSummary(
        transition=names.pop(),
        weighting=weighting,
        total_rate=total,
        radiative_lifetime=radiative_lifetime(total) if total > 0 else math.inf,
        d_ED=math.sqrt(d2["ED"]),
        d_MD=math.sqrt(d2["MD"]),
    )


def branching_ratio(fluorescence_lifetime: float, radiative_lifetime: float) -> float:
    """Lower bound tau_f / tau_rad on the branching ratio, clamped to 1."""
    if fluorescence_lifetime <= 0 or radiative_lifetime <= 0:
        raise PhysicsInputError(
            f"lifetimes must be positive, got tau_f={fluorescence_lifetime}, tau_rad={radiative_lifetime}"
        )
    ratio = fluorescence_lifetime / radiative_lifetime
    if ratio > 1.0:
        logger.warning("branching ratio %.4g > 1 (tau_f exceeds tau_rad), clamped to 1", ratio)
        return 1.0
    return ratio
