"""
Physical constants, fixed to CODATA-2018 so outputs are bit-reproducible
regardless of the installed scipy's constant table.
"""
import math

CONSTANTS_VERSION = "CODATA-2018"

PLANCK = 6.62607015e-34  # J s (exact)
HBAR = PLANCK / (2.0 * math.pi)
ELEMENTARY_CHARGE = 1.602176634e-19  # C (exact)
BOLTZMANN = 1.380649e-23  # J/K (exact)
SPEED_OF_LIGHT = 299_792_458.0  # m/s (exact)
ELECTRON_MASS = 9.1093837015e-31  # kg
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
VACUUM_PERMEABILITY = 1.25663706212e-6  # N/A^2
BOHR_MAGNETON = 9.2740100783e-24  # J/T

# Frequency-unit ratios, CODATA-2018 tabulated values
BOHR_MAGNETON_HZ_PER_T = 13.996244936e9  # mu_B / h
BOLTZMANN_HZ_PER_K = 20.836619123e9  # k_B / h

# Oscillator-strength prefactor 4 pi eps0 m_e c / (pi e^2), SI (s/m^2 per Hz/m basis)
OSCILLATOR_PREFACTOR = (
    4.0 * math.pi * VACUUM_PERMITTIVITY * ELECTRON_MASS * SPEED_OF_LIGHT
    / (math.pi * ELEMENTARY_CHARGE**2)
)
# Radiative-rate prefactor 2 pi e^2 / (eps0 m_e c), m^2/s
RADIATIVE_PREFACTOR = (
    2.0 * math.pi * ELEMENTARY_CHARGE**2
    / (VACUUM_PERMITTIVITY * ELECTRON_MASS * SPEED_OF_LIGHT)
)


def as_table() -> dict[str, float | str]:
    """Constants as a flat mapping, recorded in run manifests."""
    return {
        "version": CONSTANTS_VERSION,
        "h": PLANCK,
        "hbar": HBAR,
        "e": ELEMENTARY_CHARGE,
        "k_B": BOLTZMANN,
        "c": SPEED_OF_LIGHT,
        "m_e": ELECTRON_MASS,
        "eps0": VACUUM_PERMITTIVITY,
        "mu0": VACUUM_PERMEABILITY,
        "mu_B": BOHR_MAGNETON,
        "mu_B/h": BOHR_MAGNETON_HZ_PER_T,
        "k_B/h": BOLTZMANN_HZ_PER_K,
    }
