"""
Dispersive coupling of a resonator to an inhomogeneous spin ensemble.

W(w) = Omega^2 int rho(w') / (w - w' + i gamma/2) dw' with a Gaussian rho of HWHM
Delta, evaluated through the Faddeeva function. Field sweeps work on detunings
from omega0 so kHz shifts are resolved without cancellation against GHz carriers.
"""
import math

import numpy as np
from scipy.integrate import quad
from scipy.special import wofz

from ervo.config import settings
from ervo.core.constants import (
    BOHR_MAGNETON,
    BOHR_MAGNETON_HZ_PER_T,
    BOLTZMANN_HZ_PER_K,
    HBAR,
    VACUUM_PERMEABILITY,
)
from ervo.core.errors import PhysicsInputError, QuadratureError
from ervo.core.log import get_logger
from ervo.schemas.cavity import (
    CavityParams,
    CouplingBudget,
    EnsembleParams,
    FMParams,
    Probe,
    SweepTrace,
)
from ervo.schemas.spin import FieldPoint, GTensor
from ervo.services.spin_core import zeeman_splitting

logger = get_logger(__name__)

_SQRT_LN2 = math.sqrt(math.log(2.0))


def population_difference(temperature: float, frequency: float) -> float:
    """Thermal spin polarization tanh(h nu / 2 k_B T)."""
    if temperature <= 0:
        raise PhysicsInputError(f"temperature must be positive, got {temperature} K")
    return math.tanh(frequency / (2.0 * BOLTZMANN_HZ_PER_K * temperature))


def coupling_budget(g_perp: float, rho: float, temperature: float, eta: float, omega0: float) -> CouplingBudget:
    """Budget for a resonator field perpendicular to c: mu21 = g_perp mu_B / 2."""
    return CouplingBudget(
        mu21=0.5 * g_perp * BOHR_MAGNETON,
        rho=rho,
        delta_n=population_difference(temperature, omega0),
        eta=eta,
        omega0=omega0,
    )


def collective_coupling(budget: CouplingBudget) -> float:
    """Ensemble coupling Omega in Hz."""
    angular = 2.0 * math.pi * budget.omega0
    rad_per_s = budget.mu21 * math.sqrt(
        budget.rho * budget.delta_n * budget.eta * angular * VACUUM_PERMEABILITY / (2.0 * HBAR)
    )
    return rad_per_s / (2.0 * math.pi)


def gaussian_density(ens: EnsembleParams, omega):
    """rho(w) = sqrt(ln2) / (Delta sqrt(pi)) exp(-(w - w_s)^2 ln2 / Delta^2)."""
    _require_width(ens.Delta)
    x = np.asarray(omega, dtype=float) - ens.spin_center
    return _SQRT_LN2 / (ens.Delta * math.sqrt(math.pi)) * np.exp(-(x * _SQRT_LN2 / ens.Delta) ** 2)


def _require_width(delta: float) -> None:
    if delta <= 0:
        raise PhysicsInputError(f"Gaussian inhomogeneity Delta must be positive, got {delta}")


def _kernel(x, delta: float, gamma: float) -> np.ndarray:
    """int rho(x') / (x - x' + i gamma/2) dx' for unit Omega, x measured from the spin center."""
    z = (np.asarray(x, dtype=float) + 0.5j * gamma) * (_SQRT_LN2 / delta)
    return -1j * math.sqrt(math.pi) * _SQRT_LN2 / delta * wofz(z)


def ensemble_susceptibility(ens: EnsembleParams, omega):
    """Complex W(w) in Hz via the Faddeeva function."""
    if ens.Omega == 0:
        return np.zeros_like(np.asarray(omega, dtype=float), dtype=complex)
    _require_width(ens.Delta)
    return ens.Omega**2 * _kernel(np.asarray(omega, dtype=float) - ens.spin_center, ens.Delta, ens.gamma)


def _pole_breakpoints(pole: float, gamma: float, width: float) -> list[float]:
    points = [pole]
    step = gamma
    while 0 < step < width:
        points += [pole - step, pole + step]
        step *= 10.0
    return sorted(points)


def ensemble_susceptibility_quad(
    ens: EnsembleParams,
    omega: float,
    span: float | None = None,
    rtol: float | None = None,
) -> complex:
    """
    Adaptive-quadrature W(w) for a scalar w. The pole at w' = w is removed by
    subtracting rho(w) and adding its integral analytically; the remainder is
    integrated over +-span*Delta with breakpoints at the pole and, for gamma > 0,
    at pole +- gamma * 10^k so the width-gamma structure next to it is resolved.
    """
    _require_width(ens.Delta)
    span = settings.QUAD_SPAN_HWHM if span is None else span
    rtol = settings.QUAD_RELATIVE_TOLERANCE if rtol is None else rtol
    delta = float(omega) - ens.spin_center
    z = complex(delta, 0.5 * ens.gamma)
    a, b = -span * ens.Delta, span * ens.Delta
    norm = _SQRT_LN2 / (ens.Delta * math.sqrt(math.pi))

    def rho(x: float) -> float:
        return norm * math.exp(-(x * _SQRT_LN2 / ens.Delta) ** 2)

    rho_pole = rho(delta)

    def integrand(x: float) -> complex:
        return (rho(x) - rho_pole) / (z - x)

    scale = 1.0 / max(ens.Delta, abs(z))
    points = [p for p in _pole_breakpoints(delta, ens.gamma, b - a) if a < p < b] or None
    parts = []
    for part in (lambda x: integrand(x).real, lambda x: integrand(x).imag):
        out = quad(part, a, b, points=points, epsabs=1e-2 * rtol * scale, epsrel=rtol, limit=500, full_output=1)
        if len(out) > 3:
            raise QuadratureError(f"quadrature did not converge at w={omega}: {out[3]}")
        parts.append(out[0])
    # complex(x, 0.0) keeps the +i0 side of the branch cut when gamma = 0
    value = complex(parts[0], parts[1]) + rho_pole * (np.log(z - a) - np.log(z - b))
    return ens.Omega**2 * complex(value)


def _transfer(kappa: float, u, w):
    """t for probe detuning u from omega0 and susceptibility w at that probe."""
    return (kappa / 2j) / (u + 0.5j * kappa - w)


def cavity_transfer(cav: CavityParams, ens: EnsembleParams, omega):
    """t(w) = (kappa / 2i) / (w - w0 + i kappa/2 - W(w))."""
    omega = np.asarray(omega, dtype=float)
    return _transfer(cav.kappa, omega - cav.omega0, ensemble_susceptibility(ens, omega))


def fm_signal(cav: CavityParams, ens: EnsembleParams, fm: FMParams, omega):
    """(Re, Im) of chi = t(w) t*(w + w_m) - t*(w) t(w - w_m)."""
    omega = np.asarray(omega, dtype=float)
    t0 = cavity_transfer(cav, ens, omega)
    tp = cavity_transfer(cav, ens, omega + fm.omega_m)
    tm = cavity_transfer(cav, ens, omega - fm.omega_m)
    chi = t0 * np.conj(tp) - np.conj(t0) * tm
    return chi.real, chi.imag


def _re_chi_detuned(
    u: np.ndarray,
    spin_detuning: np.ndarray,
    kappa: float,
    omega_m: float,
    Omega: float,
    Delta: float,
    gamma: float,
) -> np.ndarray:
    """Re chi at probe detunings u with spins centred at omega0 + spin_detuning."""

    def t(v):
        if Omega == 0:
            return _transfer(kappa, v, 0.0)
        return _transfer(kappa, v, Omega**2 * _kernel(v - spin_detuning, Delta, gamma))

    t0, tp, tm = t(u), t(u + omega_m), t(u - omega_m)
    return (t0 * np.conj(tp) - np.conj(t0) * tm).real


def _zero_crossings(
    spin_detuning: np.ndarray,
    kappa: float,
    omega_m: float,
    Omega: float,
    Delta: float,
    gamma: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised bisection for the Re chi zero on [-kappa/2, kappa/2]; returns (shift, bracketed)."""
    lo = np.full(spin_detuning.shape, -0.5 * kappa)
    hi = np.full(spin_detuning.shape, 0.5 * kappa)
    args = (kappa, omega_m, Omega, Delta, gamma)
    f_lo = _re_chi_detuned(lo, spin_detuning, *args)
    f_hi = _re_chi_detuned(hi, spin_detuning, *args)
    bracketed = np.sign(f_lo) * np.sign(f_hi) < 0
    for _ in range(settings.ZERO_CROSSING_ITERATIONS):
        mid = 0.5 * (lo + hi)
        f_mid = _re_chi_detuned(mid, spin_detuning, *args)
        same = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(same, mid, lo)
        f_lo = np.where(same, f_mid, f_lo)
        hi = np.where(same, hi, mid)
    shift = np.where(bracketed, 0.5 * (lo + hi), np.nan)
    return shift, bracketed


def resonance_shift(cav: CavityParams, ens: EnsembleParams, fm: FMParams | None = None) -> float:
    """Displacement of the Re chi zero from omega0, in Hz."""
    fm = fm or FMParams()
    if ens.Omega > 0:
        _require_width(ens.Delta)
    shift, ok = _zero_crossings(
        np.array([ens.spin_center - cav.omega0]),
        cav.kappa, fm.omega_m, ens.Omega, ens.Delta, ens.gamma,
    )
    if not ok[0]:
        raise PhysicsInputError("Re chi zero is not bracketed within +-kappa/2 of omega0")
    return float(shift[0])


def spin_detunings(
    cav: CavityParams,
    g: GTensor,
    fields: np.ndarray,
    theta: float = 0.0,
    B0: float | None = None,
) -> np.ndarray:
    """
    Spin center minus omega0 per field. With B0 given the spins are linearised
    around the crossing: omega0 + g_eff (mu_B/h) (B - B0).
    """
    fields = np.asarray(fields, dtype=float)
    if B0 is not None:
        return BOHR_MAGNETON_HZ_PER_T * g.effective(theta) * (fields - B0)
    return np.array(
        [zeeman_splitting(g, FieldPoint.folded(float(b), theta)) for b in fields]
    ) - cav.omega0


def epr_field_sweep(
    cav: CavityParams,
    ensemble: EnsembleParams | CouplingBudget,
    g: GTensor,
    fields: np.ndarray,
    probe: Probe = "zero_crossing_shift",
    fm: FMParams | None = None,
    theta: float = 0.0,
    B0: float | None = None,
    probe_frequency: float | None = None,
    scale: float = 1.0,
    delta: float | None = None,
    gamma: float | None = None,
) -> SweepTrace:
    """
    EPR trace vs field. zero_crossing_shift gives the resonator pull in Hz;
    fixed_probe_quadrature gives scale * beta * Re chi at probe_frequency (default omega0).
    A CouplingBudget needs the inhomogeneity `delta` (HWHM) alongside it.
    """
    fields = np.asarray(fields, dtype=float)
    if fields.size > 1 and np.any(np.diff(fields) < 0):
        raise PhysicsInputError("sweep fields must be ordered")
    if isinstance(ensemble, CouplingBudget):
        if delta is None:
            raise PhysicsInputError("a coupling budget sweep needs the inhomogeneity delta")
        Omega, Delta = collective_coupling(ensemble), delta
        gam = settings.DEFAULT_GAMMA_HZ if gamma is None else gamma
    else:
        Omega, Delta = ensemble.Omega, ensemble.Delta
        gam = ensemble.gamma if gamma is None else gamma
    if Omega > 0:
        _require_width(Delta)
    fm = fm or FMParams()
    detuning = spin_detunings(cav, g, fields, theta, B0)

    if probe == "zero_crossing_shift":
        values, ok = _zero_crossings(detuning, cav.kappa, fm.omega_m, Omega, Delta, gam)
        flagged = [int(k) for k in np.flatnonzero(~ok)]
        if flagged:
            logger.warning("epr_field_sweep: %d field points without a bracketed zero crossing", len(flagged))
    else:
        u = 0.0 if probe_frequency is None else probe_frequency - cav.omega0
        re = _re_chi_detuned(np.full(fields.shape, u), detuning, cav.kappa, fm.omega_m, Omega, Delta, gam)
        values = scale * fm.beta * re
        flagged = []
    return SweepTrace(fields=fields, values=values, probe=probe, flagged=flagged)
