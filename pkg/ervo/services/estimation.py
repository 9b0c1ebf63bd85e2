"""
Model-specific fitters built on least_squares: excited-state g-tensors from line
positions, EPR sweeps, fluorescence decays and Gaussian absorption lines.
Also the synthetic-data helpers used for roundtrip checks and the CLI --seed path.
"""
import math

import numpy as np
from scipy.signal import find_peaks, peak_widths

from ervo.core.constants import BOHR_MAGNETON_HZ_PER_T
from ervo.core.errors import PhysicsInputError, UnderdeterminedFitError
from ervo.core.log import get_logger
from ervo.schemas.cavity import CavityParams, EnsembleParams, FMParams, Probe
from ervo.schemas.fit import FitResult, Observation
from ervo.schemas.optical import BRANCH_TAGS, GAUSSIAN_NORM, Spectrum, branch_sign
from ervo.schemas.spin import FieldPoint, GTensor
from ervo.services.cavity_ensemble import epr_field_sweep
from ervo.services.least_squares import least_squares
from ervo.services.optical_model import absorption_from_spectrum
from ervo.services.spin_core import zeeman_splitting

logger = get_logger(__name__)

# extremum of the Gaussian dispersive pull: Re W peaks at 0.9008 Omega^2/Delta,
# reached at a spin detuning of 0.9241 Delta / sqrt(ln 2)
_PULL_PEAK = 0.9008
_PULL_PEAK_X = 0.9241


def _as_arrays(obs: list[Observation]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return (
        np.array([o.x for o in obs], dtype=float),
        np.array([o.y for o in obs], dtype=float),
        np.array([o.sigma for o in obs], dtype=float),
    )


# g-tensors

def _branch_offset(tag: str, ground: GTensor, excited: GTensor, b: float, theta: float) -> float:
    field = FieldPoint.folded(b, theta)
    nu_g = zeeman_splitting(ground, field)
    nu_e = zeeman_splitting(excited, field)
    return 0.5 * (branch_sign(tag[1]) * nu_e - branch_sign(tag[0]) * nu_g)


def _assign_branches(
    points: list[tuple[float, float, Observation]],
    ground: GTensor,
    guess: GTensor,
    warnings: list[str],
) -> list[str]:
    tags = []
    for b, theta, o in points:
        predicted = {t: _branch_offset(t, ground, guess, b, theta) for t in BRANCH_TAGS}
        nearest = min(predicted, key=lambda t: abs(predicted[t] - o.y))
        if o.branch is None:
            tags.append(nearest)
            continue
        if nearest != o.branch and abs(predicted[nearest] - predicted[o.branch]) > 1e-9:
            warnings.append(
                f"observation at B={b:.6g} T, theta={theta:.4g} rad tagged {o.branch} "
                f"lies nearest branch {nearest} under the initial g"
            )
        tags.append(o.branch)
    return tags


def fit_g_factors(
    ramp_obs: list[Observation],
    rotation_obs: list[Observation],
    ground: GTensor,
    rotation_magnitude: float | None = None,
    initial: GTensor | None = None,
    ramp_theta: float = 0.0,
    angle_windows: list[tuple[float, float]] | None = None,
) -> FitResult:
    """
    Excited-level (g_par, g_perp) from line offsets (Hz). Ramp observations have
    x = field (T) at ramp_theta; rotation observations have x = angle (rad) at
    rotation_magnitude. Rotation angles inside any of angle_windows are masked.
    """
    initial = initial or ground
    windows = angle_windows or []
    rotation_obs = [
        o for o in rotation_obs if not any(lo <= o.x <= hi for lo, hi in windows)
    ]
    if rotation_obs and rotation_magnitude is None:
        raise PhysicsInputError("rotation observations need rotation_magnitude")

    ramp_fields = {o.x for o in ramp_obs if o.x > 0}
    angles = {round(o.x, 12) for o in rotation_obs}
    has_perp = len(angles) >= 3
    has_par = len(ramp_fields) >= 2 or has_perp
    if not has_par:
        raise UnderdeterminedFitError("need >= 2 distinct ramp fields or >= 3 rotation angles")

    points = [(o.x, ramp_theta, o) for o in ramp_obs]
    points += [(rotation_magnitude, o.x, o) for o in rotation_obs]
    warnings: list[str] = []
    tags = _assign_branches(points, ground, initial, warnings)
    for w in warnings:
        logger.warning("fit_g_factors: %s", w)

    y = np.array([o.y for _, _, o in points])
    sigma = np.array([o.sigma for _, _, o in points])

    def residual(p: dict[str, float]) -> np.ndarray:
        excited = GTensor(g_par=max(p["g_par"], 0.0), g_perp=max(p["g_perp"], 0.0))
        model = np.array([_branch_offset(t, ground, excited, b, th) for t, (b, th, _) in zip(tags, points)])
        return (y - model) / sigma

    fixed = set()
    if not has_perp:
        fixed.add("g_perp")
        warnings.append("fewer than 3 rotation angles: g_perp held at its initial value")
    result = least_squares(
        residual,
        {"g_par": initial.g_par, "g_perp": initial.g_perp},
        bounds={"g_par": (0.0, math.inf), "g_perp": (0.0, math.inf)},
        fixed=fixed,
    )
    return result.model_copy(update={"warnings": result.warnings + warnings})


def synthesize_ramp_observations(
    ground: GTensor,
    excited: GTensor,
    fields: np.ndarray,
    tags: tuple[str, ...] = BRANCH_TAGS,
    theta: float = 0.0,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list[Observation]:
    rng = rng or np.random.default_rng()
    out = []
    for b in np.asarray(fields, dtype=float):
        for tag in tags:
            y = _branch_offset(tag, ground, excited, float(b), theta)
            if noise > 0:
                y += rng.normal(0.0, noise)
            out.append(Observation(x=float(b), y=y, sigma=noise if noise > 0 else 1.0, branch=tag))
    return out


def synthesize_rotation_observations(
    ground: GTensor,
    excited: GTensor,
    magnitude: float,
    thetas: np.ndarray,
    tags: tuple[str, ...] = BRANCH_TAGS,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list[Observation]:
    rng = rng or np.random.default_rng()
    out = []
    for theta in np.asarray(thetas, dtype=float):
        for tag in tags:
            y = _branch_offset(tag, ground, excited, magnitude, float(theta))
            if noise > 0:
                y += rng.normal(0.0, noise)
            out.append(Observation(x=float(theta), y=y, sigma=noise if noise > 0 else 1.0, branch=tag))
    return out


# EPR

def _epr_guess(fields: np.ndarray, y: np.ndarray, g: GTensor, theta: float, probe: Probe, cav: CavityParams, fm: FMParams) -> dict[str, float]:
    """Initial (Omega, Delta, B0, scale) from the extrema of a dispersive trace."""
    gamma_eff = BOHR_MAGNETON_HZ_PER_T * g.effective(theta)
    k_hi, k_lo = int(np.argmax(y)), int(np.argmin(y))
    b0 = 0.5 * (fields[k_hi] + fields[k_lo])
    half_sep = 0.5 * abs(fields[k_hi] - fields[k_lo]) * gamma_eff
    delta = max(half_sep * math.sqrt(math.log(2.0)) / _PULL_PEAK_X, 1e3)
    amplitude = 0.5 * (y[k_hi] - y[k_lo])
    if probe == "fixed_probe_quadrature":
        # near omega0, Re chi ~ 8 omega_m beta shift / kappa^2
        slope = 8.0 * fm.omega_m * fm.beta / cav.kappa**2
        if slope > 0:
            amplitude /= slope
    omega = math.sqrt(max(abs(amplitude), 0.0) * delta / _PULL_PEAK)
    return {"Omega": max(omega, 1e3), "Delta": delta, "B0": float(b0), "scale": 1.0}


def fit_epr(
    trace: list[Observation],
    cav: CavityParams,
    g: GTensor,
    probe: Probe = "zero_crossing_shift",
    initial: dict[str, float] | None = None,
    fm: FMParams | None = None,
    theta: float = 0.0,
    gamma: float = 0.0,
) -> FitResult:
    """(Omega, Delta, B0, scale) of the sweep model. scale is only free for the quadrature probe."""
    fm = fm or FMParams()
    fields, y, sigma = _as_arrays(sorted(trace, key=lambda o: o.x))
    if fields.size < 5:
        raise UnderdeterminedFitError("an EPR fit needs at least 5 trace points")
    if not (fields[0] < fields[-1]):
        raise PhysicsInputError("EPR trace must span a range of fields")
    start = _epr_guess(fields, y, g, theta, probe, cav, fm)
    start.update(initial or {})

    def residual(p: dict[str, float]) -> np.ndarray:
        trace_model = epr_field_sweep(
            cav,
            EnsembleParams(Omega=abs(p["Omega"]), Delta=max(p["Delta"], 1.0), gamma=gamma),
            g,
            fields,
            probe=probe,
            fm=fm,
            theta=theta,
            B0=p["B0"],
            scale=p["scale"],
        )
        return (y - np.nan_to_num(trace_model.values)) / sigma

    fixed = {"scale"} if probe == "zero_crossing_shift" else set()
    return least_squares(
        residual,
        start,
        bounds={
            "Omega": (0.0, math.inf),
            "Delta": (1.0, math.inf),
            "B0": (float(fields[0]), float(fields[-1])),
        },
        fixed=fixed,
        x_scale={"Omega": 1e3, "Delta": 1e3, "B0": 1e-6, "scale": 1e-3},
    )


def synthesize_epr_trace(
    cav: CavityParams,
    ens: EnsembleParams,
    g: GTensor,
    fields: np.ndarray,
    B0: float | None = None,
    probe: Probe = "zero_crossing_shift",
    fm: FMParams | None = None,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list[Observation]:
    rng = rng or np.random.default_rng()
    values = epr_field_sweep(cav, ens, g, fields, probe=probe, fm=fm, B0=B0).values
    if noise > 0:
        values = values + rng.normal(0.0, noise, size=values.shape)
    sigma = noise if noise > 0 else 1.0
    return [Observation(x=float(b), y=float(v), sigma=sigma) for b, v in zip(fields, values)]


# fluorescence decay

def fit_exponential(decay: list[Observation]) -> FitResult:
    """amplitude * exp(-t / tau) + offset. Non-decaying data comes back with converged=False."""
    t, y, sigma = _as_arrays(decay)
    if t.size < 4:
        raise UnderdeterminedFitError("an exponential fit needs at least 4 points")
    order = np.argsort(t, kind="stable")
    t, y, sigma = t[order], y[order], sigma[order]
    if np.any(np.diff(t) <= 0):
        raise PhysicsInputError("decay times must be strictly increasing")

    span = float(t[-1] - t[0])
    tail = max(1, t.size // 5)
    offset0 = float(np.mean(y[-tail:]))
    amp0 = float(y[0] - offset0)
    below = np.flatnonzero(y - offset0 <= amp0 / math.e) if amp0 > 0 else np.array([], dtype=int)
    tau0 = float(t[below[0]] - t[0]) if below.size and below[0] > 0 else span / 3.0
    amp0 = amp0 * math.exp(t[0] / tau0) if amp0 > 0 else amp0
    y_scale = float(np.max(np.abs(y))) or 1.0

    def residual(p: dict[str, float]) -> np.ndarray:
        return (y - (p["amplitude"] * np.exp(-t / p["tau"]) + p["offset"])) / sigma

    result = least_squares(
        residual,
        {"amplitude": amp0, "tau": tau0, "offset": offset0},
        bounds={"tau": (span * 1e-9, math.inf)},
        x_scale={"amplitude": y_scale, "tau": span, "offset": y_scale},
    )
    amp, tau = result.params["amplitude"], result.params["tau"]
    if amp <= 1e-9 * y_scale or tau > 100.0 * span or result.degenerate:
        msg = "non-decaying data: tau unidentifiable"
        logger.warning("fit_exponential: %s", msg)
        return result.model_copy(
            update={"converged": False, "uncertainties": {}, "message": msg, "warnings": result.warnings + [msg]}
        )
    return result


def synthesize_decay(
    amplitude: float,
    tau: float,
    offset: float,
    times: np.ndarray,
    poisson: bool = False,
    rng: np.random.Generator | None = None,
) -> list[Observation]:
    rng = rng or np.random.default_rng()
    times = np.asarray(times, dtype=float)
    mean = amplitude * np.exp(-times / tau) + offset
    if poisson:
        counts = rng.poisson(mean).astype(float)
        return [Observation(x=float(x), y=c, sigma=math.sqrt(max(c, 1.0))) for x, c in zip(times, counts)]
    return [Observation(x=float(x), y=float(m)) for x, m in zip(times, mean)]


# Gaussian absorption lines

def _gaussian_sum(nu: np.ndarray, p: dict[str, float], n_lines: int) -> np.ndarray:
    total = np.zeros_like(nu)
    for k in range(n_lines):
        w = p[f"fwhm_{k}"]
        total += p[f"area_{k}"] * GAUSSIAN_NORM / w * np.exp(-4.0 * math.log(2.0) * ((nu - p[f"center_{k}"]) / w) ** 2)
    return total


def fit_gaussian_lines(spec: Spectrum, n_lines: int, floor: float | None = None) -> FitResult:
    """
    Multi-Gaussian fit of alpha(nu) = -ln T / L. Reported centers are absolute (Hz),
    FWHMs in Hz and areas in Hz*cm^-1.
    """
    if n_lines < 1:
        raise PhysicsInputError(f"n_lines must be >= 1, got {n_lines}")
    alpha, usable = absorption_from_spectrum(spec, floor)
    nu_all = spec.frequency
    origin = float(nu_all.mean())
    step = float(np.median(np.diff(nu_all))) if nu_all.size > 1 else 1.0

    peaks, _ = find_peaks(alpha, prominence=0.05 * float(alpha.max()) if alpha.max() > 0 else None)
    peaks = sorted(peaks, key=lambda k: alpha[k], reverse=True)[:n_lines]
    if not peaks:
        peaks = [int(np.argmax(alpha))]
    widths = peak_widths(alpha, peaks, rel_height=0.5)[0] * step
    guesses = [(nu_all[k] - origin, max(w, 2.0 * step), alpha[k]) for k, w in zip(peaks, widths)]
    while len(guesses) < n_lines:
        c, w, h = guesses[0]
        guesses.append((c + 0.5 * w * (1 if len(guesses) % 2 else -1), w, 0.5 * h))
    guesses.sort(key=lambda g: g[0])

    initial, bounds, x_scale = {}, {}, {}
    for k, (c, w, h) in enumerate(guesses):
        area = h * w / GAUSSIAN_NORM
        initial.update({f"center_{k}": c, f"fwhm_{k}": w, f"area_{k}": area})
        bounds.update({f"fwhm_{k}": (0.1 * step, math.inf), f"area_{k}": (0.0, math.inf)})
        x_scale.update({f"center_{k}": w, f"fwhm_{k}": w, f"area_{k}": max(area, 1.0)})

    nu = nu_all[usable] - origin
    target = alpha[usable]

    def residual(p: dict[str, float]) -> np.ndarray:
        return target - _gaussian_sum(nu, p, n_lines)

    result = least_squares(residual, initial, bounds=bounds, x_scale=x_scale)
    params = dict(result.params)
    for k in range(n_lines):
        params[f"center_{k}"] += origin
    return result.model_copy(update={"params": params})
