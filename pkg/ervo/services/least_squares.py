"""
Levenberg-Marquardt least squares on named parameters.

The residual callable returns already-weighted residuals r_i / sigma_i for a
parameter dict. Parameters can be fixed or boxed (steps are clipped to the box).
Uncertainties come from inv(J^T J) scaled by the reduced chi^2.
"""
import math
from collections.abc import Callable, Mapping

import numpy as np

from ervo.config import settings
from ervo.core.errors import PhysicsInputError, UnderdeterminedFitError
from ervo.core.log import get_logger
from ervo.schemas.fit import FitResult

logger = get_logger(__name__)

Residual = Callable[[dict[str, float]], np.ndarray]

_EPS_CBRT = np.finfo(float).eps ** (1.0 / 3.0)


def numerical_jacobian(
    fun: Callable[[np.ndarray], np.ndarray],
    p: np.ndarray,
    x_scale: np.ndarray | None = None,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
) -> np.ndarray:
    """Central differences with h = eps^(1/3) max(|p|, x_scale); one-sided at a box edge."""
    p = np.asarray(p, dtype=float)
    x_scale = np.ones_like(p) if x_scale is None else np.asarray(x_scale, dtype=float)
    lower = np.full_like(p, -np.inf) if lower is None else lower
    upper = np.full_like(p, np.inf) if upper is None else upper
    f0 = None
    columns = []
    for j in range(p.size):
        h = _EPS_CBRT * max(abs(p[j]), x_scale[j])
        up, down = p.copy(), p.copy()
        up[j] += h
        down[j] -= h
        if up[j] > upper[j]:
            if f0 is None:
                f0 = np.asarray(fun(p), dtype=float)
            columns.append((f0 - np.asarray(fun(down), dtype=float)) / h)
        elif down[j] < lower[j]:
            if f0 is None:
                f0 = np.asarray(fun(p), dtype=float)
            columns.append((np.asarray(fun(up), dtype=float) - f0) / h)
        else:
            columns.append((np.asarray(fun(up), dtype=float) - np.asarray(fun(down), dtype=float)) / (2.0 * h))
    return np.column_stack(columns) if columns else np.zeros((0, 0))


def _scaled_condition(alpha: np.ndarray) -> float:
    """Condition number of J^T J after unit-normalising its columns."""
    d = np.sqrt(np.diag(alpha))
    if np.any(d == 0):
        return math.inf
    return float(np.linalg.cond(alpha / np.outer(d, d)))


def least_squares(
    residual: Residual,
    initial: Mapping[str, float],
    bounds: Mapping[str, tuple[float, float]] | None = None,
    fixed: set[str] | frozenset[str] = frozenset(),
    x_scale: Mapping[str, float] | None = None,
    max_iterations: int | None = None,
) -> FitResult:
    names = list(initial)
    free = [n for n in names if n not in fixed]
    bounds = bounds or {}
    x_scale = x_scale or {}
    max_iterations = settings.LM_MAX_ITERATIONS if max_iterations is None else max_iterations

    lower = np.array([bounds.get(n, (-np.inf, np.inf))[0] for n in free], dtype=float)
    upper = np.array([bounds.get(n, (-np.inf, np.inf))[1] for n in free], dtype=float)
    scale = np.array([x_scale.get(n, 1.0) for n in free], dtype=float)
    p = np.array([initial[n] for n in free], dtype=float)
    if np.any(p < lower) or np.any(p > upper):
        raise PhysicsInputError("initial parameters lie outside their bounds")

    def unpack(vec: np.ndarray) -> dict[str, float]:
        out = {n: float(initial[n]) for n in names}
        out.update({n: float(v) for n, v in zip(free, vec)})
        return out

    def fun(vec: np.ndarray) -> np.ndarray:
        return np.asarray(residual(unpack(vec)), dtype=float).ravel()

    r = fun(p)
    if not np.all(np.isfinite(r)):
        raise PhysicsInputError("residual is not finite at the initial parameters")
    n_obs, n_free = r.size, p.size
    if n_obs < n_free:
        raise UnderdeterminedFitError(f"{n_obs} residuals cannot identify {n_free} free parameters")

    chi2 = float(r @ r)
    history = [chi2]
    lam = settings.LM_LAMBDA0
    converged = False
    message = "maximum iterations reached"
    iterations = 0
    jac = np.zeros((n_obs, n_free))

    while iterations < max_iterations and n_free:
        iterations += 1
        jac = numerical_jacobian(fun, p, scale, lower, upper)
        alpha = jac.T @ jac
        beta = -jac.T @ r
        if chi2 == 0.0:
            converged, message = True, "zero residual"
            break
        col_norm = np.sqrt(np.diag(alpha))
        denom = col_norm * math.sqrt(chi2)
        cosines = np.abs(beta) / np.where(denom > 0, denom, 1.0)
        if np.max(cosines) <= settings.LM_GTOL:
            converged, message = True, "gradient tolerance reached"
            break

        diag = np.where(np.diag(alpha) > 0, np.diag(alpha), 1.0)
        accepted = False
        while not accepted:
            try:
                step = np.linalg.solve(alpha + lam * np.diag(diag), beta)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(alpha + lam * np.diag(diag), beta, rcond=None)[0]
            trial = np.clip(p + step, lower, upper)
            moved = trial - p
            small = np.linalg.norm(moved / scale) <= settings.LM_XTOL * (np.linalg.norm(p / scale) + settings.LM_XTOL)
            r_trial = fun(trial)
            chi2_trial = float(r_trial @ r_trial) if np.all(np.isfinite(r_trial)) else math.inf
            if chi2_trial < chi2:
                p, r, chi2 = trial, r_trial, chi2_trial
                history.append(chi2)
                lam = max(lam * settings.LM_LAMBDA_DOWN, 1e-15)
                accepted = True
            else:
                lam *= settings.LM_LAMBDA_UP
            if small:
                converged, message = True, "step tolerance reached"
                break
            if lam > 1e16:
                message = "damping diverged without reducing chi^2"
                break
        if converged or not accepted:
            break

    if n_free == 0:
        converged, message = True, "no free parameters"
    elif converged:
        jac = numerical_jacobian(fun, p, scale, lower, upper)

    alpha = jac.T @ jac if n_free else np.zeros((0, 0))
    dof = max(n_obs - n_free, 1)
    reduced = chi2 / dof
    condition = _scaled_condition(alpha) if n_free else 1.0
    degenerate = not math.isfinite(condition) or condition > settings.CONDITION_WARNING
    warnings = []
    if degenerate:
        warnings.append(f"degenerate fit: scaled condition number {condition:.3e}")
        logger.warning("least_squares: %s", warnings[-1])

    uncertainties: dict[str, float] = {}
    if converged:
        cov = np.linalg.pinv(alpha) * reduced if n_free else np.zeros((0, 0))
        sig = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        uncertainties = {n: 0.0 for n in names}
        uncertainties.update({n: float(s) for n, s in zip(free, sig)})
    else:
        logger.info("least_squares did not converge after %d iterations: %s", iterations, message)

    return FitResult(
        params=unpack(p),
        uncertainties=uncertainties,
        rms=math.sqrt(chi2 / n_obs) if n_obs else 0.0,
        chi2=chi2,
        reduced_chi2=reduced,
        converged=converged,
        iterations=iterations,
        chi2_history=history,
        condition_number=condition,
        degenerate=degenerate,
        message=message,
        warnings=warnings,
    )
