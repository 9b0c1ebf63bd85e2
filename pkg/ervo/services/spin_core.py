"""
Effective-spin Zeeman and hyperfine Hamiltonians, eigenstructure, transition
strengths and resonance-crossing search. All frequencies in Hz, fields in tesla.
"""
import math

import numpy as np
from scipy.optimize import brentq

from ervo.config import settings
from ervo.core.constants import BOHR_MAGNETON_HZ_PER_T
from ervo.core.errors import EigenSolverError, PhysicsInputError
from ervo.core.log import get_logger
from ervo.core.spin_operators import electron_operator, nuclear_operator
from ervo.schemas.spin import (
    Crossing,
    DriveAxis,
    EigenSystem,
    FieldPoint,
    GTensor,
    SpinSystem,
    SpinTransition,
)

logger = get_logger(__name__)

# |<down|S_x|up>|^2, the largest single electron matrix element
MAX_ELECTRON_STRENGTH = 0.25


def zeeman_splitting(g: GTensor, field: FieldPoint) -> float:
    """Doublet splitting (mu_B/h)|B| sqrt(g_par^2 cos^2 + g_perp^2 sin^2)."""
    return BOHR_MAGNETON_HZ_PER_T * field.magnitude * g.effective(field.theta)


def hyperfine_hamiltonian(sys: SpinSystem, field: FieldPoint) -> np.ndarray:
    """Hamiltonian in Hz on the |m_s> (x) |m_I> basis (both ordered high to low)."""
    i = sys.nuclear_spin
    bz = field.magnitude * math.cos(field.theta)
    bx = field.magnitude * math.sin(field.theta)
    sx, sz = electron_operator("x", i), electron_operator("z", i)
    h = BOHR_MAGNETON_HZ_PER_T * (sys.g.g_par * bz * sz + sys.g.g_perp * bx * sx)
    if i > 0:
        ix, iy, iz = (nuclear_operator(a, i) for a in ("x", "y", "z"))
        sy = electron_operator("y", i)
        h = h + sys.A_par * (sz @ iz) + sys.A_perp * (sx @ ix + sy @ iy)
        if sys.quadrupole_P:
            h = h + sys.quadrupole_P * (iz @ iz - i * (i + 1) / 3.0 * np.eye(sys.dimension))
    return 0.5 * (h + h.conj().T)


def degenerate_clusters(energies: np.ndarray, tol: float | None = None) -> list[list[int]]:
    """Group consecutive indices whose energies agree within tol (Hz)."""
    if tol is None:
        tol = 1e-9 * max(1.0, float(np.max(np.abs(energies))) if energies.size else 1.0)
    clusters: list[list[int]] = []
    for k in range(len(energies)):
        if clusters and energies[k] - energies[clusters[-1][-1]] <= tol:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    return clusters


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Make the largest component of each column real and positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)


def _canonicalise(energies: np.ndarray, vectors: np.ndarray, nuclear_spin: float) -> tuple[np.ndarray, list[list[int]]]:
    clusters = degenerate_clusters(energies)
    # tie-breaker keeps electron-spin order stable when the nuclear projection is degenerate
    label = nuclear_operator("z", nuclear_spin) + 1e-3 * electron_operator("z", nuclear_spin)
    out = vectors.copy()
    for cluster in clusters:
        if len(cluster) < 2:
            continue
        block = vectors[:, cluster]
        _, rot = np.linalg.eigh(block.conj().T @ label @ block)
        # descending m_I expectation
        out[:, cluster] = (block @ rot)[:, ::-1]
    return _fix_phase(out), clusters


def hyperfine_eigensystem(sys: SpinSystem, field: FieldPoint) -> EigenSystem:
    dim = sys.dimension
    if dim > settings.MAX_HAMILTONIAN_DIM:
        raise PhysicsInputError(f"Hamiltonian dimension {dim} exceeds {settings.MAX_HAMILTONIAN_DIM}")
    h = hyperfine_hamiltonian(sys, field)
    try:
        energies, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigh failed for dimension {dim}: {exc}", float(np.linalg.cond(h))) from exc
    if not np.all(np.isfinite(energies)):
        raise EigenSolverError("non-finite eigenvalues", float(np.linalg.cond(h)))
    vectors, clusters = _canonicalise(energies, vectors, sys.nuclear_spin)
    return EigenSystem(
        energies=energies,
        states=vectors,
        nuclear_spin=sys.nuclear_spin,
        field=field,
        clusters=clusters,
    )


def all_pair_strengths(eig: EigenSystem, drive_axis: DriveAxis = "x") -> np.ndarray:
    """Unfloored |<f|S_axis (x) 1|i>|^2 for every ordered pair (f, i)."""
    op = electron_operator(drive_axis, eig.nuclear_spin)
    m = eig.states.conj().T @ op @ eig.states
    return np.abs(m) ** 2


def spin_transitions(
    eig: EigenSystem,
    drive_axis: DriveAxis = "x",
    floor: float | None = None,
) -> list[SpinTransition]:
    """Upward transitions with strength above floor (relative to the largest S_x element)."""
    floor = settings.STRENGTH_FLOOR if floor is None else floor
    cutoff = floor * MAX_ELECTRON_STRENGTH
    strengths = all_pair_strengths(eig, drive_axis)
    out = []
    for lo in range(eig.dimension):
        for up in range(lo + 1, eig.dimension):
            s = float(strengths[up, lo])
            if s < cutoff:
                continue
            out.append(
                SpinTransition(
                    lower_index=lo,
                    upper_index=up,
                    frequency=max(0.0, float(eig.energies[up] - eig.energies[lo])),
                    strength=min(1.0, s),
                )
            )
    return out


def _gaps(sys: SpinSystem, b: float, theta: float) -> np.ndarray:
    e = np.linalg.eigvalsh(hyperfine_hamiltonian(sys, FieldPoint(magnitude=b, theta=theta)))
    return e[None, :] - e[:, None]


def merge_roots(roots: list[float], tol: float) -> list[float]:
    """Sorted roots with any root within tol of the previously kept one dropped."""
    kept: list[float] = []
    for root in sorted(roots):
        if not kept or root - kept[-1] > tol:
            kept.append(root)
    return kept


def find_crossings(
    sys: SpinSystem,
    target: float,
    field_range: tuple[float, float],
    theta: float = 0.0,
    drive_axis: DriveAxis = "x",
    floor: float | None = None,
    step: float | None = None,
) -> list[Crossing]:
    """
    Fields where an allowed transition equals target. Scans the range on a coarse
    grid, brackets every sign change of each level-pair gap, refines with brentq.
    """
    lo, hi = field_range
    if target <= 0:
        raise PhysicsInputError(f"target frequency must be positive, got {target}")
    if lo < 0 or hi <= lo:
        raise PhysicsInputError(f"field range must be positive and ordered, got ({lo}, {hi})")
    step = settings.CROSSING_SCAN_STEP_T if step is None else step
    floor = settings.STRENGTH_FLOOR if floor is None else floor

    grid = np.linspace(lo, hi, max(2, int(math.ceil((hi - lo) / step)) + 1))
    diffs = np.stack([_gaps(sys, b, theta) for b in grid]) - target
    dim = sys.dimension
    found: list[Crossing] = []

    for i in range(dim):
        for f in range(i + 1, dim):
            series = diffs[:, i, f]
            roots = [float(grid[k]) for k in np.flatnonzero(series == 0.0)]
            for k in np.flatnonzero(series[:-1] * series[1:] < 0):
                roots.append(
                    brentq(
                        lambda x: _gaps(sys, x, theta)[i, f] - target,
                        grid[k], grid[k + 1],
                        xtol=settings.CROSSING_TOLERANCE_T,
                    )
                )
            for root in merge_roots(roots, settings.CROSSING_DEDUP_T):
                eig = hyperfine_eigensystem(sys, FieldPoint(magnitude=root, theta=theta))
                strength = float(all_pair_strengths(eig, drive_axis)[f, i])
                if strength < floor * MAX_ELECTRON_STRENGTH:
                    continue
                transition = SpinTransition(
                    lower_index=i,
                    upper_index=f,
                    frequency=max(0.0, float(eig.energies[f] - eig.energies[i])),
                    strength=min(1.0, strength),
                )
                found.append(Crossing(field=root, transition=transition))

    found.sort(key=lambda c: (c.field, c.transition.lower_index, c.transition.upper_index))
    logger.debug("find_crossings: %d crossings of %.6g Hz in [%g, %g] T", len(found), target, lo, hi)
    return found


def level_diagram(sys: SpinSystem, fields: np.ndarray, theta: float = 0.0) -> np.ndarray:
    """Energies (Hz) on a field grid, shape (len(fields), dim)."""
    fields = np.asarray(fields, dtype=float)
    return np.stack(
        [hyperfine_eigensystem(sys, FieldPoint(magnitude=b, theta=theta)).energies for b in fields]
    )
