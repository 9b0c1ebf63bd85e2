"""
Angular-momentum matrices for arbitrary half-integer or integer j.
Basis order is m = j, j-1, ..., -j.
"""
from functools import lru_cache

import numpy as np


def multiplicity(j: float) -> int:
    twice = round(2 * j)
    if twice < 0 or abs(2 * j - twice) > 1e-12:
        raise ValueError(f"spin must be a non-negative multiple of 1/2, got {j}")
    return twice + 1


@lru_cache(maxsize=32)
def _spin_matrices(twice_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j = twice_j / 2.0
    m = j - np.arange(twice_j + 1)
    # <m+1|J+|m> = sqrt(j(j+1) - m(m+1)); J+ sits on the superdiagonal in this ordering
    raising = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    lowering = raising.conj().T
    jx = 0.5 * (raising + lowering)
    jy = -0.5j * (raising - lowering)
    jz = np.diag(m).astype(complex)
    for op in (jx, jy, jz):
        op.setflags(write=False)
    return jx, jy, jz


def spin_matrices(j: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Jx, Jy, Jz) for spin j. Returned arrays are read-only and shared."""
    return _spin_matrices(multiplicity(j) - 1)


def electron_operator(axis: str, nuclear_spin: float) -> np.ndarray:
    """S_axis (x) 1_N for an S = 1/2 electron coupled to nuclear spin I."""
    sx, sy, sz = spin_matrices(0.5)
    op = {"x": sx, "y": sy, "z": sz}[axis]
    return np.kron(op, np.eye(multiplicity(nuclear_spin)))


def nuclear_operator(axis: str, nuclear_spin: float) -> np.ndarray:
    """1_S (x) I_axis."""
    ix, iy, iz = spin_matrices(nuclear_spin)
    op = {"x": ix, "y": iy, "z": iz}[axis]
    return np.kron(np.eye(2), op)
