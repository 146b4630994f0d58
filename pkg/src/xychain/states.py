"""Single- and two-site reduced states from a correlation matrix.

With the sign convention fixed in the solver (J = 0, h > 0 gives
G = -I), every nearest-neighbor observable is read off G as

    mz_i  = -G[i, i]
    Txx   = -G[i, i+1]
    Tyy   = -G[i+1, i]
    Tzz   =  G[i, i] G[i+1, i+1] - G[i, i+1] G[i+1, i]

(Wick reduction of the string-free diagonal correlators; transverse
magnetizations and off-diagonal correlators vanish identically).  The
realized two-qubit state is the X-form

    rho = 1/4 [ I + mz_l Z x I + mz_r I x Z + sum_a T_aa  S_a x S_a ].

Index convention for Tyy (transposed entry, not G[i, i+1]) and the
overall sign of the Txx entry are pinned empirically against the dense
oracle on open chains, where the fermion mapping is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import OPEN, PERIODIC
from .solver import CorrelationMatrix

# PSD tolerance for realized density matrices: an order above the
# eigensolver error accumulated at N ~ 1e3
PSD_EIGENVALUE_FLOOR = -1e-9

_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
_PAULI_PAIRS = [np.kron(p, p).real for p in (_SX, _SY, _SZ)]
_Z_LEFT = np.kron(_SZ, np.eye(2))
_Z_RIGHT = np.kron(np.eye(2), _SZ)


class StateRealizationError(RuntimeError):
    """Raised when a realized two-site matrix violates positivity beyond
    tolerance, which signals an upstream solver bug."""


@dataclass(frozen=True)
class TwoSiteState:
    """Nearest-neighbor reduced state in field form."""

    mz_left: float
    mz_right: float
    txx: float
    tyy: float
    tzz: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.mz_left, self.mz_right, self.txx, self.tyy, self.tzz)


def magnetization(g: CorrelationMatrix, i: int) -> float:
    """Transverse magnetization of site i."""
    n = g.n_sites
    if not 0 <= i < n:
        raise IndexError(f"site index {i} out of range for {n} sites")
    return float(-g.g[i, i])


def two_site_state(g: CorrelationMatrix, i: int) -> TwoSiteState:
    """Reduced state of the bond (i, i+1), wrapping at i = N-1.

    The wrap bond is only physically meaningful on periodic chains;
    callers restrict the index range for open chains.
    """
    n = g.n_sites
    if not 0 <= i < n:
        raise IndexError(f"bond index {i} out of range for {n} sites")
    j = (i + 1) % n
    m = g.g
    return TwoSiteState(
        mz_left=float(-m[i, i]),
        mz_right=float(-m[j, j]),
        txx=float(-m[i, j]),
        tyy=float(-m[j, i]),
        tzz=float(m[i, i] * m[j, j] - m[i, j] * m[j, i]),
    )


def bond_fields(g: CorrelationMatrix, boundary: str = PERIODIC) -> np.ndarray:
    """All bond states at once, as an (n_bonds, 5) array of
    (mz_left, mz_right, txx, tyy, tzz) rows."""
    n = g.n_sites
    nb = n if boundary != OPEN else n - 1
    i = np.arange(nb)
    j = (i + 1) % n
    m = g.g
    d = np.diag(m)
    out = np.empty((nb, 5))
    out[:, 0] = -d[i]
    out[:, 1] = -d[j]
    out[:, 2] = -m[i, j]
    out[:, 3] = -m[j, i]
    out[:, 4] = d[i] * d[j] - m[i, j] * m[j, i]
    return out


def density_matrix_from_fields(fields: np.ndarray) -> np.ndarray:
    """Realize X-form density matrices from (..., 5) field rows."""
    fields = np.asarray(fields, dtype=float)
    batch = fields.reshape(-1, 5)
    rho = np.broadcast_to(np.eye(4), (batch.shape[0], 4, 4)).copy()
    rho += batch[:, 0, None, None] * _Z_LEFT
    rho += batch[:, 1, None, None] * _Z_RIGHT
    for a, pauli in enumerate(_PAULI_PAIRS):
        rho += batch[:, 2 + a, None, None] * pauli
    rho *= 0.25
    return rho.reshape(fields.shape[:-1] + (4, 4))


def realize_density_matrix(s: TwoSiteState) -> np.ndarray:
    """4x4 density matrix of a TwoSiteState.

    Checks Hermiticity by construction and positivity within the
    tolerance floor; eigenvalues are checked, never mutated.
    """
    rho = density_matrix_from_fields(np.array(s.as_tuple()))
    lowest = float(np.linalg.eigvalsh(rho)[0])
    if lowest < PSD_EIGENVALUE_FLOOR:
        raise StateRealizationError(
            f"two-site state violates positivity: lowest eigenvalue {lowest:.3e}"
        )
    return rho
