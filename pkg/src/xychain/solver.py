"""Free-fermion diagonalization and fermionic correlation matrices.

The quadratic form is diagonalized through the singular value
decomposition of A + B: with A + B = U diag(L) V^T, the rows of V^T are
the phi vectors, the columns of U are the psi vectors, and L holds the
nonnegative single-particle energies.  This satisfies both coupled
equations

    (A + B) phi_k = L_k psi_k,      (A - B) psi_k = L_k phi_k,

exactly (A symmetric, B antisymmetric imply (A+B)^T = A-B), makes the
phi rows orthonormal eigenvectors of (A-B)(A+B), and hands zero modes
their psi vectors as left singular vectors without special casing.

All spin observables follow from the correlation matrix

    G(beta) = psi^T diag(tanh(beta L / 2)) phi,

whose sign convention is fixed by the zero-coupling limit: J = 0, h > 0
gives G = -I and magnetization -G[i, i] = +1.  The ground-state kernel
replaces tanh with 1 on positive modes and 0 on exact zero modes; the
zero weight is the beta -> inf limit of the thermal kernel and equals an
equal mixture over the degenerate ground manifold, so observables do not
depend on the arbitrary sign of a zero mode's psi vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import QuadraticForm

# singular values below ZERO_MODE_RTOL * max(1, L_max) count as zero modes
ZERO_MODE_RTOL = 1e-12

# tanh saturation guard: kernel is exactly 1 beyond this argument
TANH_SATURATION = 20.0

GROUND = "ground"
THERMAL = "thermal"


class SolverConvergenceError(RuntimeError):
    """Raised when the underlying dense factorization fails to converge."""


@dataclass(frozen=True, eq=False)
class FermionSpectrum:
    """Single-particle energies and the paired phi/psi vector families.

    ``energies`` is ascending and nonnegative; ``phi`` and ``psi`` store
    the vectors as rows, with row k paired so (A+B) phi_k = L_k psi_k.
    """

    energies: np.ndarray
    phi: np.ndarray
    psi: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.energies.shape[0]

    def zero_modes(self) -> np.ndarray:
        """Boolean mask of modes treated as exact zeros."""
        scale = max(1.0, float(self.energies[-1])) if self.energies.size else 1.0
        return self.energies <= ZERO_MODE_RTOL * scale


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Fermionic two-point matrix G; ``beta`` is +inf for the ground state."""

    g: np.ndarray
    beta: float

    @property
    def regime(self) -> str:
        return GROUND if math.isinf(self.beta) else THERMAL

    @property
    def n_sites(self) -> int:
        return self.g.shape[0]


def _fix_gauge(energies: np.ndarray, phi: np.ndarray, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic sign convention.

    For L_k > 0 the pair (phi_k, psi_k) may only flip jointly: make the
    first nonzero component of phi_k positive.  Zero modes have
    independent signs; fix each so its first nonzero component is
    positive.
    """
    phi = phi.copy()
    psi = psi.copy()
    scale = max(1.0, float(energies[-1])) if energies.size else 1.0
    zeros = energies <= ZERO_MODE_RTOL * scale
    tiny = 1e-12
    for k in range(energies.size):
        lead = np.argmax(np.abs(phi[k]) > tiny)
        if phi[k, lead] < 0:
            phi[k] = -phi[k]
            if not zeros[k]:
                psi[k] = -psi[k]
        if zeros[k]:
            lead = np.argmax(np.abs(psi[k]) > tiny)
            if psi[k, lead] < 0:
                psi[k] = -psi[k]
    return phi, psi


def diagonalize(qf: QuadraticForm) -> FermionSpectrum:
    """Solve the coupled phi/psi eigenproblem of a quadratic form.

    Raises
    ------
    SolverConvergenceError
        If the dense SVD fails to converge (carries no seed itself;
        ensemble-level callers attach the realization index).
    """
    m = qf.a_matrix + qf.b_matrix
    try:
        u, s, vt = scipy.linalg.svd(m)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare LAPACK failure
        raise SolverConvergenceError(f"SVD of A+B failed to converge: {exc}") from exc
    # ascending energies
    order = np.arange(s.size)[::-1]
    energies = s[order]
    phi = vt[order]
    psi = u[:, order].T
    phi, psi = _fix_gauge(energies, phi, psi)
    energies.setflags(write=False)
    phi.setflags(write=False)
    psi.setflags(write=False)
    return FermionSpectrum(energies=energies, phi=phi, psi=psi)


def _correlation_from_kernel(spectrum: FermionSpectrum, kernel: np.ndarray, beta: float) -> CorrelationMatrix:
    g = spectrum.psi.T @ (kernel[:, None] * spectrum.phi)
    g.setflags(write=False)
    return CorrelationMatrix(g=g, beta=beta)


def correlation_matrix_ground(spectrum: FermionSpectrum) -> CorrelationMatrix:
    """Ground-state correlation matrix G = psi^T diag(w) phi.

    w is 1 on positive modes and 0 on exact zero modes (equal-weight
    mixture over the degenerate ground manifold).
    """
    kernel = np.where(spectrum.zero_modes(), 0.0, 1.0)
    return _correlation_from_kernel(spectrum, kernel, math.inf)


def correlation_matrix_thermal(spectrum: FermionSpectrum, beta: float) -> CorrelationMatrix:
    """Thermal correlation matrix G(beta) = psi^T diag(tanh(beta L/2)) phi.

    beta = 0 gives G = 0 (maximally mixed state); beta = +inf routes to
    the ground-state kernel.
    """
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if math.isinf(beta):
        return correlation_matrix_ground(spectrum)
    x = 0.5 * beta * spectrum.energies
    kernel = np.where(x > TANH_SATURATION, 1.0, np.tanh(x))
    return _correlation_from_kernel(spectrum, kernel, beta)
