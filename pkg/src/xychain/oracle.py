"""Exact small-system reference via the full 2^N spin Hamiltonian.

Builds the dense many-body Hamiltonian of a chain realization, forms
exact ground or canonical thermal states, and extracts nearest-neighbor
reduced states by partial trace.  Used to arbitrate every convention in
the free-fermion pipeline; capped at N <= 12 sites (dense 4096^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import OPEN, ModelSpec
from .states import TwoSiteState

MAX_SITES = 12

# degenerate ground levels within this absolute gap are mixed uniformly
GROUND_GAP_TOL = 1e-10

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
# iY, kept real: Y_i Y_j = -(iY)_i (iY)_j
IY = np.array([[0.0, 1.0], [-1.0, 0.0]])
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])


@dataclass(frozen=True, eq=False)
class DenseSpinSystem:
    """Dense Hermitian Hamiltonian of a chain realization."""

    n_sites: int
    hamiltonian: np.ndarray

    @property
    def dimension(self) -> int:
        return self.hamiltonian.shape[0]


def _two_site_term(op_left: np.ndarray, op_right: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """Kron product placing 2x2 operators at sites i and j (i != j)."""
    factors = [np.eye(2)] * n
    factors[i] = op_left
    factors[j] = op_right
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def _one_site_term(op: np.ndarray, i: int, n: int) -> np.ndarray:
    factors = [np.eye(2)] * n
    factors[i] = op
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def build_dense(spec: ModelSpec) -> DenseSpinSystem:
    """Tensor-product realization of the chain Hamiltonian.

    H = sum_bonds J_i/4 [(1+gamma) X_i X_{i+1} + (1-gamma) Y_i Y_{i+1}]
        - sum_i h_i/2 Z_i, with the wrap bond included only for periodic
    chains.  All terms are real, so the matrix is real symmetric.
    """
    n = spec.n_sites
    if n > MAX_SITES:
        raise ValueError(f"dense oracle limited to {MAX_SITES} sites, got {n}")
    dim = 2 ** n
    h = np.zeros((dim, dim))
    for i in range(n):
        h -= 0.5 * spec.fields[i] * _one_site_term(SZ, i, n)
    n_bonds = n if spec.boundary != OPEN else n - 1
    for i in range(n_bonds):
        j = (i + 1) % n
        coeff = 0.25 * spec.couplings[i]
        h += coeff * (1.0 + spec.gamma) * _two_site_term(SX, SX, i, j, n)
        # Y_i Y_j = -(iY)_i (iY)_j keeps the arithmetic real
        h -= coeff * (1.0 - spec.gamma) * _two_site_term(IY, IY, i, j, n)
    return DenseSpinSystem(n_sites=n, hamiltonian=h)


def thermal_state(system: DenseSpinSystem, beta: float) -> np.ndarray:
    """exp(-beta H)/Z, with beta = inf meaning the ground state.

    A degenerate lowest eigenspace (gap below GROUND_GAP_TOL) is mixed
    with equal weights, which keeps the reduced states independent of
    the eigensolver's basis choice inside the degenerate manifold.
    """
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    evals, evecs = np.linalg.eigh(system.hamiltonian)
    if math.isinf(beta):
        ground = evals - evals[0] <= GROUND_GAP_TOL
        w = ground.astype(float)
    else:
        w = np.exp(-beta * (evals - evals[0]))
    w /= w.sum()
    return (evecs * w) @ evecs.T


def _partial_trace_pair(rho: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """Reduce a 2^n density matrix to sites (i, j), i as the left factor."""
    tensor = rho.reshape((2,) * (2 * n))
    keep = [i, j]
    rest = [k for k in range(n) if k not in keep]
    perm = keep + rest + [n + k for k in keep] + [n + k for k in rest]
    tensor = tensor.transpose(perm).reshape(4, 2 ** (n - 2), 4, 2 ** (n - 2))
    return np.einsum("akbk->ab", tensor)


def reduced_pair_state(spec: ModelSpec, beta: float, i: int) -> np.ndarray:
    """Exact 4x4 reduced state of the bond (i, i+1)."""
    n = spec.n_sites
    if not 0 <= i < n:
        raise ValueError(f"site index {i} out of range for {n} sites")
    j = (i + 1) % n
    if j == 0 and spec.boundary == OPEN:
        raise ValueError("wrap bond has no meaning on an open chain")
    system = build_dense(spec)
    rho = thermal_state(system, beta)
    return _partial_trace_pair(rho, i, j, n)


def exact_two_site(spec: ModelSpec, beta: float, i: int) -> TwoSiteState:
    """Field extraction (magnetizations and diagonal correlators) from the
    exact reduced state of bond (i, i+1)."""
    rho2 = reduced_pair_state(spec, beta, i)
    return TwoSiteState(
        mz_left=float(np.real(np.trace(rho2 @ np.kron(SZ, np.eye(2))))),
        mz_right=float(np.real(np.trace(rho2 @ np.kron(np.eye(2), SZ)))),
        txx=float(np.real(np.trace(rho2 @ np.kron(SX, SX)))),
        tyy=float(np.real(np.trace(rho2 @ np.kron(SY, SY)))),
        tzz=float(np.real(np.trace(rho2 @ np.kron(SZ, SZ)))),
    )
