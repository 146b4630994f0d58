"""Bipartite correlation measures on two-qubit density matrices.

Entanglement measures (concurrence, logarithmic negativity) are closed
spectral computations.  The information-theoretic measures (classical
correlation, quantum discord, quantum work-deficit) require a
minimization over rank-one projective measurements on the second qubit,
parameterized by Bloch angles (theta, phi):

    |b+> = (cos(theta/2), e^{i phi} sin(theta/2)),   |b-> orthogonal.

The minimization runs a coarse 37 x 73 angle grid followed by
Nelder-Mead refinement; the objective is smooth and two-dimensional, so
this reliably lands within grid-oracle tolerance (1e-4, see tests).

Both minimized objectives reduce to the eigenvalues of the conditional
blocks K_i = (I x <b_i|) rho (I x |b_i>): the entropy of the dephased
state is the entropy of the pooled block eigenvalues, and

    sum_i p_i S(rho_{A|i}) = S(dephased) - H({p_i}).

Units: log base 2 throughout; ebits for entanglement measures, bits for
information-theoretic ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

COARSE_THETA_POINTS = 37
COARSE_PHI_POINTS = 73

# negative-eigenvalue tolerance for density-matrix inputs
EIGENVALUE_TOL = 1e-9
# tolerated negative excursion of optimized measures before erroring
MEASURE_TOL = 1e-6

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_YY = np.kron(_SY, _SY).real  # real matrix

_NM_OPTIONS = {"xatol": 1e-3, "fatol": 1e-8, "maxiter": 400}


class OptimizationError(RuntimeError):
    """Measurement optimization produced an invalid value; carries the
    best value found in ``best_value``."""

    def __init__(self, message: str, best_value: float):
        super().__init__(message)
        self.best_value = best_value


@dataclass(frozen=True)
class MeasurementBasis:
    """Bloch angles of a rank-one projective measurement on one qubit."""

    theta: float
    phi_angle: float

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        b = _basis_vector(self.theta, self.phi_angle)
        p0 = np.outer(b, b.conj())
        return p0, np.eye(2) - p0


@dataclass(frozen=True)
class MeasureResult:
    value: float
    optimizer: MeasurementBasis | None
    iterations: int


def _check_two_qubit(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 two-qubit density matrix, got shape {rho.shape}")
    return rho.astype(complex)


def _entropy_from_eigenvalues(evals: np.ndarray) -> float:
    evals = np.asarray(evals, dtype=float)
    if evals.min() < -EIGENVALUE_TOL:
        raise ValueError(f"density matrix has eigenvalue {evals.min():.3e} < -{EIGENVALUE_TOL}")
    evals = np.clip(evals, 0.0, None)
    total = evals.sum()
    if total > 0:
        evals = evals / total
    positive = evals[evals > 0]
    return float(-np.sum(positive * np.log2(positive)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy -Tr rho log2 rho in bits, with 0 log 0 = 0."""
    rho = np.asarray(rho)
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(rho))


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state (ebits)."""
    return float(concurrence_batch(_check_two_qubit(rho)[None])[0])


def concurrence_batch(rhos: np.ndarray) -> np.ndarray:
    rhos = np.asarray(rhos, dtype=complex)
    r = rhos @ _YY @ rhos.conj() @ _YY
    evals = np.linalg.eigvals(r).real
    # tiny negatives from the non-Hermitian eigensolver
    evals = np.clip(evals, 0.0, None)
    roots = np.sqrt(np.sort(evals, axis=-1)[..., ::-1])
    return np.maximum(0.0, roots[..., 0] - roots[..., 1] - roots[..., 2] - roots[..., 3])


def _partial_transpose_first(rhos: np.ndarray) -> np.ndarray:
    shape = rhos.shape[:-2]
    rr = rhos.reshape(shape + (2, 2, 2, 2))
    return rr.transpose(tuple(range(len(shape))) + (len(shape) + 2, len(shape) + 1, len(shape), len(shape) + 3)).reshape(shape + (4, 4))


def log_negativity(rho: np.ndarray) -> float:
    """log2 of the trace norm of the partial transpose (first factor), ebits."""
    return float(log_negativity_batch(_check_two_qubit(rho)[None])[0])


def log_negativity_batch(rhos: np.ndarray) -> np.ndarray:
    rhos = np.asarray(rhos, dtype=complex)
    pt = _partial_transpose_first(rhos)
    trace_norm = np.abs(np.linalg.eigvalsh(pt)).sum(axis=-1)
    return np.maximum(0.0, np.log2(trace_norm))


def _marginals(rhos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rr = rhos.reshape(rhos.shape[:-2] + (2, 2, 2, 2))
    return np.einsum("...ijkj->...ik", rr), np.einsum("...ijil->...jl", rr)


def _entropy_batch(evals: np.ndarray) -> np.ndarray:
    e = np.clip(evals, 0.0, None)
    terms = np.where(e > 0, e * np.log2(np.where(e > 0, e, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def mutual_information(rho: np.ndarray) -> float:
    """Total correlations S(A) + S(B) - S(AB) in bits."""
    return float(mutual_information_batch(_check_two_qubit(rho)[None])[0])


def mutual_information_batch(rhos: np.ndarray) -> np.ndarray:
    rhos = np.asarray(rhos, dtype=complex)
    rho_a, rho_b = _marginals(rhos)
    s_a = _entropy_batch(np.linalg.eigvalsh(rho_a))
    s_b = _entropy_batch(np.linalg.eigvalsh(rho_b))
    s_ab = _entropy_batch(np.linalg.eigvalsh(rhos))
    return s_a + s_b - s_ab


# ---------------------------------------------------------------------------
# measurement optimization
# ---------------------------------------------------------------------------

def _basis_vector(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack(
        [np.cos(0.5 * theta) + 0j, np.exp(1j * phi) * np.sin(0.5 * theta)], axis=-1
    )


def _canonical_angles(theta: float, phi: float) -> tuple[float, float]:
    """Map arbitrary angles to theta in [0, pi], phi in [0, 2 pi) with the
    same measurement direction."""
    nz = math.cos(theta)
    nx = math.sin(theta) * math.cos(phi)
    ny = math.sin(theta) * math.sin(phi)
    theta_c = math.acos(max(-1.0, min(1.0, nz)))
    phi_c = math.atan2(ny, nx) % (2.0 * math.pi)
    return theta_c, phi_c


def _eig2_hermitian(k00: np.ndarray, k11: np.ndarray, k01: np.ndarray):
    """Eigenvalue pair of Hermitian 2x2 blocks given by entries."""
    half_tr = 0.5 * (k00 + k11)
    rad = np.sqrt(np.maximum(0.0, (0.5 * (k00 - k11)) ** 2 + np.abs(k01) ** 2))
    return half_tr + rad, half_tr - rad


def _xlog2x(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, None)
    return np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0)), 0.0)


def _objectives_from_blocks(k00, k11, k01, rho_a):
    """(conditional-entropy objective, dephased-entropy objective).

    Entry arrays have shape (..., ) for the plus block; the minus block
    is rho_A minus the plus block.
    """
    m00 = rho_a[..., 0, 0].real - k00
    m11 = rho_a[..., 1, 1].real - k11
    m01 = rho_a[..., 0, 1] - k01
    e_pairs = _eig2_hermitian(k00, k11, k01) + _eig2_hermitian(m00, m11, m01)
    dephased_entropy = -sum(_xlog2x(e) for e in e_pairs)
    p_plus = np.clip(k00 + k11, 0.0, 1.0)
    prob_entropy = -(_xlog2x(p_plus) + _xlog2x(1.0 - p_plus))
    return dephased_entropy - prob_entropy, dephased_entropy


def _block_entries(rhos: np.ndarray, bvecs: np.ndarray):
    """Plus-block entries for a batch of states against a batch of basis
    vectors: K[m, n] = sum_jl conj(b_j) rho[m, j, n, l] b_l."""
    rr = rhos.reshape(rhos.shape[0], 2, 2, 2, 2)
    bc = bvecs.conj()
    k00 = np.einsum("gj,sjl,gl->sg", bc, rr[:, 0, :, 0, :], bvecs, optimize=True)
    k11 = np.einsum("gj,sjl,gl->sg", bc, rr[:, 1, :, 1, :], bvecs, optimize=True)
    k01 = np.einsum("gj,sjl,gl->sg", bc, rr[:, 0, :, 1, :], bvecs, optimize=True)
    return k00.real, k11.real, k01


def _coarse_grid():
    thetas = np.linspace(0.0, np.pi, COARSE_THETA_POINTS)
    phis = np.linspace(0.0, 2.0 * np.pi, COARSE_PHI_POINTS)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    return tt.ravel(), pp.ravel()


def _grid_objectives(rhos: np.ndarray):
    """Both objectives on the coarse grid for a batch of states; returns
    (cc_objective, wd_objective, thetas, phis)."""
    thetas, phis = _coarse_grid()
    bvecs = _basis_vector(thetas, phis)
    k00, k11, k01 = _block_entries(rhos, bvecs)
    rho_a, _ = _marginals(rhos)
    cc_obj, wd_obj = _objectives_from_blocks(k00, k11, k01, rho_a[:, None, :, :])
    return cc_obj, wd_obj, thetas, phis


def _scalar_objective(rho: np.ndarray, kind: str):
    rr = rho.reshape(2, 2, 2, 2)
    rho_a = np.einsum("ijkj->ik", rr)
    index = 0 if kind == "conditional" else 1

    def fun(x):
        b = _basis_vector(x[0], x[1])
        bc = b.conj()
        k00 = np.einsum("j,jl,l->", bc, rr[0, :, 0, :], b).real
        k11 = np.einsum("j,jl,l->", bc, rr[1, :, 1, :], b).real
        k01 = np.einsum("j,jl,l->", bc, rr[0, :, 1, :], b)
        return float(_objectives_from_blocks(k00, k11, k01, rho_a)[index])

    return fun


def _refine(rho: np.ndarray, kind: str, theta0: float, phi0: float, f0: float):
    fun = _scalar_objective(rho, kind)
    res = scipy.optimize.minimize(
        fun, x0=np.array([theta0, phi0]), method="Nelder-Mead", options=_NM_OPTIONS
    )
    if np.isfinite(res.fun) and res.fun < f0:
        value, (theta, phi) = float(res.fun), (float(res.x[0]), float(res.x[1]))
    else:
        value, (theta, phi) = f0, (theta0, phi0)
    if not np.isfinite(value):
        raise OptimizationError("measurement optimization diverged", best_value=f0)
    theta, phi = _canonical_angles(theta, phi)
    return value, MeasurementBasis(theta, phi), int(res.nfev)


def _minimize_objective(rho: np.ndarray, kind: str):
    """Coarse grid plus simplex refinement of one objective on one state."""
    cc_obj, wd_obj, thetas, phis = _grid_objectives(rho[None])
    obj = cc_obj[0] if kind == "conditional" else wd_obj[0]
    best = int(np.argmin(obj))
    value, basis, nfev = _refine(rho, kind, thetas[best], phis[best], float(obj[best]))
    return value, basis, nfev + obj.size


def _minimize_objective_batch(rhos: np.ndarray, kind: str) -> np.ndarray:
    cc_obj, wd_obj, thetas, phis = _grid_objectives(rhos)
    grid = cc_obj if kind == "conditional" else wd_obj
    best = np.argmin(grid, axis=1)
    out = np.empty(rhos.shape[0])
    for s in range(rhos.shape[0]):
        b = int(best[s])
        out[s] = _refine(rhos[s], kind, thetas[b], phis[b], float(grid[s, b]))[0]
    return out


def _clamped(value: float, name: str) -> float:
    if value < -MEASURE_TOL:
        raise OptimizationError(f"{name} evaluated to {value:.3e} < -{MEASURE_TOL}", best_value=value)
    return max(0.0, value)


def classical_correlation(rho: np.ndarray) -> MeasureResult:
    """J = S(A) - min over projective measurements on B of the conditional
    entropy, in bits."""
    rho = _check_two_qubit(rho)
    rho_a, _ = _marginals(rho[None])
    s_a = _entropy_from_eigenvalues(np.linalg.eigvalsh(rho_a[0]))
    cond, basis, nfev = _minimize_objective(rho, "conditional")
    return MeasureResult(_clamped(s_a - cond, "classical correlation"), basis, nfev)


def quantum_discord(rho: np.ndarray) -> MeasureResult:
    """Mutual information minus classical correlation, in bits."""
    rho = _check_two_qubit(rho)
    _, rho_b = _marginals(rho[None])
    s_b = _entropy_from_eigenvalues(np.linalg.eigvalsh(rho_b[0]))
    s_ab = _entropy_from_eigenvalues(np.linalg.eigvalsh(rho))
    cond, basis, nfev = _minimize_objective(rho, "conditional")
    return MeasureResult(_clamped(s_b - s_ab + cond, "quantum discord"), basis, nfev)


def work_deficit(rho: np.ndarray) -> MeasureResult:
    """Global minus local extractable pure qubits,
    W = min_basis S(dephased rho) - S(rho), in bits."""
    rho = _check_two_qubit(rho)
    s_ab = _entropy_from_eigenvalues(np.linalg.eigvalsh(rho))
    dephased, basis, nfev = _minimize_objective(rho, "dephased")
    return MeasureResult(_clamped(dephased - s_ab, "work deficit"), basis, nfev)


def classical_correlation_batch(rhos: np.ndarray) -> np.ndarray:
    rhos = np.asarray(rhos, dtype=complex)
    rho_a, _ = _marginals(rhos)
    s_a = _entropy_batch(np.linalg.eigvalsh(rho_a))
    cond = _minimize_objective_batch(rhos, "conditional")
    return np.maximum(0.0, s_a - cond)


def quantum_discord_batch(rhos: np.ndarray) -> np.ndarray:
    rhos = np.asarray(rhos, dtype=complex)
    _, rho_b = _marginals(rhos)
    s_b = _entropy_batch(np.linalg.eigvalsh(rho_b))
    s_ab = _entropy_batch(np.linalg.eigvalsh(rhos))
    cond = _minimize_objective_batch(rhos, "conditional")
    return np.maximum(0.0, s_b - s_ab + cond)


def work_deficit_batch(rhos: np.ndarray) -> np.ndarray:
    rhos = np.asarray(rhos, dtype=complex)
    s_ab = _entropy_batch(np.linalg.eigvalsh(rhos))
    dephased = _minimize_objective_batch(rhos, "dephased")
    return np.maximum(0.0, dephased - s_ab)
