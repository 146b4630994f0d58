"""Disordered anisotropic XY chains in a transverse field.

A chain of N spin-1/2 sites carries bond couplings J_i (bond i connects
sites i and i+1) and on-site transverse fields h_i:

    H = sum_i J_i/4 [(1+gamma) X_i X_{i+1} + (1-gamma) Y_i Y_{i+1}]
        - sum_i h_i/2 Z_i.

The Jordan-Wigner image is the quadratic fermion form
c^dag A c + 1/2 (c^dag B c^dag + h.c.) with A symmetric and B
antisymmetric,

    A[i, i+1] = A[i+1, i] = J_i / 2,      A[i, i] = -h_i,
    B[i, i+1] = gamma J_i / 2 = -B[i+1, i].

Periodic chains use the c-cyclic convention: the wrap bond (N-1, 0)
carries the same 1/2 and gamma/2 prefactors as bulk bonds and no
parity-dependent boundary sign.  Open chains drop the wrap bond, in
which case the fermion mapping is exact and the last coupling entry is
unused.  Sites are indexed 0..N-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PERIODIC = "periodic"
OPEN = "open"
BOUNDARIES = (PERIODIC, OPEN)

COUPLING = "coupling"
FIELD = "field"
DISORDER_TARGETS = (COUPLING, FIELD)


def _as_locked_vector(values, n: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{name} must have length {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """One chain realization: size, anisotropy, per-site parameters, boundary."""

    n_sites: int
    gamma: float
    couplings: np.ndarray
    fields: np.ndarray
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.gamma == 0.0:
            raise ValueError("gamma must be nonzero")
        if not np.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        object.__setattr__(self, "couplings", _as_locked_vector(self.couplings, self.n_sites, "couplings"))
        object.__setattr__(self, "fields", _as_locked_vector(self.fields, self.n_sites, "fields"))

    @property
    def n_bonds(self) -> int:
        return self.n_sites if self.boundary == PERIODIC else self.n_sites - 1


def uniform_chain(n_sites: int, gamma: float, coupling: float, field_strength: float,
                  boundary: str = PERIODIC) -> ModelSpec:
    """Ordered chain with site-independent coupling and field."""
    return ModelSpec(
        n_sites=n_sites,
        gamma=gamma,
        couplings=np.full(n_sites, float(coupling)),
        fields=np.full(n_sites, float(field_strength)),
        boundary=boundary,
    )


@dataclass(frozen=True)
class DisorderSpec:
    """Gaussian i.i.d. disorder on one parameter, the other held constant.

    ``target`` selects which sequence is random ("coupling" or "field");
    ``other_value`` is the uniform value of the non-random parameter.
    ``std_dev = 0`` reproduces the ordered chain exactly.
    """

    target: str
    mean: float
    std_dev: float
    other_value: float = 1.0

    def __post_init__(self):
        if self.target not in DISORDER_TARGETS:
            raise ValueError(f"target must be one of {DISORDER_TARGETS}, got {self.target!r}")
        if not (self.std_dev >= 0.0):
            raise ValueError(f"std_dev must be >= 0, got {self.std_dev}")


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """Real matrices A (symmetric) and B (antisymmetric) of the fermion form."""

    a_matrix: np.ndarray
    b_matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.a_matrix, dtype=float)
        b = np.array(self.b_matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise ValueError(f"A and B must be square and same shape, got {a.shape}, {b.shape}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "b_matrix", b)

    @property
    def n_sites(self) -> int:
        return self.a_matrix.shape[0]


def build_quadratic_form(spec: ModelSpec) -> QuadraticForm:
    """Assemble the A/B matrices for a chain realization.

    Bulk bond i contributes J_i/2 to A[i, i+1] and A[i+1, i], and
    +/- gamma J_i/2 to B[i, i+1] / B[i+1, i].  The periodic wrap bond
    uses the last coupling with the same prefactors; open chains leave
    the wrap entries zero.
    """
    n = spec.n_sites
    j = spec.couplings
    a = np.diag(-spec.fields)
    b = np.zeros((n, n))

    half_j = 0.5 * j[:-1]
    a += np.diag(half_j, k=1) + np.diag(half_j, k=-1)
    b += np.diag(0.5 * spec.gamma * j[:-1], k=1) - np.diag(0.5 * spec.gamma * j[:-1], k=-1)

    if spec.boundary == PERIODIC:
        # wrap bond (N-1, 0), c-cyclic: same prefactors as bulk
        a[n - 1, 0] += 0.5 * j[-1]
        a[0, n - 1] += 0.5 * j[-1]
        b[n - 1, 0] += 0.5 * spec.gamma * j[-1]
        b[0, n - 1] -= 0.5 * spec.gamma * j[-1]

    return QuadraticForm(a_matrix=a, b_matrix=b)


def sample_disorder(base: ModelSpec, dis: DisorderSpec, rng: np.random.Generator) -> ModelSpec:
    """Draw one disorder realization from a chain template.

    The targeted parameter sequence is N independent Gaussian draws with
    ``dis.mean`` and ``dis.std_dev`` (negative draws are kept); the other
    sequence is uniform at ``dis.other_value``.  Only the template's
    structure (size, anisotropy, boundary) is read.
    """
    draws = rng.normal(dis.mean, dis.std_dev, base.n_sites)
    other = np.full(base.n_sites, float(dis.other_value))
    if dis.target == COUPLING:
        couplings, fields = draws, other
    else:
        couplings, fields = other, draws
    return ModelSpec(
        n_sites=base.n_sites,
        gamma=base.gamma,
        couplings=couplings,
        fields=fields,
        boundary=base.boundary,
    )
