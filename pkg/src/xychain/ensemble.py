"""Quenched Monte Carlo averaging over disorder realizations.

A quenched estimate is the mean over M independent realizations of the
per-realization site average (mean over all nearest-neighbor bonds) of
an observable.  Realization k of a run with seed s draws from the
dedicated stream SeedSequence((s, k)), so estimates are bit-identical
for any worker count and any evaluation order.  BLAS pools are capped
to one thread around realization work for the same reason.

The self-averaging gap compares the site average of one fresh large
realization against the quenched average; the two coincide for
self-averaging observables away from the critical region.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import threadpoolctl

from .measures import (
    classical_correlation_batch,
    concurrence_batch,
    log_negativity_batch,
    mutual_information_batch,
    quantum_discord_batch,
    work_deficit_batch,
)
from .model import PERIODIC, DisorderSpec, ModelSpec, build_quadratic_form, sample_disorder
from .solver import CorrelationMatrix, correlation_matrix_thermal, diagonalize
from .states import bond_fields, density_matrix_from_fields

OBSERVABLES = (
    "magnetization",
    "txx_raw",
    "tyy_raw",
    "tzz_raw",
    "tzz_connected",
    "concurrence",
    "log_negativity",
    "discord",
    "work_deficit",
    "classical_correlation",
    "mutual_information",
)

_MEASURE_FUNCTIONS = {
    "concurrence": concurrence_batch,
    "log_negativity": log_negativity_batch,
    "discord": quantum_discord_batch,
    "work_deficit": work_deficit_batch,
    "classical_correlation": classical_correlation_batch,
    "mutual_information": mutual_information_batch,
}

# reserved realization index for the fresh single realization used on the
# site-average side of the self-averaging gap
SITE_REALIZATION_KEY = 0x5E1F

_blas_capped = False
_blas_controller = None


class EnsembleError(RuntimeError):
    """A realization failed; the message carries the realization index
    and master seed needed to reproduce it."""


@dataclass(frozen=True)
class QuenchedEstimate:
    """Monte Carlo mean and standard error of one observable."""

    mean: float
    std_error: float
    n_realizations: int
    n_sites_averaged: int


@dataclass(frozen=True)
class SelfAveragingGap:
    gap: float
    site_average: float
    quenched_average: float


def realization_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Deterministic per-realization stream, independent of evaluation order."""
    return np.random.default_rng(np.random.SeedSequence((int(master_seed),) + tuple(int(p) for p in path)))


def derive_seed(master_seed: int, *path: int) -> int:
    """Fold (master_seed, path) into a single integer subseed."""
    seq = np.random.SeedSequence((int(master_seed),) + tuple(int(p) for p in path))
    return int(seq.generate_state(1, np.uint64)[0])


def _cap_blas_threads() -> None:
    # keep the controller alive so the limit persists in this process
    global _blas_capped, _blas_controller
    if not _blas_capped:
        _blas_controller = threadpoolctl.threadpool_limits(limits=1)
        _blas_capped = True


def _validate_observables(observables) -> tuple[str, ...]:
    observables = tuple(observables)
    for name in observables:
        if name not in OBSERVABLES:
            raise ValueError(f"unknown observable {name!r}; expected one of {OBSERVABLES}")
    return observables


def bond_observable_values(g: CorrelationMatrix, observable: str, boundary: str = PERIODIC) -> np.ndarray:
    """Per-bond values of one observable on a correlation matrix."""
    return _evaluate(g, (observable,), boundary)[1][0]


def site_average(g: CorrelationMatrix, observable: str, boundary: str = PERIODIC) -> float:
    """Mean of an observable over all bonds (N for periodic, N-1 for open)."""
    return float(np.mean(bond_observable_values(g, observable, boundary)))


def _evaluate(g: CorrelationMatrix, observables: tuple[str, ...], boundary: str):
    fields = bond_fields(g, boundary)
    rhos = None
    values = []
    for name in observables:
        if name == "magnetization":
            values.append(fields[:, 0])
        elif name == "txx_raw":
            values.append(fields[:, 2])
        elif name == "tyy_raw":
            values.append(fields[:, 3])
        elif name == "tzz_raw":
            values.append(fields[:, 4])
        elif name == "tzz_connected":
            values.append(fields[:, 4] - fields[:, 0] * fields[:, 1])
        else:
            if rhos is None:
                rhos = density_matrix_from_fields(fields).astype(complex)
            values.append(_MEASURE_FUNCTIONS[name](rhos))
    return fields.shape[0], values


def _site_averages_for_spec(spec: ModelSpec, observables: tuple[str, ...], beta: float) -> np.ndarray:
    g = correlation_matrix_thermal(diagonalize(build_quadratic_form(spec)), beta)
    _, values = _evaluate(g, observables, spec.boundary)
    return np.array([float(np.mean(v)) for v in values])


def _realization_site_averages(template: ModelSpec, dis: DisorderSpec, observables: tuple[str, ...],
                               beta: float, seed: int, k: int) -> np.ndarray:
    try:
        spec = sample_disorder(template, dis, realization_rng(seed, k))
        return _site_averages_for_spec(spec, observables, beta)
    except Exception as exc:
        raise EnsembleError(f"realization {k} (seed {seed}) failed: {exc}") from exc


def _chunk_worker(payload) -> np.ndarray:
    template, dis, observables, beta, seed, start, stop = payload
    _cap_blas_threads()
    return np.array([
        _realization_site_averages(template, dis, observables, beta, seed, k)
        for k in range(start, stop)
    ])


def quenched_values(template: ModelSpec, dis: DisorderSpec, observables, beta: float,
                    n_realizations: int, seed: int, workers: int = 1,
                    start: int = 0) -> np.ndarray:
    """Per-realization site averages for realizations
    start .. start + n_realizations - 1, shape (n_realizations, n_obs)."""
    observables = _validate_observables(observables)
    _cap_blas_threads()
    stop = start + n_realizations
    if workers <= 1 or n_realizations < 2 * workers:
        return _chunk_worker((template, dis, observables, beta, seed, start, stop))
    chunk = max(1, math.ceil(n_realizations / (4 * workers)))
    payloads = [
        (template, dis, observables, beta, seed, k0, min(k0 + chunk, stop))
        for k0 in range(start, stop, chunk)
    ]
    with ProcessPoolExecutor(max_workers=workers, initializer=_cap_blas_threads) as pool:
        parts = list(pool.map(_chunk_worker, payloads))
    return np.concatenate(parts, axis=0)


def _estimates(values: np.ndarray, n_bonds: int) -> list[QuenchedEstimate]:
    m = values.shape[0]
    means = values.mean(axis=0)
    errs = values.std(axis=0, ddof=1) / math.sqrt(m)
    return [
        QuenchedEstimate(mean=float(mu), std_error=float(se), n_realizations=m, n_sites_averaged=n_bonds)
        for mu, se in zip(means, errs)
    ]


def quenched_average(template: ModelSpec, dis: DisorderSpec, observable: str, beta: float,
                     n_realizations: int, seed: int, workers: int = 1) -> QuenchedEstimate:
    """Quenched estimate of one observable from a fixed number of realizations."""
    if n_realizations < 2:
        raise ValueError(f"need at least 2 realizations, got {n_realizations}")
    values = quenched_values(template, dis, (observable,), beta, n_realizations, seed, workers)
    return _estimates(values, template.n_bonds)[0]


def quenched_average_multi(template: ModelSpec, dis: DisorderSpec, observables, beta: float,
                           n_realizations: int, seed: int, workers: int = 1) -> list[QuenchedEstimate]:
    """Quenched estimates for several observables sharing the same realizations."""
    if n_realizations < 2:
        raise ValueError(f"need at least 2 realizations, got {n_realizations}")
    values = quenched_values(template, dis, observables, beta, n_realizations, seed, workers)
    return _estimates(values, template.n_bonds)


def quenched_average_adaptive(template: ModelSpec, dis: DisorderSpec, observables, beta: float,
                              seed: int, workers: int = 1, *, target_std_error: float = 0.005,
                              min_realizations: int = 50, max_realizations: int = 2000,
                              batch_size: int = 50) -> list[QuenchedEstimate]:
    """Grow the realization count in fixed batches until every observable's
    standard error is below target (or the hard cap is hit).

    Batch boundaries are fixed, so the stopping point is deterministic and
    independent of worker count.
    """
    observables = _validate_observables(observables)
    values = quenched_values(template, dis, observables, beta, min_realizations, seed, workers)
    while values.shape[0] < max_realizations:
        m = values.shape[0]
        errs = values.std(axis=0, ddof=1) / math.sqrt(m)
        if np.all(errs <= target_std_error):
            break
        n_more = min(batch_size, max_realizations - m)
        more = quenched_values(template, dis, observables, beta, n_more, seed, workers, start=m)
        values = np.concatenate([values, more], axis=0)
    return _estimates(values, template.n_bonds)


def self_averaging_gaps(template: ModelSpec, dis: DisorderSpec, observables, beta: float,
                        n_realizations: int, seed: int, workers: int = 1,
                        ) -> tuple[list[SelfAveragingGap], list[QuenchedEstimate]]:
    """Gaps for several observables sharing realizations and the fresh
    single realization used on the site-average side; also returns the
    underlying quenched estimates."""
    observables = _validate_observables(observables)
    _cap_blas_threads()
    fresh = sample_disorder(template, dis, realization_rng(seed, SITE_REALIZATION_KEY))
    site = _site_averages_for_spec(fresh, observables, beta)
    quenched = quenched_average_multi(template, dis, observables, beta, n_realizations, seed, workers)
    gaps = [
        SelfAveragingGap(gap=float(s) - q.mean, site_average=float(s), quenched_average=q.mean)
        for s, q in zip(site, quenched)
    ]
    return gaps, quenched


def self_averaging_gap(template: ModelSpec, dis: DisorderSpec, observable: str, beta: float,
                       n_realizations: int, seed: int, workers: int = 1) -> SelfAveragingGap:
    """Site average of one fresh realization minus the quenched average."""
    return self_averaging_gaps(template, dis, (observable,), beta, n_realizations, seed, workers)[0][0]
