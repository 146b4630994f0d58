"""Enhancement scores: disordered vs ordered chains at matched parameters.

For an observable Q, the score at a sweep point is

    delta = |Q_quenched(control)| - |Q_ordered(control)|,

with both sides evaluated at the same (control, beta, gamma, N) on
periodic chains of equal size.  The control parameter is the coupling
ratio for the spin-glass kind (disorder in the couplings, fields fixed
at 1) and the field ratio for the random-field kind (disorder in the
fields, couplings fixed at 1); with the fixed scale set to 1, the
scaled inverse temperature (h*beta or J*beta) equals beta numerically.

The total score compares thermal and zero-temperature enhancements:
total = delta(beta) - max(0, delta(ground)); positive values mark
points where disorder helps more at finite temperature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import (
    QuenchedEstimate,
    derive_seed,
    quenched_average_adaptive,
    quenched_average_multi,
    site_average,
)
from .model import PERIODIC, DisorderSpec, ModelSpec, build_quadratic_form, uniform_chain
from .solver import correlation_matrix_thermal, diagonalize

SPIN_GLASS = "spin_glass"
RANDOM_FIELD = "random_field"
MODEL_KINDS = (SPIN_GLASS, RANDOM_FIELD)


@dataclass(frozen=True)
class SamplingPlan:
    """How many disorder realizations to draw per sweep point."""

    mode: str = "adaptive"  # "fixed" | "adaptive"
    n_realizations: int = 200
    target_std_error: float = 0.005
    min_realizations: int = 50
    max_realizations: int = 2000
    batch_size: int = 50

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError(f"mode must be 'fixed' or 'adaptive', got {self.mode!r}")


@dataclass(frozen=True)
class ScorePoint:
    control: float
    beta_scaled: float
    observable: str
    delta: float
    delta_std_error: float
    quenched: QuenchedEstimate
    ordered_value: float


@dataclass(frozen=True)
class TotalScorePoint:
    control: float
    beta_scaled: float
    observable: str
    delta: float
    delta_std_error: float
    quenched: QuenchedEstimate
    ordered_value: float
    zero_t_delta: float
    total: float
    total_std_error: float


@dataclass(frozen=True)
class SweepRecord:
    """One (control, beta, observable) row of a sweep table."""

    control: float
    beta_scaled: float
    observable: str
    quenched_mean: float | None = None
    quenched_std_error: float | None = None
    ordered_value: float | None = None
    delta: float | None = None
    total_delta: float | None = None
    n_realizations: int | None = None
    error: str | None = None


def disordered_problem(model_kind: str, control: float, sigma: float, gamma: float,
                       n_sites: int, boundary: str = PERIODIC) -> tuple[ModelSpec, DisorderSpec]:
    """Template and disorder description for one sweep point."""
    if model_kind == SPIN_GLASS:
        template = uniform_chain(n_sites, gamma, control, 1.0, boundary)
        dis = DisorderSpec(target="coupling", mean=control, std_dev=sigma, other_value=1.0)
    elif model_kind == RANDOM_FIELD:
        template = uniform_chain(n_sites, gamma, 1.0, control, boundary)
        dis = DisorderSpec(target="field", mean=control, std_dev=sigma, other_value=1.0)
    else:
        raise ValueError(f"model_kind must be one of {MODEL_KINDS}, got {model_kind!r}")
    return template, dis


def ordered_reference(model_kind: str, control: float, gamma: float, n_sites: int,
                      boundary: str = PERIODIC) -> ModelSpec:
    return disordered_problem(model_kind, control, 0.0, gamma, n_sites, boundary)[0]


def ordered_value(model_kind: str, control: float, beta_scaled: float, observable: str,
                  gamma: float, n_sites: int, boundary: str = PERIODIC) -> float:
    """Observable of the ordered chain at the same sweep point."""
    spec = ordered_reference(model_kind, control, gamma, n_sites, boundary)
    g = correlation_matrix_thermal(diagonalize(build_quadratic_form(spec)), beta_scaled)
    return site_average(g, observable, boundary)


def _score_from_estimate(control, beta_scaled, observable, estimate, ordered) -> ScorePoint:
    return ScorePoint(
        control=control,
        beta_scaled=beta_scaled,
        observable=observable,
        delta=abs(estimate.mean) - abs(ordered),
        delta_std_error=estimate.std_error,
        quenched=estimate,
        ordered_value=ordered,
    )


def enhancement_score(control: float, beta_scaled: float, observable: str, model_kind: str,
                      gamma: float, n_sites: int, sigma: float, n_realizations: int,
                      seed: int, workers: int = 1, boundary: str = PERIODIC) -> ScorePoint:
    """Enhancement score at one sweep point with a fixed realization count.

    beta_scaled = +inf selects the ground-state pipeline.
    """
    template, dis = disordered_problem(model_kind, control, sigma, gamma, n_sites, boundary)
    estimate = quenched_average_multi(template, dis, (observable,), beta_scaled,
                                      n_realizations, seed, workers)[0]
    ordered = ordered_value(model_kind, control, beta_scaled, observable, gamma, n_sites, boundary)
    return _score_from_estimate(control, beta_scaled, observable, estimate, ordered)


def total_enhancement_score(control: float, beta_scaled: float, observable: str, model_kind: str,
                            gamma: float, n_sites: int, sigma: float, n_realizations: int,
                            seed: int, workers: int = 1, boundary: str = PERIODIC) -> TotalScorePoint:
    """Thermal score at beta_scaled combined with the ground-state score at
    the same control: total = delta(beta) - max(0, delta(ground))."""
    if math.isinf(beta_scaled):
        raise ValueError("total score needs a finite beta_scaled")
    thermal = enhancement_score(control, beta_scaled, observable, model_kind, gamma, n_sites,
                                sigma, n_realizations, derive_seed(seed, 0), workers, boundary)
    ground = enhancement_score(control, math.inf, observable, model_kind, gamma, n_sites,
                               sigma, n_realizations, derive_seed(seed, 1), workers, boundary)
    return TotalScorePoint(
        control=control,
        beta_scaled=beta_scaled,
        observable=observable,
        delta=thermal.delta,
        delta_std_error=thermal.delta_std_error,
        quenched=thermal.quenched,
        ordered_value=thermal.ordered_value,
        zero_t_delta=ground.delta,
        total=thermal.delta - max(0.0, ground.delta),
        total_std_error=math.hypot(thermal.delta_std_error, ground.delta_std_error),
    )


def _estimates_for_point(template, dis, observables, beta, seed, workers, plan: SamplingPlan):
    if plan.mode == "fixed":
        return quenched_average_multi(template, dis, observables, beta,
                                      plan.n_realizations, seed, workers)
    return quenched_average_adaptive(
        template, dis, observables, beta, seed, workers,
        target_std_error=plan.target_std_error,
        min_realizations=plan.min_realizations,
        max_realizations=plan.max_realizations,
        batch_size=plan.batch_size,
    )


def sweep(model_kind: str, gamma: float, n_sites: int, sigma: float,
          controls, betas, observables, seed: int, workers: int = 1,
          plan: SamplingPlan | None = None, totals: bool = True,
          boundary: str = PERIODIC) -> list[SweepRecord]:
    """Dense result table over a control x beta grid, row-major with the
    control index outer.

    Point seeds derive from (seed, point_index); ordered values and
    quenched estimates are cached per (control index, beta) and shared
    across observables and across the total-score companion lookups.
    When totals are requested and the grid lacks a ground-state row, a
    companion ground run is keyed past the grid's point indices.
    Failures are recorded per point and the sweep continues.
    """
    controls = [float(c) for c in controls]
    betas = [float(b) for b in betas]
    observables = tuple(observables)
    if not controls or not betas or not observables:
        raise ValueError("controls, betas and observables must be nonempty")
    plan = plan or SamplingPlan()
    n_points = len(controls) * len(betas)

    quenched_cache: dict = {}
    ordered_cache: dict = {}

    def point_estimates(ic: int, beta: float, point_seed: int):
        key = (ic, beta)
        if key not in quenched_cache:
            template, dis = disordered_problem(model_kind, controls[ic], sigma, gamma, n_sites, boundary)
            estimates = _estimates_for_point(template, dis, observables, beta, point_seed, workers, plan)
            quenched_cache[key] = dict(zip(observables, estimates))
        return quenched_cache[key]

    def point_ordered(ic: int, beta: float):
        key = (ic, beta)
        if key not in ordered_cache:
            spec = ordered_reference(model_kind, controls[ic], gamma, n_sites, boundary)
            g = correlation_matrix_thermal(diagonalize(build_quadratic_form(spec)), beta)
            ordered_cache[key] = {
                obs: site_average(g, obs, boundary) for obs in observables
            }
        return ordered_cache[key]

    records: list[SweepRecord] = []
    for ic in range(len(controls)):
        for ib, beta in enumerate(betas):
            point_index = ic * len(betas) + ib
            point_seed = derive_seed(seed, point_index)
            try:
                estimates = point_estimates(ic, beta, point_seed)
                ordered = point_ordered(ic, beta)
                ground_est = ground_ord = None
                if totals and not math.isinf(beta):
                    companion_seed = derive_seed(seed, n_points + ic)
                    ground_est = point_estimates(ic, math.inf, companion_seed)
                    ground_ord = point_ordered(ic, math.inf)
            except Exception as exc:
                for obs in observables:
                    records.append(SweepRecord(control=controls[ic], beta_scaled=beta,
                                               observable=obs, error=str(exc)))
                continue
            for obs in observables:
                est = estimates[obs]
                delta = abs(est.mean) - abs(ordered[obs])
                total_delta = None
                if ground_est is not None:
                    zero_t = abs(ground_est[obs].mean) - abs(ground_ord[obs])
                    total_delta = delta - max(0.0, zero_t)
                records.append(SweepRecord(
                    control=controls[ic],
                    beta_scaled=beta,
                    observable=obs,
                    quenched_mean=est.mean,
                    quenched_std_error=est.std_error,
                    ordered_value=ordered[obs],
                    delta=delta,
                    total_delta=total_delta,
                    n_realizations=est.n_realizations,
                ))
    return records
