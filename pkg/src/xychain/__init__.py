"""Quenched-averaged quantum correlations in disordered XY chains."""

__version__ = "0.1.0"

from .ensemble import (
    OBSERVABLES,
    QuenchedEstimate,
    SelfAveragingGap,
    quenched_average,
    quenched_average_adaptive,
    quenched_average_multi,
    self_averaging_gap,
    self_averaging_gaps,
    site_average,
)
from .measures import (
    MeasureResult,
    MeasurementBasis,
    classical_correlation,
    concurrence,
    log_negativity,
    mutual_information,
    quantum_discord,
    von_neumann_entropy,
    work_deficit,
)
from .model import (
    DisorderSpec,
    ModelSpec,
    QuadraticForm,
    build_quadratic_form,
    sample_disorder,
    uniform_chain,
)
from .oracle import DenseSpinSystem, build_dense, exact_two_site
from .scores import (
    SamplingPlan,
    ScorePoint,
    TotalScorePoint,
    enhancement_score,
    sweep,
    total_enhancement_score,
)
from .solver import (
    CorrelationMatrix,
    FermionSpectrum,
    correlation_matrix_ground,
    correlation_matrix_thermal,
    diagonalize,
)
from .states import TwoSiteState, magnetization, realize_density_matrix, two_site_state

__all__ = [
    "OBSERVABLES",
    "QuenchedEstimate",
    "SelfAveragingGap",
    "quenched_average",
    "quenched_average_adaptive",
    "quenched_average_multi",
    "self_averaging_gap",
    "self_averaging_gaps",
    "site_average",
    "MeasureResult",
    "MeasurementBasis",
    "classical_correlation",
    "concurrence",
    "log_negativity",
    "mutual_information",
    "quantum_discord",
    "von_neumann_entropy",
    "work_deficit",
    "DisorderSpec",
    "ModelSpec",
    "QuadraticForm",
    "build_quadratic_form",
    "sample_disorder",
    "uniform_chain",
    "DenseSpinSystem",
    "build_dense",
    "exact_two_site",
    "SamplingPlan",
    "ScorePoint",
    "TotalScorePoint",
    "enhancement_score",
    "sweep",
    "total_enhancement_score",
    "CorrelationMatrix",
    "FermionSpectrum",
    "correlation_matrix_ground",
    "correlation_matrix_thermal",
    "diagonalize",
    "TwoSiteState",
    "magnetization",
    "realize_density_matrix",
    "two_site_state",
]
