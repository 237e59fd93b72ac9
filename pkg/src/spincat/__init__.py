"""spincat: two-step QND measurement simulator for collective-spin
squeezed and cat states, plus an experimental feasibility calculator."""

from .cat import (
    CatApproxParams,
    CatMetrics,
    approx_p_wavefunction,
    approx_x_wavefunction,
    check_cat_conditions,
    compute_cat_metrics,
    detect_peaks,
    fringe_metrics,
    overlap,
)
from .errors import (
    CapacityError,
    DegenerateStateError,
    DomainError,
    ImprobableOutcomeError,
    NoCatError,
    NoFringeError,
    ResolutionError,
    SpinCatError,
)
from .feasibility import (
    PRESETS,
    ExperimentalParams,
    FeasibilityReport,
    SampleGeometry,
    evaluate_scenario,
)
from .protocol import (
    MeasurementOutcome,
    MeasurementStep,
    NumberQndParams,
    ProtocolTrace,
    SqueezeParams,
    alpha_from_xi2,
    apply_number_qnd,
    conditional_first_step,
    mu_of_outcome,
    outcome_density_second,
    quadrature_variances,
    sample_first_outcome,
    sample_second_outcome,
    squeezed_state_exact,
    squeezed_state_stirling,
)
from .state import (
    Basis,
    NumberState,
    QuadratureGrid,
    QuadratureWavefunction,
    RandomSource,
    choose_truncation,
    default_cat_grid,
    fourier_pair,
    grid_for_state,
    hermite_basis,
    hermite_osc_eigenfunction,
    mean_occupation,
    norm,
    normalize,
    quadrature_moment,
    riemann_norm,
    riemann_normalize,
    to_quadrature,
)

__version__ = "0.1.0"
