"""Pseudospectral laboratory for the Benjamin-Ono equation.

A numpy/scipy library for the periodic-domain study of the nonlocal
dispersive equation u_t + H u_xx + u u_x = 0: Fourier multiplier
operators (Hilbert transform, fractional and Bessel derivatives, the free
propagator), exponential time integrators with exact traveling-wave
oracles, conservation-law tracking, Muckenhoupt-weight machinery, and
weighted-decay experiments run as persisted, reproducible records.
"""

__version__ = "0.1.0"

from .grid import Field, SpectralField, SpectralGrid, forward_transform, inverse_transform
from .operators import (
    bessel_potential,
    fractional_derivative,
    half_derivative_commutator,
    hilbert_commutator,
    hilbert_transform,
    linear_propagator,
    propagated_position,
    spatial_derivative,
)
from .dynamics import (
    BlowUpDetected,
    CFLViolation,
    SolverConfig,
    Trajectory,
    rhs_nonlinear,
    solve,
    soliton,
    step,
    zero_mean_projection,
)
from .invariants import (
    BoundaryContaminationWarning,
    NormTrace,
    first_moment,
    fit_moment_slope,
    hamiltonian,
    invariant_traces,
    mass,
    momentum,
)
from .weights import (
    A2ScanResult,
    WeightSpec,
    a2_constant,
    a2_uniformity_scan,
    evaluate_weight,
    interpolation_ratio,
    weighted_hilbert_ratio,
    weighted_l2_norm,
    weighted_sobolev_norm,
)
from .stein import (
    EquivalenceReport,
    LeibnizReport,
    PhaseBoundReport,
    SteinEvaluation,
    dispersive_phase,
    leibniz_check,
    phase_pointwise_bound,
    stein_derivative,
    stein_norm_equivalence,
    stein_profile,
)
from .experiments import (
    ExperimentConfig,
    ExperimentRecord,
    build_datum,
    decay_barrier_experiment,
    environment_fingerprint,
    gaussian_with_vanishing_moments,
    linear_moment_condition_experiment,
    mean_threshold_experiment,
    persistence_experiment,
    phase_expansion_terms,
    run_sweep,
)
