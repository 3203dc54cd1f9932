"""Covariance-based bipartite entanglement measure G."""
from .errors import *  # noqa: F401,F403
from .estimation import EstimationReport, MeasurementSetting, estimate_g, plan_settings, simulate_counts
from .generators import GeneratorSet, gell_mann_set, mub_generator_set, validate_generator_set
from .measures import (
    CorrelatedMixture,
    InvariantReport,
    MeasureResult,
    correlated_mixture_g,
    covariance,
    g_covariance,
    g_from_invariants,
    g_hilbert_schmidt,
    g_pure_schmidt,
    i_concurrence_squared,
    invariants,
    isotropic_g,
    isotropic_state,
    maximize_correlated_g,
    separability_verdict,
    three_concurrence,
)
from .mub import MubFamily, WeylPair, build_mub, certify_unbiasedness, mub_projectors, weyl_pair
from .states import (
    BlochExpansion,
    DensityMatrix,
    PureState,
    SchmidtSpectrum,
    bloch_expand,
    bloch_reconstruct,
    expectation,
    make_density,
    make_pure,
    partial_trace,
    random_local_unitary,
    random_mixed_state,
    random_pure_state,
    random_separable_mixed,
    schmidt_decompose,
)

__version__ = "0.1.0"
