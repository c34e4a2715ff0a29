"""Post-processing of eigenvalue and zero-error measurements."""

from .dataset import (
    FitResult,
    SweepDataset,
    SweepRow,
    c100_log10_sequence,
    dataset_from_records,
    fixture_table,
    fixtures,
    log10_decimal,
    sweep_fixture,
)
from .eigvec import DecayGroup, overlap, overlap_decay_fit, overlap_matrix, pca
from .extrapolation import AitkenReport, Prediction, aitken, aitken_report, continuum_components, continuum_prediction
from .fits import (
    PASS_THRESHOLD,
    blind_test,
    fit_linear_ls,
    fit_log_periodic,
    fit_models_m1_m8,
    log_ratio_coupling,
    multi_zero_rates,
    power_law_refit,
    predict_log_periodic,
    prime_counts,
    ratio_coupling_fit,
    sobolev_exponent,
    sobolev_scaling_fit,
)
from .floor import BINS, FloorBin, below_floor, classify_floor, floor_estimate
from .rmt import brody_fit, ks_distance, unfold_spectrum, wigner_samples
from .steps import Step, StepReport, coefficient_of_variation, per_prime_decomposition

__all__ = [name for name in dir() if not name.startswith("_")]
