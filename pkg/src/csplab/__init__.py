"""csplab: compression-code based compressed sensing laboratory.

Build fixed-rate codes with enumerable codebooks for structured signal
classes, measure signals with random Gaussian matrices or Wiener-integral
operators, recover them by exhaustive codeword pursuit, and compare the
empirical errors against closed-form guarantees.
"""

from .bounds import (BoundEvaluation, BoundInputs, FiniteDimRate,
                     IndistinguishablePair, OptimizationResult, ParameterError,
                     PolylogRate, PowerlawRate, chi2_tail,
                     construct_indistinguishable_pair, evaluate_bound,
                     measurement_budget, optimize_free_params,
                     singular_value_tail)
from .codecs import (CapacityError, Codec, DomainError, ExplicitCodec,
                     GridCodec, PiecewisePolyCodec, RateDistortionPoint,
                     SparseCodec, build_grid_codec, build_ppoly_codec,
                     build_sparse_codec, codec_from_config,
                     entropy_lower_bound, rd_profile)
from .harness import (ExperimentConfig, SweepPoint, SweepResult, TrialRecord,
                      build_panel, records_to_csv, run_sweep, run_trial,
                      run_trials, write_csv)
from .measurement import (MeasurementEnsemble, NoiseModel, WienerEnsemble,
                          apply_noise, measure, measure_analog,
                          sample_ensemble, sample_wiener_ensemble)
from .piecewise import (PiecewisePolynomial, constant_function,
                        piecewise_constant)
from .rng import (RandomStream, WienerPath, derive_stream, gaussian_matrix,
                  gaussian_vector, wiener_increment_matrix, wiener_path)
from .solver import (RecoveryResult, csp_recover, csp_recover_analog,
                     csp_recover_panel)
from .svgplot import emit_svg, render_svg

__version__ = "0.1.0"

__all__ = [
    "BoundEvaluation", "BoundInputs", "CapacityError", "Codec", "DomainError",
    "ExperimentConfig", "ExplicitCodec", "FiniteDimRate", "GridCodec",
    "IndistinguishablePair", "MeasurementEnsemble", "NoiseModel",
    "OptimizationResult", "ParameterError", "PiecewisePolyCodec",
    "PiecewisePolynomial", "PolylogRate", "PowerlawRate", "RandomStream",
    "RateDistortionPoint", "RecoveryResult", "SparseCodec", "SweepPoint",
    "SweepResult", "TrialRecord", "WienerEnsemble", "WienerPath",
    "apply_noise", "build_grid_codec", "build_panel", "build_ppoly_codec",
    "build_sparse_codec", "chi2_tail", "codec_from_config",
    "constant_function", "construct_indistinguishable_pair", "csp_recover",
    "csp_recover_analog", "csp_recover_panel", "derive_stream", "emit_svg",
    "entropy_lower_bound", "evaluate_bound", "gaussian_matrix",
    "gaussian_vector", "measure", "measure_analog", "measurement_budget",
    "optimize_free_params", "piecewise_constant", "rd_profile",
    "records_to_csv", "render_svg", "run_sweep", "run_trial", "run_trials",
    "sample_ensemble", "sample_wiener_ensemble", "singular_value_tail",
    "wiener_increment_matrix", "wiener_path", "write_csv",
]
