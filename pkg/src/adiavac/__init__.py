"""Adiabatic vacuum states for the Klein-Gordon field on Robertson-Walker
backgrounds with three-sphere spatial sections.

The library builds order-n adiabatic frequencies by an exact jet
recursion, turns them into pure quasifree mode states, transports mode
functions with an adaptive integrator, and measures the structural
claims behind the construction: decay order of the frequency updates,
Bogoliubov coefficients between orders, degeneracy-weighted tails,
Sobolev norm equivalence, and windowed detector response. The `adiavac`
command line runs bundles of these experiments from a TOML config.
"""

from ._version import __version__
from .adiabatic import (
    AdiabaticFrequency,
    FrequencyChain,
    SymbolOrderProbe,
    adiabatic_frequency,
    rj_multipliers,
    symbol_order_probe,
)
from .background import ModeChannel, ScaleFactorModel, omega_jet, omega_sq_jet
from .bogoliubov import (
    BogoliubovPair,
    ParticleNumbers,
    TraceDiagnostics,
    bogoliubov_from_modes,
    klein_gordon_bracket,
    order_vs_order_pair,
    order_vs_order_scan,
    particle_number_evolution,
    trace_diagnostics,
)
from .config import ExperimentConfig, load_config, parse_config
from .detector import (
    ResponseCurve,
    WindowFunction,
    bound_exponent,
    detector_response,
    slope_fit,
)
from .errors import (
    AdiavacError,
    ConfigInvalid,
    CutoffInadequate,
    DegenerateFit,
    DivisionByZeroJet,
    FrequencySquaredNonPositive,
    InsufficientPoints,
    JetMismatch,
    MasslessZeroMode,
    NegativeSqrtJet,
    NonPositiveScaleFactor,
    NotNormalized,
    OrderUnavailable,
    StepSizeUnderflow,
    ToleranceNotMet,
)
from .fitting import PowerLawFit, fit_loglog
from .jets import Jet
from .modes import (
    ModeInitialData,
    ModeTrajectory,
    adiabatic_initial_data,
    require_normalized,
    solve_mode,
    solve_mode_batch,
    static_exact_solution,
    wronskian,
)
from .rungekutta import StepStats, integrate
from .states import (
    ModeQuasifreeState,
    SobolevComparison,
    lambda_matrix_from_mode,
    mu_energy,
    mu_sobolev_ratio,
    one_particle_map,
    purity_check,
    sobolev_mode_norm,
    state_from_frequency,
)

__all__ = [
    "__version__",
    "AdiabaticFrequency",
    "AdiavacError",
    "BogoliubovPair",
    "ConfigInvalid",
    "CutoffInadequate",
    "DegenerateFit",
    "DivisionByZeroJet",
    "ExperimentConfig",
    "FrequencyChain",
    "FrequencySquaredNonPositive",
    "InsufficientPoints",
    "Jet",
    "JetMismatch",
    "MasslessZeroMode",
    "ModeChannel",
    "ModeInitialData",
    "ModeQuasifreeState",
    "ModeTrajectory",
    "NegativeSqrtJet",
    "NonPositiveScaleFactor",
    "NotNormalized",
    "OrderUnavailable",
    "ParticleNumbers",
    "PowerLawFit",
    "ResponseCurve",
    "ScaleFactorModel",
    "SobolevComparison",
    "StepSizeUnderflow",
    "StepStats",
    "SymbolOrderProbe",
    "ToleranceNotMet",
    "TraceDiagnostics",
    "WindowFunction",
    "adiabatic_frequency",
    "adiabatic_initial_data",
    "bogoliubov_from_modes",
    "bound_exponent",
    "detector_response",
    "fit_loglog",
    "integrate",
    "klein_gordon_bracket",
    "lambda_matrix_from_mode",
    "load_config",
    "mu_energy",
    "mu_sobolev_ratio",
    "omega_jet",
    "omega_sq_jet",
    "one_particle_map",
    "order_vs_order_pair",
    "order_vs_order_scan",
    "parse_config",
    "particle_number_evolution",
    "purity_check",
    "require_normalized",
    "rj_multipliers",
    "slope_fit",
    "sobolev_mode_norm",
    "solve_mode",
    "solve_mode_batch",
    "state_from_frequency",
    "static_exact_solution",
    "symbol_order_probe",
    "trace_diagnostics",
    "wronskian",
]
