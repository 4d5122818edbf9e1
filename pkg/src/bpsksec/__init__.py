"""Secrecy capacities and two-way key agreement for Gaussian BPSK wiretap links."""

from ._kernels import QuadratureNonConvergence, backend_name
from .capacity import (
    CapacityResult,
    KINDS,
    c_ow_hard,
    c_ow_soft,
    c_tw_hard,
    c_tw_soft,
    capacity,
    mixture_entropy_bits,
)
from .channel import (
    ChannelParams,
    PhysicalLinkBudget,
    crossover_prob,
    eve_marginal_density,
    eve_posterior,
    to_normalized,
)
from .mathkit import DEFAULT_QUAD_SPEC, QuadratureSpec, bessel_j, binary_entropy, erfc, integrate
from .optimize import (
    OptimumPoint,
    SweepPoint,
    crossing_threshold_fixed_eta,
    crossing_threshold_optimized,
    default_eta_bounds,
    optimize_eta,
    sweep_gamma,
)
from .protosim import (
    EmpiricalStats,
    LeakageResult,
    ProtocolConfig,
    SecretKeyResult,
    Transcript,
    estimate_stats,
    leakage_exhaustive,
    run_rounds,
    simulate_secret_key,
    toeplitz_hash,
)
from .satgeo import (
    AntennaPattern,
    PRESETS,
    ScenarioGeometry,
    ScenarioPreset,
    ScenarioRow,
    alpha,
    beta,
    gamma_ratio,
    load_scenario_config,
    scenario_table,
    worst_case_gamma,
)

__version__ = "0.1.0"
