"""Outage probability of Rayleigh-fading MIMO channels.

Exact outage probabilities via Mellin inversion of the capacity
variable's moment function, closed-form high-SNR asymptotes with a
diversity / coding gain / correlation / power-allocation decomposition,
and a counter-based Monte Carlo estimator for cross-checking both.
Transmit and receive correlation follow the separable (Kronecker)
model and enter through their eigenvalue spectra.

The usual entry points:

- ``outage_exact(scenario, cfg)`` for the exact probability,
- ``outage_asymptotic(scenario, cfg)`` for the high-SNR asymptote,
- ``estimate_outage(scenario, cfg, n_samples, seed)`` for simulation,
- ``unified_asymptote(scenario, cfg)`` for the factor decomposition,
- ``run_all_checks()`` for the structural self-tests.
"""

from .asymptotic import (
    AsymptoteDecomposition,
    asym_full,
    asym_independent,
    asym_semi,
    coding_gain,
    diversity_order,
    outage_asymptotic,
    power_allocation_factor,
    spatial_correlation_factor,
    unified_asymptote,
    unified_asymptote_effective,
)
from .errors import (
    DimensionMismatch,
    LengthMismatch,
    MimoOutageError,
    NonConvergence,
    NonDistinctSpectrum,
    PermutationBudgetExceeded,
    TraceViolation,
)
from .exact import (
    outage_exact,
    outage_full,
    outage_independent,
    outage_semi,
    phi_independent,
    phi_semi,
)
from .model import (
    MODELS,
    ChannelScenario,
    EigenSpectrum,
    OutageResult,
    SystemConfig,
    interchange_normalize,
    validate_scenario,
)
from .montecarlo import (
    McEstimate,
    effective_tx_correlation,
    estimate_outage,
    estimate_outage_sweep,
    mutual_information,
    sample_channel,
)
from .properties import (
    CHECK_NAMES,
    CheckRecord,
    convexity_scan,
    lemma1_reduction_check,
    majorizes,
    run_all_checks,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoteDecomposition",
    "ChannelScenario",
    "CheckRecord",
    "CHECK_NAMES",
    "DimensionMismatch",
    "EigenSpectrum",
    "LengthMismatch",
    "McEstimate",
    "MimoOutageError",
    "MODELS",
    "NonConvergence",
    "NonDistinctSpectrum",
    "OutageResult",
    "PermutationBudgetExceeded",
    "SystemConfig",
    "TraceViolation",
    "asym_full",
    "asym_independent",
    "asym_semi",
    "coding_gain",
    "convexity_scan",
    "diversity_order",
    "effective_tx_correlation",
    "estimate_outage",
    "estimate_outage_sweep",
    "interchange_normalize",
    "lemma1_reduction_check",
    "majorizes",
    "mutual_information",
    "outage_asymptotic",
    "outage_exact",
    "outage_full",
    "outage_independent",
    "outage_semi",
    "phi_independent",
    "phi_semi",
    "power_allocation_factor",
    "run_all_checks",
    "sample_channel",
    "spatial_correlation_factor",
    "unified_asymptote",
    "unified_asymptote_effective",
    "validate_scenario",
    "__version__",
]
