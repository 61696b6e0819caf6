"""High-SNR outage asymptotics and the diversity/gain decomposition.

All three correlation models share one high-SNR structure,

    p_out  ~  P(R_x) * S(R_t, R_r) * (C(R) rho)^{-d},

with full diversity d = n_t n_r, a coding gain C(R) driven by a single
rate kernel g_0, and correlation/power penalties that are pure
determinant factors.  The kernels come from ``residues`` in exact
rational arithmetic, so the asymptote costs microseconds and is reliable
arbitrarily deep in the tail where quadrature and simulation both fail.

The semi- and fully-correlated asymptotes deliberately reuse the
independent permutation kernel (the theorems share it) while the full
model runs through the Gamma-ratio kernel; the two routes are equal by
the permutation identity and their agreement is part of the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    ChannelScenario,
    EigenSpectrum,
    OutageResult,
    SystemConfig,
    _power_profile,
    as_spectrum,
    validate_scenario,
)
from .residues import evaluate, g_n_full, sigma_sum_polynomial

__all__ = [
    "AsymptoteDecomposition",
    "asym_independent",
    "asym_semi",
    "asym_full",
    "diversity_order",
    "coding_gain",
    "spatial_correlation_factor",
    "power_allocation_factor",
    "unified_asymptote",
    "unified_asymptote_effective",
    "outage_asymptotic",
]

# Rounding slack for factors that are >= 1 analytically.
_UNIT_SLACK = 1e-12


@dataclass(frozen=True)
class AsymptoteDecomposition:
    """The assembled high-SNR law p ~ P * S * (C rho)^{-d}.

    ``probability`` is computed as exactly that product, so the assembly
    identity holds bitwise.  ``correlation_factor`` and ``power_factor``
    are >= 1 for trace-normalized spectra: correlation and non-uniform
    power allocation only ever cost outage at high SNR.  When the power
    shaping has been absorbed into an effective transmit spectrum the two
    factors merge into ``correlation_factor`` and the merge is flagged.
    """

    diversity_order: int
    coding_gain: float
    correlation_factor: float
    power_factor: float
    probability: float
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not (isinstance(self.diversity_order, int) and self.diversity_order >= 1):
            raise ValueError("diversity order must be a positive integer")
        if not self.coding_gain > 0:
            raise ValueError("coding gain must be positive")
        if self.correlation_factor < 1.0 - _UNIT_SLACK:
            raise ValueError("correlation factor must be >= 1")
        if self.power_factor < 1.0 - _UNIT_SLACK:
            raise ValueError("power factor must be >= 1")
        if not (self.probability >= 0 and math.isfinite(self.probability)):
            raise ValueError("probability must be finite and non-negative")


def _norm_dims(cfg: SystemConfig) -> SystemConfig:
    if cfg.n_t >= cfg.n_r:
        return cfg
    return SystemConfig(n_t=cfg.n_r, n_r=cfg.n_t, rate=cfg.rate, snr_db=cfg.snr_db)


def _g0(cfg: SystemConfig) -> float:
    cfg = _norm_dims(cfg)
    return evaluate(g_n_full((0,) * cfg.n_r, cfg), cfg.threshold)


def _asym_result(value: float) -> OutageResult:
    # The expression is exact rational up to a handful of float roundings;
    # values above 1 just mark the asymptote outside its validity range.
    prob = min(value, 1.0)
    flags = ("clamped",) if value > 1.0 else ()
    return OutageResult(
        probability=prob,
        raw_value=value,
        err_estimate=4e-16 * value,
        method="asym",
        flags=flags,
    )


def diversity_order(cfg: SystemConfig) -> int:
    """Diversity order d = n_t * n_r (full diversity for all models)."""
    return cfg.n_t * cfg.n_r


def coding_gain(cfg: SystemConfig) -> float:
    """Coding and modulation gain C(R) = g_0(2^R)^{-1/(n_t n_r)}.

    Interchange-symmetric in the antenna counts; returns inf at rate 0,
    where the asymptote is exactly zero.
    """
    g0 = _g0(cfg)
    if g0 == 0.0:
        return math.inf
    return g0 ** (-1.0 / diversity_order(cfg))


def asym_independent(cfg: SystemConfig) -> OutageResult:
    """High-SNR outage asymptote of the uncorrelated channel.

    Evaluates rho^{-n_t n_r} times the permutation-kernel rate sum; exact
    rational up to final rounding, valid once the exact probability falls
    below roughly 1e-4.
    """
    cfg = _norm_dims(cfg)
    rate_sum = evaluate(
        sigma_sum_polynomial(cfg.n_t, cfg.n_r), cfg.threshold
    )
    return _asym_result(rate_sum * cfg.rho ** (-diversity_order(cfg)))


def asym_semi(
    cfg: SystemConfig, r_spectrum, side: str = "rx"
) -> OutageResult:
    """High-SNR asymptote with one-sided correlation.

    The rate kernel is the independent one; correlation enters only as
    det(R)^{-m} where m is the uncorrelated side's antenna count.
    Identity spectra are accepted here (the closed form is continuous in
    the spectrum) even though the exact evaluator rejects them.
    """
    if side not in ("rx", "tx"):
        raise ValueError(f"side must be 'rx' or 'tx', got {side!r}")
    if side == "tx":
        cfg = SystemConfig(
            n_t=cfg.n_r, n_r=cfg.n_t, rate=cfg.rate, snr_db=cfg.snr_db
        )
    spectrum = as_spectrum(r_spectrum, cfg.n_r, "correlation spectrum")
    det_r = math.prod(spectrum.values)
    base = asym_independent(cfg)
    return _asym_result(base.raw_value * det_r ** (-cfg.n_t))


def asym_full(cfg: SystemConfig, t_spectrum, r_spectrum) -> OutageResult:
    """High-SNR asymptote with correlation on both sides.

    p ~ rho^{-n_t n_r} det(R_r)^{-n_t} det(R_t)^{-n_r} g_0(2^R), via the
    Gamma-ratio kernel (the permutation route is the cross-check).
    Identity spectra are accepted as formula limits and reproduce the
    independent and semi-correlated asymptotes.
    """
    t_spec = as_spectrum(t_spectrum, cfg.n_t, "transmit spectrum")
    r_spec = as_spectrum(r_spectrum, cfg.n_r, "receive spectrum")
    if cfg.n_t < cfg.n_r:
        cfg = SystemConfig(
            n_t=cfg.n_r, n_r=cfg.n_t, rate=cfg.rate, snr_db=cfg.snr_db
        )
        t_spec, r_spec = r_spec, t_spec
    value = (
        _g0(cfg)
        * cfg.rho ** (-diversity_order(cfg))
        * math.prod(r_spec.values) ** (-cfg.n_t)
        * math.prod(t_spec.values) ** (-cfg.n_r)
    )
    return _asym_result(value)


def spatial_correlation_factor(t_spectrum, r_spectrum, cfg: SystemConfig) -> float:
    """Correlation penalty S(R_t, R_r) = det(R_r)^{-n_t} det(R_t)^{-n_r}.

    Equals 1 for identity spectra and is >= 1 for any trace-normalized
    spectra (determinants are at most 1 by the arithmetic-geometric mean
    inequality), quantifying how correlation shifts the outage curve.
    """
    t_spec = as_spectrum(t_spectrum, cfg.n_t, "transmit spectrum")
    r_spec = as_spectrum(r_spectrum, cfg.n_r, "receive spectrum")
    return (
        math.prod(r_spec.values) ** (-cfg.n_t)
        * math.prod(t_spec.values) ** (-cfg.n_r)
    )


def power_allocation_factor(x_spectrum, cfg: SystemConfig, with_bound: bool = False):
    """Power-allocation penalty P(R_x) = det(R_x)^{-n_r}.

    ``x_spectrum`` is the per-antenna input power profile (repeats
    allowed, total at most n_t).  With ``with_bound`` the arithmetic-
    geometric mean lower bound (tr(R_x)/n_t)^{-n_r} is returned alongside;
    the bound is 1 at full power, so P >= 1 with equality only for
    uniform allocation.
    """
    profile = _power_profile(tuple(float(v) for v in x_spectrum), cfg.n_t)
    factor = math.prod(profile) ** (-cfg.n_r)
    if not with_bound:
        return factor
    bound = (math.fsum(profile) / cfg.n_t) ** (-cfg.n_r)
    return factor, bound


def unified_asymptote(
    scenario: ChannelScenario, cfg: SystemConfig
) -> AsymptoteDecomposition:
    """Decompose any scenario's high-SNR outage into P * S * (C rho)^{-d}.

    The rate kernel is model-independent, so the decomposition needs no
    branching: identity spectra make their factors 1 and the probability
    field reproduces the matching ``asym_*`` value.  The assembly identity
    probability == power * correlation * (coding_gain * rho)^{-d} holds
    bitwise because the field is computed as exactly that expression.
    """
    scen = validate_scenario(scenario, cfg)
    d = diversity_order(cfg)
    gain = coding_gain(cfg)
    corr = (
        math.prod(scen.r_spectrum.values) ** (-cfg.n_t)
        * math.prod(scen.t_spectrum.values) ** (-cfg.n_r)
    )
    power = (
        1.0
        if scen.x_spectrum is None
        else math.prod(scen.x_spectrum) ** (-cfg.n_r)
    )
    probability = power * corr * (gain * cfg.rho) ** (-d)
    return AsymptoteDecomposition(
        diversity_order=d,
        coding_gain=gain,
        correlation_factor=corr,
        power_factor=power,
        probability=probability,
    )


def unified_asymptote_effective(
    cfg: SystemConfig, effective_t, r_spectrum
) -> AsymptoteDecomposition:
    """Decomposition for a power-shaped channel via its effective spectrum.

    When the input covariance does not commute with the transmit
    correlation, the clean S * P split is unavailable; the caller absorbs
    the shaping into the eigenvalues of the effective transmit matrix
    (see ``montecarlo.effective_tx_correlation``) and the penalty is
    reported merged into ``correlation_factor``, flagged accordingly.
    The effective spectrum is deliberately not trace-checked: its trace
    carries the power scaling.
    """
    if isinstance(effective_t, EigenSpectrum):
        t_spec = effective_t
    else:
        t_spec = EigenSpectrum.from_values(effective_t)
    if len(t_spec) != cfg.n_t:
        raise ValueError(
            f"effective spectrum needs {cfg.n_t} entries, got {len(t_spec)}"
        )
    r_spec = as_spectrum(r_spectrum, cfg.n_r, "receive spectrum")
    d = diversity_order(cfg)
    gain = coding_gain(cfg)
    merged = (
        math.prod(r_spec.values) ** (-cfg.n_t)
        * math.prod(t_spec.values) ** (-cfg.n_r)
    )
    probability = 1.0 * merged * (gain * cfg.rho) ** (-d)
    return AsymptoteDecomposition(
        diversity_order=d,
        coding_gain=gain,
        correlation_factor=merged,
        power_factor=1.0,
        probability=probability,
        flags=("merged-correlation-power",),
    )


def outage_asymptotic(
    scenario: ChannelScenario, cfg: SystemConfig
) -> OutageResult:
    """High-SNR asymptotic outage of a scenario, as an OutageResult.

    Thin wrapper over ``unified_asymptote`` for callers that want the
    probability in the same container the exact evaluator returns;
    values above 1 are clamped with a "clamped" flag and kept in
    ``raw_value``.
    """
    return _asym_result(unified_asymptote(scenario, cfg).probability)
