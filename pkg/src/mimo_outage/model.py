"""Core value types: system configuration, eigenvalue spectra, scenarios.

A channel is described by an antenna pair (n_t, n_r), a target spectral
efficiency in bit/s/Hz, and the average SNR at the receiver.  Correlation
enters through the eigenvalue spectra of the transmit and receive
correlation matrices; with diagonal-equivalent correlation only the spectra
matter, so scenarios carry spectra rather than matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import (
    DimensionMismatch,
    LengthMismatch,
    NonDistinctSpectrum,
    TraceViolation,
)

INDEPENDENT = "independent"
SEMI_RX = "semi-rx"
SEMI_TX = "semi-tx"
FULL = "full"

MODELS = (INDEPENDENT, SEMI_RX, SEMI_TX, FULL)

# Relative tolerances for spectrum validation.  The gap floor keeps the
# Vandermonde determinants in the exact evaluators away from cancellation.
_TRACE_RTOL = 1e-9
_GAP_RTOL = 1e-9


@dataclass(frozen=True)
class SystemConfig:
    """Antenna counts, target rate, and operating SNR.

    Parameters
    ----------
    n_t, n_r : int
        Transmit and receive antenna counts, both >= 1.
    rate : float
        Target spectral efficiency R in bit/s/Hz, > 0.
    snr_db : float
        Average SNR in dB; ``rho`` converts to linear scale.
    """

    n_t: int
    n_r: int
    rate: float
    snr_db: float

    def __post_init__(self) -> None:
        if not (isinstance(self.n_t, int) and isinstance(self.n_r, int)):
            raise DimensionMismatch("antenna counts must be integers")
        if self.n_t < 1 or self.n_r < 1:
            raise DimensionMismatch("antenna counts must be >= 1")
        if not (self.rate >= 0 and math.isfinite(self.rate)):
            raise ValueError("rate must be non-negative and finite")
        if not math.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")

    @property
    def rho(self) -> float:
        """Linear SNR, 10^(snr_db/10)."""
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def tau(self) -> int:
        """Antenna asymmetry |n_t - n_r| - 1; equals -1 for square systems."""
        return abs(self.n_t - self.n_r) - 1

    @property
    def n_min(self) -> int:
        """Smaller antenna count, the number of spatial streams."""
        return min(self.n_t, self.n_r)

    @property
    def threshold(self) -> float:
        """Outage threshold 2^rate on the product-capacity variable."""
        return 2.0 ** self.rate


@dataclass(frozen=True)
class EigenSpectrum:
    """Descending eigenvalue spectrum of a correlation matrix.

    Values are strictly decreasing and positive unless the explicit
    ``identity`` flag is set, in which case every value is exactly 1.
    Approximately-equal eigenvalues are rejected rather than merged; callers
    who mean "uncorrelated" must say so through the flag.
    """

    values: tuple[float, ...]
    identity: bool = False

    def __post_init__(self) -> None:
        n = len(self.values)
        if n == 0:
            raise DimensionMismatch("spectrum must be non-empty")
        if self.identity:
            if any(v != 1.0 for v in self.values):
                raise NonDistinctSpectrum("identity spectrum must be all ones")
            return
        if any(not (v > 0 and math.isfinite(v)) for v in self.values):
            raise NonDistinctSpectrum("eigenvalues must be positive and finite")
        gap_floor = _GAP_RTOL * n
        for a, b in zip(self.values, self.values[1:]):
            if a - b <= gap_floor:
                raise NonDistinctSpectrum(
                    f"eigenvalues must be strictly decreasing with gaps > {gap_floor:g}; "
                    f"got adjacent pair ({a!r}, {b!r})"
                )

    @classmethod
    def identity_of(cls, n: int) -> "EigenSpectrum":
        return cls(values=(1.0,) * n, identity=True)

    @classmethod
    def from_values(
        cls, values, expected_trace: float | None = None
    ) -> "EigenSpectrum":
        """Build a spectrum from an iterable, validating trace if requested.

        All-ones input yields the identity spectrum.  ``expected_trace`` is
        checked to relative tolerance 1e-9; pass None to skip (used for
        effective spectra whose trace carries a power scaling).
        """
        vals = tuple(float(v) for v in values)
        if expected_trace is not None:
            total = math.fsum(vals)
            if abs(total - expected_trace) > _TRACE_RTOL * max(abs(expected_trace), 1.0):
                raise TraceViolation(
                    f"spectrum sums to {total!r}, expected {expected_trace!r}"
                )
        if all(v == 1.0 for v in vals):
            return cls(values=vals, identity=True)
        return cls(values=vals, identity=False)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def trace(self) -> float:
        return math.fsum(self.values)


def as_spectrum(values, n: int, label: str = "spectrum") -> EigenSpectrum:
    """Coerce a sequence or EigenSpectrum to n entries with trace n.

    Correlation matrices are trace-normalized to the antenna count, so any
    spectrum handed to an evaluator must sum to its side's dimension.
    """
    if isinstance(values, EigenSpectrum):
        spectrum = values
    else:
        spectrum = EigenSpectrum.from_values(values)
    if len(spectrum) != n:
        raise LengthMismatch(
            f"{label} needs {n} entries, got {len(spectrum)}"
        )
    if abs(spectrum.trace - n) > _TRACE_RTOL * n:
        raise TraceViolation(
            f"{label} sums to {spectrum.trace!r}, expected {n}"
        )
    return spectrum


def _power_profile(values, n_t: int) -> tuple[float, ...]:
    # Input-covariance eigenvalues: positive, length n_t, total power <= n_t.
    # Repeats are allowed here; distinctness only matters for the effective
    # transmit spectrum, which is checked where it is built.
    vals = tuple(float(v) for v in values)
    if len(vals) != n_t:
        raise DimensionMismatch(
            f"power profile has length {len(vals)}, expected n_t={n_t}"
        )
    if any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise ValueError("power profile entries must be positive and finite")
    total = math.fsum(vals)
    if total > n_t * (1.0 + _TRACE_RTOL):
        raise TraceViolation(f"power profile sums to {total!r} > n_t={n_t}")
    return vals


@dataclass(frozen=True)
class ChannelScenario:
    """A correlation model plus the spectra that parameterize it.

    ``model`` is one of the MODELS constants.  Spectra left as None default
    to identity.  ``x_spectrum`` is the per-antenna input power profile
    (eigenvalues of the input covariance), defaulting to uniform power; it is
    a plain tuple because power levels may legitimately repeat.
    """

    model: str
    t_spectrum: EigenSpectrum | None = None
    r_spectrum: EigenSpectrum | None = None
    x_spectrum: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")


def _materialize(spec, n: int, side: str) -> EigenSpectrum:
    if spec is None:
        return EigenSpectrum.identity_of(n)
    if not isinstance(spec, EigenSpectrum):
        spec = EigenSpectrum.from_values(spec)
    if len(spec) != n:
        raise DimensionMismatch(
            f"{side} spectrum has length {len(spec)}, expected {n}"
        )
    if not spec.identity:
        total = spec.trace
        if abs(total - n) > _TRACE_RTOL * n:
            raise TraceViolation(
                f"{side} spectrum sums to {total!r}, expected {n}"
            )
    return spec


def validate_scenario(scenario: ChannelScenario, cfg: SystemConfig) -> ChannelScenario:
    """Check spectra against the configuration and canonicalize the model.

    Identity spectra downgrade the model: a full-correlation scenario with
    both spectra identity becomes independent, with one identity it becomes
    the matching semi-correlated model, and a semi-correlated scenario whose
    spectrum is identity becomes independent.  The result always carries
    materialized spectra, and running validation twice is a no-op.

    Raises DimensionMismatch, TraceViolation, or NonDistinctSpectrum on
    inconsistent input.
    """
    t = _materialize(scenario.t_spectrum, cfg.n_t, "transmit")
    r = _materialize(scenario.r_spectrum, cfg.n_r, "receive")
    x = None
    if scenario.x_spectrum is not None:
        x = _power_profile(scenario.x_spectrum, cfg.n_t)
        if all(v == 1.0 for v in x):
            x = None

    model = scenario.model
    if model == INDEPENDENT and not (t.identity and r.identity):
        raise ValueError("model 'independent' does not accept correlation spectra")
    if model == SEMI_RX and not t.identity:
        raise ValueError("model 'semi-rx' does not accept a transmit spectrum")
    if model == SEMI_TX and not r.identity:
        raise ValueError("model 'semi-tx' does not accept a receive spectrum")

    if t.identity and r.identity:
        model = INDEPENDENT
    elif model == FULL and t.identity:
        model = SEMI_RX
    elif model == FULL and r.identity:
        model = SEMI_TX

    return ChannelScenario(model=model, t_spectrum=t, r_spectrum=r, x_spectrum=x)


def interchange_normalize(
    scenario: ChannelScenario, cfg: SystemConfig
) -> tuple[ChannelScenario, SystemConfig]:
    """Swap transmit and receive roles so that n_t >= n_r.

    Outage probability is invariant under exchanging (n_t, transmit spectrum)
    with (n_r, receive spectrum); the semi-correlated labels flip with the
    swap.  Scenarios already satisfying n_t >= n_r pass through unchanged.
    A non-uniform power profile ties the transmit side to the input
    covariance, so it must be folded into an effective transmit spectrum
    before normalizing.
    """
    scenario = validate_scenario(scenario, cfg)
    if cfg.n_t >= cfg.n_r:
        return scenario, cfg
    if scenario.x_spectrum is not None:
        raise ValueError(
            "fold the power profile into the transmit spectrum before interchange"
        )
    flipped = {SEMI_RX: SEMI_TX, SEMI_TX: SEMI_RX}.get(scenario.model, scenario.model)
    swapped = ChannelScenario(
        model=flipped,
        t_spectrum=scenario.r_spectrum,
        r_spectrum=scenario.t_spectrum,
        x_spectrum=None,
    )
    swapped_cfg = replace(cfg, n_t=cfg.n_r, n_r=cfg.n_t)
    return validate_scenario(swapped, swapped_cfg), swapped_cfg


@dataclass(frozen=True)
class OutageResult:
    """An outage probability with its provenance.

    ``probability`` is ``raw_value`` clamped to [0, 1]; construction through
    ``make_result`` guarantees any clamping stays within ``err_estimate``.
    ``flags`` carries advisory markers such as "below-floor" for values under
    the numerical noise floor of the contour engine.
    """

    probability: float
    raw_value: float
    err_estimate: float
    method: str
    flags: tuple[str, ...] = field(default=())


# Probabilities below this are indistinguishable from contour roundoff.
NUMERICAL_FLOOR = 1e-13


def make_result(
    raw: float, err: float, method: str, flags: tuple[str, ...] = ()
) -> OutageResult:
    """Clamp a raw integration value into a valid OutageResult.

    Negative values larger in magnitude than the error estimate mean the
    integration itself failed, and are surfaced as NonConvergence rather
    than silently clamped.
    """
    from .errors import NonConvergence

    prob = min(max(raw, 0.0), 1.0)
    if prob != raw and abs(raw - prob) > max(err, NUMERICAL_FLOOR):
        raise NonConvergence(
            f"integrated probability {raw!r} is outside [0, 1] by more than "
            f"the error estimate {err!r}"
        )
    if 0.0 < prob < NUMERICAL_FLOOR:
        flags = flags + ("below-floor",)
    return OutageResult(
        probability=prob,
        raw_value=raw,
        err_estimate=err,
        method=method,
        flags=flags,
    )
