"""Exact outage probability for the three correlation models.

Each model yields a moment function phi(s) = E[G^{s-1}] of the capacity
variable G = prod (1 + rho lambda_i), built from permutation sums of
confluent hypergeometric factors.  The CDF at the rate threshold then
comes from a single numerical Mellin inversion, so one contour engine
serves the independent, semi-correlated and fully correlated cases; the
high-SNR residue kernels provide the independent cross-check.

The permutation sums alternate in sign and cancel heavily, so terms are
sorted by descending magnitude and accumulated with compensated
summation; an opt-in double-double accumulator is available where four
or more antennas per side make the cancellation severe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import (
    NonConvergence,
    NonDistinctSpectrum,
    PermutationBudgetExceeded,
)
from .mellin import choose_contour, inverse_mellin_cdf
from .model import (
    ChannelScenario,
    EigenSpectrum,
    OutageResult,
    SystemConfig,
    as_spectrum,
    make_result,
    validate_scenario,
)
from .special import psi_row

__all__ = [
    "PermutationTable",
    "phi_independent",
    "phi_semi",
    "outage_independent",
    "outage_semi",
    "outage_full",
    "outage_exact",
]

# Permutation enumeration cap: 7! terms is the largest sum that stays
# within sane memory/runtime against the contour node counts.
_MAX_PERM_SIZE = 7

_ACCUMULATORS = ("compensated", "double-double")


@dataclass(frozen=True)
class PermutationTable:
    """All permutations of 1..n with transposition-parity signs."""

    n: int
    entries: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != math.factorial(self.n):
            raise ValueError("table must enumerate all of S_n")

    @classmethod
    def for_size(cls, n: int) -> "PermutationTable":
        if n > _MAX_PERM_SIZE:
            raise PermutationBudgetExceeded(
                f"permutation sum over S_{n} ({math.factorial(n)} terms) "
                f"exceeds the {_MAX_PERM_SIZE}! budget"
            )
        return _table(n)


@lru_cache(maxsize=16)
def _table(n: int) -> PermutationTable:
    entries = []
    for sigma in permutations(range(1, n + 1)):
        inv = sum(
            1
            for i in range(n)
            for j in range(i + 1, n)
            if sigma[i] > sigma[j]
        )
        entries.append((sigma, -1 if inv % 2 else 1))
    return PermutationTable(n=n, entries=tuple(entries))


def _neumaier(rows: np.ndarray) -> np.ndarray:
    # rows (m, nodes) real, already ordered; Kahan-Neumaier along axis 0
    total = rows[0].copy()
    comp = np.zeros_like(total)
    for j in range(1, rows.shape[0]):
        x = rows[j]
        t = total + x
        comp += np.where(
            np.abs(total) >= np.abs(x), (total - t) + x, (x - t) + total
        )
        total = t
    return total + comp


def _double_double(rows: np.ndarray) -> np.ndarray:
    hi = rows[0].copy()
    lo = np.zeros_like(hi)
    for j in range(1, rows.shape[0]):
        x = rows[j]
        s = hi + x
        v = s - hi
        e = (hi - (s - v)) + (x - v)
        e = e + lo
        hi = s + e
        lo = e - (hi - s)
    return hi + lo


def _signed_sum(terms: np.ndarray, accumulator: str) -> np.ndarray:
    """Sum permutation terms (m, nodes) over axis 0, largest first."""
    if accumulator not in _ACCUMULATORS:
        raise ValueError(
            f"accumulator must be one of {_ACCUMULATORS}, got {accumulator!r}"
        )
    if terms.shape[0] == 1:
        return terms[0]
    order = np.argsort(-np.abs(terms), axis=0, kind="stable")
    ordered = np.take_along_axis(terms, order, axis=0)
    fold = _double_double if accumulator == "double-double" else _neumaier
    return fold(ordered.real) + 1j * fold(ordered.imag)


def _vandermonde(values) -> float:
    out = 1.0
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            out *= values[j] - values[i]
    return out


def _phi_independent_factory(cfg: SystemConfig, accumulator: str):
    # pre: n_t >= n_r
    n_t, n_r = cfg.n_t, cfg.n_r
    tau = cfg.tau
    rho = cfg.rho
    z = 1.0 / rho
    table = PermutationTable.for_size(n_r)
    prefactor = rho ** (-n_t * n_r)
    # Gamma(tau+i+j) / ((n_r-i)! (n_t-i)!) for the i-th row paired with j
    weight = {
        (i, j): math.factorial(tau + i + j - 1)
        / (math.factorial(n_r - i) * math.factorial(n_t - i))
        for i in range(1, n_r + 1)
        for j in range(1, n_r + 1)
    }
    a_params = sorted({tau + i + j for (i, j) in weight})

    def phi(s: np.ndarray) -> np.ndarray:
        psi = {a: psi_row(float(a), s + a, z) for a in a_params}
        terms = np.empty((len(table.entries), s.size), dtype=complex)
        for m, (sigma, sign) in enumerate(table.entries):
            scale = sign * prefactor
            prod = None
            for i, si in enumerate(sigma, start=1):
                scale *= weight[(i, si)]
                row = psi[tau + i + si]
                prod = row if prod is None else prod * row
            terms[m] = scale * prod
        return _signed_sum(terms, accumulator)

    return phi


def _phi_semi_wide_factory(
    cfg: SystemConfig, r_values: tuple[float, ...], accumulator: str
):
    # n_t >= n_r branch; correlation on the n_r-antenna side
    n_t, n_r = cfg.n_t, cfg.n_r
    tau = cfg.tau
    rho = cfg.rho
    table = PermutationTable.for_size(n_r)
    det_r = math.prod(r_values)
    recips = [1.0 / r for r in r_values]  # ascending for descending r
    prefactor = (
        (-1.0) ** (n_r * (n_r - 1) // 2)
        * rho ** (-(n_r * (n_r + 1)) // 2 - (n_t - n_r) * n_r)
        / (det_r**n_t * _vandermonde(recips))
    )
    for j in range(1, n_r + 1):
        prefactor /= math.factorial(n_t - j)
    for i in range(1, n_r + 1):
        prefactor *= math.factorial(i + tau)  # Gamma(i+tau+1)

    def phi(s: np.ndarray) -> np.ndarray:
        # psi[i][j] = Psi(i+tau+1, s+i+tau+1; 1/(rho r_j))
        psi = [
            [
                psi_row(float(i + tau + 1), s + (i + tau + 1), 1.0 / (rho * rj))
                for rj in r_values
            ]
            for i in range(1, n_r + 1)
        ]
        terms = np.empty((len(table.entries), s.size), dtype=complex)
        for m, (sigma, sign) in enumerate(table.entries):
            prod = None
            for i, si in enumerate(sigma, start=1):
                row = psi[i - 1][si - 1]
                prod = row if prod is None else prod * row
            terms[m] = (sign * prefactor) * prod
        return _signed_sum(terms, accumulator)

    return phi


def _phi_semi_tall_factory(
    cfg: SystemConfig, r_values: tuple[float, ...], accumulator: str
):
    # n_t < n_r branch; the permutation runs over the larger receive side
    n_t, n_r = cfg.n_t, cfg.n_r
    rho = cfg.rho
    table = PermutationTable.for_size(n_r)
    prefactor = (
        (-1.0) ** (n_t * (n_r - n_t))
        * rho ** (-(n_t * (n_t + 1)) // 2)
        / _vandermonde(r_values)
    )

    def phi(s: np.ndarray) -> np.ndarray:
        # psi[i][j] = Psi(i, s+i; 1/(rho r_j)) for the n_t active rows
        psi = [
            [psi_row(float(i), s + i, 1.0 / (rho * rj)) for rj in r_values]
            for i in range(1, n_t + 1)
        ]
        terms = np.empty((len(table.entries), s.size), dtype=complex)
        for m, (sigma, sign) in enumerate(table.entries):
            scale = sign * prefactor
            for i, si in enumerate(sigma, start=1):
                exp = (n_r - n_t - 1) if i <= n_t else (i - n_t - 1)
                scale *= r_values[si - 1] ** exp
            prod = None
            for i in range(1, n_t + 1):
                row = psi[i - 1][sigma[i - 1] - 1]
                prod = row if prod is None else prod * row
            terms[m] = scale * prod
        return _signed_sum(terms, accumulator)

    return phi


def _phi_full_factory(
    cfg: SystemConfig,
    t_values: tuple[float, ...],
    r_values: tuple[float, ...],
    accumulator: str,
):
    # pre: n_t >= n_r; both spectra distinct
    n_t, n_r = cfg.n_t, cfg.n_r
    rho = cfg.rho
    table = PermutationTable.for_size(n_t)
    a = [1.0 / r for r in r_values]  # eigenvalues of inverse receive correlation
    b = [1.0 / t for t in t_values]
    prefactor = (
        (-1.0) ** (n_r * (n_t - n_r))
        * rho ** (-(n_r * (n_r + 1)) // 2)
        * math.prod(ai**n_r for ai in a)
        * math.prod(bj**n_r for bj in b)
        / (_vandermonde(a) * _vandermonde(b))
    )

    def phi(s: np.ndarray) -> np.ndarray:
        # Division by prod_l (s-1+l)^l moves the integrand's extra poles to
        # s in {1, 0, ..., 2-n_r}, all cleared by the c=-0.5 contour.
        denom = np.ones(s.size, dtype=complex)
        for ell in range(1, n_r):
            denom *= (s - 1.0 + ell) ** ell
        psi = [
            [psi_row(1.0, s + n_r, ai * bj / rho) for bj in b] for ai in a
        ]
        terms = np.empty((len(table.entries), s.size), dtype=complex)
        for m, (sigma, sign) in enumerate(table.entries):
            scale = sign * prefactor
            for i in range(n_r + 1, n_t + 1):
                scale *= b[sigma[i - 1] - 1] ** (n_t - i)
            prod = None
            for i in range(1, n_r + 1):
                row = psi[i - 1][sigma[i - 1] - 1]
                prod = row if prod is None else prod * row
            terms[m] = scale * prod
        return _signed_sum(terms, accumulator) / denom

    return phi


def _check_unit_moment(phi) -> None:
    # E[G^0] = 1 catches sign or ordering mistakes before any inversion.
    value = phi(np.array([1.0 + 0.0j]))[0]
    if abs(value - 1.0) > 1e-6:
        raise NonConvergence(
            f"moment normalization failed: phi(1) = {value!r}, expected 1"
        )


def _invert(phi, cfg: SystemConfig, osc_hint: float) -> OutageResult:
    _check_unit_moment(phi)
    contour = choose_contour("independent", cfg, purpose="exact")
    raw, err = inverse_mellin_cdf(
        phi, cfg.threshold, contour=contour, osc_hint=osc_hint
    )
    return make_result(raw, err, method="exact")


def _as_array(s) -> tuple[np.ndarray, bool]:
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    return arr, np.ndim(s) == 0


def phi_independent(s, cfg: SystemConfig, accumulator: str = "compensated"):
    """Moment function E[G^{s-1}] for the uncorrelated channel.

    Parameters
    ----------
    s : complex or ndarray
        Moment order(s); the capacity variable is G = prod (1 + rho
        lambda_i) over the squared singular values of the channel.
    cfg : SystemConfig
        Antenna counts and SNR; requires n_t >= n_r (the model is
        interchange-symmetric, so swap dimensions first).
    accumulator : str
        "compensated" (default) or "double-double" permutation summation.

    Returns
    -------
    complex or ndarray matching the shape of ``s``.
    """
    if cfg.n_t < cfg.n_r:
        raise ValueError(
            "requires n_t >= n_r; swap dimensions first (the independent "
            "model is interchange-symmetric)"
        )
    arr, scalar = _as_array(s)
    phi = _phi_independent_factory(cfg, accumulator)
    out = phi(arr)
    return complex(out[0]) if scalar else out


def _semi_phi(cfg: SystemConfig, spectrum: EigenSpectrum, accumulator: str):
    if spectrum.identity and cfg.n_r > 1:
        raise NonDistinctSpectrum(
            "identity receive spectrum belongs to the independent model"
        )
    if cfg.n_t >= cfg.n_r:
        return _phi_semi_wide_factory(cfg, spectrum.values, accumulator)
    return _phi_semi_tall_factory(cfg, spectrum.values, accumulator)


def phi_semi(
    s, cfg: SystemConfig, r_spectrum, accumulator: str = "compensated"
):
    """Moment function E[G^{s-1}] with receive-side correlation.

    The branch is chosen by n_t >= n_r versus n_t < n_r; ``r_spectrum``
    holds the n_r descending eigenvalues of the receive correlation
    matrix (trace n_r).  A single receive antenna with r = (1,) reduces
    to ``phi_independent``.
    """
    spectrum = as_spectrum(r_spectrum, cfg.n_r, "receive spectrum")
    arr, scalar = _as_array(s)
    phi = _semi_phi(cfg, spectrum, accumulator)
    out = phi(arr)
    return complex(out[0]) if scalar else out


def outage_independent(
    cfg: SystemConfig, accumulator: str = "compensated"
) -> OutageResult:
    """Exact outage probability of the uncorrelated Rayleigh channel.

    Computes P[log2 det(I + rho H H*) < rate] by Mellin inversion of the
    capacity variable's moment function.

    Parameters
    ----------
    cfg : SystemConfig
        Antenna counts, rate (bits/s/Hz) and SNR (dB).  Dimensions are
        interchange-symmetric and normalized internally.
    accumulator : str
        Permutation-sum accumulator, "compensated" or "double-double".

    Returns
    -------
    OutageResult
        Probability with error estimate and method tag "exact".
    """
    if cfg.n_t < cfg.n_r:
        cfg = SystemConfig(
            n_t=cfg.n_r, n_r=cfg.n_t, rate=cfg.rate, snr_db=cfg.snr_db
        )
    phi = _phi_independent_factory(cfg, accumulator)
    return _invert(phi, cfg, osc_hint=math.log1p(20.0 * cfg.rho))


def outage_semi(
    cfg: SystemConfig,
    r_spectrum,
    side: str = "rx",
    accumulator: str = "compensated",
) -> OutageResult:
    """Exact outage probability with one-sided correlation.

    Parameters
    ----------
    cfg : SystemConfig
        Antenna counts, rate and SNR, as seen by the caller.
    r_spectrum : EigenSpectrum or sequence
        Descending eigenvalues of the correlation matrix on the
        correlated side (length and trace equal to that side's antenna
        count).  Identity spectra are rejected: uncorrelated channels
        belong to ``outage_independent``.
    side : str
        "rx" for receive-side correlation, "tx" for transmit-side; the
        transmit case is evaluated through conjugate-transpose symmetry
        of the mutual information.
    accumulator : str
        Permutation-sum accumulator, "compensated" or "double-double".
    """
    if side not in ("rx", "tx"):
        raise ValueError(f"side must be 'rx' or 'tx', got {side!r}")
    if side == "tx":
        # log det(I + rho H H*) = log det(I + rho H* H) maps transmit
        # correlation to receive correlation on the flipped geometry.
        cfg = SystemConfig(
            n_t=cfg.n_r, n_r=cfg.n_t, rate=cfg.rate, snr_db=cfg.snr_db
        )
    spectrum = as_spectrum(r_spectrum, cfg.n_r, "correlation spectrum")
    phi = _semi_phi(cfg, spectrum, accumulator)
    z_min = 1.0 / (cfg.rho * max(spectrum.values))
    return _invert(phi, cfg, osc_hint=math.log1p(20.0 / z_min))


def outage_full(
    cfg: SystemConfig,
    t_spectrum,
    r_spectrum,
    accumulator: str = "compensated",
) -> OutageResult:
    """Exact outage probability with correlation on both sides.

    Parameters
    ----------
    cfg : SystemConfig
        Antenna counts, rate and SNR.
    t_spectrum, r_spectrum : EigenSpectrum or sequence
        Descending eigenvalues of the transmit (length n_t) and receive
        (length n_r) correlation matrices, each trace-normalized to its
        antenna count and strictly distinct.  Identity spectra are
        rejected; drop to the semi-correlated or independent evaluator
        instead.
    accumulator : str
        Permutation-sum accumulator, "compensated" or "double-double".

    Raises
    ------
    PermutationBudgetExceeded
        The sum runs over S_{n_t} after normalization; n_t! is capped.
    """
    t_spec = as_spectrum(t_spectrum, cfg.n_t, "transmit spectrum")
    r_spec = as_spectrum(r_spectrum, cfg.n_r, "receive spectrum")
    if t_spec.identity or r_spec.identity:
        which = "transmit" if t_spec.identity else "receive"
        raise ValueError(
            f"identity {which} spectrum: use the semi-correlated or "
            "independent evaluator for this channel"
        )
    if cfg.n_t < cfg.n_r:
        # Conjugate-transpose symmetry swaps the roles of the two sides.
        cfg = SystemConfig(
            n_t=cfg.n_r, n_r=cfg.n_t, rate=cfg.rate, snr_db=cfg.snr_db
        )
        t_spec, r_spec = r_spec, t_spec
    phi = _phi_full_factory(cfg, t_spec.values, r_spec.values, accumulator)
    z_min = 1.0 / (cfg.rho * max(r_spec.values) * max(t_spec.values))
    return _invert(phi, cfg, osc_hint=math.log1p(20.0 / z_min))


def outage_exact(
    scenario: ChannelScenario,
    cfg: SystemConfig,
    accumulator: str = "compensated",
) -> OutageResult:
    """Exact outage probability of a channel scenario, any model.

    Validates the scenario against the configuration and dispatches to the
    matching evaluator.  A non-uniform input power profile is folded into
    the transmit side first: with a diagonal input covariance X sharing the
    transmit correlation's eigenbasis,

        log det(I + rho H X H*)  ==  log det(I + rho' H~ H~*)

    where H~ carries the effective transmit spectrum t_i x_i renormalized
    to trace n_t and rho' absorbs the trace ratio as an SNR shift.  The
    folded spectrum decides the dispatch, so a profile that exactly undoes
    the transmit correlation evaluates through the cheaper uncorrelated
    path.

    Raises
    ------
    NonDistinctSpectrum
        The folded products t_i x_i contain repeats (or near-repeats)
        that are not all equal; the permutation-sum evaluators need
        strictly distinct eigenvalues.
    """
    scenario = validate_scenario(scenario, cfg)
    t = scenario.t_spectrum
    r = scenario.r_spectrum
    if scenario.x_spectrum is not None:
        eff = sorted(
            (tv * xv for tv, xv in zip(t.values, scenario.x_spectrum)),
            reverse=True,
        )
        power = math.fsum(eff)
        scale = cfg.n_t / power
        scaled = tuple(v * scale for v in eff)
        if all(abs(v - 1.0) <= 1e-12 for v in scaled):
            # A profile that inverts the transmit correlation folds to the
            # identity up to rounding; snap rather than reject the ties.
            t = EigenSpectrum.identity_of(cfg.n_t)
        else:
            try:
                t = EigenSpectrum.from_values(scaled)
            except NonDistinctSpectrum as exc:
                raise NonDistinctSpectrum(
                    "power profile folds into an effective transmit spectrum "
                    f"{tuple(eff)!r} with repeated eigenvalues; perturb the "
                    "profile or the transmit spectrum to separate them"
                ) from exc
        cfg = SystemConfig(
            n_t=cfg.n_t,
            n_r=cfg.n_r,
            rate=cfg.rate,
            snr_db=cfg.snr_db + 10.0 * math.log10(power / cfg.n_t),
        )
    if t.identity and r.identity:
        return outage_independent(cfg, accumulator)
    if t.identity:
        return outage_semi(cfg, r, side="rx", accumulator=accumulator)
    if r.identity:
        return outage_semi(cfg, t, side="tx", accumulator=accumulator)
    return outage_full(cfg, t, r, accumulator=accumulator)
