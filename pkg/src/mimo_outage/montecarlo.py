"""Monte Carlo outage oracle for Kronecker-correlated Rayleigh channels.

This is the ground truth the analytical evaluators are checked against:
draw H = diag(sqrt(r)) H_w diag(sqrt(t)) (diagonal correlation loses no
generality, as the law of H H^H depends on the spectra only), compute
the mutual information, count outages.

Randomness is counter-based so that results are reproducible and
independent of how the work is partitioned: samples are processed in
fixed chunks of 4096, each chunk owns a Philox stream keyed by
(seed, chunk index), and every sample consumes a fixed 2 n_t n_r block
of uniforms from its chunk's stream.  Gaussians come from the inverse
CDF applied to those uniforms.  Per-chunk outage counts are integers,
so the reduction is exact and thread count cannot change any result.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import DimensionMismatch
from .model import (
    ChannelScenario,
    EigenSpectrum,
    SystemConfig,
    validate_scenario,
)

__all__ = [
    "McEstimate",
    "sample_channel",
    "mutual_information",
    "estimate_outage",
    "estimate_outage_sweep",
    "effective_tx_correlation",
]

_CHUNK = 4096
_LN2 = math.log(2.0)
# Keep inverse-CDF arguments strictly inside (0, 1).
_U_LO = 2.0 ** -53
_U_HI = 1.0 - 2.0 ** -53

_THREADS_ENV = "MIMO_OUTAGE_THREADS"


@dataclass(frozen=True)
class McEstimate:
    """A binomial outage estimate with its standard error."""

    p_hat: float
    std_err: float
    n_samples: int
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_hat <= 1.0:
            raise ValueError("p_hat must lie in [0, 1]")
        if not (isinstance(self.n_samples, int) and self.n_samples >= 1):
            raise ValueError("n_samples must be a positive integer")


def _estimate(count: int, n: int, seed: int) -> McEstimate:
    p = count / n
    return McEstimate(
        p_hat=p,
        std_err=math.sqrt(p * (1.0 - p) / n),
        n_samples=n,
        seed=seed,
    )


def _worker_count() -> int:
    raw = os.environ.get(_THREADS_ENV)
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ValueError(
                f"{_THREADS_ENV} must be an integer, got {raw!r}"
            ) from exc
        if cap < 1:
            raise ValueError(f"{_THREADS_ENV} must be >= 1, got {cap}")
        return cap
    return min(8, os.cpu_count() or 1)


def _chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, chunk_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_channels(
    gen: np.random.Generator, m: int, n_r: int, n_t: int
) -> np.ndarray:
    u = gen.random((2, m, n_r, n_t))
    np.clip(u, _U_LO, _U_HI, out=u)
    g = ndtri(u)
    return math.sqrt(0.5) * (g[0] + 1j * g[1])


def _scenario_scales(
    scenario: ChannelScenario, cfg: SystemConfig
) -> tuple[np.ndarray, np.ndarray]:
    scen = validate_scenario(scenario, cfg)
    t_vals = np.asarray(scen.t_spectrum.values)
    r_vals = np.asarray(scen.r_spectrum.values)
    if scen.x_spectrum is not None:
        # Input covariance commutes with a diagonal R_t, so the power
        # profile folds into the transmit scaling.
        t_vals = t_vals * np.asarray(scen.x_spectrum)
    return np.sqrt(t_vals), np.sqrt(r_vals)


def sample_channel(
    scenario: ChannelScenario, cfg: SystemConfig, gen: np.random.Generator
) -> np.ndarray:
    """Draw one n_r-by-n_t channel matrix from the scenario's law.

    The power profile is not applied here; this is the channel itself,
    H = diag(sqrt(r)) H_w diag(sqrt(t)).
    """
    scen = validate_scenario(scenario, cfg)
    h_w = _draw_channels(gen, 1, cfg.n_r, cfg.n_t)[0]
    sqrt_t = np.sqrt(np.asarray(scen.t_spectrum.values))
    sqrt_r = np.sqrt(np.asarray(scen.r_spectrum.values))
    return sqrt_r[:, None] * h_w * sqrt_t[None, :]


def mutual_information(h: np.ndarray, rho: float, x_spectrum=None) -> float:
    """log2 det(I + rho H diag(x) H^H) via a Cholesky factorization.

    The argument is Hermitian positive definite by construction, so the
    log-determinant is twice the log of the Cholesky diagonal.
    """
    h = np.asarray(h)
    n_r = h.shape[0]
    if x_spectrum is not None:
        vals = (
            x_spectrum.values
            if isinstance(x_spectrum, EigenSpectrum)
            else tuple(float(v) for v in x_spectrum)
        )
        if len(vals) != h.shape[1]:
            raise DimensionMismatch(
                f"power profile has length {len(vals)}, expected {h.shape[1]}"
            )
        h = h * np.sqrt(np.asarray(vals))[None, :]
    a = np.eye(n_r) + rho * (h @ h.conj().T)
    chol = np.linalg.cholesky(a)
    return 2.0 * float(np.sum(np.log(np.real(np.diag(chol))))) / _LN2


def _chunk_counts(
    seed: int,
    chunk_index: int,
    m: int,
    sqrt_t: np.ndarray,
    sqrt_r: np.ndarray,
    rhos: np.ndarray,
    rate: float,
) -> np.ndarray:
    gen = _chunk_generator(seed, chunk_index)
    n_r, n_t = sqrt_r.size, sqrt_t.size
    h = _draw_channels(gen, m, n_r, n_t)
    h *= sqrt_r[None, :, None]
    h *= sqrt_t[None, None, :]
    # Eigenvalues of the Gram matrix on the smaller side; the other
    # side's zero modes contribute nothing to the capacity.
    if n_t < n_r:
        gram = np.einsum("mij,mik->mjk", h.conj(), h)
    else:
        gram = np.einsum("mij,mkj->mik", h, h.conj())
    lam = np.linalg.eigvalsh(gram)
    np.maximum(lam, 0.0, out=lam)
    capacity = np.log1p(rhos[:, None, None] * lam[None, :, :]).sum(axis=2)
    return (capacity < rate * _LN2).sum(axis=1)


def _run_chunks(
    scenario: ChannelScenario,
    cfg: SystemConfig,
    n_samples: int,
    seed: int,
    rhos: np.ndarray,
) -> np.ndarray:
    if not (isinstance(n_samples, int) and n_samples >= 1):
        raise ValueError("n_samples must be a positive integer")
    sqrt_t, sqrt_r = _scenario_scales(scenario, cfg)
    n_chunks = (n_samples + _CHUNK - 1) // _CHUNK
    sizes = [
        min(_CHUNK, n_samples - i * _CHUNK) for i in range(n_chunks)
    ]
    workers = min(_worker_count(), n_chunks)
    if workers == 1:
        parts = [
            _chunk_counts(seed, i, sizes[i], sqrt_t, sqrt_r, rhos, cfg.rate)
            for i in range(n_chunks)
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda i: _chunk_counts(
                        seed, i, sizes[i], sqrt_t, sqrt_r, rhos, cfg.rate
                    ),
                    range(n_chunks),
                )
            )
    # Integer counts summed in chunk order: exact, thread-count-proof.
    return np.sum(np.stack(parts, axis=0), axis=0)


def estimate_outage(
    scenario: ChannelScenario, cfg: SystemConfig, n_samples: int, seed: int
) -> McEstimate:
    """Estimate the outage probability by simulation.

    Deterministic for fixed (seed, n_samples, scenario) regardless of the
    worker count; capacities are compared strictly below the rate.
    """
    rhos = np.array([cfg.rho])
    counts = _run_chunks(scenario, cfg, n_samples, seed, rhos)
    return _estimate(int(counts[0]), n_samples, seed)


def estimate_outage_sweep(
    scenario: ChannelScenario,
    cfg: SystemConfig,
    snr_dbs,
    n_samples: int,
    seed: int,
) -> list[McEstimate]:
    """Estimate outage at several SNRs reusing one set of channel draws.

    The channel law does not depend on rho, so a sweep shares the
    eigenvalue workload across all SNR points; each point's estimate is
    bitwise identical to a standalone run with the same seed.
    """
    snr_list = [float(s) for s in snr_dbs]
    if not snr_list:
        return []
    rhos = np.array([10.0 ** (s / 10.0) for s in snr_list])
    counts = _run_chunks(scenario, cfg, n_samples, seed, rhos)
    return [_estimate(int(c), n_samples, seed) for c in counts]


def _spectrum_or_matrix(obj, label: str) -> tuple[np.ndarray, bool]:
    if isinstance(obj, EigenSpectrum):
        return np.asarray(obj.values, dtype=float), False
    arr = np.asarray(obj)
    if arr.ndim == 1:
        return arr.astype(float), False
    if arr.ndim == 2:
        if arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"{label} matrix must be square")
        return arr, True
    raise DimensionMismatch(f"{label} must be a vector or a square matrix")


def effective_tx_correlation(t_corr, x_corr) -> EigenSpectrum:
    """Eigenvalues of the power-shaped transmit correlation.

    The capacity with input covariance R_x over a channel with transmit
    correlation R_t equals the uniform-power capacity over the effective
    matrix R_t^{1/2} R_x R_t^{1/2}.  Aligned diagonal spectra reduce to
    the elementwise product; matrices go through a Hermitian eigensolver.
    The result's trace carries the power scaling, so it is not normalized.
    """
    t_arr, t_is_mat = _spectrum_or_matrix(t_corr, "transmit correlation")
    x_arr, x_is_mat = _spectrum_or_matrix(x_corr, "input covariance")
    t_n = t_arr.shape[0]
    if x_arr.shape[0] != t_n:
        raise DimensionMismatch(
            f"input covariance has dimension {x_arr.shape[0]}, expected {t_n}"
        )
    if not t_is_mat and not x_is_mat:
        prod = np.sort(t_arr * x_arr)[::-1]
        return EigenSpectrum.from_values(prod.tolist())
    t_mat = t_arr if t_is_mat else np.diag(t_arr)
    x_mat = x_arr if x_is_mat else np.diag(x_arr)
    t_eigs, t_vecs = np.linalg.eigh(t_mat)
    root = (t_vecs * np.sqrt(np.maximum(t_eigs, 0.0))) @ t_vecs.conj().T
    eff = np.linalg.eigvalsh(root @ x_mat @ root)
    vals = np.sort(np.maximum(eff, 0.0))[::-1]
    return EigenSpectrum.from_values(vals.tolist())
