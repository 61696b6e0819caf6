"""Closed-form residue kernels for the high-SNR outage expansion.

Every asymptotic coefficient in the package reduces to contour integrals of
the shape

    (1/2 pi i) closed-int  x^s / ( s * prod_t (s - t)^{m_t} ) ds,

with integer poles t >= 1 collected from either a permutation kernel or a
Gamma-ratio product.  For x > 1 the contour closes to the left and the
value is the sum of residues, a polynomial in x and ln x with rational
coefficients.  Residues at multiple poles are extracted by truncated
series inversion in exact rational arithmetic, and evaluation stays
rational as well (ln x enters as a dyadic approximation far below double
precision): the kernels vanish to order sum(m_t) at x = 1, so a float
term sum would cancel away the entire value for deep pole sets.  A float
appears only in the final rounding of an evaluation.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

from .errors import EmptyPoleSet


@dataclass(frozen=True)
class ResiduePolynomial:
    """Sum of terms coeff * x^t * (ln x)^k with exact rational coefficients.

    ``terms`` is sorted by (t, k) with duplicate keys merged; an empty tuple
    is the zero polynomial.  Kernels built from outage models evaluate to 0
    at x = 1 (no outage below the zero-rate threshold).
    """

    terms: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self) -> None:
        seen = set()
        fixed = []
        for t, k, coeff in self.terms:
            if t < 0 or k < 0:
                raise ValueError("powers must be non-negative")
            if (t, k) in seen:
                raise ValueError(f"duplicate term key ({t}, {k})")
            try:
                coeff = Fraction(coeff)
            except (ValueError, OverflowError) as exc:
                raise ValueError("coefficients must be finite") from exc
            seen.add((t, k))
            fixed.append((t, k, coeff))
        object.__setattr__(self, "terms", tuple(fixed))


_LN_BITS = 240


def _atanh_twice(w: Fraction, bits: int) -> Fraction:
    # 2 atanh(w) = ln((1+w)/(1-w)); |w| <= 1/3 here so the series is geometric
    tol = Fraction(1, 1 << (bits + 8))
    w2 = w * w
    term = w
    acc = Fraction(0)
    j = 0
    while True:
        contrib = term / (2 * j + 1)
        acc += contrib
        if abs(contrib) < tol:
            return 2 * acc
        term *= w2
        j += 1


@lru_cache(maxsize=8)
def _ln2_frac(bits: int) -> Fraction:
    return _atanh_twice(Fraction(1, 3), bits)


def _ln_frac(x: float, bits: int = _LN_BITS) -> Fraction:
    # ln x as a dyadic rational with error below 2^-bits
    m0, e = math.frexp(x)  # x = m0 * 2^e with m0 in [0.5, 1)
    mf = Fraction(m0)
    val = e * _ln2_frac(bits) + _atanh_twice((mf - 1) / (mf + 1), bits)
    return Fraction(round(val * (1 << bits)), 1 << bits)


def evaluate(poly: ResiduePolynomial, x: float) -> float:
    """Evaluate the polynomial at x >= 1 in exact rational arithmetic.

    The float x is used exactly (every float is rational) and ln x enters
    as a dyadic rational accurate to 2^-240, so the result is correct to
    the final rounding even where the kernel cancels to twenty orders of
    magnitude below its term scale.
    """
    if x < 1.0:
        raise ValueError("residue kernels are evaluated on x >= 1")
    xf = Fraction(x)
    groups: dict[int, Fraction] = {}
    for t, k, coeff in poly.terms:
        groups[k] = groups.get(k, Fraction(0)) + coeff * xf**t
    if x == 1.0:
        return float(groups.get(0, Fraction(0)))
    u = _ln_frac(x)
    return float(sum(g * u**k for k, g in groups.items()))


def _mul_trunc(p: list[Fraction], q: list[Fraction], m: int) -> list[Fraction]:
    out = [Fraction(0)] * m
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j in range(min(m - i, len(q))):
            out[i + j] += pi * q[j]
    return out


def _inverse_power_series(d: Fraction, mt: int, m: int) -> list[Fraction]:
    # (d + u)^{-mt} expanded to order m-1 in u
    return [
        Fraction((-1) ** j * math.comb(mt + j - 1, j), 1) / d ** (mt + j)
        for j in range(m)
    ]


@lru_cache(maxsize=4096)
def _kernel_terms(
    poles_key: tuple[tuple[int, int], ...]
) -> tuple[tuple[tuple[int, int], Fraction], ...]:
    # Exact residue sum of x^s / (s * prod (s-t)^{m_t}); the 1/s factor is
    # appended as a pole at 0.  Returns ((t, k) -> coefficient of
    # x^t (ln x)^k / k! ... already divided by k!) sorted by key.
    full = poles_key + ((0, 1),)
    terms: dict[tuple[int, int], Fraction] = {}
    for p, m in full:
        # series of prod_{t != p} ((p - t) + u)^{-m_t} up to degree m-1
        q = [Fraction(1)] + [Fraction(0)] * (m - 1)
        for t, mt in full:
            if t == p:
                continue
            q = _mul_trunc(q, _inverse_power_series(Fraction(p - t), mt, m), m)
        for k in range(m):
            coeff = q[m - 1 - k] / math.factorial(k)
            if coeff != 0:
                terms[(p, k)] = terms.get((p, k), Fraction(0)) + coeff
    return tuple(sorted(terms.items()))


def _poly_from_exact(
    exact: dict[tuple[int, int], Fraction]
) -> ResiduePolynomial:
    return ResiduePolynomial(
        terms=tuple(
            (t, k, c) for (t, k), c in sorted(exact.items()) if c != 0
        )
    )


def _poles_key(poles: Counter) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((int(t), int(m)) for t, m in poles.items()))


def g_sigma_poles(sigma: tuple[int, ...], tau: int) -> dict[int, int]:
    """Pole multiset {t: multiplicity} of the permutation kernel.

    Pole t appears once for every i with tau + i + sigma_i >= t.
    """
    n = len(sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError("sigma must be a permutation of 1..n")
    depths = [tau + i + s for i, s in enumerate(sigma, start=1)]
    if any(d < 1 for d in depths):
        raise EmptyPoleSet(
            f"tau={tau} leaves index with tau+i+sigma_i < 1 (no poles)"
        )
    poles: Counter = Counter()
    for d in depths:
        for t in range(1, d + 1):
            poles[t] += 1
    return dict(poles)


def g_sigma(sigma, tau: int, n_r: int) -> ResiduePolynomial:
    """Closed form of the permutation kernel integral.

    Residue sum of (1/2 pi i) times the left-closed contour integral of
    e^{s ln x} / ( s * prod_{i=1}^{n_r} prod_{t=1}^{tau+i+sigma_i} (s-t) ),
    as a polynomial in x and ln x.
    """
    sigma = tuple(int(v) for v in sigma)
    if len(sigma) != n_r:
        raise ValueError("sigma length must equal n_r")
    poles = g_sigma_poles(sigma, tau)
    exact = dict(_kernel_terms(_poles_key(Counter(poles))))
    return _poly_from_exact(exact)


def g_n_full_poles(n, cfg) -> dict[int, int]:
    """Pole multiset of the Gamma-ratio kernel for exponent vector n."""
    n = tuple(int(v) for v in n)
    if len(n) != cfg.n_r:
        raise ValueError("exponent vector length must equal n_r")
    if any(v < 0 for v in n):
        raise ValueError("exponents must be non-negative")
    if cfg.n_t < cfg.n_r:
        raise ValueError("requires n_t >= n_r; apply interchange_normalize first")
    poles: Counter = Counter()
    for i, ni in enumerate(n, start=1):
        # Gamma(s - n_t - i - n_i + 1)/Gamma(s - i + 1)
        #   = 1 / prod_{t=i}^{n_t + i + n_i - 1} (s - t)
        for t in range(i, cfg.n_t + i + ni):
            poles[t] += 1
    return dict(poles)


def g_n_full(n, cfg) -> ResiduePolynomial:
    """Closed form of the Gamma-ratio kernel integral.

    Residue sum of (1/2 pi i) times the left-closed contour integral of
    x^s / s * prod_{i=1}^{n_r} Gamma(s - n_t - i - n_i + 1)/Gamma(s - i + 1),
    sharing the residue machinery of ``g_sigma``.
    """
    poles = g_n_full_poles(n, cfg)
    exact = dict(_kernel_terms(_poles_key(Counter(poles))))
    return _poly_from_exact(exact)


def _signed_permutations(n: int):
    for sigma in permutations(range(1, n + 1)):
        inv = sum(
            1
            for i in range(n)
            for j in range(i + 1, n)
            if sigma[i] > sigma[j]
        )
        yield sigma, -1 if inv % 2 else 1


@lru_cache(maxsize=256)
def sigma_sum_polynomial(n_t: int, n_r: int) -> ResiduePolynomial:
    """Permutation-weighted kernel sum behind the high-SNR coefficient.

    sum_sigma sgn(sigma) prod_i Gamma(tau+i+sigma_i) * g_sigma
    / prod_i (n_r-i)! (n_t-i)!,  accumulated in exact rational arithmetic
    (the alternating permutation sum cancels heavily, so floats only enter
    in the final conversion).
    """
    if n_t < n_r:
        raise ValueError("requires n_t >= n_r; apply interchange_normalize first")
    tau = n_t - n_r - 1
    denom = Fraction(1)
    for i in range(1, n_r + 1):
        denom *= math.factorial(n_r - i) * math.factorial(n_t - i)
    total: dict[tuple[int, int], Fraction] = {}
    for sigma, sign in _signed_permutations(n_r):
        weight = Fraction(sign, 1)
        for i, s in enumerate(sigma, start=1):
            weight *= math.factorial(tau + i + s - 1)  # Gamma(tau+i+sigma_i)
        poles = g_sigma_poles(sigma, tau)
        for key, coeff in _kernel_terms(_poles_key(Counter(poles))):
            total[key] = total.get(key, Fraction(0)) + weight * coeff / denom
    return _poly_from_exact(total)


def g0_via_permutation_identity(cfg) -> float:
    """Right-hand route of the kernel identity, for cross-validation.

    Evaluates the permutation-weighted kernel sum at x = 2^rate; equals
    evaluate(g_n_full(0, cfg), 2^rate) analytically, and the pair forms the
    package's two-route consistency check.
    """
    poly = sigma_sum_polynomial(cfg.n_t, cfg.n_r)
    return evaluate(poly, cfg.threshold)
