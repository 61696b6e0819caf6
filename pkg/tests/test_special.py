"""Special functions against mpmath and against their defining identities."""

import math

import mpmath as mp
import numpy as np
import pytest

from mimo_outage.errors import (
    InvalidDegenerateParameters,
    PoleAtNonpositiveInteger,
)
from mimo_outage.special import (
    _psi_quad,
    _psi_series,
    ln_gamma,
    pochhammer,
    psi_row,
    tricomi_psi,
    xi,
)


def _mp_loggamma(z: complex) -> complex:
    return complex(mp.loggamma(mp.mpc(z)))


def _mp_hyperu(a: float, b: complex, z: float) -> complex:
    with mp.workdps(30):
        return complex(mp.hyperu(a, mp.mpc(b), z))


class TestLnGamma:
    @pytest.mark.parametrize(
        "z",
        [
            0.5,
            1.0,
            7.3,
            2.5 + 40.0j,
            0.5 - 17.0j,
            -0.75 + 3.0j,
            -4.2 - 55.0j,
            -10.6 + 0.3j,
            1e-3 + 1e-3j,
        ],
    )
    def test_matches_mpmath(self, z):
        got = ln_gamma(z)
        want = _mp_loggamma(complex(z))
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_array_input(self):
        zs = np.array([1.5 + 2.0j, -0.5 + 9.0j, 3.0 - 4.0j])
        got = ln_gamma(zs)
        for g, z in zip(got, zs):
            assert g == pytest.approx(_mp_loggamma(complex(z)), rel=1e-12)

    @pytest.mark.parametrize("z", [0.0, -1.0, -7.0])
    def test_pole_raises(self, z):
        with pytest.raises(PoleAtNonpositiveInteger):
            ln_gamma(z)

    def test_large_imag_stays_finite(self):
        # The reflection path must not overflow through sin(pi z).
        got = ln_gamma(-3.5 + 300.0j)
        assert math.isfinite(got.real) and math.isfinite(got.imag)
        assert got == pytest.approx(_mp_loggamma(-3.5 + 300.0j), rel=1e-11)


class TestPochhammer:
    def test_values(self):
        assert pochhammer(3.0, 0) == 1.0
        assert pochhammer(3.0, 4) == pytest.approx(3 * 4 * 5 * 6)
        assert pochhammer(0.5, 2) == pytest.approx(0.75)
        assert pochhammer(2.0 + 1.0j, 2) == pytest.approx((2 + 1j) * (3 + 1j))

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            pochhammer(1.0, -1)
        with pytest.raises(ValueError):
            pochhammer(1.0, 1.5)


class TestPsiRow:
    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 4.0])
    @pytest.mark.parametrize("z", [0.1, 1.0, 5.0])
    def test_contiguous_relation_identity(self, a, z):
        # Psi(a, a+1; z) = z^{-a} exactly; exercises the real-axis route.
        got = psi_row(a, np.array([a + 1.0 + 0.0j]), z)[0]
        assert got == pytest.approx(z**-a, rel=1e-9)

    def test_quadrature_route_matches_mpmath(self):
        # z >= |Im b|/2 keeps these on the rotated-ray quadrature.
        a, z = 2.0, 6.0
        bs = np.array([a + 0.3 + 1.0j, a - 1.0 + 5.0j, a + 2.0 + 11.0j])
        got = psi_row(a, bs, z)
        for g, b in zip(got, bs):
            assert g == pytest.approx(_mp_hyperu(a, complex(b), z), rel=1e-9)

    def test_series_route_matches_mpmath(self):
        # z < |Im b|/2 with |Im b| > 2 selects the connection series.
        a, z = 1.5, 0.8
        bs = np.array([0.5 + 8.0j, -2.0 + 30.0j, 1.0 + 60.0j])
        got = psi_row(a, bs, z)
        for g, b in zip(got, bs):
            assert g == pytest.approx(_mp_hyperu(a, complex(b), z), rel=5e-9)

    def test_routes_agree_on_overlap(self):
        # Both routes are valid on a band; their agreement bounds the error.
        a, z = 1.0, 1.2
        bs = np.array([0.5 + 4.0j, 1.5 + 7.0j, -0.5 + 12.0j])
        q = _psi_quad(a, bs, z)
        s = _psi_series(a, bs, z)
        assert np.max(np.abs(q - s) / np.abs(s)) < 1e-8

    def test_conjugate_symmetry(self):
        a, z = 1.0, 0.5
        b = np.array([0.5 + 9.0j, 0.5 - 9.0j])
        got = psi_row(a, b, z)
        assert got[1] == pytest.approx(np.conj(got[0]), rel=1e-14)

    def test_mixed_dispatch_vector(self):
        # One call hitting near-real, quadrature, and series elements.
        a, z = 1.0, 2.0
        bs = np.array([1.3 + 0.0j, 1.3 + 3.0j, 1.3 + 40.0j])
        got = psi_row(a, bs, z)
        for g, b in zip(got, bs):
            assert g == pytest.approx(_mp_hyperu(a, complex(b), z), rel=1e-8)


class TestTricomiPsi:
    def test_scalar_matches_mpmath(self):
        val = tricomi_psi(1.0, 2.5 + 6.0j, 1.5)
        assert val == pytest.approx(_mp_hyperu(1.0, 2.5 + 6.0j, 1.5), rel=1e-9)

    def test_negative_imag_via_conjugate(self):
        up = tricomi_psi(2.0, 1.0 + 5.0j, 3.0)
        dn = tricomi_psi(2.0, 1.0 - 5.0j, 3.0)
        assert dn == pytest.approx(up.conjugate(), rel=1e-14)

    def test_full_output_reports_convergence(self):
        val, err, converged = tricomi_psi(1.0, 3.0 + 2.0j, 2.0, full_output=True)
        assert converged
        assert err < 1e-8 * abs(val)

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            tricomi_psi(-1.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            tricomi_psi(1.0, 2.0, 0.0)


class TestXi:
    def test_degenerate_collapses_to_gamma(self):
        # A=0 with alpha=-1, phi=1 is Gamma(a - s).
        s = 0.3 + 2.0j
        got = xi(2.5, -1.0, 0.0, 1.0, s)
        want = complex(mp.gamma(mp.mpc(2.5 - s)))
        assert got == pytest.approx(want, rel=1e-11)

    def test_degenerate_requires_special_parameters(self):
        with pytest.raises(InvalidDegenerateParameters):
            xi(2.5, 1.0, 0.0, 1.0, 0.5)
        with pytest.raises(InvalidDegenerateParameters):
            xi(2.5, -1.0, 0.0, 2.0, 0.5)

    def test_negative_scale_rejected(self):
        with pytest.raises(ValueError):
            xi(1.0, 1.0, -2.0, 1.0, 0.5)

    def test_general_case_composes_power_and_psi(self):
        a, alpha, big_a, phi_p, s = 1.5, 1.0, 2.0, 1.0, 0.4 + 1.0j
        got = xi(a, alpha, big_a, phi_p, s)
        exponent = phi_p + a + alpha * s - 1.0
        want = big_a**exponent * _mp_hyperu(phi_p, phi_p + a + alpha * s, big_a)
        assert got == pytest.approx(complex(want), rel=1e-9)
