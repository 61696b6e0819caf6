"""Exact evaluators: closed forms, independent oracles, dispatch logic."""

import math

import numpy as np
import pytest

from mimo_outage import (
    ChannelScenario,
    EigenSpectrum,
    NonDistinctSpectrum,
    PermutationBudgetExceeded,
    SystemConfig,
    outage_exact,
    outage_full,
    outage_independent,
    outage_semi,
    phi_independent,
    phi_semi,
)
from mimo_outage.exact import PermutationTable, _phi_full_factory

import oracles


def _cfg(n_t, n_r, rate, snr_db):
    return SystemConfig(n_t=n_t, n_r=n_r, rate=rate, snr_db=snr_db)


class TestClosedForms:
    @pytest.mark.parametrize("snr_db", [-5.0, 0.0, 10.0, 30.0])
    @pytest.mark.parametrize("rate", [0.5, 2.0])
    def test_siso(self, snr_db, rate):
        res = outage_independent(_cfg(1, 1, rate, snr_db))
        assert res.probability == pytest.approx(
            oracles.siso_outage(rate, snr_db), abs=1e-10
        )

    @pytest.mark.parametrize("snr_db", [-5.0, 0.0, 10.0, 30.0])
    def test_miso_two_antennas(self, snr_db):
        res = outage_independent(_cfg(2, 1, 1.0, snr_db))
        assert res.probability == pytest.approx(
            oracles.miso2_outage(1.0, snr_db), abs=1e-10
        )

    def test_miso_known_point(self):
        # N_t=2, R=1, rho=1: 1 - 2/e.
        res = outage_independent(_cfg(2, 1, 1.0, 0.0))
        assert res.probability == pytest.approx(1.0 - 2.0 / math.e, abs=1e-12)


class TestMomentFunctions:
    @pytest.mark.parametrize(
        "n_t,n_r,snr_db", [(1, 1, 0.0), (2, 2, 5.0), (3, 2, 10.0)]
    )
    def test_unit_moment(self, n_t, n_r, snr_db):
        cfg = _cfg(n_t, n_r, 1.0, snr_db)
        assert phi_independent(1.0 + 0.0j, cfg) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("s", [0.5 + 3.0j, 1.7 - 2.0j, -0.5 + 0.5j])
    def test_independent_matches_determinant_oracle(self, s):
        cfg = _cfg(3, 2, 2.0, 10.0)
        got = phi_independent(s, cfg)
        want = complex(oracles.phi_independent_mp(s, 3, 2, cfg.rho))
        assert got == pytest.approx(want, rel=1e-8)

    def test_independent_scalar_and_vector_agree(self):
        cfg = _cfg(2, 2, 1.0, 5.0)
        ss = np.array([0.5 + 1.0j, 1.0 + 0.0j])
        vec = phi_independent(ss, cfg)
        assert vec[0] == phi_independent(ss[0], cfg)

    @pytest.mark.parametrize("s", [0.5 + 3.0j, 1.2 - 1.0j])
    def test_semi_matches_determinant_oracle(self, s):
        cfg = _cfg(3, 2, 2.0, 5.0)
        r = (1.4, 0.6)
        got = phi_semi(s, cfg, r)
        want = complex(oracles.phi_semi_mp(s, 3, 2, cfg.rho, r))
        assert got == pytest.approx(want, rel=1e-8)

    def test_semi_single_antenna_reduces_to_independent(self):
        cfg = _cfg(3, 1, 1.0, 5.0)
        s = 0.8 + 2.0j
        assert phi_semi(s, cfg, (1.0,)) == pytest.approx(
            phi_independent(s, cfg), rel=1e-12
        )

    @pytest.mark.parametrize("s", [0.5 + 2.0j, 1.5 + 0.0j])
    def test_full_matches_transcription(self, s):
        cfg = _cfg(3, 3, 2.0, 10.0)
        t, r = (2.3, 0.5, 0.2), (2.7, 0.2, 0.1)
        phi = _phi_full_factory(cfg, t, r, "compensated")
        got = phi(np.array([complex(s)]))[0]
        want = complex(oracles.phi_full_mp(s, 3, 3, cfg.rho, t, r))
        assert got == pytest.approx(want, rel=1e-8)

    def test_real_moment_against_simulation(self):
        # E[G] by direct averaging over the channel law; checks the tall
        # branch, which has no determinant oracle.
        cfg = _cfg(2, 3, 1.0, 0.0)
        r = (1.5, 1.0, 0.5)
        got = phi_semi(2.0 + 0.0j, cfg, r).real
        rng = np.random.default_rng(5)
        m = 200_000
        h = math.sqrt(0.5) * (
            rng.standard_normal((m, 3, 2)) + 1j * rng.standard_normal((m, 3, 2))
        )
        h *= np.sqrt(np.array(r))[None, :, None]
        gram = np.einsum("mij,mik->mjk", h.conj(), h)
        lam = np.linalg.eigvalsh(gram)
        g = np.prod(1.0 + cfg.rho * lam, axis=1)
        assert got == pytest.approx(
            float(g.mean()), abs=4.0 * float(g.std()) / math.sqrt(m)
        )


class TestFrozenValues:
    @pytest.mark.parametrize("key", list(oracles.FROZEN_EXACT))
    def test_library_matches_frozen(self, key):
        model, n_t, n_r, rate, snr_db, r = key
        cfg = _cfg(n_t, n_r, rate, snr_db)
        if model == "independent":
            res = outage_independent(cfg)
        else:
            res = outage_semi(cfg, r, side="rx")
        want = oracles.frozen_exact(*key)
        tol = max(1e-9 * want, 3.0 * res.err_estimate, 5e-15)
        assert abs(res.probability - want) <= tol


class TestInterchange:
    def test_independent_dims_swap(self):
        a = outage_independent(_cfg(3, 2, 2.0, 10.0))
        b = outage_independent(_cfg(2, 3, 2.0, 10.0))
        assert b.probability == pytest.approx(a.probability, rel=1e-12)

    def test_semi_sides_swap(self):
        # Correlation on the 3-antenna side, seen from both geometries.
        r3 = (1.5, 1.0, 0.5)
        wide_tx = outage_semi(_cfg(3, 2, 2.0, 5.0), r3, side="tx")
        tall_rx = outage_semi(_cfg(2, 3, 2.0, 5.0), r3, side="rx")
        assert wide_tx.probability == tall_rx.probability

    def test_transmit_flag_routes_tall_geometry(self):
        # side="tx" on a tall config must land in the wide evaluator with
        # the dimensions flipped.
        r2 = (1.4, 0.6)
        tall = outage_semi(_cfg(2, 3, 2.0, 5.0), r2, side="tx")
        wide = outage_semi(_cfg(3, 2, 2.0, 5.0), r2, side="rx")
        assert tall.probability == wide.probability


class TestDispatcher:
    def test_dispatch_matches_direct(self):
        cfg = _cfg(3, 2, 2.0, 5.0)
        r = (1.4, 0.6)
        t = (1.5, 1.0, 0.5)
        via = outage_exact(ChannelScenario(model="independent"), cfg)
        assert via.probability == outage_independent(cfg).probability
        via = outage_exact(
            ChannelScenario(model="semi-rx", r_spectrum=r), cfg
        )
        assert via.probability == outage_semi(cfg, r, side="rx").probability
        via = outage_exact(
            ChannelScenario(model="semi-tx", t_spectrum=t), cfg
        )
        assert via.probability == outage_semi(cfg, t, side="tx").probability
        via = outage_exact(
            ChannelScenario(model="full", t_spectrum=t, r_spectrum=r), cfg
        )
        assert via.probability == outage_full(cfg, t, r).probability

    def test_profile_folds_into_transmit_side(self):
        cfg = _cfg(3, 3, 3.0, 5.0)
        t, r = (1.3, 1.0, 0.7), (1.5, 1.0, 0.5)
        x = (2.6, 0.2, 0.2)
        scen = ChannelScenario(
            model="full", t_spectrum=t, r_spectrum=r, x_spectrum=x
        )
        got = outage_exact(scen, cfg)
        eff = sorted((tv * xv for tv, xv in zip(t, x)), reverse=True)
        power = math.fsum(eff)
        shifted = SystemConfig(
            n_t=3, n_r=3, rate=3.0,
            snr_db=5.0 + 10.0 * math.log10(power / 3.0),
        )
        scale = 3.0 / power
        want = outage_full(shifted, tuple(v * scale for v in eff), r)
        assert got.probability == want.probability

    def test_profile_on_uncorrelated_channel_becomes_transmit_spectrum(self):
        cfg = _cfg(3, 2, 2.0, 5.0)
        x = (1.5, 1.0, 0.5)
        got = outage_exact(
            ChannelScenario(model="independent", x_spectrum=x), cfg
        )
        want = outage_semi(cfg, x, side="tx")
        assert got.probability == want.probability

    def test_profile_inverting_transmit_correlation_snaps_to_identity(self):
        cfg = _cfg(3, 2, 2.0, 5.0)
        t = (1.5, 1.0, 0.5)
        x = tuple(1.0 / v for v in t)
        scale = 3.0 / math.fsum(x)
        x = tuple(v * scale for v in x)
        got = outage_exact(
            ChannelScenario(model="semi-tx", t_spectrum=t, x_spectrum=x), cfg
        )
        power = math.fsum(tv * xv for tv, xv in zip(t, x))
        shifted = SystemConfig(
            n_t=3, n_r=2, rate=2.0,
            snr_db=5.0 + 10.0 * math.log10(power / 3.0),
        )
        want = outage_independent(shifted)
        assert got.probability == want.probability

    def test_tied_fold_rejected_with_context(self):
        cfg = _cfg(3, 2, 2.0, 5.0)
        t = (1.75, 0.75, 0.5)
        x = (0.6, 1.4, 1.0)  # products (1.05, 1.05, 0.5) tie
        with pytest.raises(NonDistinctSpectrum, match="power profile"):
            outage_exact(
                ChannelScenario(model="semi-tx", t_spectrum=t, x_spectrum=x),
                cfg,
            )


class TestGuards:
    def test_full_rejects_identity_spectra(self):
        cfg = _cfg(2, 2, 1.0, 0.0)
        with pytest.raises(ValueError, match="identity"):
            outage_full(cfg, (1.0, 1.0), (1.4, 0.6))

    def test_semi_rejects_identity_spectrum(self):
        cfg = _cfg(2, 2, 1.0, 0.0)
        with pytest.raises(NonDistinctSpectrum):
            outage_semi(cfg, EigenSpectrum.identity_of(2), side="rx")

    def test_permutation_budget(self):
        with pytest.raises(PermutationBudgetExceeded):
            PermutationTable.for_size(8)
        with pytest.raises(PermutationBudgetExceeded):
            outage_independent(_cfg(8, 8, 1.0, 0.0))

    def test_bad_accumulator_name(self):
        with pytest.raises(ValueError, match="accumulator"):
            outage_independent(_cfg(2, 2, 1.0, 0.0), accumulator="fast")

    def test_bad_side_name(self):
        with pytest.raises(ValueError, match="side"):
            outage_semi(_cfg(2, 2, 1.0, 0.0), (1.4, 0.6), side="left")

    def test_accumulators_agree(self):
        cfg = _cfg(3, 3, 2.0, 10.0)
        t, r = (2.3, 0.5, 0.2), (2.7, 0.2, 0.1)
        a = outage_full(cfg, t, r, accumulator="compensated")
        b = outage_full(cfg, t, r, accumulator="double-double")
        assert b.probability == pytest.approx(a.probability, rel=1e-11)
