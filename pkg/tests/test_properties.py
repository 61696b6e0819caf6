"""Structural checks: majorization, sum reduction, convexity, registry."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mimo_outage import (
    CHECK_NAMES,
    CheckRecord,
    LengthMismatch,
    SystemConfig,
    convexity_scan,
    lemma1_reduction_check,
    majorizes,
    run_all_checks,
)
from mimo_outage.properties import g0_kernel, special_case_embedding_check


class TestMajorization:
    def test_uniform_is_majorized_by_everything(self):
        assert majorizes((1.0, 1.0, 1.0), (2.3, 0.5, 0.2))
        assert majorizes((1.0, 1.0, 1.0), (2.7, 0.2, 0.1))

    def test_spread_chain(self):
        assert majorizes((2.3, 0.5, 0.2), (2.7, 0.2, 0.1))
        assert not majorizes((2.7, 0.2, 0.1), (2.3, 0.5, 0.2))

    def test_reflexive(self):
        assert majorizes((2.3, 0.5, 0.2), (2.3, 0.5, 0.2))

    def test_incomparable_totals(self):
        assert not majorizes((1.0, 0.5), (1.0, 1.0))

    def test_tiny_prefix_dust_does_not_flip_order(self):
        v = (1.5, 1.0, 0.5)
        w = (1.5 + 5e-13, 1.0, 0.5 - 5e-13)
        assert majorizes(v, w)
        assert majorizes(w, v)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            majorizes((1.0, 1.0), (1.0, 1.0, 1.0))

    def test_requires_descending(self):
        with pytest.raises(ValueError, match="descending"):
            majorizes((0.5, 1.5), (1.0, 1.0))

    @given(
        raw=st.lists(
            st.floats(min_value=0.05, max_value=1.0), min_size=2, max_size=5
        ),
        frac=st.floats(min_value=0.1, max_value=0.9),
    )
    @settings(max_examples=80, deadline=None)
    def test_mass_transfer_increases_spread(self, raw, frac):
        n = len(raw)
        scale = n / math.fsum(raw)
        v = sorted((x * scale for x in raw), reverse=True)
        delta = frac * v[-1]
        w = list(v)
        w[0] += delta
        w[-1] -= delta
        assert majorizes(v, w)
        if delta > 1e-9:
            assert not majorizes(w, v)


class TestLemmaReduction:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_collapse_holds(self, n):
        rec = lemma1_reduction_check(n, trials=30, seed=n)
        assert rec.passed
        assert rec.name == "lemma1"

    def test_four_by_four(self):
        assert lemma1_reduction_check(4, trials=5, seed=1).passed

    @pytest.mark.parametrize("n", [0, 5])
    def test_size_budget(self, n):
        with pytest.raises(ValueError, match="n <= 4"):
            lemma1_reduction_check(n, trials=1)


class TestConvexityScan:
    def test_rate_kernel_is_convex(self):
        grid = [0.25 * k for k in range(1, 17)]
        rec = convexity_scan(g0_kernel(2, 2), grid)
        assert rec.passed

    def test_concave_probe_rejected(self):
        grid = [0.25 * k for k in range(1, 17)]
        rec = convexity_scan(lambda r: math.sqrt(r), grid)
        assert not rec.passed

    def test_decreasing_probe_rejected(self):
        rec = convexity_scan(lambda r: -r, [1.0, 2.0, 3.0])
        assert not rec.passed

    def test_needs_three_points(self):
        with pytest.raises(ValueError, match="three"):
            convexity_scan(lambda r: r * r, [1.0, 2.0])


class TestEmbedding:
    def test_identity_collapse(self):
        cfg = SystemConfig(n_t=2, n_r=2, rate=2.0, snr_db=20.0)
        rec = special_case_embedding_check(cfg)
        assert rec.passed
        assert rec.name == "embedding"


@pytest.fixture(scope="module")
def all_records():
    return run_all_checks()


class TestRegistry:
    def test_names_are_stable(self):
        assert CHECK_NAMES == (
            "majorization",
            "lemma1",
            "remark1",
            "convexity",
            "embedding",
            "moment",
            "oracle",
        )

    def test_every_check_passes(self, all_records):
        failed = [r for r in all_records if not r.passed]
        assert failed == [], [(r.name, r.details) for r in failed]

    def test_full_run_covers_registry(self, all_records):
        assert [r.name for r in all_records] == list(CHECK_NAMES)

    def test_subset_selection_preserves_order(self):
        recs = run_all_checks(only=["lemma1", "majorization"])
        assert [r.name for r in recs] == ["lemma1", "majorization"]

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="unknown checks"):
            run_all_checks(only=["majorization", "nonesuch"])

    def test_fault_injection_appends_failure(self, monkeypatch):
        monkeypatch.setenv("MIMO_OUTAGE_FAULT", "1")
        recs = run_all_checks(only=["majorization"])
        assert recs[-1] == CheckRecord(
            name="injected-fault",
            passed=False,
            details="fault injection requested via environment",
        )
        assert recs[0].passed
