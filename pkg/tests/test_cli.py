"""Command-line interface: output format, precedence, exit codes."""

import json

import pytest

from mimo_outage import (
    ChannelScenario,
    SystemConfig,
    estimate_outage_sweep,
    outage_independent,
    outage_semi,
)
from mimo_outage.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExact:
    def test_single_row(self, capsys):
        code, out, err = _run(
            capsys, "exact", "--nt", "2", "--nr", "2", "--rate", "1",
            "--snr-db", "0",
        )
        assert code == 0
        assert err == ""
        lines = out.splitlines()
        assert lines[0] == "# mimo-outage exact"
        assert lines[3] == (
            "model,n_t,n_r,rate,snr_db,probability,err_estimate,method"
        )
        fields = lines[4].split(",")
        assert fields[:5] == ["independent", "2", "2", "1.0", "0.0"]
        assert fields[7] == "exact"
        want = outage_independent(SystemConfig(2, 2, 1.0, 0.0))
        assert float(fields[5]) == want.probability
        assert float(fields[6]) == want.err_estimate

    def test_model_alias_and_spectrum_flags(self, capsys):
        code, out, _ = _run(
            capsys, "exact", "--model", "semi", "--nt", "3", "--nr", "2",
            "--rate", "2", "--snr-db", "5", "--r-eigs", "1.4,0.6",
        )
        assert code == 0
        row = out.splitlines()[-1]
        assert row.startswith("semi-rx,3,2,")
        want = outage_semi(SystemConfig(3, 2, 2.0, 5.0), (1.4, 0.6))
        assert float(row.split(",")[5]) == want.probability

    def test_identity_spectra_in_header(self, capsys):
        _, out, _ = _run(
            capsys, "exact", "--nt", "2", "--nr", "2", "--rate", "1",
            "--snr-db", "0",
        )
        assert "# t=identity r=identity x=uniform" in out

    def test_range_rejected(self, capsys):
        code, _, err = _run(
            capsys, "exact", "--nt", "1", "--nr", "1", "--rate", "1",
            "--snr-db", "0:10:5",
        )
        assert code == 2
        assert "use sweep" in err

    def test_output_file_matches_stdout(self, capsys, tmp_path):
        args = (
            "exact", "--nt", "2", "--nr", "1", "--rate", "1", "--snr-db", "3",
        )
        code, out, _ = _run(capsys, *args)
        assert code == 0
        target = tmp_path / "row.csv"
        code2 = main([*args, "--output", str(target)])
        captured = capsys.readouterr()
        assert code2 == 0
        assert captured.out == ""
        assert target.read_text() == out


class TestSweep:
    def test_byte_stable_and_method_order_canonical(self, capsys):
        base = (
            "sweep", "--nt", "1", "--nr", "1", "--rate", "1",
            "--snr-db", "0:10:5",
        )
        code, first, _ = _run(capsys, *base, "--methods", "exact,asym")
        assert code == 0
        code, again, _ = _run(capsys, *base, "--methods", "exact,asym")
        assert again == first
        # Requested order must not leak into the output.
        code, permuted, _ = _run(capsys, *base, "--methods", "asym,exact")
        assert permuted == first

    def test_rows_grouped_by_snr(self, capsys):
        _, out, _ = _run(
            capsys, "sweep", "--nt", "1", "--nr", "1", "--rate", "1",
            "--snr-db", "0:5:5", "--methods", "exact,asym",
        )
        methods = [
            line.rsplit(",", 1)[1]
            for line in out.splitlines()
            if not line.startswith("#") and not line.startswith("model,")
        ]
        assert methods == ["exact", "asym", "exact", "asym"]

    def test_mc_rows_match_library_sweep(self, capsys):
        code, out, _ = _run(
            capsys, "sweep", "--nt", "1", "--nr", "1", "--rate", "1",
            "--snr-db", "0:5:5", "--methods", "mc", "--samples", "4096",
            "--seed", "3",
        )
        assert code == 0
        rows = [
            line.split(",")
            for line in out.splitlines()
            if line.endswith(",mc")
        ]
        want = estimate_outage_sweep(
            ChannelScenario(model="independent"),
            SystemConfig(1, 1, 1.0, 0.0),
            [0.0, 5.0],
            4096,
            3,
        )
        assert len(rows) == 2
        for row, est in zip(rows, want):
            assert float(row[5]) == est.p_hat
            assert float(row[6]) == est.std_err

    def test_header_names_methods_and_seed(self, capsys):
        _, out, _ = _run(
            capsys, "sweep", "--nt", "1", "--nr", "1", "--rate", "1",
            "--snr-db", "2", "--methods", "asym", "--samples", "64",
            "--seed", "9",
        )
        assert "# methods=asym samples=64 seed=9 snr_db=2" in out

    @pytest.mark.parametrize(
        "bad", ["1:2", "1:2:0", "5:1:1", "a:b:c", "1:2:0.5:9"]
    )
    def test_bad_ranges(self, capsys, bad):
        code, _, err = _run(
            capsys, "sweep", "--nt", "1", "--nr", "1", "--rate", "1",
            "--snr-db", bad,
        )
        assert code == 2
        assert "error:" in err

    def test_unknown_method(self, capsys):
        code, _, err = _run(
            capsys, "sweep", "--nt", "1", "--nr", "1", "--rate", "1",
            "--snr-db", "0", "--methods", "exact,guess",
        )
        assert code == 2
        assert "unknown method" in err


class TestGain:
    def test_known_siso_column(self, capsys):
        code, out, _ = _run(
            capsys, "gain", "--dims", "1x1,2x2", "--rate", "1:2:0.5"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[2] == "rate,c_1x1,c_2x2"
        data = [line.split(",") for line in lines[3:]]
        assert [row[0] for row in data] == ["1.0", "1.5", "2.0"]
        for row in data:
            rate = float(row[0])
            # SISO: g_0(x) = x - 1, so C = 1/(2^R - 1).
            assert float(row[1]) == pytest.approx(
                1.0 / (2.0**rate - 1.0), rel=1e-12
            )

    def test_interchange_symmetric_columns(self, capsys):
        _, out, _ = _run(capsys, "gain", "--dims", "3x2,2x3", "--rate", "2")
        row = out.splitlines()[-1].split(",")
        assert row[1] == row[2]

    def test_bad_dims(self, capsys):
        code, _, err = _run(capsys, "gain", "--dims", "3y2", "--rate", "1")
        assert code == 2
        assert "--dims" in err


class TestVerify:
    def test_subset_passes(self, capsys):
        code, out, _ = _run(capsys, "verify", "--only", "majorization,lemma1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("PASS majorization:")
        assert lines[1].startswith("PASS lemma1:")
        assert lines[2] == "2/2 checks passed"

    def test_fault_injection_fails_the_run(self, capsys, monkeypatch):
        monkeypatch.setenv("MIMO_OUTAGE_FAULT", "1")
        code, out, _ = _run(capsys, "verify", "--only", "majorization")
        assert code == 1
        assert "FAIL injected-fault:" in out
        assert "1/2 checks passed" in out

    def test_unknown_check(self, capsys):
        code, _, err = _run(capsys, "verify", "--only", "nonesuch")
        assert code == 2
        assert "unknown checks" in err


class TestConfigFile:
    def _write(self, tmp_path, doc):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc))
        return str(path)

    def test_config_drives_the_run(self, capsys, tmp_path):
        path = self._write(
            tmp_path,
            {
                "model": "semi",
                "n_t": 3,
                "n_r": 2,
                "rate": 2.0,
                "snr_db": 5.0,
                "r_spectrum": [1.4, 0.6],
            },
        )
        code, out, _ = _run(capsys, "exact", "--config", path)
        assert code == 0
        row = out.splitlines()[-1]
        want = outage_semi(SystemConfig(3, 2, 2.0, 5.0), (1.4, 0.6))
        assert row.startswith("semi-rx,3,2,2.0,5.0,")
        assert float(row.split(",")[5]) == want.probability

    def test_flag_overrides_config(self, capsys, tmp_path):
        path = self._write(
            tmp_path,
            {
                "model": "semi",
                "n_t": 3,
                "n_r": 2,
                "rate": 2.0,
                "snr_db": 5.0,
                "r_spectrum": [1.4, 0.6],
            },
        )
        code, out, _ = _run(
            capsys, "exact", "--config", path, "--snr-db", "10"
        )
        assert code == 0
        row = out.splitlines()[-1]
        want = outage_semi(SystemConfig(3, 2, 2.0, 10.0), (1.4, 0.6))
        assert float(row.split(",")[5]) == want.probability

    def test_unknown_key_rejected(self, capsys, tmp_path):
        path = self._write(tmp_path, {"modle": "ind"})
        code, _, err = _run(capsys, "exact", "--config", path)
        assert code == 2
        assert "modle" in err

    def test_invalid_json(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, err = _run(capsys, "exact", "--config", str(path))
        assert code == 2
        assert "invalid JSON" in err

    def test_non_object_top_level(self, capsys, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        code, _, err = _run(capsys, "exact", "--config", str(path))
        assert code == 2
        assert "JSON object" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = _run(
            capsys, "exact", "--config", str(tmp_path / "absent.json")
        )
        assert code == 2
        assert "cannot read" in err


class TestRenormalize:
    def test_off_trace_spectrum_rejected_without_flag(self, capsys):
        code, _, err = _run(
            capsys, "exact", "--model", "semi", "--nt", "3", "--nr", "2",
            "--rate", "2", "--snr-db", "5", "--r-eigs", "2.8,1.2",
        )
        assert code == 2
        assert "error:" in err

    def test_rescales_correlation_spectrum(self, capsys):
        code, out, _ = _run(
            capsys, "exact", "--model", "semi", "--nt", "3", "--nr", "2",
            "--rate", "2", "--snr-db", "5", "--r-eigs", "2.8,1.2",
            "--renormalize",
        )
        assert code == 0
        want = outage_semi(SystemConfig(3, 2, 2.0, 5.0), (1.4, 0.6))
        assert float(out.splitlines()[-1].split(",")[5]) == want.probability

    def test_power_profile_only_scales_down(self, capsys):
        # Underuse of the power budget is legitimate and must survive.
        code, out, _ = _run(
            capsys, "exact", "--nt", "2", "--nr", "1", "--rate", "1",
            "--snr-db", "0", "--x-eigs", "0.9,0.3", "--renormalize",
        )
        assert code == 0
        assert "x=0.9,0.3" in out


class TestUsageErrors:
    def test_unknown_model(self, capsys):
        code, _, err = _run(
            capsys, "exact", "--model", "kron", "--nt", "1", "--nr", "1",
            "--rate", "1", "--snr-db", "0",
        )
        assert code == 2
        assert "unknown model" in err

    def test_bad_spectrum_text(self, capsys):
        code, _, err = _run(
            capsys, "exact", "--model", "semi", "--nt", "2", "--nr", "2",
            "--rate", "1", "--snr-db", "0", "--r-eigs", "1.4,abc",
        )
        assert code == 2
        assert "comma-separated" in err

    def test_scenario_validation_failures_exit_two(self, capsys):
        # Spectrum length disagrees with the antenna count.
        code, _, err = _run(
            capsys, "exact", "--model", "semi", "--nt", "3", "--nr", "2",
            "--rate", "2", "--snr-db", "5", "--r-eigs", "1.5,1.0,0.5",
        )
        assert code == 2
        assert "error:" in err
