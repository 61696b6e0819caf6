"""Command-line frontend: figure-data sweeps and the verification suite.

Four subcommands:

- ``exact``   one exact outage evaluation, one CSV row
- ``sweep``   outage versus SNR for a method subset (exact / asym / mc)
- ``gain``    coding and modulation gain C(R) versus rate for several dims
- ``verify``  structural self-checks, exit 1 on any failure

Data rows are plain CSV on stdout (or ``--output``); run metadata lives
in ``#``-prefixed header lines with no timestamps, so output is
byte-stable for fixed inputs.  Exit codes: 0 ok, 1 verification
failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .asymptotic import coding_gain, outage_asymptotic
from .errors import MimoOutageError
from .exact import outage_exact
from .model import ChannelScenario, SystemConfig, validate_scenario
from .montecarlo import estimate_outage_sweep
from .properties import CHECK_NAMES, run_all_checks

__all__ = ["main"]

_COLUMNS = "model,n_t,n_r,rate,snr_db,probability,err_estimate,method"

_MODEL_ALIASES = {
    "ind": "independent",
    "independent": "independent",
    "semi": "semi-rx",
    "semi-rx": "semi-rx",
    "semi-tx": "semi-tx",
    "full": "full",
}

_METHOD_ORDER = ("exact", "asym", "mc")

# JSON config keys mirror the scenario/config fields plus run controls;
# anything else is rejected so typos cannot silently fall back to defaults.
_CONFIG_KEYS = {
    "model",
    "n_t",
    "n_r",
    "rate",
    "snr_db",
    "t_spectrum",
    "r_spectrum",
    "x_spectrum",
    "methods",
    "samples",
    "seed",
}


class UsageError(Exception):
    """Input that parses as flags but fails validation; exits 2."""


def _parse_spectrum(text: str, label: str) -> tuple[float, ...]:
    try:
        values = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"{label}: expected comma-separated reals, got {text!r}")
    if not values:
        raise UsageError(f"{label}: empty list")
    return values


def _parse_range(text: str, label: str) -> list[float]:
    """Inclusive grid a:b:step; a bare scalar is a one-point grid."""
    parts = text.split(":")
    if len(parts) == 1:
        try:
            return [float(parts[0])]
        except ValueError:
            raise UsageError(f"{label}: bad scalar {text!r}")
    if len(parts) != 3:
        raise UsageError(f"{label}: expected a:b:step, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"{label}: bad range {text!r}")
    if not (step > 0 and math.isfinite(step)):
        raise UsageError(f"{label}: step must be positive, got {step!r}")
    grid = []
    k = 0
    while True:
        v = a + k * step
        if v > b + 1e-9 * step:
            break
        grid.append(v)
        k += 1
    if not grid:
        raise UsageError(f"{label}: empty range {text!r}")
    return grid


def _parse_dims(text: str) -> list[tuple[int, int]]:
    dims = []
    for part in text.split(","):
        try:
            nt_s, nr_s = part.split("x")
            dims.append((int(nt_s), int(nr_s)))
        except ValueError:
            raise UsageError(f"--dims: expected NxM entries, got {part!r}")
    return dims


def _parse_methods(text: str) -> tuple[str, ...]:
    requested = [p.strip() for p in text.split(",") if p.strip()]
    for m in requested:
        if m not in _METHOD_ORDER:
            raise UsageError(
                f"--methods: unknown method {m!r}; choose from {','.join(_METHOD_ORDER)}"
            )
    if not requested:
        raise UsageError("--methods: empty list")
    return tuple(m for m in _METHOD_ORDER if m in requested)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config: invalid JSON in {path}: {exc}")
    if not isinstance(doc, dict):
        raise UsageError("--config: top level must be a JSON object")
    unknown = sorted(set(doc) - _CONFIG_KEYS)
    if unknown:
        raise UsageError(f"--config: unknown keys {', '.join(unknown)}")
    return doc


def _merged(args: argparse.Namespace, key: str, config: dict, default=None):
    # Precedence: explicit flag > config file > default.
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _spectrum_from(value, label: str) -> tuple[float, ...] | None:
    if value is None:
        return None
    if isinstance(value, str):
        return _parse_spectrum(value, label)
    if isinstance(value, (list, tuple)):
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError):
            raise UsageError(f"{label}: config entries must be numbers")
    raise UsageError(f"{label}: expected a list or comma string")


def _canonical_model(name) -> str:
    if not isinstance(name, str) or name not in _MODEL_ALIASES:
        known = ",".join(sorted(set(_MODEL_ALIASES)))
        raise UsageError(f"--model: unknown model {name!r}; choose from {known}")
    return _MODEL_ALIASES[name]


def _rescale(values: tuple[float, ...], target: float) -> tuple[float, ...]:
    total = math.fsum(values)
    if total <= 0:
        raise UsageError("spectrum must have positive total")
    return tuple(v * target / total for v in values)


def _build_scenario(args, config: dict) -> tuple[ChannelScenario, SystemConfig, float]:
    model = _canonical_model(_merged(args, "model", config, "independent"))
    n_t = int(_merged(args, "n_t", config, 1))
    n_r = int(_merged(args, "n_r", config, 1))
    rate = float(_merged(args, "rate", config, 1.0))
    snr_raw = _merged(args, "snr_db", config, 0.0)

    t = _spectrum_from(_merged(args, "t_spectrum", config), "--t-eigs")
    r = _spectrum_from(_merged(args, "r_spectrum", config), "--r-eigs")
    x = _spectrum_from(_merged(args, "x_spectrum", config), "--x-eigs")
    if args.renormalize:
        # Correlation spectra rescale to trace n; a power profile only
        # rescales down to the full-power budget, underuse is legitimate.
        if t is not None:
            t = _rescale(t, float(n_t))
        if r is not None:
            r = _rescale(r, float(n_r))
        if x is not None and math.fsum(x) > n_t:
            x = _rescale(x, float(n_t))

    scenario = ChannelScenario(
        model=model, t_spectrum=t, r_spectrum=r, x_spectrum=x
    )
    # Validate at the first grid point so bad input dies before any output.
    snr_grid = _parse_range(str(snr_raw), "--snr-db")
    cfg = SystemConfig(n_t=n_t, n_r=n_r, rate=rate, snr_db=snr_grid[0])
    scenario = validate_scenario(scenario, cfg)
    return scenario, cfg, snr_grid


def _spectrum_note(label: str, spectrum) -> str:
    if spectrum is None or getattr(spectrum, "identity", False):
        return f"{label}=identity"
    values = spectrum.values if hasattr(spectrum, "values") else spectrum
    return f"{label}={','.join(repr(v) for v in values)}"


def _scenario_header(scenario: ChannelScenario, cfg: SystemConfig) -> list[str]:
    x_note = (
        "x=uniform"
        if scenario.x_spectrum is None
        else "x=" + ",".join(repr(v) for v in scenario.x_spectrum)
    )
    return [
        f"# model={scenario.model} n_t={cfg.n_t} n_r={cfg.n_r} rate={cfg.rate!r}",
        "# "
        + " ".join(
            (
                _spectrum_note("t", scenario.t_spectrum),
                _spectrum_note("r", scenario.r_spectrum),
                x_note,
            )
        ),
    ]


def _row(scenario, cfg, snr_db, probability, err, method) -> str:
    return (
        f"{scenario.model},{cfg.n_t},{cfg.n_r},{cfg.rate!r},{snr_db!r},"
        f"{probability!r},{err!r},{method}"
    )


def _emit(lines: list[str], output: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_exact(args) -> int:
    config = _load_config(args.config) if args.config else {}
    scenario, cfg, snr_grid = _build_scenario(args, config)
    if len(snr_grid) != 1:
        raise UsageError("exact takes a single --snr-db value; use sweep for ranges")
    result = outage_exact(scenario, cfg)
    lines = ["# mimo-outage exact", *_scenario_header(scenario, cfg), _COLUMNS]
    lines.append(
        _row(scenario, cfg, cfg.snr_db, result.probability, result.err_estimate,
             result.method)
    )
    _emit(lines, args.output)
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args.config) if args.config else {}
    scenario, cfg, snr_grid = _build_scenario(args, config)
    methods = _parse_methods(str(_merged(args, "methods", config, "exact,asym")))
    samples = int(_merged(args, "samples", config, 1_000_000))
    seed = int(_merged(args, "seed", config, 0))

    by_method: dict[str, list] = {}
    for method in methods:
        if method == "mc":
            estimates = estimate_outage_sweep(scenario, cfg, snr_grid, samples, seed)
            by_method["mc"] = [(e.p_hat, e.std_err) for e in estimates]
        else:
            fn = outage_exact if method == "exact" else outage_asymptotic
            rows = []
            for snr in snr_grid:
                point = SystemConfig(
                    n_t=cfg.n_t, n_r=cfg.n_r, rate=cfg.rate, snr_db=snr
                )
                res = fn(scenario, point)
                rows.append((res.probability, res.err_estimate))
            by_method[method] = rows

    lines = ["# mimo-outage sweep", *_scenario_header(scenario, cfg)]
    snr_text = str(_merged(args, "snr_db", config, 0.0))
    lines.append(
        f"# methods={','.join(methods)} samples={samples} seed={seed} "
        f"snr_db={snr_text}"
    )
    lines.append(_COLUMNS)
    for i, snr in enumerate(snr_grid):
        for method in methods:
            p, err = by_method[method][i]
            lines.append(_row(scenario, cfg, snr, p, err, method))
    _emit(lines, args.output)
    return 0


def _cmd_gain(args) -> int:
    dims = _parse_dims(args.dims)
    if not dims:
        raise UsageError("--dims: empty list")
    rates = _parse_range(args.rate, "--rate")
    lines = [
        "# mimo-outage gain",
        f"# dims={args.dims}",
        "rate," + ",".join(f"c_{nt}x{nr}" for nt, nr in dims),
    ]
    for rate in rates:
        gains = [
            coding_gain(SystemConfig(n_t=nt, n_r=nr, rate=rate, snr_db=0.0))
            for nt, nr in dims
        ]
        lines.append(f"{rate!r}," + ",".join(repr(g) for g in gains))
    _emit(lines, args.output)
    return 0


def _cmd_verify(args) -> int:
    only = None
    if args.only:
        only = tuple(p.strip() for p in args.only.split(",") if p.strip())
        unknown = sorted(set(only) - set(CHECK_NAMES))
        if unknown:
            raise UsageError(
                f"--only: unknown checks {', '.join(unknown)}; "
                f"known: {', '.join(CHECK_NAMES)}"
            )
    records = run_all_checks(only=only)
    failures = 0
    for rec in records:
        status = "PASS" if rec.passed else "FAIL"
        failures += 0 if rec.passed else 1
        sys.stdout.write(f"{status} {rec.name}: {rec.details}\n")
    sys.stdout.write(
        f"{len(records) - failures}/{len(records)} checks passed\n"
    )
    return 1 if failures else 0


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help="ind, semi-rx, semi-tx, or full")
    p.add_argument("--nt", dest="n_t", type=int, help="transmit antennas")
    p.add_argument("--nr", dest="n_r", type=int, help="receive antennas")
    p.add_argument("--rate", help="target rate, bits/s/Hz")
    p.add_argument("--snr-db", dest="snr_db", help="transmit SNR in dB")
    p.add_argument(
        "--t-eigs", dest="t_spectrum",
        help="transmit correlation eigenvalues, comma-separated descending",
    )
    p.add_argument(
        "--r-eigs", dest="r_spectrum",
        help="receive correlation eigenvalues, comma-separated descending",
    )
    p.add_argument(
        "--x-eigs", dest="x_spectrum",
        help="input power profile (input covariance eigenvalues)",
    )
    p.add_argument(
        "--renormalize", action="store_true",
        help="rescale spectra whose trace is off instead of rejecting them",
    )
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--output", help="write CSV here instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo-outage",
        description="Outage probability of correlated Rayleigh MIMO channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_exact = sub.add_parser("exact", help="one exact evaluation")
    _add_scenario_flags(p_exact)
    p_exact.set_defaults(fn=_cmd_exact)

    p_sweep = sub.add_parser("sweep", help="outage versus SNR table")
    _add_scenario_flags(p_sweep)
    p_sweep.add_argument(
        "--methods", help="subset of exact,asym,mc (default exact,asym)"
    )
    p_sweep.add_argument("--samples", type=int, help="Monte Carlo sample count")
    p_sweep.add_argument("--seed", type=int, help="Monte Carlo seed")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_gain = sub.add_parser("gain", help="coding gain versus rate")
    p_gain.add_argument("--dims", required=True, help="antenna pairs, e.g. 1x1,3x2")
    p_gain.add_argument("--rate", required=True, help="rate range a:b:step")
    p_gain.add_argument("--output", help="write CSV here instead of stdout")
    p_gain.set_defaults(fn=_cmd_gain)

    p_verify = sub.add_parser("verify", help="run structural self-checks")
    p_verify.add_argument(
        "--only", help=f"comma-separated subset of: {', '.join(CHECK_NAMES)}"
    )
    p_verify.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, MimoOutageError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
