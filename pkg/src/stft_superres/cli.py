"""Command-line interface: certify, recover, bench and invert.

Exit codes: 0 success, 1 bad input (including corrupted measurements),
2 solver failure or ill-conditioned certificate system, 3 result produced but
flagged (unreliable recovery, certificate that fails verification).

Option precedence is flag > APP_* environment variable > config file > default.
The config file is TOML; top-level keys set global options and the tables
[certify], [recover], [bench], [invert] and [solver] set subcommand options.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .certificate import IllConditionedError, build_certificate, verify_certificate
from .fileio import atomic_write_text
from .measures import REAL, TORUS, DiscreteMeasure, MeasureError, ParameterError, WindowParams
from .solver import DegenerateSupportError, SolverFailure, SolverOptions, recover, recover_fourier
from .stft import CorruptedMeasurementError, MomentVector, StftMeasurements, complete_inversion_approx

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("stft_superres")

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_FLAGGED = 0, 1, 2, 3

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO,
              "debug": logging.DEBUG}

GLOBAL_DEFAULTS = {"seed": 0, "output_dir": ".", "threads": 1, "log_level": "warn"}
ENV = {"seed": "APP_SEED", "output_dir": "APP_OUTPUT_DIR", "threads": "APP_THREADS",
       "log_level": "APP_LOG_LEVEL", "config": "APP_CONFIG"}

DEFAULTS = {
    "certify": {"support": None, "random": None, "signs": None, "fc": 50, "sigma": None,
                "grid": None, "exclusion": None, "domain": REAL, "report": None,
                "certificate": None},
    "recover": {"measurements": None, "mode": "stft", "fc": 50, "N": None, "sigma": None,
                "out": None},
    "bench": {"deltas": None, "trials": 100, "fc": 50, "N": None, "sigma": None,
              "modes": "stft,fourier", "preset": "strict", "plot": None, "record_time": False},
    "invert": {"measure": None, "t": None, "F": None, "sigma": 1.0 / 200},
}


class InputError(Exception):
    """Bad command line, config file or input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _global_flags(parser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=d, help="master seed (default 0)")
    parser.add_argument("--config", default=d, help="TOML config file")
    parser.add_argument("--output-dir", dest="output_dir", default=d, help="directory for outputs")
    parser.add_argument("--threads", type=int, default=d, help="worker processes for bench")
    parser.add_argument("--log-level", dest="log_level", choices=sorted(LOG_LEVELS), default=d)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stft-superres", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("certify", help="build and verify an interpolating dual certificate")
    _global_flags(p, suppress=True)
    p.add_argument("--support", help="JSON list of support points, inline or a file path")
    p.add_argument("--random", nargs=2, metavar=("S", "DELTA"),
                   help="random support of S points with separation >= DELTA")
    p.add_argument("--signs", help="JSON list of [re, im] pairs or 'random'")
    p.add_argument("--fc", type=int)
    p.add_argument("--sigma", type=float, help="window width, default 1/(4 fc)")
    p.add_argument("--grid", type=float, help="verification grid spacing, default 1/(64 fc)")
    p.add_argument("--exclusion", type=float, help="exclusion radius, default delta/4")
    p.add_argument("--domain", choices=[REAL, TORUS])
    p.add_argument("--report", help="verification report JSON path")
    p.add_argument("--certificate", help="also write the certificate JSON here")

    p = sub.add_parser("recover", help="TV recovery from measurement CSV")
    _global_flags(p, suppress=True)
    p.add_argument("--measurements", help="CSV k,n,re,im (stft) or m,re,im (fourier)")
    p.add_argument("--mode", choices=list(bench_mod.MODES))
    p.add_argument("--fc", type=int)
    p.add_argument("--N", type=int, help="window truncation, default: strict preset")
    p.add_argument("--sigma", type=float, help="window width, default 1/(4 fc)")
    p.add_argument("--out", help="result JSON path")

    p = sub.add_parser("bench", help="STFT versus Fourier success-rate sweep")
    _global_flags(p, suppress=True)
    p.add_argument("--deltas", help="comma-separated delta * f_c values")
    p.add_argument("--trials", type=int)
    p.add_argument("--fc", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--modes", help="comma-separated subset of stft,fourier")
    p.add_argument("--preset", choices=["strict", "paper"],
                   help="strict: sigma = 1/(4 fc), g_N/g_0 <= 1e-6; paper: fc = 50, N = 50, sigma = 1/200")
    p.add_argument("--plot", help="SVG output path")
    p.add_argument("--record-time", dest="record_time", action="store_const", const=True,
                   help="store wall-clock times (outputs are then not reproducible)")

    p = sub.add_parser("invert", help="finite-F complete-measurement inversion at one point")
    _global_flags(p, suppress=True)
    p.add_argument("--measure", help="measure JSON, inline or a file path")
    p.add_argument("--t", type=float)
    p.add_argument("--F", type=int)
    p.add_argument("--sigma", type=float)
    return parser


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    known = set(GLOBAL_DEFAULTS) | set(DEFAULTS) | {"solver"}
    unknown = set(cfg) - known
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    for section, defaults in DEFAULTS.items():
        extra = set(cfg.get(section, {})) - set(defaults)
        if extra:
            raise InputError(f"unknown keys in [{section}]: {sorted(extra)}")
    fields = {f.name for f in dataclasses.fields(SolverOptions)}
    extra = set(cfg.get("solver", {})) - fields
    if extra:
        raise InputError(f"unknown keys in [solver]: {sorted(extra)}")
    return cfg


def _resolve(args) -> tuple[dict, dict, SolverOptions]:
    config_path = getattr(args, "config", None) or os.environ.get(ENV["config"])
    cfg = _load_config(config_path)
    glob = {}
    for key, default in GLOBAL_DEFAULTS.items():
        value = getattr(args, key, None)
        if value is None and os.environ.get(ENV[key]) is not None:
            value = os.environ[ENV[key]]
        if value is None:
            value = cfg.get(key, default)
        glob[key] = value
    try:
        glob["seed"] = int(glob["seed"])
        glob["threads"] = int(glob["threads"])
    except ValueError as exc:
        raise InputError(f"bad global option: {exc}") from exc
    if glob["threads"] < 1:
        raise InputError("--threads must be >= 1")
    if glob["log_level"] not in LOG_LEVELS:
        raise InputError(f"log level must be one of {sorted(LOG_LEVELS)}")
    opts = {}
    section = cfg.get(args.command, {})
    for key, default in DEFAULTS[args.command].items():
        value = getattr(args, key, None)
        opts[key] = value if value is not None else section.get(key, default)
    try:
        solver = SolverOptions(**cfg.get("solver", {}))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad [solver] options: {exc}") from exc
    return glob, opts, solver


def _json_arg(text: str):
    """Parse inline JSON, or read JSON from a file if ``text`` names one."""
    try:
        if os.path.exists(text):
            with open(text) as fh:
                return json.load(fh)
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse JSON {text!r}: {exc}") from exc


def _out_path(glob: dict, value, default_name: str) -> Path:
    path = Path(value) if value else Path(default_name)
    if not path.is_absolute():
        path = Path(glob["output_dir"]) / path
    return path


def _write_json(path: Path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------


def cmd_certify(glob, opts, solver) -> int:
    rng = np.random.default_rng(glob["seed"])
    fc = int(opts["fc"])
    sigma = float(opts["sigma"]) if opts["sigma"] is not None else 1.0 / (4 * fc)
    params = WindowParams(sigma, fc, 0)
    if (opts["support"] is None) == (opts["random"] is None):
        raise InputError("give exactly one of --support or --random")
    if opts["random"] is not None:
        try:
            S, delta = int(opts["random"][0]), float(opts["random"][1])
        except (TypeError, ValueError) as exc:
            raise InputError(f"--random expects S DELTA: {exc}") from exc
        if S < 1 or not delta > 0:
            raise InputError("--random needs S >= 1 and DELTA > 0")
        gaps = delta + rng.uniform(0.0, delta, S - 1)
        support = np.concatenate([[0.0], np.cumsum(gaps)])
        if opts["domain"] == TORUS:
            if support[-1] + delta > 1:
                raise InputError("random support does not fit on the torus")
    else:
        raw = _json_arg(opts["support"])
        if not isinstance(raw, list) or not all(isinstance(v, (int, float)) for v in raw):
            raise InputError("support JSON must be a list of numbers")
        support = np.array(sorted(raw), dtype=float)
    if opts["signs"] is None or opts["signs"] == "random":
        signs = np.exp(2j * np.pi * rng.random(support.size))
    else:
        raw = _json_arg(opts["signs"])
        try:
            signs = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in raw])
        except (TypeError, ValueError) as exc:
            raise InputError(f"signs JSON must be numbers or [re, im] pairs: {exc}") from exc
        if signs.size != support.size:
            raise InputError("signs and support differ in length")
        signs = signs / np.abs(signs)
    cert = build_certificate(support, signs, params, opts["domain"])
    report = verify_certificate(cert, opts["grid"], opts["exclusion"])
    out = report.to_dict()
    out["support"] = [float(t) for t in cert.support]
    _write_json(_out_path(glob, opts["report"], "certificate_report.json"), out)
    if opts["certificate"]:
        atomic_write_text(_out_path(glob, opts["certificate"], "certificate.json"), cert.to_json())
    print(json.dumps({"passed": report.passed, "sup_off_support": report.sup_off_support,
                      "max_interpolation_residual": report.max_interpolation_residual}))
    return EXIT_OK if report.passed else EXIT_FLAGGED


def _window(opts) -> WindowParams:
    fc = int(opts["fc"])
    sigma = float(opts["sigma"]) if opts["sigma"] is not None else 1.0 / (4 * fc)
    if opts["N"] is None:
        return WindowParams.strict_preset(fc, sigma)
    return WindowParams(sigma, fc, int(opts["N"]))


def cmd_recover(glob, opts, solver) -> int:
    if not opts["measurements"]:
        raise InputError("--measurements is required")
    try:
        text = Path(opts["measurements"]).read_text()
    except OSError as exc:
        raise InputError(f"cannot read measurements: {exc}") from exc
    if opts["mode"] == "stft":
        Y = StftMeasurements.from_csv(text, _window(opts))
        result = recover(Y, solver)
    else:
        u = MomentVector.from_csv(text)
        fc = int(opts["fc"])
        if u.cutoff > fc:
            u = u.restrict(fc)
        result = recover_fourier(u, solver)
    out = result.to_dict()
    _write_json(_out_path(glob, opts["out"], "recovery.json"), out)
    print(json.dumps({"atoms": len(result.measure), "primal_tv": result.primal_tv,
                      "duality_gap": result.duality_gap, "reliable": result.reliable}))
    return EXIT_OK if result.reliable else EXIT_FLAGGED


def cmd_bench(glob, opts, solver) -> int:
    if opts["preset"] == "paper":
        base = bench_mod.SweepConfig.paper_figure()
        fc, N, sigma = base.f_c, base.N, base.sigma
        grid_fc = [d * fc for d in base.delta_grid]
    else:
        fc = int(opts["fc"])
        N, sigma = opts["N"], opts["sigma"]
        grid_fc = [1.0 + 0.2 * i for i in range(8)]
    if opts["preset"] == "paper" and any(opts[k] is not None for k in ("N", "sigma")):
        raise InputError("--N and --sigma cannot be combined with --preset paper")
    if opts["deltas"] is not None:
        try:
            grid_fc = [float(v) for v in str(opts["deltas"]).split(",") if v.strip()]
        except ValueError as exc:
            raise InputError(f"bad --deltas: {exc}") from exc
    modes = tuple(m.strip() for m in str(opts["modes"]).split(",") if m.strip())
    config = bench_mod.SweepConfig(tuple(round(d / fc, 12) for d in grid_fc), int(opts["trials"]), fc, N,
                                   sigma, glob["seed"], modes, bool(opts["record_time"]), solver)
    out_dir = Path(glob["output_dir"])
    records, rows = bench_mod.run_sweep(config, out_dir / "trials.csv", out_dir / "aggregate.csv",
                                        workers=glob["threads"])
    if opts["plot"]:
        bench_mod.emit_plot(rows, _out_path(glob, opts["plot"], "success.svg"), fc)
    for r in rows:
        print(f"delta*fc={r['delta'] * fc:.3f} mode={r['mode']} rate={r['rate']:.3f} "
              f"({r['successes']}/{r['trials']})")
    return EXIT_OK


def cmd_invert(glob, opts, solver) -> int:
    if opts["measure"] is None or opts["t"] is None or opts["F"] is None:
        raise InputError("--measure, --t and --F are required")
    raw = opts["measure"]
    text = Path(raw).read_text() if os.path.exists(raw) else raw
    mu = DiscreteMeasure.from_json(text)
    if int(opts["F"]) < 1:
        raise InputError("--F must be >= 1")
    params = WindowParams(float(opts["sigma"]), 1, 0)
    z = complex(complete_inversion_approx(mu, params, float(opts["t"]), int(opts["F"])))
    print(f"{z.real:.10g}{z.imag:+.10g}j")
    return EXIT_OK


COMMANDS = {"certify": cmd_certify, "recover": cmd_recover, "bench": cmd_bench,
            "invert": cmd_invert}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        glob, opts, solver = _resolve(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=LOG_LEVELS[glob["log_level"]],
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](glob, opts, solver)
    except (InputError, ParameterError, MeasureError, CorruptedMeasurementError,
            json.JSONDecodeError) as exc:
        kind = "corrupted measurements" if isinstance(exc, CorruptedMeasurementError) else "bad input"
        print(f"error ({kind}): {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IllConditionedError, SolverFailure, DegenerateSupportError) as exc:
        print(f"error (solver): {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
