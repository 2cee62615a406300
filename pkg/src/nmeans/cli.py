"""Command-line front end: ``nmeans compute | trace | audit``.

Exit codes: 0 success, 2 parse/validation/usage error, 3 arity or shape
mismatch, 4 non-convergence, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from io import StringIO
from pathlib import Path

import numpy as np

from . import io, registry
from .audit import run_audit
from .scalar import REALS
from .core import DEFAULT_MAX_ITER, VARIANTS, extension_report, n_mean
from .exceptions import (
    ConvergenceError,
    DimensionError,
    MeanError,
    ParameterError,
    ParseError,
    ValidationError,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ARITY = 3
EXIT_CONVERGENCE = 4
EXIT_IO = 5

DEFAULT_TOL = {"scalar": 1e-12, "spd": 1e-10}
DEFAULTS = {
    "mean": "arithmetic",
    "space": "scalar",
    "variant": "beta",
    "arity": None,
    "tol": None,
    "max_iter": DEFAULT_MAX_ITER,
    "seed": 0,
    "interval_n": None,
    "samples": 20,
    "dim": 3,
    "input": None,
    "output": None,
}


class CLIError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(f"usage error: {message}", EXIT_USAGE)


def _common(p: argparse.ArgumentParser):
    # every option defaults to None so that config-file values can fill the gaps
    p.add_argument("--mean", help="2-mean name (default: arithmetic), e.g. geometric, power:2, weighted:2/3")
    p.add_argument("--space", choices=registry.SPACES, help="scalar or spd (default: scalar)")
    p.add_argument("--variant", choices=VARIANTS, help="barycentric variant (default: beta)")
    p.add_argument("--arity", type=int, help="target arity n (default: number of inputs)")
    p.add_argument(
        "--tol",
        type=float,
        help=f"tolerance (default: scalar {DEFAULT_TOL['scalar']:g}, spd {DEFAULT_TOL['spd']:g})",
    )
    p.add_argument("--max-iter", type=int, help=f"iteration cap (default: {DEFAULT_MAX_ITER})")
    p.add_argument("--seed", type=int, help="random seed (default: 0)")
    p.add_argument("--interval-n", type=float, help="order interval [1/n, n] for sampling (default: 4)")
    p.add_argument("--config", help="JSON file of defaults; flags take precedence")
    p.add_argument("--input", help="input file (matrix format for spd, numbers for scalar)")
    p.add_argument("--output", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nmeans", description="Barycentric n-means of scalars and SPD matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    compute = sub.add_parser("compute", help="evaluate the n-mean of the inputs")
    trace = sub.add_parser("trace", help="write the diameter trace as CSV")
    audit = sub.add_parser("audit", help="run sampled property checks")
    for p in (compute, trace):
        _common(p)
        p.add_argument("values", nargs="*", help="scalar inputs (instead of --input)")
    _common(audit)
    audit.add_argument("--samples", type=int, help="samples per property (default: 20)")
    audit.add_argument("--dim", type=int, help="matrix dimension for spd audits (default: 3)")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, overridden by ``--config``, overridden by explicit flags."""
    config = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise CLIError(f"cannot read config: {exc}", EXIT_IO) from None
        except json.JSONDecodeError as exc:
            raise CLIError(f"bad config JSON: {exc}", EXIT_USAGE) from None
        if not isinstance(loaded, dict):
            raise CLIError("config must be a JSON object", EXIT_USAGE)
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise CLIError(f"unknown config keys: {sorted(unknown)}", EXIT_USAGE)
        config.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    if config["space"] not in registry.SPACES:
        raise CLIError(f"unknown space {config['space']!r}", EXIT_USAGE)
    if config["tol"] is None:
        config["tol"] = DEFAULT_TOL[config["space"]]
    if config["tol"] <= 0:
        raise CLIError("tolerance must be positive", EXIT_USAGE)
    if config["max_iter"] < 1:
        raise CLIError("max-iter must be >= 1", EXIT_USAGE)
    if config["arity"] is not None and config["arity"] < 2:
        raise CLIError("arity must be >= 2", EXIT_USAGE)
    return config


def _header(config) -> dict:
    return {
        "defaults": {
            "tol_scalar": DEFAULT_TOL["scalar"],
            "tol_spd": DEFAULT_TOL["spd"],
            "max_iter": DEFAULT_MAX_ITER,
        },
        "config": {k: v for k, v in config.items() if k not in ("input", "output")},
    }


def _read_inputs(config, values) -> list:
    space = config["space"]
    # means on the absolute metric (weighted, max, ...) are fine with any real
    positive = registry.get_mean(config["mean"], space).space is not REALS
    if config["input"]:
        try:
            text = Path(config["input"]).read_text()
        except OSError as exc:
            raise CLIError(f"cannot read input: {exc}", EXIT_IO) from None
        inputs = io.parse_matrices(text) if space == "spd" else io.parse_scalars(text, positive)
    elif space == "spd":
        raise CLIError("spd inputs must be given with --input", EXIT_USAGE)
    else:
        inputs = io.parse_scalars(" ".join(values), positive)
    if space == "spd" and len({m.shape for m in inputs}) > 1:
        dims = sorted({m.shape[0] for m in inputs})
        raise CLIError(f"matrices have different dimensions {dims}", EXIT_ARITY)
    if space == "scalar":
        inputs = [np.float64(v) for v in inputs]
    return inputs


def _arity(config, inputs) -> int:
    n = config["arity"] if config["arity"] is not None else len(inputs)
    if len(inputs) != n:
        raise CLIError(f"arity {n} but {len(inputs)} inputs", EXIT_ARITY)
    if n < 2:
        raise CLIError(f"need at least 2 inputs, got {n}", EXIT_ARITY)
    return n


def _run(config, inputs):
    """Return (mean, report or None, value) for the configured n-mean."""
    base = registry.get_mean(config["mean"], config["space"])
    n = _arity(config, inputs)
    if n == base.arity:
        return base, None, base(*inputs, tol=config["tol"])
    mean = n_mean(
        base, n, tol=config["tol"], max_iter=config["max_iter"], variant=config["variant"]
    )
    report = extension_report(mean, *inputs)
    return mean, report, report.limit


def _bounds(mean, report):
    rho = mean.rho
    if rho is None or report is None:
        return None
    return report.bound_trace(mean.arity - 1, rho)


def _as_json(value):
    value = np.asarray(value)
    return value.tolist()


def _emit(config, text):
    if config["output"]:
        try:
            Path(config["output"]).write_text(text)
        except OSError as exc:
            raise CLIError(f"cannot write output: {exc}", EXIT_IO) from None
    else:
        sys.stdout.write(text)


def cmd_compute(config, values) -> int:
    inputs = _read_inputs(config, values)
    mean, report, value = _run(config, inputs)
    converged = True if report is None else report.converged
    out = {
        "header": _header(config),
        "mean": mean.name,
        "arity": len(inputs),
        "value": _as_json(value),
        "converged": converged,
        "iterations": 0 if report is None else report.iterations,
        "tolerance": config["tol"] if report is None else report.tolerance,
        "trace": [] if report is None else report.diameter_trace,
        "bound": _bounds(mean, report),
    }
    text = json.dumps(out, indent=2)
    if config["output"]:
        # the result itself goes to the file, in the same format as the input
        body = io.format_matrix(value) if config["space"] == "spd" else f"{float(value):.17g}\n"
        _emit(config, body)
    sys.stdout.write(text + "\n")
    return EXIT_OK if converged else EXIT_CONVERGENCE


def cmd_trace(config, values) -> int:
    inputs = _read_inputs(config, values)
    mean, report, _ = _run(config, inputs)
    if report is None:
        # a plain 2-mean has no iteration; report the input spread only
        trace, bounds, converged = [float(mean.space.dist(*inputs))], None, True
    else:
        trace, bounds, converged = report.diameter_trace, _bounds(mean, report), report.converged
    buf = StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iteration", "diameter", "bound"])
    for i, delta in enumerate(trace):
        bound = "" if bounds is None else f"{bounds[i]:.17g}"
        writer.writerow([i, f"{delta:.17g}", bound])
    _emit(config, buf.getvalue())
    sys.stderr.write(f"converged={str(converged).lower()} iterations={len(trace) - 1}\n")
    return EXIT_OK if converged else EXIT_CONVERGENCE


def cmd_audit(config) -> int:
    results = run_audit(
        config["mean"],
        config["space"],
        arity=config["arity"] or 3,
        samples=config["samples"],
        seed=config["seed"],
        dim=config["dim"],
        interval_n=config["interval_n"],
        tol=config["tol"],
        max_iter=config["max_iter"],
        variant=config["variant"],
    )
    out = {"header": _header(config), "results": [r.as_dict() for r in results]}
    _emit(config, json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = resolve_config(args)
        if args.command == "audit":
            if config["samples"] < 1:
                raise CLIError("samples must be >= 1", EXIT_USAGE)
            return cmd_audit(config)
        if args.command == "compute":
            return cmd_compute(config, args.values)
        return cmd_trace(config, args.values)
    except CLIError as exc:
        code = exc.code
        message = str(exc)
    except ConvergenceError as exc:
        code, message = EXIT_CONVERGENCE, f"not converged: {exc}"
    except DimensionError as exc:
        code, message = EXIT_ARITY, f"shape error: {exc}"
    except (ParseError, ValidationError, ParameterError) as exc:
        code, message = EXIT_USAGE, f"invalid input: {exc}"
    except MeanError as exc:
        code, message = EXIT_USAGE, str(exc)
    except OSError as exc:
        code, message = EXIT_IO, f"I/O error: {exc}"
    sys.stderr.write(f"nmeans: {message}\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
