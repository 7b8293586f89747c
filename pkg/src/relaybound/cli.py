"""Command line interface: ``relaybound <command> [options]``.

Exit codes: 0 ok, 1 usage or input error, 2 numerical failure, 3 invariant violation.
Option values come from built-in defaults, then ``--config FILE`` (a flat JSON object
keyed by option name), then the command line, later sources winning.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds
from .blocks import EnumerationBudgetError
from .channels import (ChannelError, CompanionChannel, RelayChannel, bec, bsc, det_example_channels,
                       identity, joint_channel)
from .exponent import exponent_curve
from .info import CapacityConvergenceError, capacity, kl_divergences
from .io import load_config, read_matrix
from .simlab.codes import det_example_run
from .simlab.outcome import _plain
from .suites import SUITES

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INVARIANT = 0, 1, 2, 3

COMMON_DEFAULTS = {"seed": 0, "tol": 1e-9, "format": "json"}
COMMAND_DEFAULTS = {
    "capacity": {},
    "exponent-curve": {"points": 21},
    "cutset": {"r0": 0.0},
    "bound": {"r0": 0.0, "c1": 0.0, "c2": 0.0},
    "sweep": {"r0_grid": "0:0.25:0.01", "c1": 0.0, "c2": 0.0, "format": "csv"},
    "verify": {},
    "det-example": {"n": 4, "r0": 0.5},
}
SUITE_TRIALS = {"guessing": 100_000, "resolvability": 200, "csicr": 100}


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    def __init__(self, message: str, text: str):
        super().__init__(message)
        self.text = text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# --- argument parsing ------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--tol", type=float, help="numerical tolerance (default 1e-9)")
    p.add_argument("--trials", type=int, help="Monte Carlo trial count")
    p.add_argument("--out", help="write the result to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--config", help="flat JSON file of option values")
    return p


def _channel_flags(p: argparse.ArgumentParser, relay: bool) -> None:
    g = p.add_argument_group("channel X -> Y")
    g.add_argument("--bec", type=float, metavar="EPS", help="binary erasure channel")
    g.add_argument("--bsc", type=float, metavar="P", help="binary symmetric channel")
    g.add_argument("--identity", type=int, metavar="K", help="noiseless K-ary channel")
    g.add_argument("--matrix", metavar="PATH", help="channel matrix file")
    g.add_argument("--det", action="store_true",
                   help="the four-input deterministic pair (Y splits {1,2}|{3,4}, Z splits {1,3}|{2,4})")
    if relay:
        g = p.add_argument_group("channel X -> Z (defaults to a copy of X -> Y)")
        g.add_argument("--z-bec", type=float, metavar="EPS")
        g.add_argument("--z-bsc", type=float, metavar="P")
        g.add_argument("--z-identity", type=int, metavar="K")
        g.add_argument("--z-matrix", metavar="PATH")


def _bound_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=("iid", "degraded", "general"),
                   help="bound variant (default: picked from the channel structure)")
    p.add_argument("--direction", choices=("XYZ", "XZY"), help="degradation direction for --method degraded")
    p.add_argument("--companion", metavar="PATH",
                   help="companion joint p(y,z|x) as a matrix file with |Y|*|Z| columns (index y*|Z|+z)")
    p.add_argument("--c1", type=float, help="simulation-rate slack c1 (default 0)")
    p.add_argument("--c2", type=float, help="Fano slack c2 (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relaybound", description="Relay channel capacity bounds and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()

    p = sub.add_parser("capacity", parents=[common], argument_default=argparse.SUPPRESS,
                       help="channel capacity by Blahut-Arimoto")
    _channel_flags(p, relay=True)
    p.add_argument("--joint", action="store_true", help="capacity of X -> (Y, Z) instead of X -> Y")

    p = sub.add_parser("exponent-curve", parents=[common], argument_default=argparse.SUPPRESS,
                       help="strong-converse exponent E(R) on a rate grid")
    _channel_flags(p, relay=False)
    p.add_argument("--rates", help="rate grid 'start:stop:step' (inclusive) or comma list")
    p.add_argument("--points", type=int, help="grid size from 0 to log2|X| when --rates is absent")

    p = sub.add_parser("cutset", parents=[common], argument_default=argparse.SUPPRESS, help="cut-set bound")
    _channel_flags(p, relay=True)
    p.add_argument("--r0", type=float, help="relay link rate (default 0)")

    p = sub.add_parser("bound", parents=[common], argument_default=argparse.SUPPRESS,
                       help="new upper bound at one relay link rate")
    _channel_flags(p, relay=True)
    p.add_argument("--r0", type=float, help="relay link rate (default 0)")
    _bound_flags(p)

    p = sub.add_parser("sweep", parents=[common], argument_default=argparse.SUPPRESS,
                       help="cut-set and new bound over a grid of relay link rates")
    _channel_flags(p, relay=True)
    p.add_argument("--r0-grid", help="'start:stop:step' (inclusive) or comma list; '' for none")
    _bound_flags(p)

    p = sub.add_parser("verify", parents=[common], argument_default=argparse.SUPPRESS,
                       help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--eps", help="erasure probabilities for exponent-oracle (comma list)")
    p.add_argument("--n", type=int, help="blocklength for det-example")
    p.add_argument("--r0", type=float, help="relay link rate for det-example")
    p.add_argument("--messages", type=int, help="random message pairs for det-example (default: all)")

    p = sub.add_parser("det-example", parents=[common], argument_default=argparse.SUPPRESS,
                       help="run the deterministic four-input relay scheme")
    p.add_argument("--n", type=int, help="blocklength (default 4)")
    p.add_argument("--r0", type=float, help="relay link rate, n*r0 must be an integer (default 0.5)")
    p.add_argument("--messages", type=int, help="random message pairs (default: all)")
    return parser


def resolve_options(parser: argparse.ArgumentParser, argv) -> tuple[str, dict]:
    ns = parser.parse_args(argv)
    given = vars(ns)
    command = given.pop("command")
    sub = parser._subparsers._group_actions[0].choices[command]
    known = {a.dest for a in sub._actions} - {"help"}
    from_file = {}
    if "config" in given:
        try:
            from_file = load_config(given["config"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        unknown = sorted(set(from_file) - known - {"config"})
        if unknown:
            raise UsageError(f"unknown option(s) in config file: {', '.join(unknown)}")
        from_file.pop("config", None)
    opts = {**COMMON_DEFAULTS, **COMMAND_DEFAULTS[command], **from_file, **given}
    return command, opts


# --- channel construction ---------------------------------------------------------

def _single(opts: dict, prefix: str = ""):
    chosen = [k for k in ("bec", "bsc", "identity", "matrix") if opts.get(prefix + k) is not None]
    if len(chosen) > 1:
        flags = [f"--{(prefix + k).replace('_', '-')}" for k in chosen]
        raise UsageError(f"choose one channel source, got {' and '.join(flags)}")
    if not chosen:
        return None
    kind = chosen[0]
    value = opts[prefix + kind]
    if kind == "bec":
        return bec(float(value))
    if kind == "bsc":
        return bsc(float(value))
    if kind == "identity":
        return identity(int(value))
    return read_matrix(value)


def channel_y(opts: dict) -> np.ndarray:
    if opts.get("det"):
        if _single(opts) is not None:
            raise UsageError("--det cannot be combined with another channel source")
        return det_example_channels()[0]
    w = _single(opts)
    if w is None:
        raise UsageError("no channel given; use one of --bec, --bsc, --identity, --matrix, --det")
    return w


def relay_from(opts: dict, r0: float = 0.0) -> RelayChannel:
    if opts.get("det"):
        if _single(opts) is not None or _single(opts, "z_") is not None:
            raise UsageError("--det fixes both channels; drop the other channel options")
        w_y, w_z = det_example_channels()
        return RelayChannel(w_y, w_z, r0)
    w_y = channel_y(opts)
    w_z = _single(opts, "z_")
    return RelayChannel(w_y, w_y if w_z is None else w_z, r0)


def parse_grid(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        values = [float(v) for v in text]
    else:
        text = str(text).strip()
        if not text:
            return []
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"grid {text!r} must look like start:stop:step")
            start, stop, step = (float(x) for x in parts)
            if step <= 0 or stop < start:
                raise UsageError(f"grid {text!r} needs step > 0 and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(count)]
        else:
            values = [float(x) for x in text.split(",")]
    if any(not math.isfinite(v) or v < 0 for v in values):
        raise UsageError("grid values must be finite and nonnegative")
    if values != sorted(values):
        raise UsageError("grid values must be sorted")
    return values


def _method_for(relay: RelayChannel, opts: dict) -> dict:
    method = opts.get("method")
    if method is None:
        if relay.is_iid():
            method = "iid"
        elif bounds.degraded_direction(relay) is not None:
            method = "degraded"
        else:
            method = "general"
    kwargs = {}
    if method == "degraded" and opts.get("direction"):
        kwargs["direction"] = opts["direction"]
    if method == "general":
        kwargs["c1"] = float(opts.get("c1", 0.0))
        kwargs["c2"] = float(opts.get("c2", 0.0))
        if opts.get("companion"):
            kwargs["companion"] = CompanionChannel(read_matrix(opts["companion"]), relay)
    elif opts.get("companion"):
        raise UsageError("--companion only applies to --method general")
    return {"method": method, **kwargs}


# --- commands -------------------------------------------------------------------

def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".12g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_capacity(opts: dict):
    if opts.get("joint"):
        w = joint_channel(relay_from(opts))
    else:
        if any(opts.get("z_" + k) is not None for k in ("bec", "bsc", "identity", "matrix")):
            raise UsageError("--z-* options need --joint")
        w = channel_y(opts)
    cap, p = capacity(w, tol=float(opts["tol"]))
    d = kl_divergences(w, p @ w)
    width = float(d.max() - p @ d)
    result = {"capacity": cap, "input": p.tolist(), "bracket_width": width}
    header = ["capacity", "bracket_width"] + [f"p_{i}" for i in range(p.size)]
    return result, _rows_csv(header, [[cap, width] + [float(v) for v in p]]), f"capacity {cap:.12g} bits/use"


def cmd_exponent_curve(opts: dict):
    w = channel_y(opts)
    if opts.get("rates") is not None:
        rates = parse_grid(opts["rates"])
    else:
        points = int(opts["points"])
        if points < 1:
            raise UsageError("--points must be positive")
        rates = [round(float(r), 12) for r in np.linspace(0.0, math.log2(w.shape[0]), points)]
    curve = exponent_curve(w, rates)
    result = {"capacity": curve.capacity,
              "samples": [{"rate": r, "exponent": e, "rho_star": rho, "p_star": list(p)}
                          for (r, e), rho, p in zip(curve.samples, curve.rho_star, curve.p_star)]}
    return result, curve.to_csv(), f"{len(rates)} exponent samples, capacity {curve.capacity:.12g}"


def cmd_cutset(opts: dict):
    relay = relay_from(opts, float(opts["r0"]))
    value = bounds.cutset_bound(relay, float(opts["tol"]))
    return ({"r0": relay.r0, "cutset": value}, _rows_csv(["r0", "cutset"], [[relay.r0, value]]),
            f"cut-set bound {value:.12g} at r0={relay.r0:.12g}")


def cmd_bound(opts: dict):
    relay = relay_from(opts, float(opts["r0"]))
    kwargs = _method_for(relay, opts)
    report = bounds.solve_bound(relay, tol=float(opts["tol"]), **kwargs)
    result = {**report.to_dict(), "summary": report.summary()}
    return result, bounds.sweep_csv([report]), report.summary()


def cmd_sweep(opts: dict):
    relay = relay_from(opts)
    grid = parse_grid(opts["r0_grid"])
    kwargs = _method_for(relay, opts)
    method = kwargs.pop("method")
    rows = bounds.sweep(relay, grid, method, float(opts["tol"]), **kwargs)
    result = {"method": method, "rows": [r.to_dict() for r in rows]}
    return result, bounds.sweep_csv(rows), f"{len(rows)} sweep rows ({method})"


def cmd_verify(opts: dict):
    suite = opts["suite"]
    kwargs = {}
    if suite in ("blowup", "lemmas", "guessing", "resolvability", "csicr", "det-example"):
        kwargs["seed"] = int(opts["seed"])
    if suite in SUITE_TRIALS:
        kwargs["trials"] = int(opts.get("trials") or SUITE_TRIALS[suite])
    if suite == "det-example":
        kwargs.update(n=int(opts.get("n") or 6), r0=float(opts.get("r0", 0.5)), messages=opts.get("messages"))
    if suite == "exponent-oracle" and opts.get("eps") is not None:
        kwargs["eps_values"] = tuple(float(e) for e in str(opts["eps"]).split(","))
    report = SUITES[suite](**kwargs)
    result = report.to_dict()
    text_csv = _rows_csv(["suite", "passed", "checks", "failures"],
                         [[suite, report.passed, report.checks, report.failures]])
    line = f"suite {suite}: {'pass' if report.passed else 'FAIL'} ({report.failures} of {report.checks} checks failed)"
    return result, text_csv, line, report.passed


def cmd_det_example(opts: dict):
    out = det_example_run(int(opts["n"]), float(opts["r0"]), opts.get("messages"), int(opts["seed"]))
    result = out.to_dict()
    refs = out.references
    text_csv = _rows_csv(["n", "r0", "messages", "errors", "rate"],
                         [[out.params["n"], float(out.params["r0"]), out.trials, refs["errors"], float(refs["rate"])]])
    line = f"{refs['errors']} decoding errors over {out.trials} messages, rate {refs['rate']:.12g} bits/use"
    return result, text_csv, line, bool(out.passed)


COMMANDS = {
    "capacity": cmd_capacity,
    "exponent-curve": cmd_exponent_curve,
    "cutset": cmd_cutset,
    "bound": cmd_bound,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "det-example": cmd_det_example,
}


def _render(command: str, opts: dict, result: dict, text_csv: str) -> str:
    if opts["format"] == "csv":
        return text_csv
    config = {k: v for k, v in opts.items() if k not in ("config", "out") and v is not None}
    doc = {"command": command, "config": config, "result": result}
    return json.dumps(_plain(doc), sort_keys=True, indent=2) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        command, opts = resolve_options(parser, argv)
        outcome = COMMANDS[command](opts)
        result, text_csv, line = outcome[:3]
        ok = outcome[3] if len(outcome) > 3 else True
        text = _render(command, opts, result, text_csv)
        if opts.get("out"):
            Path(opts["out"]).write_text(text)
            print(line, file=stdout)
        else:
            stdout.write(text)
        if not ok:
            raise InvariantViolation(line, text)
    except UsageError as exc:
        print(f"relaybound: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (CapacityConvergenceError, EnumerationBudgetError, FloatingPointError) as exc:
        print(f"relaybound: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (bounds.BoundInvariantError, InvariantViolation) as exc:
        print(f"relaybound: invariant violated: {exc}", file=stderr)
        return EXIT_INVARIANT
    except (ChannelError, ValueError, OSError) as exc:
        print(f"relaybound: error: {exc}", file=stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"relaybound: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
