"""Command line interface.

    sepoutage compute scenario.json
    sepoutage verify scenario.json --mc-samples 1000000
    sepoutage sweep scenario.json --beta-db-min -10 --beta-db-max 10 --steps 21 --out-csv curve.csv
    sepoutage budget --eps-primary 0.05 --eps-target 0.1
    sepoutage budget --eps-target-group 0.1 --n 10

Exit codes: 0 ok, 2 input error, 3 computation error, 4 verification
failure, 5 infeasible budget. The Monte Carlo seed defaults to the fixed
value 0xC0FFEE, so every command is a pure function of its inputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .dist import dbm_to_mw, mw_to_dbm
from .errors import DomainError, InfeasibleBudget, MissingOracle, NonConvergence
from .mc import DEFAULT_SAMPLES, DEFAULT_SEED, McConfig, estimate_total_outage
from .outage import OutageResult, total_outage
from .quadrature import QuadratureSpec
from .scenario_file import ScenarioFileError, load_scenario
from .sharing import per_source_budget, secondary_budget

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3
EXIT_VERIFY_FAILED = 4
EXIT_INFEASIBLE = 5


def fmt(p: float) -> str:
    """Probabilities in reports: 6 significant digits."""
    return f"{p:.6g}"


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _positive_int(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _finite(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return value


def _add_quadrature(p):
    p.add_argument("--quad-nodes", type=_positive_int, default=QuadratureSpec().nodes,
                   help="starting Gauss-Hermite node count for lognormal sources")


def _add_seed(p):
    p.add_argument("--mc-seed", type=_seed, default=DEFAULT_SEED,
                   help="Monte Carlo master seed (default 0xC0FFEE)")
    p.add_argument("--mc-streams", type=_positive_int, default=1,
                   help="number of Monte Carlo substreams")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepoutage",
        description="Outage probability of a Rayleigh-faded link under independent interference groups.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="total and per-group outage of a scenario file",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("scenario")
    _add_quadrature(p)
    p.add_argument("--mc-samples", type=_positive_int, default=None,
                   help="samples for simulating dependent groups (none: dependent groups are an error)")
    _add_seed(p)
    p.add_argument("--out-csv", default=None, help="also write the partials and total to this CSV file")
    p.add_argument("--json", action="store_true", help="print a JSON report with full precision")

    p = sub.add_parser("verify", help="check the analytic total against direct simulation",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("scenario")
    _add_quadrature(p)
    p.add_argument("--mc-samples", type=_positive_int, default=DEFAULT_SAMPLES,
                   help="samples for the validating simulation")
    p.add_argument("--joint-mc-samples", type=_positive_int, default=None,
                   help="samples for simulating dependent groups on the analytic side")
    _add_seed(p)
    p.add_argument("--sigma-tolerance", type=_finite, default=4.0,
                   help="allowed |analytic - simulated| in standard errors")

    p = sub.add_parser("sweep", help="outage versus threshold, as CSV",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("scenario")
    p.add_argument("--beta-db-min", type=_finite, required=True)
    p.add_argument("--beta-db-max", type=_finite, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out-csv", default=None, help="output path (default: standard output)")
    _add_quadrature(p)
    p.add_argument("--mc-samples", type=_positive_int, default=None,
                   help="samples for simulating dependent groups")
    _add_seed(p)

    p = sub.add_parser("budget", help="spectrum-sharing outage budgets",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--eps-primary", type=_finite, default=None,
                   help="outage caused by primary co-channel interference alone")
    p.add_argument("--eps-target", type=_finite, default=None, help="maximum allowed total outage")
    p.add_argument("--eps-target-group", type=_finite, default=None,
                   help="outage allowed for a group of identical sources")
    p.add_argument("--n", type=_positive_int, default=None, help="number of identical sources")
    p.add_argument("--json", action="store_true", help="print JSON with full precision")
    return parser


def _load(path):
    try:
        return load_scenario(path)
    except ScenarioFileError as exc:
        raise _Fail(EXIT_INPUT, f"error: {exc}") from None


def _quadrature(args):
    try:
        return QuadratureSpec(nodes=args.quad_nodes)
    except DomainError as exc:
        raise _Fail(EXIT_INPUT, f"error: --quad-nodes: {exc}") from None


def _evaluate(sc, q, samples, args) -> OutageResult:
    oracle = None if samples is None else McConfig(samples, args.mc_seed, args.mc_streams)
    try:
        return total_outage(sc, q, oracle)
    except (NonConvergence, MissingOracle) as exc:
        raise _Fail(EXIT_COMPUTE, f"error: {exc}") from None


def _report(sc, result: OutageResult) -> str:
    lines = [
        f"signal mean: {mw_to_dbm(sc.signal.mean_power_mw):g} dBm",
        f"threshold: {mw_to_dbm(sc.threshold.beta_linear):g} dB",
    ]
    if result.partials:
        width = max(5, *(len(p.name) for p in result.partials))
        lines.append(f"{'group':<{width}}  {'partial':<10}  {'method':<11}  stderr")
        for p in result.partials:
            se = "-" if p.stderr is None else fmt(p.stderr)
            lines.append(f"{p.name:<{width}}  {fmt(p.probability):<10}  {p.method:<11}  {se}")
    else:
        lines.append("no interference groups")
    total = f"total outage: {fmt(result.total)}"
    if result.stderr_total is not None:
        total += f" (stderr {fmt(result.stderr_total)})"
    lines.append(total)
    return "\n".join(lines) + "\n"


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"error: cannot write {path}: {exc}") from None


def cmd_compute(args, out) -> int:
    sc = _load(args.scenario)
    result = _evaluate(sc, _quadrature(args), args.mc_samples, args)
    if args.json:
        out.write(json.dumps(result.as_dict(), indent=2) + "\n")
    else:
        out.write(_report(sc, result))
    if args.out_csv:
        rows = [["partial", p.name, repr(p.probability), p.method, "" if p.stderr is None else repr(p.stderr)]
                for p in result.partials]
        rows.append(["total", "", repr(result.total), "", "" if result.stderr_total is None else repr(result.stderr_total)])
        _write_csv(args.out_csv, ["kind", "name", "probability", "method", "stderr"], rows)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    sc = _load(args.scenario)
    if not (args.sigma_tolerance > 0):
        raise _Fail(EXIT_INPUT, "error: --sigma-tolerance must be positive")
    analytic = _evaluate(sc, _quadrature(args), args.joint_mc_samples, args)
    cfg = McConfig(args.mc_samples, args.mc_seed, args.mc_streams)
    try:
        est = estimate_total_outage(sc, cfg)
    except MissingOracle as exc:
        raise _Fail(EXIT_COMPUTE, f"error: {exc}") from None
    se = math.hypot(est.stderr, analytic.stderr_total or 0.0)
    diff = abs(analytic.total - est.p_hat)
    passed = diff <= args.sigma_tolerance * se
    in_sigmas = "0" if diff == 0 else ("inf" if se == 0 else f"{diff / se:.3g}")
    out.write(
        f"analytic total: {fmt(analytic.total)}\n"
        f"simulated total: {fmt(est.p_hat)} (stderr {fmt(est.stderr)}, {est.samples} samples, seed {args.mc_seed:#x})\n"
        f"difference: {fmt(diff)} ({in_sigmas} stderr, tolerance {args.sigma_tolerance:g})\n"
        f"{'PASS' if passed else 'FAIL'}\n"
    )
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_sweep(args, out) -> int:
    if not args.beta_db_min < args.beta_db_max:
        raise _Fail(EXIT_INPUT, "error: --beta-db-min must be below --beta-db-max")
    if args.steps < 2:
        raise _Fail(EXIT_INPUT, "error: --steps must be >= 2")
    sc = _load(args.scenario)
    q = _quadrature(args)
    rows = []
    for beta_db in np.linspace(args.beta_db_min, args.beta_db_max, args.steps):
        beta_db = float(beta_db)
        result = _evaluate(sc.with_beta(dbm_to_mw(beta_db)), q, args.mc_samples, args)
        rows.append([repr(beta_db), repr(result.total), *(repr(p.probability) for p in result.partials)])
    header = ["beta_db", "total_outage", *(g.name for g in sc.groups)]
    if args.out_csv:
        _write_csv(args.out_csv, header, rows)
        out.write(f"wrote {len(rows)} rows to {args.out_csv}\n")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        out.write(buf.getvalue())
    return EXIT_OK


def cmd_budget(args, out) -> int:
    pair = args.eps_primary is not None or args.eps_target is not None
    group = args.eps_target_group is not None or args.n is not None
    if pair == group:
        raise _Fail(EXIT_INPUT, "error: give either --eps-primary and --eps-target, or --eps-target-group and --n")
    try:
        if pair:
            if args.eps_primary is None or args.eps_target is None:
                raise _Fail(EXIT_INPUT, "error: --eps-primary and --eps-target are both required")
            key, value = "eps_secondary_max", secondary_budget(args.eps_primary, args.eps_target)
        else:
            if args.eps_target_group is None or args.n is None:
                raise _Fail(EXIT_INPUT, "error: --eps-target-group and --n are both required")
            key, value = "eps_per_source", per_source_budget(args.eps_target_group, args.n)
    except InfeasibleBudget as exc:
        raise _Fail(EXIT_INFEASIBLE, f"error: {exc}") from None
    except DomainError as exc:
        raise _Fail(EXIT_INPUT, f"error: {exc}") from None
    if args.json:
        out.write(json.dumps({key: value}) + "\n")
    else:
        out.write(f"{key}: {fmt(value)}\n")
    return EXIT_OK


_COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "sweep": cmd_sweep, "budget": cmd_budget}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except _Fail as exc:
        err.write(str(exc) + "\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
