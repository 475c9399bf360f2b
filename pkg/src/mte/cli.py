"""Command-line front end.

Exit status is 0 on success, 1 on invalid input and 2 when an internal
consistency check fails (for instance ``oracle --check`` finding the greedy
solver and the max-flow oracle in disagreement).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import formats
from .errors import InvariantViolation, MTEError
from .estimator import median_estimate
from .oracle import oracle_variability
from .sim import coverage_experiment, extremal_marginals, indistinguishability_experiment, psi
from .variability import min_median_width, variability

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INVARIANT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


@dataclass
class CliConfig:
    subcommand: str
    output: str | None
    output_format: str
    allow_float: bool


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", "-o", help="write here instead of standard output")
    p.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    p.add_argument(
        "--allow-float",
        action="store_true",
        help=f"accept floats in probability positions (max denominator {formats.MAX_FLOAT_DENOMINATOR})",
    )


def _sim_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", default="1/20")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials-csv", help="also write the per-trial rows as CSV to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mte", description="Exact median-treatment-effect widths and estimates.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("variability", help="variability pair of one estimate")
    p.add_argument("--marginals", required=True)
    p.add_argument("--r", type=int, required=True)
    _common(p)

    p = sub.add_parser("width", help="widths of every estimate and the minimum median width")
    p.add_argument("--marginals", required=True)
    _common(p)

    p = sub.add_parser("estimate", help="median estimate from a responses CSV")
    p.add_argument("--responses", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--beta", default="1/20")
    _common(p)

    p = sub.add_parser("oracle", help="variability pair from the max-flow oracle")
    p.add_argument("--marginals", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--check", action="store_true", help="compare against the greedy solver")
    _common(p)

    p = sub.add_parser("extremal", help="hardest marginal pair for k outcomes and its width")
    p.add_argument("--k", type=int, required=True)
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo experiments")
    sim = p.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    q = sim.add_parser("coverage", help="coverage of the estimator on one joint")
    q.add_argument("--joint", required=True)
    _sim_args(q)
    _common(q)
    q = sim.add_parser("indist", help="compare output laws on two joints with equal marginals")
    q.add_argument("--joint1", required=True)
    q.add_argument("--joint2", required=True)
    _sim_args(q)
    _common(q)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render(doc, rows, columns, fmt: str) -> str:
    if fmt == "csv":
        return formats.rows_to_csv(rows, columns)
    return formats.dumps(doc)


_WIDTH_COLUMNS = ["r", "nu_lower", "nu_upper", "width"]
_TRIAL_COLUMNS = ["trial", "seed", "m_hat", "epsilon", "covered", "n_a", "n_b"]


def _run(args) -> int:
    cfg = CliConfig(args.command, args.output, args.output_format, args.allow_float)
    beta = None
    if getattr(args, "beta", None) is not None:
        beta = formats.parse_rational(args.beta, "--beta", cfg.allow_float)

    if cfg.subcommand == "variability":
        eta_a, eta_b = formats.read_marginals(args.marginals, cfg.allow_float)
        doc = formats.variability_to_json(variability(args.r, eta_a, eta_b))
        text = _render(doc, [doc], ["r", "nu_lower", "nu_upper"], cfg.output_format)

    elif cfg.subcommand == "width":
        eta_a, eta_b = formats.read_marginals(args.marginals, cfg.allow_float)
        report = min_median_width(eta_a, eta_b)
        text = _render(
            formats.width_report_to_json(report), formats.width_rows(report), _WIDTH_COLUMNS, cfg.output_format
        )

    elif cfg.subcommand == "estimate":
        data = formats.read_responses(args.responses, args.k)
        result = median_estimate(data, beta)
        text = _render(
            formats.estimate_to_json(result),
            formats.width_rows(result.width_report),
            _WIDTH_COLUMNS,
            cfg.output_format,
        )

    elif cfg.subcommand == "oracle":
        eta_a, eta_b = formats.read_marginals(args.marginals, cfg.allow_float)
        exact = oracle_variability(args.r, eta_a, eta_b)
        if not args.check:
            doc = formats.variability_to_json(exact)
            text = _render(doc, [doc], ["r", "nu_lower", "nu_upper"], cfg.output_format)
        else:
            greedy = variability(args.r, eta_a, eta_b)
            match = (greedy.nu_lower, greedy.nu_upper) == (exact.nu_lower, exact.nu_upper)
            doc = {
                "greedy": formats.variability_to_json(greedy),
                "oracle": formats.variability_to_json(exact),
                "match": match,
            }
            _emit(formats.dumps(doc), cfg.output)
            if not match:
                raise InvariantViolation(f"greedy and oracle disagree at r={args.r}")
            return EXIT_OK

    elif cfg.subcommand == "extremal":
        eta_a, eta_b = extremal_marginals(args.k)
        bound = psi(args.k)
        doc = formats.marginals_to_json(eta_a, eta_b)
        doc.update(psi=formats.rat(bound), psi_float=float(bound))
        rows = [{"x": x, "a": formats.rat(eta_a[x]), "b": formats.rat(eta_b[x])} for x in range(args.k)]
        text = _render(doc, rows, ["x", "a", "b"], cfg.output_format)

    elif cfg.subcommand == "simulate" and args.experiment == "coverage":
        joint = formats.read_joint(args.joint, cfg.allow_float)
        report = coverage_experiment(joint, args.n, beta, args.trials, args.seed)
        rows = formats.trial_rows(report)
        if args.trials_csv:
            Path(args.trials_csv).write_text(formats.rows_to_csv(rows, _TRIAL_COLUMNS), encoding="utf-8")
        text = _render(formats.experiment_to_json(report), rows, _TRIAL_COLUMNS, cfg.output_format)

    elif cfg.subcommand == "simulate" and args.experiment == "indist":
        j1 = formats.read_joint(args.joint1, cfg.allow_float)
        j2 = formats.read_joint(args.joint2, cfg.allow_float)
        report = indistinguishability_experiment(j1, j2, args.n, beta, args.trials, args.seed)
        rows = [dict(row, arm=1) for row in formats.trial_rows(report.first)]
        rows += [dict(row, arm=2) for row in formats.trial_rows(report.second)]
        if args.trials_csv:
            Path(args.trials_csv).write_text(
                formats.rows_to_csv(rows, ["arm", *_TRIAL_COLUMNS]), encoding="utf-8"
            )
        text = _render(formats.indist_to_json(report), rows, ["arm", *_TRIAL_COLUMNS], cfg.output_format)

    else:  # pragma: no cover - argparse enforces the choices
        raise MTEError(f"unknown command {cfg.subcommand}")

    _emit(text, cfg.output)
    return EXIT_OK


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except InvariantViolation as exc:
        print(f"mte: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (MTEError, OSError) as exc:
        print(f"mte: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
