"""Command-line interface.

Exit codes: 0 success, 2 usage, 3 parse/schema, 4 validation,
5 degenerate computation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .anomaly_report import build_comparison, empirical_ch
from .count_pipeline import (
    fit_scale,
    normalize_record,
    predicted_counts,
    quantum_setting_probabilities,
    setting_key,
)
from .errors import BellCountError, InvalidArgumentError, UsageError, ValidationError
from .experiment_sim import GENERATOR, simulate_experiment, validate_pipeline, with_seed
from .fileio import REPORT_FORMATS, parse_experiment_file, parse_sim_config, render_report, serialize_experiment
from .quantum_model import (
    PairSourceModel,
    ch_statistic,
    coincidence_probability,
    critical_efficiency,
    outcome_distribution,
    singles_probability,
)


def _read(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_record(path):
    record = parse_experiment_file(_read(path))
    if record.model is None:
        raise ValidationError(f"{path}: experiment file has no model")
    return record


def _emit(data: bytes, out=None):
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def cmd_predict(args):
    try:
        model = PairSourceModel(args.r)
        dist = outcome_distribution(model, args.alpha, args.beta)
    except InvalidArgumentError as exc:
        raise ValidationError(str(exc)) from exc
    print(f"r = {model.r!r}, alpha = {args.alpha!r} deg, beta = {args.beta!r} deg")
    print(f"coincidence_probability = {coincidence_probability(model, args.alpha, args.beta)!r}")
    print(f"p(+,+) = {dist.p_pp!r}")
    print(f"p(+,-) = {dist.p_pm!r}")
    print(f"p(-,+) = {dist.p_mp!r}")
    print(f"p(-,-) = {dist.p_mm!r}")
    print(f"singles_alice(alpha) = {singles_probability(model, args.alpha)!r}")
    print(f"singles_bob(beta) = {singles_probability(model, args.beta)!r}")


def cmd_fit(args):
    record = _load_record(args.experiment)
    corrected = normalize_record(record)
    q = quantum_setting_probabilities(record.model, record.angles)
    fit = fit_scale(list(corrected.values()), q)
    predicted = predicted_counts(fit.scale, q)
    print(f"reference_trials = {record.reference_trials}")
    print(f"scale = {fit.scale!r}")
    print(f"sse = {fit.sse!r}")
    print(f"{'setting':<8} {'corrected':>22} {'Q':>22} {'predicted':>22} {'residual':>22}")
    for (alice, bob), e, qj, p, res in zip(corrected, fit.e, q, predicted, fit.residuals):
        print(f"{setting_key(alice, bob):<8} {float(e)!r:>22} {float(qj)!r:>22} {float(p)!r:>22} {float(res)!r:>22}")


def cmd_report(args):
    record = _load_record(args.experiment)
    table = build_comparison(record, record.model)
    _emit(render_report(table, args.format), args.out)


def cmd_simulate(args):
    config = parse_sim_config(_read(args.config))
    if args.seed is not None:
        try:
            config = with_seed(config, args.seed)
        except InvalidArgumentError as exc:
            raise ValidationError(str(exc)) from exc
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    out = Path(args.out)
    if args.reps == 1:
        out.write_bytes(serialize_experiment(simulate_experiment(config)))
        summary = {"seed": config.seed, "generator": GENERATOR, "true_scale": config.true_scale, "files": [str(out)]}
    else:
        out.mkdir(parents=True, exist_ok=True)
        files = []
        for i in range(args.reps):
            path = out / f"rep_{i:04d}.json"
            path.write_bytes(serialize_experiment(simulate_experiment(config, i)))
            files.append(str(path))
        summary = validate_pipeline(config, args.reps).to_dict()
        summary["files"] = files
        (out / "recovery.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary, indent=2))


def cmd_critical_efficiency(args):
    record = _load_record(args.experiment)
    eta_star = critical_efficiency(record.model, record.angles)
    j = ch_statistic(record.model, record.angles, 1.0, 1.0)
    print(f"critical_efficiency = {eta_star!r}")
    print(f"ch_statistic(eta=1) = {j!r}")
    if record.has_singles:
        try:
            print(f"empirical_ch_per_trial = {empirical_ch(record)!r}")
        except InvalidArgumentError as exc:
            print(f"empirical_ch_per_trial = n/a ({exc})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellcount", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="coincidence probability and singles marginals")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True, help="Alice analyzer angle, degrees")
    p.add_argument("--beta", type=float, required=True, help="Bob analyzer angle, degrees")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("fit", help="fit the coincidence scale N*eta1*eta2")
    p.add_argument("experiment")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="raw / corrected / predicted comparison table")
    p.add_argument("experiment")
    p.add_argument("--format", choices=REPORT_FORMATS, default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("simulate", help="generate synthetic experiment files")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", required=True, help="output file (reps=1) or directory (reps>1)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("critical-efficiency", help="critical detection efficiency and CH statistic")
    p.add_argument("experiment")
    p.set_defaults(func=cmd_critical_efficiency)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except BellCountError as exc:
        print(f"bellcount: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
