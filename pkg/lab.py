#!/usr/bin/env python3
"""Command-line entry point for free-channel-lab."""

import argparse
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv
load_dotenv()

from pydantic import ValidationError

from config import DEFAULT_EPSILON, DEFAULT_RESTARTS, DEFAULT_TRIALS, LOG_LEVEL, MAX_ITERATIONS, OUTPUT_DIR
from ensembles import draw_master_seed, sample_kraus_family
from errors import DomainError, LabError, PlanError
from experiments import (
    ExperimentPlan,
    bell_pair_records,
    build_report,
    convergence_study,
    emit,
    estimate_mopn,
    flavor_differences,
    load_plan,
    moe_records,
    study_report,
    validate_optimal_shape,
)
from freelimits import (
    limit_mopn,
    minimal_violating_k,
    moe_gap,
    moe_minimal_violating_k,
    mp_edges,
    multiplicativity_verdict,
    rectified_multiplicativity_verdict,
    violation_rows,
)
from models import ChannelKind, EnsembleFlavor, SchattenIndex, SeedSpec
from ncoracle.battery import run_battery

logging.basicConfig(
    level=LOG_LEVEL,
    format="%(asctime)s [%(levelname)s] %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger(__name__)

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

STUDIES = {
    "convergence": convergence_study,
    "bell-pair": bell_pair_records,
    "moe": moe_records,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raise instead of exiting so run() can map bad flags to exit code 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    return [int(item) for item in text.split(",") if item.strip()]


def _float_list(text: str) -> list[float]:
    return [float(item) for item in text.split(",") if item.strip()]


def _str_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _output_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--out", default="-", help="Report path, '-' for stdout (relative paths go under LAB_OUTPUT_DIR)")
    parent.add_argument("--format", choices=("json", "csv"), default="json", help="Report format (default json)")
    parent.add_argument("--log-level", help="Logging level (default LAB_LOG_LEVEL or INFO)")
    return parent


def _plan_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--plan", help="Plan file; the flags below override its values")
    parent.add_argument("--k", type=int, help="Number of Kraus operators (k >= 2)")
    parent.add_argument("--n", type=int, help="Matrix size, shorthand for a one-point --n-grid")
    parent.add_argument("--n-grid", type=_int_list, help="Comma-separated ascending matrix sizes")
    parent.add_argument("--p", type=_str_list, help="Comma-separated Schatten indices, 'inf' allowed")
    parent.add_argument("--trials", type=_positive_int, help=f"Trials per n (default {DEFAULT_TRIALS})")
    parent.add_argument("--seed", type=int, help="64-bit master seed (drawn and logged when omitted)")
    parent.add_argument("--flavor", choices=("gue", "ge"), help="Ensemble flavor (default gue)")
    parent.add_argument("--epsilon", type=float, help=f"Rectifier bracket epsilon (default {DEFAULT_EPSILON})")
    parent.add_argument("--restarts", type=int, help=f"Estimator restarts (default {DEFAULT_RESTARTS})")
    parent.add_argument("--cross-flavor", action="store_true", help="Also run the other flavor and report differences")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lab.py", description="Free-probability lab for random CP maps")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    out, plan = _output_options(), _plan_options()

    limits = sub.add_parser("limits", parents=[out], help="Limit MOpN, bounds and the multiplicativity verdict")
    limits.add_argument("--k", type=int, required=True, help="Number of Kraus operators (k >= 2)")
    limits.add_argument("--p", required=True, help="Schatten index p > 1 or 'inf'")
    limits.add_argument("--epsilon", type=float, help="Epsilon of the rectified verdict (default 1/k)")

    table = sub.add_parser("violation-table", parents=[out], help="Verdict scan over a range of k")
    table.add_argument("--p", required=True, help="Schatten index p > 1 or 'inf'")
    table.add_argument("--k-min", type=int, default=2, help="First k (default 2)")
    table.add_argument("--k-max", type=int, default=10**6, help="Last k (default 1000000)")

    gap = sub.add_parser("moe-gap", parents=[out], help="Entropy gap and its minimal violating k")
    gap.add_argument("--k", type=int, help="Also report the gap at this k")
    gap.add_argument("--k-max", type=int, default=10**12, help="Upper end of the threshold search")

    sub.add_parser("convergence", parents=[out, plan], help="Monte Carlo convergence to the free limits")
    sub.add_parser("bell-pair", parents=[out, plan], help="Bell-pair output against its limit")
    sub.add_parser("moe", parents=[out, plan], help="Entropy experiment on the rectified channel")

    mopn = sub.add_parser("mopn-estimate", parents=[out], help="Estimate the MOpN of one sampled channel")
    mopn.add_argument("--k", type=int, required=True, help="Number of Kraus operators (k >= 2)")
    mopn.add_argument("--n", type=int, required=True, help="Matrix size")
    mopn.add_argument("--p", default="inf", help="Schatten index p > 1 or 'inf' (default inf)")
    mopn.add_argument("--seed", type=int, help="64-bit master seed (drawn and logged when omitted)")
    mopn.add_argument("--flavor", choices=("gue", "ge"), default="gue", help="Ensemble flavor (default gue)")
    mopn.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS, help=f"Random restarts (default {DEFAULT_RESTARTS})")
    mopn.add_argument("--max-iters", type=int, default=MAX_ITERATIONS, help="Iteration cap per restart")

    verify = sub.add_parser("nc-verify", parents=[out], help="Non-crossing oracle self-tests")
    verify.add_argument("--samples", type=_positive_int, default=100, help="Random coefficient matrices (default 100)")

    shape = sub.add_parser("shape-check", parents=[out], help="Brute-force optimal eigenvalue shape")
    shape.add_argument("--k", type=int, required=True, help="Number of levels, 2 <= k <= 4")
    shape.add_argument("--q", type=_float_list, default=[3.0, 4.0], help="Comma-separated q values (default 3,4)")
    return parser


def _out_path(path: str) -> str:
    if path == "-":
        return path
    target = Path(path)
    if OUTPUT_DIR and not target.is_absolute():
        target = Path(OUTPUT_DIR) / target
    parent = target.parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise DomainError(f"--out: cannot write to {target}")
    return str(target)


def _seed(value: int | None) -> int:
    if value is None:
        value = draw_master_seed()
        logger.info(f"No --seed given, drawn master seed: {value}")
    return value


def plan_from_args(args) -> ExperimentPlan:
    fields = load_plan(args.plan).model_dump() if args.plan else {}
    overrides = {
        "k": args.k,
        "n_grid": args.n_grid or ([args.n] if args.n is not None else None),
        "p_list": args.p,
        "trials": args.trials,
        "master_seed": args.seed,
        "flavor": args.flavor,
        "epsilon": args.epsilon,
        "restarts": args.restarts,
    }
    fields.update({key: value for key, value in overrides.items() if value is not None})
    try:
        plan = ExperimentPlan.model_validate(fields)
    except ValidationError as e:
        first = e.errors()[0]
        raise PlanError(first["msg"], field=".".join(str(part) for part in first["loc"])) from e
    if plan.master_seed is None:
        plan = plan.model_copy(update={"master_seed": _seed(None)})
    return plan


def cmd_limits(args):
    index = SchattenIndex.parse(args.p)
    verdict = multiplicativity_verdict(args.k, index)
    rectified = rectified_multiplicativity_verdict(args.k, index, args.epsilon)
    value, profile = limit_mopn(args.k, index)
    summary = {
        "k": args.k,
        "p": index.label(),
        "single": verdict.single_bound,
        "pair": verdict.pair_bound,
        "violated": verdict.violated,
        "rectified_violated": rectified.violated,
        "limit_mopn": value,
        "profile": {"alpha": profile.alpha, "beta": profile.beta, "q": profile.q, "shape_proven": profile.shape_proven},
        "mp_edges": list(mp_edges(args.k)),
    }
    return build_report("limits", [verdict, rectified], summary=summary)


def _stream_table(index: SchattenIndex, args) -> None:
    path = _out_path(args.out)
    handle = sys.stdout if path == "-" else open(path, "w", encoding="utf-8", newline="")
    first, rows = None, 0
    try:
        for i, chunk in enumerate(violation_rows(index, args.k_min, args.k_max)):
            chunk.to_csv(handle, index=False, header=(i == 0))
            rows += len(chunk)
            hits = chunk.loc[chunk["first_violation"], "k"]
            if first is None and not hits.empty:
                first = int(hits.iloc[0])
    finally:
        if handle is not sys.stdout:
            handle.close()
    logger.info(f"=== Scanned {rows} rows for p={index}, minimal violating k: {first} ===")


def cmd_violation_table(args):
    index = SchattenIndex.parse(args.p)
    if args.k_min < 2 or args.k_max < args.k_min:
        raise DomainError(f"invalid k range [{args.k_min}, {args.k_max}]")
    if args.format == "csv":
        _stream_table(index, args)
        return None
    summary = {
        "p": index.label(),
        "k_min": args.k_min,
        "k_max": args.k_max,
        "rows_scanned": args.k_max - args.k_min + 1,
        "minimal_violating_k": minimal_violating_k(index, args.k_min, args.k_max),
    }
    return build_report("violation-table", summary=summary)


def cmd_moe_gap(args):
    rows = [moe_gap(args.k)] if args.k is not None else []
    summary = {"k_max": args.k_max, "minimal_violating_k": moe_minimal_violating_k(args.k_max)}
    if rows:
        summary.update({"k": args.k, "gap": rows[0].margin, "violated": rows[0].violated})
    return build_report("moe-gap", rows, summary=summary)


def cmd_study(args):
    plan = plan_from_args(args)
    study = STUDIES[args.command]
    records = study(plan)
    extra = None
    if args.cross_flavor:
        other = EnsembleFlavor.GINIBRE if plan.flavor is EnsembleFlavor.GUE else EnsembleFlavor.GUE
        logger.info(f"=== Cross-flavor run: {other.value} ===")
        other_records = study(plan.model_copy(update={"flavor": other}))
        extra = {"flavor_differences": flavor_differences(records, other_records)}
        records = records + other_records
    return study_report(args.command, plan, records, extra)


def cmd_mopn_estimate(args):
    index = SchattenIndex.parse(args.p)
    seed = SeedSpec(_seed(args.seed))
    fam = sample_kraus_family(args.n, args.k, EnsembleFlavor.parse(args.flavor), seed.child(0))
    estimate = estimate_mopn(fam, ChannelKind.raw(), index, args.restarts, args.max_iters, seed=seed.child(1))
    limit, _ = limit_mopn(args.k, index)
    row = {
        "k": args.k, "n": args.n, "p": index.label(), "flavor": fam.flavor.value, "kind": "raw",
        "value": estimate.value, "limit": limit, "abs_err": abs(estimate.value - limit),
        "converged": estimate.converged, "seed": seed.label(),
    }
    summary = {"value": estimate.value, "limit": limit, "iterations": estimate.iterations}
    return build_report("mopn-estimate", [row], summary=summary, seeds={"master_seed": seed.master_seed})


def cmd_nc_verify(args):
    rows = run_battery(samples=args.samples)
    passed = all(row["passed"] for row in rows)
    return build_report("nc-verify", rows, summary={"passed": passed}), passed


def cmd_shape_check(args):
    results = validate_optimal_shape(args.k, args.q)
    passed = all(r.passed for r in results)
    return build_report("shape-check", results, summary={"passed": passed}), passed


COMMANDS = {
    "limits": cmd_limits,
    "violation-table": cmd_violation_table,
    "moe-gap": cmd_moe_gap,
    "convergence": cmd_study,
    "bell-pair": cmd_study,
    "moe": cmd_study,
    "mopn-estimate": cmd_mopn_estimate,
    "nc-verify": cmd_nc_verify,
    "shape-check": cmd_shape_check,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.log_level:
            logging.getLogger().setLevel(args.log_level.upper())
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"lab.py: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_USAGE

    try:
        out = _out_path(args.out)
        result = COMMANDS[args.command](args)
        passed = True
        if isinstance(result, tuple):
            result, passed = result
        if result is not None:
            emit(result, args.format, out)
    except (PlanError, DomainError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except (LabError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_RUNTIME
    except Exception as e:
        logger.exception(f"=== {args.command} aborted: {type(e).__name__}: {e} ===")
        return EXIT_RUNTIME
    return EXIT_OK if passed else EXIT_RUNTIME


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
