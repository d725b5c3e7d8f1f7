"""Command-line entry point ``egfkit``.

Exit codes: 0 the command ran, 1 input/output error, 2 a statistical
precondition failed (divergent integral, undefined estimator, bad argument).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import datasets
from .competitors import STATISTICS, run_test
from .distributions import DistributionSpec
from .egf import EGFQuery, egf, egf_residual, wegf, wregf
from .errors import EgfkitError
from .gof import SIDES, GofConfig
from .kde import KdeConfig, KernelSpec
from .simharness import POWER_ALTERNATIVES, POWER_GRID, SIZE_GRID, SimConfig, SimResult, run_grid

EXIT_OK, EXIT_IO, EXIT_STAT = 0, 1, 2


class InputError(Exception):
    pass


def _fail(code: int, message: str) -> int:
    print(f"egfkit: {message}", file=sys.stderr)
    return code


def read_values(path: str) -> np.ndarray:
    """One number per line (``#`` comments allowed) or CSV with a ``value`` column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if lines and (lines[0].lower() == "value" or "," in lines[0]):
        reader = csv.DictReader(io.StringIO("\n".join(lines)))
        if reader.fieldnames is None or "value" not in [f.strip() for f in reader.fieldnames]:
            raise InputError(f"{path}: CSV input needs a 'value' column")
        key = next(f for f in reader.fieldnames if f.strip() == "value")
        raw = [row[key] for row in reader]
    else:
        raw = lines
    try:
        values = np.array([float(v) for v in raw])
    except (TypeError, ValueError):
        raise InputError(f"{path}: non-numeric entry") from None
    if values.size < 2:
        raise InputError(f"{path}: need at least 2 values, found {values.size}")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise InputError(f"{path}: values must be finite and positive")
    return values


def _kde_config(args) -> KdeConfig:
    return KdeConfig(KernelSpec.parse(args.kernel), args.bandwidth)


def _gof_config(args) -> GofConfig:
    return GofConfig(args.gamma, args.boot, _kde_config(args), args.seed, getattr(args, "sided", "two"))


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def cmd_gof(args) -> int:
    values = read_values(args.input)
    report = run_test(values, args.statistic, _gof_config(args))
    print(report.to_json())
    return EXIT_OK


def _parse_params(text: str) -> tuple:
    if text in ("", "-"):
        return ()
    return tuple(float(p) for p in text.split(","))


def cmd_egf(args) -> int:
    dist = DistributionSpec(args.family, _parse_params(args.params))
    if args.residual and args.t is None:
        raise EgfkitError("--residual needs --t")
    if args.residual:
        query = EGFQuery(args.s, args.t)
        fn = wregf if args.weighted else egf_residual
        result = fn(dist, query, method=args.method)
    else:
        fn = wegf if args.weighted else egf
        result = fn(dist, args.s, method=args.method)
    print(f"{result.value!r} {result.method} {result.est_error!r}")
    return EXIT_OK


def _sizes(text: str) -> tuple:
    return tuple(int(n) for n in text.split(","))


def cmd_simulate(args) -> int:
    statistics = tuple(s.strip() for s in args.statistic.split(","))
    config = _gof_config(args)
    if args.paper_grid == "size":
        jobs = [("paretoI:1", SIZE_GRID)]
    elif args.paper_grid == "power":
        jobs = [(label, POWER_GRID) for label in POWER_ALTERNATIVES]
    else:
        if args.family is None or args.n is None:
            raise EgfkitError("simulate needs --family and --n, or --paper-grid")
        jobs = [(f"{args.family}:{args.param or '-'}", _sizes(args.n))]
    if args.n is not None and args.paper_grid:
        jobs = [(label, _sizes(args.n)) for label, _ in jobs]

    blocks = []
    for label, sizes in jobs:
        sim = SimConfig(DistributionSpec.parse(label), sizes, args.reps, config, statistics)
        blocks.append((sim.generator.label, run_grid(sim, args.threads)))

    if args.format == "json":
        if len(blocks) == 1:
            text = blocks[0][1].to_json() + "\n"
        else:
            text = _dump([{"generator": g, "rows": [r._asdict() for r in res.rows]} for g, res in blocks]) + "\n"
    elif len(blocks) == 1:
        text = blocks[0][1].to_csv()
    else:
        text = "".join(f"# generator={g}\n{res.to_csv()}" for g, res in blocks)

    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.output}: {exc}") from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_datasets(args) -> int:
    data = datasets.load(args.which)
    report = run_test(data, "delta", _gof_config(args))
    ref = datasets.REFERENCE[args.which]
    computed = {"alpha_hat": report.alpha_hat, "delta_hat": report.delta_hat, "reject": report.reject}
    out = {
        "dataset": args.which,
        "n": data.n,
        "sum": math.fsum(data.values),
        "report": report.to_dict(),
        "comparison": [
            {"quantity": key, "computed": computed[key], "reference": ref[key]}
            for key in ("alpha_hat", "delta_hat", "reject")
        ],
    }
    print(_dump(out))
    return EXIT_OK


def _add_test_flags(p, statistic=True):
    p.add_argument("--gamma", type=float, default=0.05, help="significance level")
    p.add_argument("--boot", type=int, default=500, help="bootstrap replicates")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--kernel", default="gaussian",
                   help="base kernel or mixture such as 0.5:gaussian,0.5:epanechnikov")
    p.add_argument("--bandwidth", default="silverman", help="'silverman' or a fixed positive h")
    p.add_argument("--sided", choices=SIDES, default="two",
                   help="rejection region of the delta statistic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="egfkit", description="Entropy generating functions and a Pareto goodness-of-fit test.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gof", help="bootstrap goodness-of-fit test on a data file")
    p.add_argument("--input", required=True)
    p.add_argument("--statistic", choices=STATISTICS, default="delta")
    _add_test_flags(p)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("egf", help="evaluate a generating function")
    p.add_argument("--family", required=True)
    p.add_argument("--params", default="-", help="comma separated, '-' for none")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--residual", action="store_true")
    p.add_argument("--method", choices=("auto", "closed_form", "quadrature"), default="auto")
    p.set_defaults(func=cmd_egf)

    p = sub.add_parser("simulate", help="Monte Carlo size/power grid, CSV or JSON")
    p.add_argument("--family")
    p.add_argument("--param", help="comma separated parameters")
    p.add_argument("--n", help="comma separated sample sizes")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--statistic", default="delta", help="comma separated from " + "|".join(STATISTICS))
    p.add_argument("--paper-grid", choices=("size", "power"),
                   help="preset sample sizes and generators for the size or power study")
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, help="worker processes (default: EGFKIT_THREADS or CPU count)")
    _add_test_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("datasets", help="analyse an embedded dataset")
    p.add_argument("which", choices=sorted(datasets.DATASETS))
    _add_test_flags(p)
    p.set_defaults(func=cmd_datasets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        return _fail(EXIT_IO, str(exc))
    except (EgfkitError, ValueError) as exc:
        return _fail(EXIT_STAT, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
