"""Command-line interface.

Subcommands: ``estimate``, ``bench``, ``hardcase`` and ``lowerbound``.
Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from .bench import ExperimentConfig, hardcase_config, lowerbound_config, run_experiment, write_records
from .estimators import ESTIMATORS, EstimatorConfig, estimate
from .median import MedianConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("affmed")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_points(path) -> np.ndarray:
    """Parse a CSV points file (optional header, one point per row).

    Raises :class:`DataError` naming the offending line.
    """
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            lines = fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from exc
    rows, d = [], None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        toks = [t.strip() for t in line.split(",")]
        if not rows and d is None and not _is_number(toks[0]):
            d = -1  # header row seen; width taken from the first data row
            continue
        try:
            vals = [float(t) for t in toks]
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric value") from None
        if not all(math.isfinite(v) for v in vals):
            raise DataError(f"{path}:{lineno}: non-finite value")
        if d is None or d == -1:
            d = len(vals)
        elif len(vals) != d:
            raise DataError(f"{path}:{lineno}: expected {d} values, found {len(vals)}")
        rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no points")
    return np.array(rows, dtype=np.float64)


def _float_list(x):
    return [float(v) for v in np.asarray(x).ravel()]


def cmd_estimate(args) -> int:
    X = read_points(args.input)
    cfg = EstimatorConfig(kind=args.estimator, delta=args.delta, eta=args.eta, seed=args.seed,
                          median=MedianConfig(seed=args.seed))
    res = estimate(X, cfg)
    rep = res.report
    out = {
        "estimate": [None if not math.isfinite(v) else v for v in _float_list(res.estimate)],
        "outlyingness": rep.certified_outlyingness if rep is not None else None,
        "iterations": rep.iterations if rep is not None else 0,
        "constraints": rep.constraints_used if rep is not None else 0,
        "k_buckets": res.k_buckets,
        "seed": args.seed,
        "undefined": bool(res.undefined_flag),
    }
    if args.json:
        print(json.dumps(out))
    else:
        print(" ".join(repr(v) for v in _float_list(res.estimate)))
        for key in ("outlyingness", "iterations", "constraints", "k_buckets", "undefined"):
            print(f"{key}: {out[key]}")
    return EXIT_OK


def _load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from exc
    try:
        return ExperimentConfig.from_dict(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: invalid config: {exc}") from exc


def _emit(cfg: ExperimentConfig, out):
    records = run_experiment(cfg)
    path = out or cfg.output.get("path")
    fmt = cfg.output.get("format") if not out else None
    if path:
        write_records(records, path, fmt)
    else:
        from .bench import format_records

        sys.stdout.write(format_records(records, cfg.output.get("format", "csv")))
    failed = sum(1 for r in records if r.failure)
    if failed:
        log.warning("%d of %d trial records failed", failed, len(records))
    return EXIT_OK


def cmd_bench(args) -> int:
    return _emit(_load_config(args.config), args.out)


def cmd_hardcase(args) -> int:
    gamma = "auto" if args.gamma == "auto" else float(args.gamma)
    cfg = hardcase_config(args.d, gamma, args.n, args.trials, args.seed)
    return _emit(cfg, args.out)


def cmd_lowerbound(args) -> int:
    cfg = lowerbound_config(args.family, args.d, args.n, args.delta, args.eta, args.trials, args.seed)
    return _emit(cfg, args.out)


def _gamma(s: str):
    if s == "auto":
        return s
    float(s)
    return s


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="affmed", description="Affine-equivariant robust mean estimation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    e = sub.add_parser("estimate", help="estimate the mean of a points file")
    e.add_argument("--input", required=True)
    e.add_argument("--estimator", choices=ESTIMATORS, default="ours")
    e.add_argument("--delta", type=float, default=0.05)
    e.add_argument("--eta", type=float, default=0.0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bench", help="run an experiment config")
    b.add_argument("--config", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    h = sub.add_parser("hardcase", help="Tukey-vs-ours separation preset")
    h.add_argument("--d", type=int, required=True)
    h.add_argument("--gamma", type=_gamma, default="auto")
    h.add_argument("--n", type=int, default=20000)
    h.add_argument("--trials", type=int, default=20)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--out")
    h.set_defaults(func=cmd_hardcase)

    lb = sub.add_parser("lowerbound", help="lower-bound families")
    lb.add_argument("--family", choices=("heavy", "breakdown", "quant"), required=True)
    lb.add_argument("--d", type=int, required=True)
    lb.add_argument("--n", type=int, required=True)
    lb.add_argument("--delta", type=float, default=0.05)
    lb.add_argument("--eta", type=float)
    lb.add_argument("--trials", type=int, default=10)
    lb.add_argument("--seed", type=int, default=0)
    lb.add_argument("--out")
    lb.set_defaults(func=cmd_lowerbound)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DataError as exc:
        print(f"affmed: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"affmed: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"affmed: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
