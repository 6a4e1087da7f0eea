"""``plate-bench``: reproduce the convergence tables of the two benchmarks."""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys

from .benchmarks import BENCHMARKS
from .io import FormatError, read_config, write_patch
from .verification import StudyError, convergence_study

log = logging.getLogger("mixedplate")


def parse_levels(text: str) -> list:
    m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*", str(text))
    if not m:
        raise argparse.ArgumentTypeError(f"levels must look like 4..7, got {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) else lo
    if hi < lo:
        raise argparse.ArgumentTypeError("empty level range")
    return list(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plate-bench", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a convergence study")
    run.add_argument("--config", help="key=value file; command-line flags take precedence")
    run.add_argument("--benchmark", choices=sorted(BENCHMARKS))
    run.add_argument("--degree", type=int)
    run.add_argument("--levels", type=parse_levels)
    run.add_argument("--out", help="CSV output path")
    run.add_argument("--dump-matrices", metavar="DIR")

    geo = sub.add_parser("geometry", help="write a built-in geometry in the plain-text patch format")
    geo.add_argument("name", choices=sorted(BENCHMARKS))
    geo.add_argument("out")
    return ap


def _error(stage: str, message: str, **extra) -> int:
    print(json.dumps({"error": message, "stage": stage, **extra}), file=sys.stderr)
    return 1


def _run(args) -> int:
    cfg = {}
    if args.config:
        try:
            cfg = read_config(args.config)
        except (OSError, FormatError) as exc:
            return _error("config", str(exc))
    benchmark = args.benchmark or cfg.get("benchmark")
    degree = args.degree if args.degree is not None else cfg.get("degree")
    levels = args.levels or (parse_levels(cfg["levels"]) if "levels" in cfg else None)
    out = args.out or cfg.get("out")
    dump = args.dump_matrices or cfg.get("dump_matrices")
    missing = [k for k, v in (("benchmark", benchmark), ("degree", degree), ("levels", levels)) if v is None]
    if missing:
        return _error("arguments", "missing " + ", ".join(missing))
    if benchmark not in BENCHMARKS:
        return _error("arguments", f"unknown benchmark {benchmark!r}")
    try:
        report = convergence_study(benchmark, int(degree), levels, dump_dir=dump)
    except StudyError as exc:
        return _error(exc.stage, str(exc.__cause__), level=exc.level)
    except ValueError as exc:
        return _error("arguments", str(exc))
    print(report.to_table())
    if out:
        with open(out, "w") as fh:
            fh.write(report.to_csv())
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return _run(args)
    write_patch(BENCHMARKS[args.name].geometry(), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
