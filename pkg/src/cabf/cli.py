"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data or validation error,
130 interrupted (a resumable checkpoint has been written).
"""

from __future__ import annotations

import argparse
import json
import logging
import signal
import sys
from functools import cache
from pathlib import Path

import numpy as np

from .boolfn import BoolFnError, TruthTable, parse_table, to_hex
from .props import PropertyProfile, correlation_immunity_order, property_profile
from .transforms import anf, anf_text, walsh_spectrum

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERRUPTED = 0, 2, 3, 130

log = logging.getLogger("cabf")


class DataError(Exception):
    pass


def _profile_lines(t: TruthTable, p: PropertyProfile) -> list[str]:
    return ["hex," + ",".join(PropertyProfile.CSV_FIELDS), p.csv_row(str(t))]


def cmd_analyze(args) -> int:
    t = parse_table(args.table, args.arity)
    spectrum = walsh_spectrum(t).coefficients
    profile = property_profile(t)
    out = [
        f"table: {t}",
        f"anf: {anf_text(anf(t))}",
        f"walsh: S(0)={int(spectrum[0])} max|S|={int(np.abs(spectrum).max())} "
        f"nonzero={int(np.count_nonzero(spectrum))}",
        f"ci_order: {correlation_immunity_order(t)}",
    ]
    if t.arity == 5:
        from .affine import classify

        out.append(f"class: {classify(t)}")
    out += _profile_lines(t, profile)
    print("\n".join(out))
    return EXIT_OK


def cmd_classify(args) -> int:
    from .affine import classify

    print(classify(parse_table(args.table, 5)))
    return EXIT_OK


def cmd_extend(args) -> int:
    from .caext import extend_5_to_9

    f = parse_table(args.table, 5)
    g = extend_5_to_9(f)
    print(to_hex(g))
    print("\n".join(_profile_lines(g, property_profile(g))))
    if args.compare:
        from dataclasses import asdict

        from .sweep import preservation_record

        rec = preservation_record(f)
        print(f"class: {rec.class_id}")
        print("preserved_for," + ",".join(asdict(rec.preserved)))
        print(rec.rule_hex + "," + ",".join(str(int(v)) for v in asdict(rec.preserved).values()))
    return EXIT_OK


def _parse_cells(text: str | None, width: int, seed: int | None) -> tuple[int, ...]:
    if text is None:
        if seed is not None:
            rng = np.random.default_rng(seed)
            return tuple(int(v) for v in rng.integers(0, 2, size=width))
        return tuple(1 if i == width // 2 else 0 for i in range(width))
    mapping = {".": 0, "0": 0, "#": 1, "1": 1}
    if any(c not in mapping for c in text):
        raise DataError("initial row may only contain . # 0 1")
    if len(text) != width:
        raise DataError(f"initial row has {len(text)} cells, expected width {width}")
    return tuple(mapping[c] for c in text)


def cmd_evolve(args) -> int:
    from .caext import CAState, evolve, render_evolution

    rule = parse_table(args.rule, args.arity)
    width = args.width if args.width is not None else len(args.initial or "") or 31
    if width < args.arity:
        raise DataError(f"width must be at least the rule arity {args.arity}")
    cells = _parse_cells(args.initial, width, args.seed)
    states = evolve(CAState(cells, rule, args.boundary), args.steps)
    print(render_evolution(states))
    return EXIT_OK


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo, 0), int(hi, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END, got {text!r}") from None


def _emit_tables(counters, fmt: str, tables: str, comments=None) -> None:
    from .report import render

    chosen = ("properties", "preservation") if tables == "both" else (tables,)
    for i, name in enumerate(chosen):
        if i:
            print()
        sys.stdout.write(render(counters, fmt, name, comments))


def cmd_class_sweep(args) -> int:
    from .report import rows
    from .sweep import run_class_sweep

    counters = run_class_sweep(args.class_id, args.limit)
    if args.output:
        _write_counters(args.output, counters, {"class": args.class_id})
    if args.all_rows:
        _emit_tables(counters, args.format, args.tables)
        return EXIT_OK
    # Only the swept class, in each requested table shape.
    chosen = ("properties", "preservation") if args.tables == "both" else (args.tables,)
    for name in chosen:
        data = rows(counters, name)
        row = next(r for r in data if r[0] == args.class_id)
        if args.format == "latex":
            print(" & ".join(row) + " \\\\")
        else:
            print(",".join(data[0]))
            print(",".join(row))
    return EXIT_OK


def _write_counters(path, counters, meta) -> None:
    doc = {"format": "cabf-counters", "format_version": 1, "meta": meta,
           "counters": counters.to_json()}
    Path(path).write_text(json.dumps(doc, indent=1))


def _progress(done: int, total: int) -> None:
    print(f"progress: {done}/{total} rules", file=sys.stderr, flush=True)


def cmd_sweep(args) -> int:
    from .sweep import CHUNK_SIZE, SweepJob, run_job

    if args.sample is not None:
        job = SweepJob(samples=args.sample, seed=args.seed, chunk_size=args.chunk_size or CHUNK_SIZE)
        comments = [f"sampled: {args.sample} rules, seed {args.seed}"]
    else:
        start, end = args.range
        job = SweepJob(start, end, chunk_size=args.chunk_size or CHUNK_SIZE)
        comments = [f"range: [{start}, {end})"]
    counters = run_job(job, args.workers, args.checkpoint, _progress)
    if args.output:
        _write_counters(args.output, counters, job.describe())
    _emit_tables(counters, args.format, args.tables, comments)
    return EXIT_OK


def load_counters(path):
    """Counters from a finished checkpoint or a ``--output`` counters file."""
    from .sweep import ClassCounters, load_checkpoint

    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read counters file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise DataError(f"{path} is not a counters or checkpoint file")
    if doc.get("format") == "cabf-sweep":
        job, counters, done = load_checkpoint(path)
        comments = [f"{'sampled' if job.sampled else 'range'}: {job.describe()}"]
        if done < job.size:
            comments.append(f"incomplete: {done}/{job.size} rules")
        return counters, comments
    if doc.get("format") == "cabf-counters" and doc.get("format_version") == 1:
        try:
            return ClassCounters.from_json(doc["counters"]), [str(doc.get("meta", ""))]
        except (KeyError, ValueError) as exc:
            raise DataError(f"malformed counters file {path}: {exc}") from exc
    raise DataError(f"{path} is not a counters or checkpoint file")


def cmd_report(args) -> int:
    counters, comments = load_counters(args.counters)
    _emit_tables(counters, args.format, args.tables, comments)
    return EXIT_OK


@cache  # parsers are reusable; building one costs a millisecond
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cabf", description="Boolean-function property tests and CA 5 -> 9 extension.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="properties, ANF and Walsh summary of one function")
    p.add_argument("table", help="hex truth table (or 0b... binary)")
    p.add_argument("--arity", type=int, required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", help="affine class of a 5-variable function")
    p.add_argument("table")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("extend", help="9-variable extension of a 5-variable rule")
    p.add_argument("table")
    p.add_argument("--compare", action="store_true", help="also print preservation bits")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("evolve", help="print CA generations as rows of . and #")
    p.add_argument("rule")
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--width", type=int)
    p.add_argument("--steps", type=int, default=15)
    p.add_argument("--initial", help="first row using . and # (default: one live centre cell)")
    p.add_argument("--seed", type=int, help="random first row from this seed")
    p.add_argument("--boundary", choices=["circular", "truncating"], default="circular")
    p.set_defaults(func=cmd_evolve)

    fmt_args = argparse.ArgumentParser(add_help=False)
    fmt_args.add_argument("--format", choices=["csv", "text", "latex"], default="csv")
    fmt_args.add_argument("--tables", choices=["properties", "preservation", "both"], default="both")

    p = sub.add_parser("class-sweep", parents=[fmt_args], help="census of one enumerable class")
    p.add_argument("class_id")
    p.add_argument("--limit", type=int, default=2_500_000)
    p.add_argument("--output", help="write counters JSON here")
    p.add_argument("--all-rows", action="store_true", help="print every class row, not just this one")
    p.set_defaults(func=cmd_class_sweep)

    p = sub.add_parser("sweep", parents=[fmt_args], help="sweep a rule range or a random sample")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--range", type=_range, help="START:END rule indices, e.g. 0:0x100000000")
    group.add_argument("--sample", type=int, help="number of uniformly random rules")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint", help="resumable checkpoint file")
    p.add_argument("--chunk-size", type=int)
    p.add_argument("--output", help="write counters JSON here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", parents=[fmt_args], help="render tables from a counters file")
    p.add_argument("counters")
    p.set_defaults(func=cmd_report)
    return parser


def _sigterm(signum, frame):
    raise KeyboardInterrupt


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    from .affine import AffineError
    from .sweep import Interrupted, SweepError

    previous = signal.signal(signal.SIGTERM, _sigterm)
    try:
        return args.func(args)
    except Interrupted as exc:
        print(f"interrupted: {exc}", file=sys.stderr)
        return EXIT_INTERRUPTED
    except (BoolFnError, AffineError, SweepError, DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    finally:
        signal.signal(signal.SIGTERM, previous)


if __name__ == "__main__":
    sys.exit(main())
