"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 parse or size error, 3 failed precondition,
4 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, calibration, oracle
from .boolfn import InvalidInput, SBoxTable
from .fixtures import ALIASES, FIXTURE_NAMES, load_fixture
from .io import FORMATS, ParseError, SBoxFile, SizeError, read_sbox, write_sbox
from .metrics import CC_MODELS, CC_STATISTICS, ROW_ORDER, full_report
from .search import MODES, ORDERINGS, PreconditionError, SearchConfig, UnsupportedSize, enumerate_all, group_count, run

SCHEMA = "sboxlab.report/1"
EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# loading


def load_box(source: str, fmt: str | None = None) -> SBoxFile:
    """A file path, or the name of a bundled fixture."""
    if Path(source).is_file():
        return read_sbox(source, fmt)
    name = source.removeprefix("fixture:")
    if name in FIXTURE_NAMES or name in ALIASES:
        fx = load_fixture(name)
        for note in fx.repairs:
            print(f"note: {fx.name}: {note}", file=sys.stderr)
        return SBoxFile(None, "fixture", fx.sbox, f"fixture {fx.name}: {fx.provenance}")
    if Path(source).is_dir():
        raise UsageError(f"{source} is a directory")
    raise UsageError(f"no such file or fixture: {source}")


def digest(S: SBoxTable) -> str:
    return hashlib.sha256(f"{S.n},{S.m}:".encode() + np.asarray(S.entries, dtype="<u4").tobytes()).hexdigest()


def _box_name(source: str) -> str:
    return Path(source).stem if Path(source).is_file() else source.removeprefix("fixture:")


def report_document(name: str, box: SBoxFile, cc_model: str, cc_statistic: str, fields=None, seed=None) -> dict:
    rep = full_report(box.sbox, cc_model=cc_model, cc_statistic=cc_statistic).to_dict()
    metrics = {k: v for k, v in rep.items() if k not in ("cc_model", "cc_statistic", "snr_variant")}
    if fields:
        metrics = {k: v for k, v in metrics.items() if k in fields}
    return {
        "schema": SCHEMA,
        "tool_version": __version__,
        "box": {"name": name, "sha256": digest(box.sbox), "n": box.sbox.n, "m": box.sbox.m, "provenance": box.provenance},
        "metrics": metrics,
        "cc": {"model": cc_model, "statistic": cc_statistic, "value": rep["cc"]},
        "snr_variant": rep["snr_variant"],
        "seed": seed,
    }


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def _row_value(doc: dict, field: str):
    if field == "robustness":
        return doc["metrics"].get("robustness_value")
    if field == "cc":
        return doc["cc"]["value"]
    return doc["metrics"].get(field)


def render_table(columns: list[tuple[str, list]], labels=None) -> str:
    labels = labels or [lab for lab, _ in ROW_ORDER]
    head = ["metric"] + [c for c, _ in columns]
    body = [[lab] + [_fmt(vals[i]) for _, vals in columns] for i, lab in enumerate(labels)]
    widths = [max(len(r[j]) for r in [head] + body) for j in range(len(head))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [head] + body]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# commands


def cmd_eval(args) -> int:
    box = load_box(args.box, args.format)
    S = box.sbox
    if S.n == S.m and not S.is_permutation():
        print(f"warning: {args.box} has repeated entries; the box is not bijective", file=sys.stderr)
    fields = set(args.metrics.split(",")) if args.metrics else None
    doc = report_document(_box_name(args.box), box, args.cc_model, args.cc_statistic, fields)
    if args.table:
        text = render_table([(doc["box"]["name"], [_row_value(doc, f) for _, f in ROW_ORDER])])
    else:
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    box = load_box(args.box, args.format)
    cfg = dict(
        mode=args.mode,
        seed=args.seed,
        ordering_policy=args.ordering,
        to_direction=args.to_direction,
        cc_model=args.cc_model,
        cc_statistic=args.cc_statistic,
        workers=args.workers,
        report_accepted=False,
    )
    if args.thresholds:
        cfg["thresholds"] = tuple(args.thresholds.split(","))
    if args.budget is not None:
        cfg["generations" if args.mode == "genetic" else "max_candidates"] = args.budget
    if args.population is not None:
        cfg["population_size"] = args.population
    result = run(box.sbox, SearchConfig(**cfg))
    summary = result.summary()
    summary.update(schema=SCHEMA, tool_version=__version__, initial={"name": _box_name(args.box), "sha256": digest(box.sbox)})
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        ext = {"json": "json", "hex": "hex"}.get(args.write_format, "txt")
        files = []
        for k, (cand, S, _) in enumerate(result.accepted):
            p = out / f"box-{k:05d}.{ext}"
            write_sbox(p, S, args.write_format)
            files.append(p.name)
        summary["files"] = files
        (out / "result.json").write_text(json.dumps(summary, indent=2) + "\n")
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def _collect(paths: list[str], fmt: str | None) -> tuple[list[tuple[str, SBoxFile]], list[tuple[str, list[SBoxFile]]]]:
    singles, groups = [], []
    for p in paths:
        if Path(p).is_dir():
            files = sorted(q for q in Path(p).iterdir() if q.is_file() and q.name != "result.json")
            if not files:
                raise UsageError(f"directory {p} holds no boxes")
            groups.append((Path(p).name or p, [read_sbox(q, fmt) for q in files]))
        else:
            singles.append((_box_name(p), load_box(p, fmt)))
    return singles, groups


def cmd_compare(args) -> int:
    singles, groups = _collect(args.boxes, args.format)
    boxes = [b for _, b in singles] + [b for _, bs in groups for b in bs]
    if len(boxes) < 2:
        raise UsageError("compare needs at least two boxes")
    sizes = {(b.sbox.n, b.sbox.m) for b in boxes}
    if len(sizes) > 1:
        raise PreconditionError(f"boxes of different sizes cannot be compared: {sorted(sizes)}")
    fields = [f for _, f in ROW_ORDER]
    columns = []
    for name, b in singles:
        doc = report_document(name, b, args.cc_model, args.cc_statistic)
        columns.append((name, [_row_value(doc, f) for f in fields]))
    for name, bs in groups:
        vals = np.array(
            [[float(_row_value(report_document(name, b, args.cc_model, args.cc_statistic), f)) for f in fields] for b in bs]
        )
        for label, agg in (("min", vals.min(0)), ("avg", vals.mean(0)), ("max", vals.max(0))):
            columns.append((f"{name}:{label}", [float(v) for v in agg]))
    if args.json:
        text = json.dumps({"schema": SCHEMA, "rows": fields, "columns": dict(columns)}, indent=2) + "\n"
    else:
        text = render_table(columns)
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    failures = 0
    scope = args.scope

    def line(ok: bool, what: str):
        nonlocal failures
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {what}")

    if scope in ("all", "calibration"):
        variant, hits = calibration.calibrate_snr()
        print(f"decision  SNR variant: {variant} ({', '.join(f'{k}={v}' for k, v in hits.items())} published values matched)")
        cc = calibration.calibrate_cc()
        verdict = "reproduces" if cc.reproduces_initial else "unreproduced (definition ambiguity):"
        print(f"decision  kappa model: {cc.model}, statistic: {cc.statistic}; {verdict} 4x4 initial = {cc.initial_4x4:.4f}")
        for d in calibration.fixture_decisions():
            print(f"decision  {d}")
        line(variant == "sign", "SNR calibration settles on the sign-transform variant")
        line(cc.reproduces_initial, "kappa calibration reproduces the 4x4 initial value 1.357")
    if scope in ("all", "oracles"):
        seed, count = args.seed, args.cases
        for n in (3, 4, 5):
            bad = oracle.metric_sweep(n, count, seed + n)
            line(not bad, f"metric oracles, {count} random bijections at n={n}" + (f": {bad[:3]}" if bad else ""))
        bad = oracle.transform_sweep(6, 10 * count, seed)
        line(not bad, f"transform oracles, {10 * count} random functions at n=6")
        bad = oracle.ddt_sweep(5, count, seed)
        line(not bad, f"difference table oracle, {count} random bijections at n=5")
        for n in (3, 4):
            t = enumerate_all(_identity(n), SearchConfig(report_accepted=False)).tally
            line(t.bijective == group_count(n), f"bijective mask sets at n={n}: {t.bijective} = |GL(n,2)|/n!")
    print(f"{'verification failed' if failures else 'all checks passed'} ({failures} failure(s))")
    return EXIT_VERIFY if failures else EXIT_OK


def _identity(n: int) -> SBoxTable:
    return SBoxTable.from_list(list(range(1 << n)))


def cmd_fixtures(args) -> int:
    for name in FIXTURE_NAMES:
        fx = load_fixture(name)
        S = fx.sbox
        print(f"{name:20s} {S.n}x{S.m}  {fx.provenance}")
        for note in fx.repairs:
            print(f"{'':20s}   repair: {note}")
    for alias, target in ALIASES.items():
        print(f"{alias:20s} alias of {target}")
    return EXIT_OK


# parser


def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=FORMATS, help="input format (default: by file extension)")
    p.add_argument("--cc-model", choices=CC_MODELS, default="sqhw")
    p.add_argument("--cc-statistic", choices=CC_STATISTICS, default="var")
    p.add_argument("--out", help="write output here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sboxlab", description="S-box metrics and coordinate-mix search")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log fixture repairs and progress")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="metrics report for one box")
    p.add_argument("box", help="file path or fixture name")
    _common(p)
    p.add_argument("--metrics", help="comma-separated report fields to keep")
    p.add_argument("--table", action="store_true", help="human-readable table instead of JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="search coordinate mixes of an initial box")
    p.add_argument("box", help="initial box: file path or fixture name")
    _common(p)
    p.add_argument("--mode", choices=MODES, default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, help="random draws, or generations in genetic mode")
    p.add_argument("--population", type=int, help="genetic population size")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ordering", choices=ORDERINGS, default="canonical")
    p.add_argument("--to-direction", choices=("le", "ge"), default="le")
    p.add_argument("--thresholds", help="comma-separated subset of to,snr,cc (to is always applied)")
    p.add_argument("--write-format", choices=FORMATS, default="decimal", help="format of accepted box files")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compare", help="side-by-side metrics of several boxes")
    p.add_argument("boxes", nargs="+", help="files, fixture names or directories (summarised as min/avg/max)")
    _common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="oracle sweeps and fixture calibration")
    p.add_argument("--scope", choices=("all", "oracles", "calibration"), default="all")
    p.add_argument("--cases", type=int, default=20, help="random boxes per oracle sweep")
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fixtures", help="list bundled boxes")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, SizeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, UnsupportedSize) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (UsageError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
