"""Batch verification driver: ``verify <suite> --cubic <file|preset> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

from .cubic import CubicError
from .qk_metric import DomainError
from .suites import SUITE_FUNCS, SUITES, CheckRecord, Context, resolve_cubic, stats_summary

SCHEMA_VERSION = 1
RECORD_FIELDS = ("name", "samples", "max_residual", "tolerance", "comparison", "passed")
TABLE_FIELDS = ("x1", "s", "delta_numeric", "delta_closed", "ratio")


@dataclass
class VerificationReport:
    suite: str
    cubic: dict
    seed: int
    samples: int
    c: float
    tol_scale: float
    records: list = field(default_factory=list)
    sampler: dict = field(default_factory=dict)
    table: list | None = None
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]


def run_suite(cubic: str, suite: str, samples: int = 100, seed: int = 0, c: float = 0.0,
              tol_scale: float = 1.0) -> VerificationReport:
    if suite != "all" and suite not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {suite!r}")
    if samples < 1:
        raise ValueError("samples must be positive")
    if c < 0:
        raise ValueError("the one-loop parameter must be non-negative")
    start = time.perf_counter()
    form, base, name = resolve_cubic(cubic)
    ctx = Context(form, base, name, samples=samples, seed=seed, c=c, tol_scale=tol_scale)
    names = SUITES if suite == "all" else (suite,)
    records, table = [], None
    for s in names:
        recs, tab = SUITE_FUNCS[s](ctx)
        prefix = f"{s}." if suite == "all" else ""
        records += [CheckRecord(prefix + r.name, r.samples, r.max_residual, r.tolerance, r.comparison) for r in recs]
        table = tab if tab is not None else table
    descriptor = {"name": name, "n": form.n, "coefficients": [list(e) for e in form.coeffs]}
    report = VerificationReport(suite, descriptor, seed, samples, c, tol_scale, records, stats_summary(ctx), table)
    report.wall_time = time.perf_counter() - start
    return report


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _record_dict(r: CheckRecord) -> dict:
    return {"name": r.name, "samples": r.samples, "max_residual": _num(r.max_residual),
            "tolerance": _num(r.tolerance), "comparison": r.comparison, "passed": r.passed}


def render_report(report: VerificationReport, fmt: str, timing: bool = False) -> str:
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "suite": report.suite,
            "cubic": report.cubic,
            "seed": report.seed,
            "samples": report.samples,
            "c": report.c,
            "tol_scale": report.tol_scale,
            "passed": report.passed,
            "records": [_record_dict(r) for r in report.records],
            "sampler": report.sampler,
        }
        if report.table is not None:
            doc["table"] = [dict(zip(TABLE_FIELDS, map(_num, row))) for row in report.table]
        if timing:
            doc["wall_time"] = report.wall_time
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if report.table is not None:
            w.writerow(TABLE_FIELDS)
            w.writerows([[repr(float(v)) for v in row] for row in report.table])
        else:
            w.writerow(RECORD_FIELDS)
            for r in report.records:
                d = _record_dict(r)
                w.writerow([d[k] for k in RECORD_FIELDS])
        return buf.getvalue()
    if fmt == "text":
        lines = [f"suite {report.suite}  cubic {report.cubic['name']} (n={report.cubic['n']})  seed {report.seed}"
                 f"  samples {report.samples}  c {report.c:g}"]
        for r in report.records:
            lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<36} n={r.samples:<5} "
                         f"value={r.max_residual:.3e} {r.comparison} {r.tolerance:.1e}")
        for key, st in report.sampler.items():
            if isinstance(st, dict):
                lines.append(f"sampler {key}: accepted {st['accepted']} rejected {st['rejected']}")
            else:
                lines.append(f"sampler {key}: {st}")
        lines.append(f"overall {'PASS' if report.passed else 'FAIL'}")
        if timing:
            lines.append(f"wall time {report.wall_time:.2f} s")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report: VerificationReport, fmt: str, out: str | None = None, timing: bool = False):
    text = render_report(report, fmt, timing)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verify", description="Numerical checks for q-map quaternionic Kähler metrics.")
    ap.add_argument("suite", choices=SUITES + ("all",))
    ap.add_argument("--cubic", default="homog", help="preset name (homog, complete, incomplete, n1, rand3) or JSON file")
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--c", type=float, default=0.0, help="one-loop parameter")
    ap.add_argument("--tol-scale", type=float, default=1.0, help="multiply every upper tolerance by this factor")
    ap.add_argument("--format", choices=("json", "csv", "text"), default="text")
    ap.add_argument("--out", default=None)
    ap.add_argument("--timing", action="store_true", help="include wall time (makes output non-reproducible)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.tol_scale <= 0:
        print("verify: --tol-scale must be positive", file=sys.stderr)
        return 2
    try:
        report = run_suite(args.cubic, args.suite, args.samples, args.seed, args.c, args.tol_scale)
    except (CubicError, DomainError, ValueError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return 2
    try:
        emit_report(report, args.format, args.out, args.timing)
    except OSError as exc:
        print(f"verify: cannot write report: {exc}", file=sys.stderr)
        return 2
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
