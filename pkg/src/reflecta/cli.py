"""Command-line entry points: verify, irrep, tables.

Exit codes: 0 pass, 1 verification mismatch, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import weyl
from .closure import ClosureTimeout
from .irreps import APPROX, EXACT, build_rep_b, build_rep_d, rep_to_dict
from .lie_structure import TheoremReport, family_name, verify_main_theorem
from .predicted import predicted_structure, summand_for_label
from .tableaux import (
    Bipartition,
    DLabel,
    bipartitions,
    classify_bipartition,
    classify_unordered,
    dim_formula,
    parse_label,
)

EXIT_PASS, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None
    family: str
    labels: list[str] = field(default_factory=list)
    mode: str = "exact"
    output_format: str = "text"
    output_path: str | None = None
    thread_count: int = 1
    max_group_order: int = weyl.DEFAULT_GROUP_BUDGET
    max_seconds: float | None = None
    scope: str = "regular"

    def __post_init__(self) -> None:
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be positive")
        if self.max_group_order <= 0 or (self.max_seconds is not None and self.max_seconds <= 0):
            raise UsageError("budgets must be positive")
        if self.thread_count <= 0:
            raise UsageError("--threads must be positive")

    def deadline(self) -> float | None:
        return None if self.max_seconds is None else time.monotonic() + self.max_seconds


def default_threads() -> int:
    env = os.environ.get("REFLECTA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError("REFLECTA_THREADS must be an integer") from None
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reflecta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, fmt_default: str) -> None:
        p.add_argument("--family", choices=("B", "D"), required=True)
        p.add_argument("--n", type=int)
        p.add_argument("--label", action="append", default=[], help="repeatable; e.g. '([2,1],[1])'")
        p.add_argument("--mode", choices=("exact", "approx"), default="exact")
        p.add_argument("--format", choices=("json", "csv", "text"), default=fmt_default)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--threads", type=int, help="worker threads (default: REFLECTA_THREADS or CPU count)")
        p.add_argument("--max-seconds", type=float)
        p.add_argument("--max-group-order", type=int, default=weyl.DEFAULT_GROUP_BUDGET)

    verify = sub.add_parser("verify", help="check the predicted structure against computed closures")
    common(verify, "text")
    verify.add_argument("--scope", choices=("regular", "blocks"), default="regular")
    common(sub.add_parser("irrep", help="export the matrices of a simple module"), "json")
    common(sub.add_parser("tables", help="tabulate labels, dimensions and predicted types"), "csv")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    threads = args.threads if args.threads is not None else default_threads()
    return RunConfig(command=args.command, n=args.n, family=args.family, labels=list(args.label), mode=args.mode,
                     output_format=args.format, output_path=args.out, thread_count=threads,
                     max_group_order=args.max_group_order, max_seconds=args.max_seconds,
                     scope=getattr(args, "scope", "regular"))


# --- output helpers ----------------------------------------------------------------------------


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in columns})
    return buf.getvalue()


def _text_table(rows: list[dict], columns: list[str]) -> str:
    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c) for c in columns}
    lines = ["  ".join(c.ljust(widths[c]) for c in columns)]
    for r in rows:
        lines.append("  ".join(str(r.get(c, "")).ljust(widths[c]) for c in columns))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _parse_labels(cfg: RunConfig) -> list:
    out = []
    for text in cfg.labels:
        try:
            lab = parse_label(text)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if cfg.family == "B" and not isinstance(lab, Bipartition):
            raise UsageError(f"type B labels are ordered pairs: {text!r}")
        if cfg.family == "D" and isinstance(lab, Bipartition):
            lab = DLabel.pair(lab.first, lab.second)
        if cfg.n is not None and lab.n != cfg.n:
            raise UsageError(f"label {text!r} has size {lab.n}, not {cfg.n}")
        out.append(lab)
    return out


# --- commands ---------------------------------------------------------------------------------


REPORT_COLUMNS = ["label", "predicted_type", "predicted_dim", "computed_type", "computed_dim", "verdict"]


def render_report(report: TheoremReport, fmt: str) -> str:
    if fmt == "json":
        return _json(report.to_dict())
    if fmt == "csv":
        return _csv(report.rows(), REPORT_COLUMNS)
    head = [f"family {report.to_dict()['family']}  n = {report.n}  scope {report.scope}"]
    for k, v in report.totals.items():
        head.append(f"{k}: {v}")
    body = _text_table(report.rows(), REPORT_COLUMNS)
    tail = [f"note: {x}" for x in report.notes]
    verdict = "PARTIAL" if report.partial else ("PASS" if report.overall else "FAIL")
    return "\n".join(head) + "\n" + body + "".join(x + "\n" for x in tail) + f"overall: {verdict}\n"


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise UsageError("verify needs --n")
    if cfg.n < 2:
        raise UsageError("verify needs n >= 2")
    labels = _parse_labels(cfg)
    if labels and cfg.scope != "blocks":
        raise UsageError("--label requires --scope blocks")
    family = family_name(cfg.family)
    try:
        report = verify_main_theorem(cfg.n, family, cfg.scope, labels or None, deadline=cfg.deadline(),
                                     max_group_order=cfg.max_group_order, threads=cfg.thread_count)
    except (weyl.BudgetExceeded, ClosureTimeout) as exc:
        report = TheoremReport(cfg.n, family, cfg.scope, {}, {}, {}, notes=[f"budget exceeded: {exc}"], partial=True)
        _emit(cfg, render_report(report, cfg.output_format))
        return EXIT_BUDGET
    _emit(cfg, render_report(report, cfg.output_format))
    if report.partial:
        return EXIT_BUDGET
    return EXIT_PASS if report.overall else EXIT_MISMATCH


def cmd_irrep(cfg: RunConfig) -> int:
    labels = _parse_labels(cfg)
    if len(labels) != 1:
        raise UsageError("irrep needs exactly one --label")
    lab = labels[0]
    mode = EXACT if cfg.mode == "exact" else APPROX
    if dim_formula(lab) ** 2 > cfg.max_group_order:
        print(f"module too large for the budget: dim {dim_formula(lab)}", file=sys.stderr)
        return EXIT_BUDGET
    rep = build_rep_b(lab, mode) if cfg.family == "B" else build_rep_d(lab, mode)
    doc = rep_to_dict(rep)
    if cfg.output_format == "json":
        _emit(cfg, _json(doc))
    elif cfg.output_format == "text":
        lines = [f"{doc['label']}  family {cfg.family}  dim {doc['dim']}  mode {doc['mode']}"]
        for name, rows in doc["generators"].items():
            lines.append(f"{name}:")
            lines.extend("  " + " ".join(rows_i) for rows_i in rows)
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        rows = [{"generator": name, "row": i, "col": j, "value": x}
                for name, m in doc["generators"].items() for i, r in enumerate(m) for j, x in enumerate(r) if x != "0"]
        _emit(cfg, _csv(rows, ["generator", "row", "col", "value"]))
    return EXIT_PASS


TABLE_COLUMNS = ["label", "set", "dim", "summand", "predicted_type", "module_dim", "algebra_dim"]


def table_rows(n: int, family: str) -> list[dict]:
    fam = family_name(family)
    if fam == "type_d" and n < 3:
        raise UsageError("type D tables need n >= 3")
    flavor = "ordered" if fam == "type_b" else "unordered"
    rows = []
    for lab in bipartitions(n, flavor):
        cls = classify_bipartition(lab) if fam == "type_b" else classify_unordered(lab)
        summand = summand_for_label(n, fam, lab)
        rows.append({
            "label": lab.label(),
            "set": {"arm_and_leg": "A&L"}.get(cls.kind, cls.kind),
            "dim": dim_formula(lab),
            "summand": summand.key if summand else "",
            "predicted_type": summand.kind if summand else "zero",
            "module_dim": summand.module_dim if summand else 1,
            "algebra_dim": summand.algebra_dim if summand else 0,
        })
    return rows


def cmd_tables(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise UsageError("tables needs --n")
    rows = table_rows(cfg.n, cfg.family)
    if cfg.output_format == "csv":
        _emit(cfg, _csv(rows, TABLE_COLUMNS))
    elif cfg.output_format == "json":
        fam = family_name(cfg.family)
        summands = [{"key": s.key, "type": s.kind, "module_dim": s.module_dim, "algebra_dim": s.algebra_dim,
                     "labels": list(s.labels)} for s in predicted_structure(cfg.n, fam).values()]
        _emit(cfg, _json({"schema_version": 1, "family": cfg.family, "n": cfg.n, "rows": rows,
                          "summands": summands,
                          "sum_of_squares": sum(r["dim"] ** 2 for r in rows)}))
    else:
        _emit(cfg, _text_table(rows, TABLE_COLUMNS))
    return EXIT_PASS


COMMANDS = {"verify": cmd_verify, "irrep": cmd_irrep, "tables": cmd_tables}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"reflecta: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
