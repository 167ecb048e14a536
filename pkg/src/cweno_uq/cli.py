"""Command-line front end: ``cweno-uq run --example N ...``.

Every flag may also be given in a JSON file passed with ``--config``;
keys are the long flag names with dashes replaced by underscores, and
flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from cweno_uq.cweno import CwenoParameters
from cweno_uq.experiments import ExperimentReport, RunOptions, run_example, validate_request
from cweno_uq.swe import SweConfig

__all__ = ["RunConfig", "parse_args", "emit_report", "main"]

log = logging.getLogger("cweno_uq")


@dataclass(frozen=True)
class RunConfig:
    example: int
    variants: tuple[str | None, ...]
    method: str
    Ls: tuple[int, ...] | None
    Ms: tuple[int, ...] | None
    out: Path
    options: RunOptions = field(default_factory=RunOptions)
    record_timings: bool = False


def _int_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [s.strip() for s in str(text).split(",")]
    try:
        values = tuple(int(s) for s in items)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"malformed integer list: {text!r}") from None
    if not values or any(isinstance(s, float) and not s.is_integer() for s in items):
        raise argparse.ArgumentTypeError(f"malformed integer list: {text!r}")
    return values


def _pair(text) -> tuple[int, int]:
    values = _int_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated counts, got {text!r}")
    return values


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cweno-uq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one numbered experiment and write its tables")
    run.add_argument("--config", type=Path, help="JSON file with default values for these flags")
    run.add_argument("--example", type=int, help="experiment number, 1-7")
    run.add_argument("--variant", choices=("test1", "test2"), help="example 1 only; both if omitted")
    run.add_argument("--method", choices=("cweno7", "gpc", "both"))
    run.add_argument("--L", type=_int_list, help="comma-separated collocation counts")
    run.add_argument("--M", type=_int_list, help="second-variable counts, paired with --L")
    run.add_argument("--out", type=Path, help="output directory (default: results)")
    run.add_argument("--J", type=int, help="Gauss points per CWENO7 cell for moments")
    run.add_argument("--samples", type=int, help="PDF sample count, one random variable")
    run.add_argument("--samples-2d", type=_pair, help="PDF sample counts NX,NY, two random variables")
    run.add_argument("--p", type=float, help="CWENO7 weight power")
    run.add_argument("--q", type=float, help="CWENO7 epsilon exponent, eps = dxi**q")
    run.add_argument("--cells", type=int, help="shallow-water finite-volume cells")
    run.add_argument("--cfl", type=float, help="shallow-water CFL number")
    run.add_argument("--theta", type=float, help="generalized minmod parameter")
    run.add_argument("--final-time", type=float, help="shallow-water final time")
    run.add_argument("--record-timings", action="store_true", default=None,
                     help="include wall-clock timings in report.json")
    return parser


_CONVERTERS = {
    "example": int, "variant": str, "method": str, "L": _int_list, "M": _int_list, "out": Path,
    "J": int, "samples": int, "samples_2d": _pair, "p": float, "q": float, "cells": int,
    "cfl": float, "theta": float, "final_time": float, "record_timings": bool,
}


def _load_config(parser, path: Path) -> dict:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {path}: {exc}")
    if not isinstance(doc, dict):
        parser.error("config file must hold a JSON object")
    unknown = sorted(set(doc) - set(_CONVERTERS))
    if unknown:
        parser.error(f"unknown config keys: {', '.join(unknown)}")
    out = {}
    for k, v in doc.items():
        try:
            out[k] = None if v is None else _CONVERTERS[k](v)
        except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
            parser.error(f"bad value for {k!r} in config: {exc}")
    return out


def parse_args(argv=None) -> RunConfig:
    """Parse and validate a command line; usage errors exit with status 2."""
    parser = _parser()
    ns = parser.parse_args(argv)
    values = _load_config(parser, ns.config) if ns.config else {}
    values.update({k: v for k, v in vars(ns).items() if k in _CONVERTERS and v is not None})

    example = values.get("example")
    if example is None:
        parser.error("--example is required")
    variant = values.get("variant")
    method = values.get("method", "both")
    try:
        if example == 1 and variant is None:
            variants = ("test1", "test2")
        else:
            variants = (variant,)
        Ls, Ms = values.get("L"), values.get("M")
        for v in variants:
            validate_request(example, v, method, Ls, Ms)
        swe = SweConfig()
        swe_over = {k: values[k] for k in ("cells", "cfl", "theta", "final_time") if k in values}
        if swe_over:
            swe = replace(swe, **swe_over)
        cweno = CwenoParameters()
        cweno_over = {k: values[k] for k in ("p", "q") if k in values}
        if cweno_over:
            cweno = replace(cweno, **cweno_over)
        options = RunOptions(
            J=values.get("J", 4),
            params=cweno,
            samples_1d=values.get("samples", RunOptions.samples_1d),
            samples_2d=values.get("samples_2d", RunOptions.samples_2d),
            swe=swe,
        )
        if min(options.samples_1d, options.samples_2d[0] * options.samples_2d[1]) < 1000:
            raise ValueError("PDF estimation needs at least 10^3 samples")
    except ValueError as exc:
        parser.error(str(exc))

    return RunConfig(
        example=example,
        variants=variants,
        method=method,
        Ls=Ls,
        Ms=Ms,
        out=values.get("out", Path("results")),
        options=options,
        record_timings=bool(values.get("record_timings", False)),
    )


# {{{ report files


def _num(v) -> str:
    return "" if v is None else repr(float(v))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(header)
    out.writerows(rows)
    return buf.getvalue()


def _errors_csv(report: ExperimentReport) -> str:
    two_d = any("M" in r for r in report.rows) or report.settings.get("M") is not None
    header = ["L"] + (["M"] if two_d else []) + ["method", "l1_U", "err_mu", "err_sigma", "l1_pdf"]
    rows = []
    for r in report.rows:
        head = [r["L"]] + ([r["M"]] if two_d else []) + [r["method"]]
        rows.append(head + [_num(r.get(k)) for k in ("l1_U", "err_mu", "err_sigma", "l1_pdf")])
    return _csv_text(header, rows)


def _split_label(label: str) -> dict[str, str]:
    return dict(part.split("=") for part in label.split(","))


def _pdf_files(report: ExperimentReport) -> dict[str, str]:
    grouped: dict[str, list] = {}
    for label, group in report.pdfs.items():
        parts = _split_label(label)
        name = "pdf_" + "_".join(parts[k] for k in ("L", "M") if k in parts) + ".csv"
        for method, pdf in group.items():
            e, d = pdf.bin_edges, pdf.densities
            for lo, hi, rho in zip(e[:-1], e[1:], d):
                row = [method, _num(lo), _num(hi), _num(rho)]
                grouped.setdefault(name, []).append(([parts["x"]] if "x" in parts else []) + row)
    files = {}
    for name, rows in grouped.items():
        header = (["x"] if report.is_swe else []) + ["method", "bin_lo", "bin_hi", "density"]
        files[name] = _csv_text(header, rows)
    return files


def _field_stats_csv(report: ExperimentReport) -> str:
    tags = list(report.fields)
    header = ["x"]
    cols = []
    for tag in tags:
        name = tag.replace("/", "_").replace("=", "").replace(",", "_")
        f = report.fields[tag]
        header += [f"{name}_mean", f"{name}_lower", f"{name}_upper"]
        cols += [f["mean"], f["mean"] - f["std"], f["mean"] + f["std"]]
    rows = [[_num(x)] + [_num(c[i]) for c in cols] for i, x in enumerate(report.x)]
    return _csv_text(header, rows)


def _slices_csv(report: ExperimentReport) -> str:
    rows = []
    for label, group in report.slices.items():
        xj = _split_label(label)["x"]
        xi = group["xi"]
        for tag, values in group.items():
            if tag == "xi":
                continue
            method, size = tag.split("/")
            for a, v in zip(xi, values):
                rows.append([xj, method, size.split("=")[1], _num(a), _num(v)])
    return _csv_text(["x", "method", "L", "xi", "value"], rows)


def _render(report: ExperimentReport, include_timings: bool) -> dict[str, str]:
    files = {
        "report.json": json.dumps(report.to_dict(include_timings), indent=2) + "\n",
        "errors.csv": _errors_csv(report),
    }
    files.update(_pdf_files(report))
    if report.is_swe:
        files["field_stats.csv"] = _field_stats_csv(report)
        if report.slices:
            files["slices.csv"] = _slices_csv(report)
    return files


def emit_report(report: ExperimentReport, out_dir, include_timings: bool = False) -> list[Path]:
    """Write the report tables into ``out_dir``; on failure nothing is left behind."""
    out_dir = Path(out_dir)
    files = _render(report, include_timings)
    written: list[Path] = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            path = out_dir / name
            written.append(path)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise
    return written


# }}}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    config = parse_args(argv)
    for variant in config.variants:
        out = config.out / variant if len(config.variants) > 1 else config.out
        try:
            report = run_example(
                config.example, variant, config.Ls, config.method, config.Ms, config.options
            )
        except (ValueError, RuntimeError) as exc:
            print(f"cweno-uq: experiment failed: {exc}", file=sys.stderr)
            return 1
        try:
            emit_report(report, out, config.record_timings)
        except OSError as exc:
            print(f"cweno-uq: cannot write results to {out}: {exc}", file=sys.stderr)
            return 1
        log.info("example %s: %.1f s, results in %s", report.experiment, report.timings["total"], out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
