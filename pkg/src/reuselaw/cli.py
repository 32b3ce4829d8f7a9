"""Command-line entry point: ``reuselaw scan|simulate|analyze|report``.

Exit codes: 0 success, 1 usage/config error, 2 input parse error,
3 analysis precondition failure.  Every command writes a manifest listing
its outputs; outputs contain no timestamps, so a rerun with the same inputs
and seeds is byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, analysis, ingest
from .compress import component_symbol, incompleteness_curve, run_trials
from .domain import DomainSpec, build_library
from .errors import (AnalysisPreconditionError, ConfigError, InputParseError,
                     ReuselawError, ValidationError)
from .ingest import Corpus, ObjectRecord, build_corpus, load_corpus, save_corpus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_ANALYSIS = 3

_CONFIG_KEYS = {"target_h", "alphabet_size", "zipf_exponent", "body_size_bits",
                "s", "trials", "seed", "prefixes"}
_REQUIRED_CONFIG_KEYS = {"target_h", "alphabet_size", "zipf_exponent", "s",
                         "trials", "seed"}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunManifest:
    """Record of one command invocation; lists every emitted artifact."""

    command: list[str]
    config: Optional[dict]
    seeds: dict
    input_paths: list[str]
    tool_version: str
    output_paths: list[str] = field(default_factory=list)

    def save(self, path: Path) -> None:
        self.output_paths.append(str(path))
        self.output_paths = sorted(set(self.output_paths))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(asdict(self), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _write_json(path: Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def cmd_scan(args) -> int:
    records: list[ObjectRecord] = []
    inputs: list[str] = []
    text_exts = {e if e.startswith(".") else "." + e for e in args.text_ext}
    for root in args.roots:
        root_path = Path(root)
        if not root_path.exists():
            raise InputParseError(f"unreadable root: {root}")
        files = [root_path] if root_path.is_file() else sorted(
            p for p in root_path.rglob("*") if p.is_file())
        for path in files:
            try:
                if ingest.is_elf(path):
                    records.append(ingest.scan_elf(path))
                elif path.suffix in text_exts:
                    records.append(ingest.scan_text(path, strict=args.strict))
                else:
                    continue
                inputs.append(str(path))
            except (InputParseError, ValidationError) as exc:
                if args.strict:
                    raise InputParseError(str(exc))
                print(f"warning: skipping {path}: {exc}", file=sys.stderr)

    if records:
        corpus = build_corpus(records)
    else:
        print("warning: no scannable files found; writing empty corpus", file=sys.stderr)
        corpus = Corpus(objects=(), component_index={})
    out = Path(args.out)
    save_corpus(corpus, out)
    manifest = RunManifest(
        command=["scan"] + list(args.roots),
        config={"strict": args.strict, "text_ext": sorted(text_exts)},
        seeds={},
        input_paths=inputs,
        tool_version=__version__,
        output_paths=[str(out)],
    )
    manifest.save(out.with_name(out.name + ".manifest.json"))
    print(f"scanned {len(records)} objects, "
          f"{len(corpus.component_index)} components -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _load_config(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config must be a flat JSON object")
    for key in doc:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    missing = _REQUIRED_CONFIG_KEYS - doc.keys()
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(sorted(missing))}")
    if not isinstance(doc["trials"], int) or doc["trials"] < 1:
        raise ConfigError(f"trials must be a positive integer, got {doc['trials']!r}")
    if not isinstance(doc["s"], int) or doc["s"] < 1:
        raise ConfigError(f"s must be a positive integer, got {doc['s']!r}")
    return doc


def cmd_simulate(args) -> int:
    cfg = _load_config(Path(args.config))
    body = cfg.get("body_size_bits", 64)
    try:
        spec = DomainSpec(
            target_h=float(cfg["target_h"]),
            alphabet_size=int(cfg["alphabet_size"]),
            zipf_exponent=float(cfg["zipf_exponent"]),
            body_size_bits=tuple(body) if isinstance(body, list) else int(body),
            seed=int(cfg["seed"]),
        )
        lib = build_library(spec)
    except (ValidationError, ConfigError) as exc:
        raise ConfigError(str(exc))

    results = run_trials(spec, lib, int(cfg["s"]), int(cfg["trials"]))
    records = []
    for t, (prog, _report) in enumerate(results):
        refs = {component_symbol(rank, spec.alphabet_size): count
                for rank, count in prog.refs.items()}
        records.append(ObjectRecord(name=f"sim-{t:05d}",
                                    size_bits=prog.compressed_bits, refs=refs))
    corpus = build_corpus(records)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus_path = out_dir / "corpus.jsonl"
    reports_path = out_dir / "reports.json"
    save_corpus(corpus, corpus_path)

    trials_doc = [
        {
            "ratio": rep.ratio,
            "reuse_proportion": rep.reuse_proportion,
            "n_useful": rep.n_useful,
            "uncompressed_bits": prog.uncompressed_bits,
            "compressed_bits": prog.compressed_bits,
            "custom_bits": prog.custom_bits,
        }
        for prog, rep in results
    ]
    reports_doc = {
        "config": cfg,
        "aggregate": {
            "mean_ratio": sum(t["ratio"] for t in trials_doc) / len(trials_doc),
            "mean_reuse_proportion": sum(t["reuse_proportion"] for t in trials_doc)
            / len(trials_doc),
            "max_n_useful": max(t["n_useful"] for t in trials_doc),
        },
        "trials": trials_doc,
    }
    if "prefixes" in cfg:
        curve = incompleteness_curve(spec, [int(m) for m in cfg["prefixes"]],
                                     int(cfg["s"]), int(cfg["trials"]))
        reports_doc["incompleteness"] = [[m, ratio] for m, ratio in curve]
    _write_json(reports_path, reports_doc)

    manifest = RunManifest(
        command=["simulate", str(args.config)],
        config=cfg,
        seeds={"seed": int(cfg["seed"])},
        input_paths=[str(args.config)],
        tool_version=__version__,
        output_paths=[str(corpus_path), str(reports_path)],
    )
    manifest.save(out_dir / "manifest.json")
    print(f"simulated {cfg['trials']} trials, mean ratio "
          f"{reports_doc['aggregate']['mean_ratio']:.4f} -> {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    if not (args.zipf or args.heaps or args.bound or args.erdos_kac):
        raise UsageError("select at least one analysis "
                         "(--zipf, --heaps, --bound, --erdos-kac)")
    corpus = load_corpus(args.corpus)
    report: dict = {
        "corpus": str(args.corpus),
        "n_objects": len(corpus.objects),
        "n_components": len(corpus.component_index),
        "total_bits": corpus.total_bits(),
    }
    failed = False

    if args.zipf or args.bound:
        try:
            table = analysis.rank_frequency(corpus, rank_offset=args.rank_offset)
        except AnalysisPreconditionError as exc:
            table = None
            if args.zipf:
                report["zipf"] = {"error": str(exc)}
            if args.bound:
                report["bound"] = {"error": str(exc)}
            failed = True
        if table is not None:
            if args.zipf:
                try:
                    fit = analysis.fit_zipf(table, min_count=args.min_count)
                    report["zipf"] = {
                        "rank_offset": args.rank_offset,
                        "min_count": args.min_count,
                        "fit": asdict(fit),
                        "table": [[r, c, rate] for r, c, rate in table.entries],
                    }
                except AnalysisPreconditionError as exc:
                    report["zipf"] = {"error": str(exc)}
                    failed = True
            if args.bound:
                bound = analysis.check_rate_bound(table)
                report["bound"] = {
                    "rank_offset": args.rank_offset,
                    "sum": bound.sum,
                    "satisfied": bound.satisfied,
                    "tail_profile": list(bound.tail_profile),
                }

    if args.heaps:
        try:
            fit = analysis.fit_heaps(corpus, seed=args.heaps_seed)
            report["heaps"] = {
                "seed": args.heaps_seed,
                "fit": asdict(fit),
                "curve": [[b, v] for b, v in analysis.heaps_curve(corpus, args.heaps_seed)],
            }
        except AnalysisPreconditionError as exc:
            report["heaps"] = {"error": str(exc)}
            failed = True

    if args.erdos_kac:
        band = tuple(args.band) if args.band else None
        try:
            nr = analysis.erdos_kac_check(corpus, significance=args.significance,
                                          size_band=band)
            report["erdos_kac"] = {
                "significance": nr.significance,
                "statistic": nr.statistic,
                "passed": nr.passed,
                "degenerate": nr.degenerate,
                "c_hat": nr.c_hat,
                "sample_size": nr.sample_size,
                "band": list(band) if band else None,
                "normalized_values": list(nr.normalized_values),
            }
        except AnalysisPreconditionError as exc:
            report["erdos_kac"] = {"error": str(exc)}
            failed = True

    out = Path(args.out)
    _write_json(out, report)
    manifest = RunManifest(
        command=["analyze", str(args.corpus)],
        config={"zipf": args.zipf, "heaps": args.heaps, "bound": args.bound,
                "erdos_kac": args.erdos_kac, "rank_offset": args.rank_offset,
                "min_count": args.min_count, "significance": args.significance},
        seeds={"heaps_seed": args.heaps_seed} if args.heaps else {},
        input_paths=[str(args.corpus)],
        tool_version=__version__,
        output_paths=[str(out)],
    )
    manifest.save(out.with_name(out.name + ".manifest.json"))
    print(f"analysis report -> {out}" + (" (with per-analysis errors)" if failed else ""))
    return EXIT_ANALYSIS if failed else EXIT_OK


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def cmd_report(args) -> int:
    try:
        with open(args.report, "r", encoding="utf-8") as fh:
            report = json.load(fh)
    except FileNotFoundError:
        raise InputParseError(f"report not found: {args.report}")
    except json.JSONDecodeError as exc:
        raise InputParseError(f"report is not valid JSON: {exc}")

    from . import svgplot

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[str] = []

    section = report.get("zipf")
    if section and "error" not in section:
        entries = [(int(r), int(c), float(rate)) for r, c, rate in section["table"]]
        svg = svgplot.render_rank_frequency(entries, fit=section.get("fit"))
        (out_dir / "rank_frequency.svg").write_text(svg, encoding="utf-8")
        _write_csv(out_dir / "rank_frequency.csv", ["rank", "count", "rate"],
                   section["table"])
        outputs += [str(out_dir / "rank_frequency.svg"), str(out_dir / "rank_frequency.csv")]
    else:
        print("notice: no usable zipf section; rank-frequency plot skipped")

    section = report.get("heaps")
    if section and "error" not in section:
        curve = [(int(b), int(v)) for b, v in section["curve"]]
        svg = svgplot.render_heaps(curve, fit=section.get("fit"))
        (out_dir / "heaps.svg").write_text(svg, encoding="utf-8")
        _write_csv(out_dir / "heaps.csv", ["bits_examined", "distinct_components"],
                   section["curve"])
        outputs += [str(out_dir / "heaps.svg"), str(out_dir / "heaps.csv")]
    else:
        print("notice: no usable heaps section; growth plot skipped")

    section = report.get("erdos_kac")
    if section and "error" not in section and not section.get("degenerate"):
        values = [float(v) for v in section["normalized_values"]]
        svg = svgplot.render_histogram(values)
        (out_dir / "normality.svg").write_text(svg, encoding="utf-8")
        _write_csv(out_dir / "normality.csv", ["normalized_value"],
                   [[v] for v in values])
        outputs += [str(out_dir / "normality.svg"), str(out_dir / "normality.csv")]
    else:
        print("notice: no usable erdos-kac section; histogram skipped")

    manifest = RunManifest(
        command=["report", str(args.report)],
        config=None,
        seeds={},
        input_paths=[str(args.report)],
        tool_version=__version__,
        output_paths=outputs,
    )
    manifest.save(out_dir / "report.manifest.json")
    print(f"wrote {len(outputs)} artifact(s) -> {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reuselaw",
                     description="library-reuse simulation and corpus analysis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("scan", help="scan ELF files and text dumps into a corpus")
    p.add_argument("roots", nargs="+", help="files or directories to scan")
    p.add_argument("--out", default="corpus.jsonl", help="corpus output path")
    p.add_argument("--strict", action="store_true",
                   help="abort on the first unparsable input")
    p.add_argument("--text-ext", action="append", default=[".tsv"],
                   help="suffix treated as a text dump (repeatable)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("simulate", help="run a synthetic-domain compression experiment")
    p.add_argument("config", help="JSON config file")
    p.add_argument("--out-dir", default=".", help="directory for corpus and reports")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="run analyses over a corpus file")
    p.add_argument("corpus", help="corpus JSON-lines file")
    p.add_argument("--out", default="report.json", help="report output path")
    p.add_argument("--zipf", action="store_true")
    p.add_argument("--heaps", action="store_true")
    p.add_argument("--bound", action="store_true")
    p.add_argument("--erdos-kac", dest="erdos_kac", action="store_true")
    p.add_argument("--rank-offset", type=int, default=0)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--heaps-seed", type=int, default=0)
    p.add_argument("--significance", type=float, default=0.01)
    p.add_argument("--band", type=int, nargs=2, metavar=("LO", "HI"),
                   help="restrict the normality check to sizes in [LO, HI] bits")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="emit SVG plots and CSV tables from a report")
    p.add_argument("report", help="analysis report JSON")
    p.add_argument("--out-dir", default=".", help="directory for plots and tables")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except AnalysisPreconditionError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
