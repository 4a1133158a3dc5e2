"""Command line: ``minprod gallery list|run``, ``minprod run --config``, ``minprod report merge``.

Exit codes: 0 every expected verdict matched, 1 some mismatch, 2 config or runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .catalog import GALLERY
from .config import ConfigError, load_config
from .runner import get_experiment, list_gallery, merge_reports, run_experiment


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minprod", description="Reproducible minimality experiments.")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gallery", help="built-in experiments")
    gsub = g.add_subparsers(dest="gcmd", required=True)
    gsub.add_parser("list", help="list the catalog")
    r = gsub.add_parser("run", help="run one experiment, or 'all'")
    r.add_argument("name")
    r.add_argument("--out", help="write the JSON report here instead of stdout")
    r.add_argument("--seed", type=int, default=None)

    c = sub.add_parser("run", help="run experiments from a JSON config")
    c.add_argument("--config", required=True)
    c.add_argument("--out")
    c.add_argument("--seed", type=int, default=None)

    m = sub.add_parser("report", help="report utilities")
    msub = m.add_subparsers(dest="rcmd", required=True)
    mm = msub.add_parser("merge", help="merge report files")
    mm.add_argument("files", nargs="+")
    mm.add_argument("--out")
    return p


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _run_many(exps, seed, out) -> int:
    reports = [run_experiment(e, seed) for e in exps]
    for r in reports:
        print(f"{r.status:4s}  {r.experiment}  ({r.wall_clock:.1f}s)", file=sys.stderr)
    doc = reports[0].to_json() if len(reports) == 1 else merge_reports([r.to_json() for r in reports])
    _emit(doc, out)
    return 0 if all(r.status == "pass" for r in reports) else 1


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.cmd == "gallery" and args.gcmd == "list":
            for row in list_gallery():
                print(f"{row['name']:30s} {row['claim']}")
            return 0
        if args.cmd == "gallery":
            exps = list(GALLERY) if args.name == "all" else [get_experiment(args.name)]
            return _run_many(exps, args.seed, args.out)
        if args.cmd == "run":
            with open(args.config) as fh:
                exps = load_config(json.load(fh))
            return _run_many(exps, args.seed, args.out)
        docs = []
        for path in args.files:
            with open(path) as fh:
                docs.append(json.load(fh))
        merged = merge_reports(docs)
        _emit(merged, args.out)
        return 0 if merged["status"] == "pass" else 1
    except (ConfigError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # runtime failure outside an analysis
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
