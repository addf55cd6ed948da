"""Command line entry point: ``wikithes --out DIR [--stages ...]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .pipeline import DATA_ENV, STAGES, PipelineConfig, PipelineError, run


def _stages(value: str) -> list[str]:
    stages = [s.strip() for s in value.split(",") if s.strip()]
    bad = [s for s in stages if s not in STAGES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown stage(s) {', '.join(bad)}; choose from {', '.join(STAGES)}")
    return stages


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wikithes",
        description="Build an English-Spanish-Japanese thesaurus from Wikipedia dumps and WordNet.",
        epilog=f"Inputs not given explicitly are looked up in --data-dir, then ${DATA_ENV}, "
               "then the bundled demo fixture.",
    )
    parser.add_argument("--data-dir", type=Path, help="directory holding default inputs")
    parser.add_argument("--en-dump", type=Path)
    parser.add_argument("--es-dump", type=Path)
    parser.add_argument("--ja-dump", type=Path)
    parser.add_argument("--wordnet-index", type=Path, help="WordNet index.noun")
    parser.add_argument("--wordnet-data", type=Path, help="WordNet data.noun")
    parser.add_argument("--stoplist", type=Path, help="one stopword per line (default: bundled English list)")
    parser.add_argument("--vsm-mode", choices=("whole", "first_section"), default="whole")
    parser.add_argument("--weighting", choices=("raw", "tfidf"), default="raw")
    parser.add_argument("--mcat-depth", type=int, default=3)
    parser.add_argument("--no-gloss-examples", action="store_true",
                        help="drop quoted example sentences from glosses")
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--format", dest="fmt", choices=("tsv", "jsonl"), default="tsv")
    parser.add_argument("--stages", type=_stages, default=list(STAGES),
                        help=f"comma-separated subset of {','.join(STAGES)} (default: all)")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    config = PipelineConfig.from_data_dir(
        args.data_dir, args.out,
        en_dump=args.en_dump, es_dump=args.es_dump, ja_dump=args.ja_dump,
        wordnet_index=args.wordnet_index, wordnet_data=args.wordnet_data, stoplist=args.stoplist,
        vsm_mode=args.vsm_mode, weighting=args.weighting, mcat_depth=args.mcat_depth,
        gloss_examples=not args.no_gloss_examples, fmt=args.fmt, jobs=args.jobs,
    )
    try:
        status, reports = run(config, args.stages)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for report in reports:
        print(report.line(), file=sys.stderr if report.status == "error" else sys.stdout)
    return status


if __name__ == "__main__":
    sys.exit(main())
