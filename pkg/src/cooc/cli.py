"""Command-line entry point.

Pipeline stages communicate only through files: ingest a corpus, build an
index, count with any method, then merge, verify, inspect, or benchmark.
Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 runtime
error. Diagnostics go to stderr; data goes to files, or stdout when asked.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bench import (DEFAULT_WORK_LIMIT, SyntheticCorpusSpec, bench_sweep,
                    generate_corpus)
from .corpus import (TermDictionary, collection_paths, ingest,
                     load_collection, load_dictionary, read_raw_documents,
                     save_collection)
from .counters import CounterConfig, run_counter
from .errors import ConfigError, CoocError, GuardExceeded
from .index import InvertedIndex, build_index
from .oracle import brute_force_count, compare
from .pairstore import export_text, merge_runs, top_pairs
from .stats import compute_stats, render_panel, stats_sweep, write_stats_csv

FORMAT_VERSIONS = "COOCFWD1 COOCDICT COOCIDX1 COOCRUN1 COOCOFF1"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cooc",
        description="Exact term-pair co-occurrence counting toolkit.")
    parser.add_argument("--version", action="version",
                        version=f"cooc {__version__} (formats: {FORMAT_VERSIONS})")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress diagnostics on stderr")
    parser.add_argument("--temp-dir", default=None,
                        help="directory for spill and scratch files")
    parser.add_argument("--work-limit", type=int, default=DEFAULT_WORK_LIMIT,
                        help="candidate-pair guard for quadratic methods")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="tokenize raw documents into a collection")
    p.add_argument("--input", required=True,
                   help="directory of document files, or a one-doc-per-line text file")
    p.add_argument("--out", required=True, help="collection prefix (writes .fwd and .dict)")
    p.add_argument("--limit", type=int, default=None, help="ingest at most N documents")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("index", help="build the inverted index for a collection")
    p.add_argument("--collection", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("count", help="run one counting method")
    p.add_argument("--method", required=True,
                   choices=["naive", "list-pairs", "list-blocks", "list-scan", "multi-scan"])
    p.add_argument("--collection", required=True)
    p.add_argument("--index", default=None, help="prebuilt index file (else built in-process)")
    p.add_argument("--flush-pairs", type=int, default=100_000_000)
    p.add_argument("--block-width", default="auto")
    p.add_argument("--accumulators", type=int, default=100)
    p.add_argument("--max-doc-terms", type=int, default=None)
    p.add_argument("--allow-quadratic", action="store_true",
                   help="run list-pairs even past the work limit")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("merge", help="k-way merge sorted run files")
    p.add_argument("runs", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("verify", help="check a run against the brute-force oracle")
    p.add_argument("--collection", required=True)
    p.add_argument("--run", required=True)
    p.add_argument("--limit", type=int, default=None,
                   help="verify only the first N documents' collection")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("stats", help="collection statistics panel")
    p.add_argument("--collection", required=True)
    p.add_argument("--run", default=None, help="count run for pair totals")
    p.add_argument("--sizes", default=None, help="comma-separated prefix sizes")
    p.add_argument("--csv", default=None, help="also write the panel as CSV")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("bench", help="scaling sweep over methods and prefix sizes")
    p.add_argument("--methods", required=True, help="comma-separated method names")
    p.add_argument("--sizes", required=True, help="comma-separated prefix sizes")
    p.add_argument("--corpus", required=True,
                   help="collection prefix, or synthetic:<spec.json>")
    p.add_argument("--flush-pairs", type=int, default=100_000_000)
    p.add_argument("--block-width", default="auto")
    p.add_argument("--accumulators", type=int, default=100)
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("gen", help="generate a synthetic collection")
    p.add_argument("--spec", required=True, help="JSON corpus spec file")
    p.add_argument("--seed", type=int, default=None, help="override the spec's seed")
    p.add_argument("--out", required=True, help="collection prefix")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("export", help="render a run as term<TAB>term<TAB>count text")
    p.add_argument("--run", required=True)
    p.add_argument("--collection", required=True, help="collection prefix (for the dictionary)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--top", type=int, default=None,
                   help="print only the N highest-count pairs")
    p.set_defaults(func=_cmd_export)

    return parser


def _log(args, message):
    if not args.quiet:
        print(message, file=sys.stderr)


def _cmd_ingest(args) -> int:
    dictionary = TermDictionary()
    collection = ingest(read_raw_documents(args.input, limit=args.limit), dictionary)
    save_collection(args.out, collection, dictionary)
    _log(args, f"ingested {len(collection)} documents, vocabulary {len(dictionary)}, "
               f"postings {collection.postings_total}")
    return 0


def _cmd_index(args) -> int:
    collection = load_collection(args.collection)
    idx = build_index(collection)
    idx.save(args.out)
    _log(args, f"indexed {idx.vocab_size} terms, {idx.postings_total} postings")
    return 0


def _cmd_count(args) -> int:
    collection = load_collection(args.collection)
    index = InvertedIndex.load(args.index) if args.index else None
    if args.method == "list-pairs" and not args.allow_quadratic:
        vocab = index.vocab_size if index is not None else collection.vocab_size
        if vocab * vocab > args.work_limit:
            raise GuardExceeded(
                f"list-pairs would consider ~{vocab * vocab} candidate pairs "
                f"(work limit {args.work_limit}); pass --allow-quadratic to force")
    config = CounterConfig(
        method=args.method,
        output_path=Path(args.out),
        flush_threshold_pairs=args.flush_pairs,
        block_width_k=_parse_block_width(args.block_width),
        accumulators_a=args.accumulators,
        max_doc_terms=args.max_doc_terms,
        temp_dir=args.temp_dir,
    )
    run, report = run_counter(config, collection=collection, index=index)
    peak = "n/a" if report.peak_memory_bytes is None else f"{report.peak_memory_bytes}"
    _log(args, f"{args.method}: {run.tuple_count} pairs in {run.group_count} groups, "
               f"{report.wall_time_seconds:.3f}s, peak rss {peak} bytes")
    return 0


def _cmd_merge(args) -> int:
    result = merge_runs(args.runs, args.out)
    _log(args, f"merged {len(args.runs)} runs: {result.tuple_count} pairs "
               f"in {result.group_count} groups")
    return 0


def _cmd_verify(args) -> int:
    collection = load_collection(args.collection)
    if args.limit is not None:
        collection = collection.take_prefix(args.limit)
    verdict = compare(args.run, brute_force_count(collection))
    print(verdict.summary())
    return 0 if verdict.passed else 1


def _parse_sizes(text) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s != ""]
    except ValueError as exc:
        raise ConfigError(f"bad size list {text!r}") from exc


def _parse_block_width(text):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"bad block width {text!r}, expected an integer or 'auto'") from exc


def _cmd_stats(args) -> int:
    collection = load_collection(args.collection)
    if args.sizes is not None:
        if args.run is not None:
            raise ConfigError("--run describes the whole collection; "
                              "it cannot be combined with --sizes")
        rows = stats_sweep(collection, _parse_sizes(args.sizes))
    else:
        rows = [compute_stats(collection, run_path=args.run)]
    render_panel(rows, sys.stdout)
    if args.csv:
        write_stats_csv(rows, args.csv)
    return 0


def _cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    sizes = _parse_sizes(args.sizes)
    if args.corpus.startswith("synthetic:"):
        spec = SyntheticCorpusSpec.from_json(args.corpus[len("synthetic:"):])
        _log(args, f"generating synthetic corpus: {spec.doc_count} documents, seed {spec.seed}")
        collection, _ = generate_corpus(spec)
    else:
        collection = load_collection(args.corpus)
    bench_sweep(
        methods, sizes, collection, args.out,
        work_limit=args.work_limit,
        flush_threshold_pairs=args.flush_pairs,
        block_width_k=_parse_block_width(args.block_width),
        accumulators_a=args.accumulators,
        temp_dir=args.temp_dir,
        log=None if args.quiet else (lambda m: print(m, file=sys.stderr)),
    )
    _log(args, f"wrote {args.out}")
    return 0


def _cmd_gen(args) -> int:
    spec = SyntheticCorpusSpec.from_json(args.spec)
    if args.seed is not None:
        spec.seed = args.seed
    collection, dictionary = generate_corpus(spec)
    save_collection(args.out, collection, dictionary)
    fwd, dic = collection_paths(args.out)
    _log(args, f"generated {len(collection)} documents, vocabulary {len(dictionary)} "
               f"-> {fwd}, {dic}")
    return 0


def _cmd_export(args) -> int:
    dictionary = load_dictionary(args.collection)
    if args.top is not None:
        vocab = len(dictionary)
        for primary, secondary, count in top_pairs(args.run, args.top):
            if primary >= vocab or secondary >= vocab:
                raise ConfigError(f"term id {max(primary, secondary)} missing from dictionary")
            print(f"{dictionary.term(primary)}\t{dictionary.term(secondary)}\t{count}")
        return 0
    if args.out is None:
        export_text(args.run, dictionary, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8") as f:
            export_text(args.run, dictionary, f)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except (ConfigError, GuardExceeded) as exc:
        print(f"cooc: {exc}", file=sys.stderr)
        return 2
    except (CoocError, OSError) as exc:
        print(f"cooc: {exc}", file=sys.stderr)
        return 3


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
