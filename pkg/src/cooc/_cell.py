"""Child-process runner for one measured counting cell.

Invoked by the bench sweep (and the backend benchmark) as
`python -m cooc._cell ...`; loads a forward collection file, runs one
method via run_counter, and prints the report as JSON on stdout.
"""

import argparse
import json
import sys

from .corpus import Collection
from .counters import CounterConfig, run_counter


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cooc._cell")
    parser.add_argument("--method", required=True)
    parser.add_argument("--collection-file", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--flush-pairs", type=int, default=100_000_000)
    parser.add_argument("--block-width", default="auto")
    parser.add_argument("--accumulators", type=int, default=100)
    parser.add_argument("--max-doc-terms", type=int, default=None)
    args = parser.parse_args(argv)

    collection = Collection.load(args.collection_file)
    config = CounterConfig(
        method=args.method,
        output_path=args.out,
        flush_threshold_pairs=args.flush_pairs,
        block_width_k=args.block_width if args.block_width == "auto" else int(args.block_width),
        accumulators_a=args.accumulators,
        max_doc_terms=args.max_doc_terms,
    )
    _, report = run_counter(config, collection=collection)
    json.dump({
        "method": report.method,
        "doc_count": report.doc_count,
        "wall_time_seconds": report.wall_time_seconds,
        "peak_memory_bytes": report.peak_memory_bytes,
        "pairs_emitted": report.pairs_emitted,
        "parameters": report.parameters,
        "metrics": report.metrics,
    }, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
