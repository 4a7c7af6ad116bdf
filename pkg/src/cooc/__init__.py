"""Exact term-pair co-occurrence counting toolkit.

Counts, for every unordered pair of distinct terms in a document
collection, the number of documents containing both, using five
interchangeable methods with very different time/memory profiles, plus
verification, statistics, and benchmarking machinery.
"""

__version__ = "1.0.0"

from .corpus import (Collection, RawDocument, TermDictionary, ingest,
                     load_collection, load_dictionary, save_collection,
                     tokenize)
from .counters import (CounterConfig, count_list_blocks, count_list_pairs,
                       count_list_scan, count_multi_scan, count_naive,
                       run_counter)
from .index import (Block, InvertedIndex, build_blocks, build_index,
                    default_block_width, intersect)
from .oracle import brute_force_count, compare
from .pairstore import (PairCountRun, RunWriter, export_text, lookup_group,
                        merge_runs, read_groups, read_run, top_pairs,
                        write_run)
from .stats import CollectionStats, compute_stats, stats_sweep
from .bench import (BenchReport, SyntheticCorpusSpec, bench_sweep,
                    generate_corpus, peak_memory_probe)

__all__ = [
    "__version__",
    "Collection", "RawDocument", "TermDictionary", "ingest", "tokenize",
    "load_collection", "load_dictionary", "save_collection",
    "InvertedIndex", "Block", "build_index", "build_blocks",
    "default_block_width", "intersect",
    "CounterConfig", "count_naive", "count_list_pairs", "count_list_blocks",
    "count_list_scan", "count_multi_scan", "run_counter",
    "PairCountRun", "RunWriter", "write_run", "read_run", "read_groups",
    "merge_runs", "lookup_group", "export_text", "top_pairs",
    "brute_force_count", "compare",
    "CollectionStats", "compute_stats", "stats_sweep",
    "BenchReport", "SyntheticCorpusSpec", "generate_corpus", "bench_sweep",
    "peak_memory_probe",
]
