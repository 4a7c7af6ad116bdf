"""The five co-occurrence counting methods.

All of them produce the same logical result on the same collection: every
unordered pair of distinct terms that shares at least one document, keyed
(primary, secondary) with primary < secondary in term-id order, with the
number of sharing documents. They differ wildly in how they get there and
in what they hold in memory:

  naive        per-document pair generation into one big accumulator,
               spilled to sorted temp runs and k-way merged
  list-pairs   postings-list intersection of every candidate term pair
  list-blocks  blocked postings re-bucketed document-major, compared
               pairwise outer/inner
  list-scan    one postings list at a time against the forward documents
  multi-scan   repeated forward scans with a fixed number of accumulator
               tables per pass

Each method streams its output through pairstore.RunWriter, so equal
logical results are byte-identical run files.
"""

from __future__ import annotations

import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .bench import BenchReport, PeakMemorySampler, peak_memory_probe
from .corpus import Collection
from .errors import ConfigError
from .index import InvertedIndex, build_blocks, build_index, default_block_width
from .pairstore import PairCountRun, RunWriter, merge_runs

METHODS = ("naive", "list-pairs", "list-blocks", "list-scan", "multi-scan")

DEFAULT_FLUSH_THRESHOLD = 100_000_000
DEFAULT_ACCUMULATORS = 100


@dataclass
class CounterConfig:
    method: str
    output_path: Path
    flush_threshold_pairs: int = DEFAULT_FLUSH_THRESHOLD
    block_width_k: int | str = "auto"
    accumulators_a: int = DEFAULT_ACCUMULATORS
    max_doc_terms: int | None = None
    temp_dir: Path | None = None

    def validate(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.flush_threshold_pairs < 1:
            raise ConfigError("flush_threshold_pairs must be >= 1")
        if self.accumulators_a < 1:
            raise ConfigError("accumulators_a must be >= 1")
        if self.block_width_k != "auto" and int(self.block_width_k) < 1:
            raise ConfigError("block_width_k must be >= 1 or 'auto'")


def _resolve_block_width(config: CounterConfig, vocab: int) -> int:
    if config.block_width_k == "auto":
        return default_block_width(vocab)
    return int(config.block_width_k)


def _emit_sorted_packed(writer: RunWriter, keys: np.ndarray, counts: np.ndarray):
    """Write packed (primary<<32|secondary) keys, already sorted, as groups."""
    n = keys.size
    if n == 0:
        return
    primaries = (keys >> np.uint64(32)).astype(np.uint32)
    secondaries = keys.astype(np.uint32)  # low 32 bits
    starts = np.flatnonzero(np.r_[True, primaries[1:] != primaries[:-1]])
    bounds = np.append(starts, n)
    for s, e in zip(starts.tolist(), bounds[1:].tolist()):
        writer.add_group(int(primaries[s]), secondaries[s:e], counts[s:e])


def _emit_packed_table(writer: RunWriter, table: dict):
    """Sort a packed (primary<<32|secondary)->count table and write groups."""
    n = len(table)
    if n == 0:
        return
    keys = np.fromiter(table.keys(), dtype=np.uint64, count=n)
    counts = np.fromiter(table.values(), dtype=np.uint64, count=n)
    order = np.argsort(keys)
    _emit_sorted_packed(writer, keys[order], counts[order])


def _emit_secondary_table(writer: RunWriter, primary: int, table: dict):
    """Write one primary's secondary->count table as a sorted group."""
    n = len(table)
    if n == 0:
        return
    sec = np.fromiter(table.keys(), dtype=np.uint32, count=n)
    cnt = np.fromiter(table.values(), dtype=np.uint64, count=n)
    order = np.argsort(sec)
    writer.add_group(primary, sec[order], cnt[order])


def count_naive(collection: Collection, config: CounterConfig,
                metrics: dict | None = None) -> PairCountRun:
    """Generate all pairs document by document into one accumulator,
    spilling sorted runs whenever the distinct-pair threshold is hit."""
    config.validate()
    threshold = config.flush_threshold_pairs
    table: dict = {}
    run_paths = []
    with tempfile.TemporaryDirectory(dir=config.temp_dir, prefix="cooc-naive-") as tmp:
        tmp = Path(tmp)

        def spill():
            path = tmp / f"run-{len(run_paths):05d}.run"
            with RunWriter(path) as w:
                _emit_packed_table(w, table)
                w.close()
            run_paths.append(path)
            table.clear()

        for terms in collection.iter_docs():
            kernels.add_doc_pairs(table, terms)
            if len(table) >= threshold:
                spill()
        flushes = len(run_paths)
        if run_paths:
            if table:
                spill()
            result = merge_runs(run_paths, config.output_path)
        else:
            with RunWriter(config.output_path) as w:
                _emit_packed_table(w, table)
                result = w.close()
    if metrics is not None:
        metrics["flushes"] = flushes
        metrics["runs_merged"] = len(run_paths)
    return result


def count_list_pairs(index: InvertedIndex, config: CounterConfig,
                     metrics: dict | None = None) -> PairCountRun:
    """Intersect the postings of every ordered term pair; memory beyond the
    index is a pair of vocabulary-sized output buffers."""
    config.validate()
    vocab = index.vocab_size
    out_sec = np.empty(max(vocab, 1), dtype=np.uint32)
    out_cnt = np.empty(max(vocab, 1), dtype=np.uint32)
    with RunWriter(config.output_path) as w:
        for t1 in range(vocab):
            n = kernels.row_intersect_nonzero(index.offsets, index.docs, t1, out_sec, out_cnt)
            if n:
                w.add_group(t1, out_sec[:n].copy(), out_cnt[:n].copy())
        result = w.close()
    if metrics is not None:
        metrics["candidate_pairs"] = vocab * (vocab - 1) // 2
    return result


def count_list_blocks(blocks, config: CounterConfig,
                      metrics: dict | None = None) -> PairCountRun:
    """Compare blocks pairwise: the outer block's terms are the primaries,
    matched documents in inner blocks supply the secondaries. Each outer
    block's accumulators are written out and dropped before the next."""
    config.validate()
    b = len(blocks)
    vocab = blocks[-1].term_hi if blocks else 0
    pairings = 0
    with RunWriter(config.output_path) as w:
        for o in range(b):
            outer = blocks[o]
            acc = kernels.make_block_accumulator(outer.term_lo, outer.term_hi, vocab)
            # Self join: all in-document pairs whose primary lives here.
            kernels.block_self_pairs(acc, outer.offsets, outer.flat)
            pairings += 1
            for i in range(o + 1, b):
                inner = blocks[i]
                kernels.block_cross_pairs(
                    acc,
                    outer.doc_ids, outer.offsets, outer.flat,
                    inner.doc_ids, inner.offsets, inner.flat,
                )
                pairings += 1
            keys, counts = kernels.block_drain(acc)
            _emit_sorted_packed(w, keys, counts)
        result = w.close()
    if metrics is not None:
        metrics["blocks"] = b
        metrics["block_pairings"] = pairings
    return result


def count_list_scan(index: InvertedIndex, collection: Collection,
                    config: CounterConfig, metrics: dict | None = None) -> PairCountRun:
    """Scan each term's postings, loading the referenced forward documents
    and counting every higher term; one accumulator table lives at a time."""
    config.validate()
    vocab = collection.vocab_size
    scratch = np.zeros(max(vocab, 1), dtype=np.uint32)
    out_sec = np.empty(max(vocab, 1), dtype=np.uint32)
    out_cnt = np.empty(max(vocab, 1), dtype=np.uint32)
    with RunWriter(config.output_path) as w:
        for t in range(vocab):
            n = kernels.tail_count_sorted(
                collection.flat, collection.offsets, index.postings(t),
                t, scratch, out_sec, out_cnt,
            )
            if n:
                w.add_group(t, out_sec[:n].copy(), out_cnt[:n].copy())
        result = w.close()
    if metrics is not None:
        metrics["primaries_scanned"] = vocab
    return result


def count_multi_scan(collection: Collection, config: CounterConfig,
                     metrics: dict | None = None) -> PairCountRun:
    """Repeatedly scan the forward documents with `a` accumulator tables,
    giving each term a turn as primary; documents wholly below the current
    primary window are skipped."""
    config.validate()
    a = config.accumulators_a
    vocab = collection.vocab_size
    passes = (vocab + a - 1) // a
    inspected = 0
    with RunWriter(config.output_path) as w:
        for p in range(passes):
            lo, hi = p * a, min((p + 1) * a, vocab)
            tables = [dict() for _ in range(hi - lo)]
            inspected += kernels.multi_scan_pass(
                collection.flat, collection.offsets, lo, hi, tables)
            for j, table in enumerate(tables):
                _emit_secondary_table(w, lo + j, table)
        result = w.close()
    if metrics is not None:
        metrics["passes"] = passes
        metrics["docs_inspected"] = inspected
    return result


def run_counter(config: CounterConfig, collection: Collection | None = None,
                index: InvertedIndex | None = None) -> tuple[PairCountRun, BenchReport]:
    """Dispatch to a counting method with timing and peak-memory capture.

    Methods that need an inverted index build it from the collection when
    none is supplied; that construction is part of the measured run.
    """
    config.validate()
    method = config.method
    needs_collection = method in ("naive", "list-scan", "multi-scan")
    needs_index = method in ("list-pairs", "list-blocks", "list-scan")
    if needs_collection and collection is None:
        raise ConfigError(f"method {method} requires the forward collection")
    if needs_index and index is None and collection is None:
        raise ConfigError(f"method {method} requires an inverted index or a collection")
    if config.max_doc_terms is not None:
        if index is not None:
            raise ConfigError("max_doc_terms cannot be combined with a prebuilt index")
        if collection is None:
            raise ConfigError("max_doc_terms requires the forward collection")

    metrics: dict = {}
    parameters = {
        "flush_threshold_pairs": config.flush_threshold_pairs,
        "block_width_k": config.block_width_k,
        "accumulators_a": config.accumulators_a,
        "max_doc_terms": config.max_doc_terms,
        "backend": kernels.BACKEND,
    }

    start = time.perf_counter()
    with PeakMemorySampler():
        if config.max_doc_terms is not None:
            collection = collection.cap_doc_terms(config.max_doc_terms)
        if needs_index and index is None:
            index = build_index(collection)

        if method == "naive":
            run = count_naive(collection, config, metrics)
        elif method == "list-pairs":
            run = count_list_pairs(index, config, metrics)
        elif method == "list-blocks":
            vocab = index.vocab_size
            k = _resolve_block_width(config, vocab)
            parameters["block_width_k"] = k
            blocks = build_blocks(index, k)
            run = count_list_blocks(blocks, config, metrics)
        elif method == "list-scan":
            run = count_list_scan(index, collection, config, metrics)
        else:
            run = count_multi_scan(collection, config, metrics)
    elapsed = time.perf_counter() - start

    doc_count = collection.doc_count if collection is not None else index.doc_count
    report = BenchReport(
        method=method,
        doc_count=doc_count,
        wall_time_seconds=elapsed,
        peak_memory_bytes=peak_memory_probe(),
        pairs_emitted=run.tuple_count,
        parameters=parameters,
        metrics=metrics,
    )
    return run, report
