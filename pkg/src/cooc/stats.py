"""Collection statistics panel: the per-prefix summary numbers.

Length statistics are over distinct terms per document (that is what the
preprocessed collection stores). The pair total and output size come from
a count run over the same collection, when one is supplied.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Collection
from .errors import ConsistencyError
from .pairstore import read_groups

CSV_COLUMNS = [
    "doc_count", "avg_len", "min_len", "max_len", "stddev_len",
    "postings", "vocab", "distinct_pairs", "output_bytes",
]


@dataclass
class CollectionStats:
    doc_count: int
    avg_len: float
    min_len: int
    max_len: int
    stddev_len: float
    postings: int
    vocab: int
    distinct_pairs: int | None = None
    output_bytes: int | None = None
    empty: bool = False  # no documents: length stats reported as zero


def compute_stats(collection: Collection, run_path=None) -> CollectionStats:
    lengths = collection.lengths()
    if len(collection) == 0:
        stats = CollectionStats(0, 0.0, 0, 0, 0.0, 0, 0, empty=True)
    else:
        stats = CollectionStats(
            doc_count=len(collection),
            avg_len=float(lengths.mean()),
            min_len=int(lengths.min()),
            max_len=int(lengths.max()),
            # Population standard deviation: a one-document collection has 0.
            stddev_len=float(lengths.std()),
            postings=collection.postings_total,
            vocab=int(np.unique(collection.flat).size),
        )
    if run_path is not None:
        run_path = Path(run_path)
        tuples = 0
        max_key = -1
        for primary, sec, _cnt in read_groups(run_path):
            tuples += sec.size
            if sec.size:
                max_key = max(max_key, primary, int(sec[-1]))
        if max_key >= collection.vocab_size:
            raise ConsistencyError(
                f"run {run_path} references term id {max_key} but the collection "
                f"has only {collection.vocab_size} term ids; run/collection mismatch")
        stats.distinct_pairs = tuples
        stats.output_bytes = run_path.stat().st_size
    return stats


def stats_sweep(collection: Collection, sizes) -> list[CollectionStats]:
    """Statistics panel for a nondecreasing list of prefix sizes."""
    prev = None
    for s in sizes:
        if not 0 <= s <= len(collection):
            raise ValueError(f"prefix size {s} out of range [0, {len(collection)}]")
        if prev is not None and s < prev:
            raise ValueError("prefix sizes must be nondecreasing")
        prev = s
    return [compute_stats(collection.take_prefix(s)) for s in sizes]


def format_magnitude(value) -> str:
    """Table-style 3-significant-digit rendering: 16471 -> '16.5K'."""
    value = float(value)
    if value < 1000:
        return str(int(value)) if value == int(value) else f"{value:.1f}"
    for suffix, div in (("K", 1e3), ("M", 1e6), ("B", 1e9), ("T", 1e12)):
        scaled = value / div
        if scaled < 1000 or suffix == "T":
            if scaled < 10:
                return f"{scaled:.2f}{suffix}"
            if scaled < 100:
                return f"{scaled:.1f}{suffix}"
            return f"{scaled:.0f}{suffix}"
    raise AssertionError("unreachable")


def render_panel(rows: list[CollectionStats], out) -> None:
    """Print a transposed statistics table, one column per prefix size."""
    labels = [
        ("Documents", lambda s: format_magnitude(s.doc_count)),
        ("Average document length", lambda s: f"{s.avg_len:.1f}"),
        ("Minimum document length", lambda s: format_magnitude(s.min_len)),
        ("Maximum document length", lambda s: format_magnitude(s.max_len)),
        ("Document length standard deviation", lambda s: f"{s.stddev_len:.1f}"),
        ("Number of postings", lambda s: format_magnitude(s.postings)),
        ("Vocabulary size", lambda s: format_magnitude(s.vocab)),
        ("Number of distinct co-oc pairs",
         lambda s: "-" if s.distinct_pairs is None else format_magnitude(s.distinct_pairs)),
        ("Output size on disk",
         lambda s: "-" if s.output_bytes is None else format_magnitude(s.output_bytes)),
    ]
    name_width = max(len(name) for name, _ in labels)
    cells = [[fmt(s) for s in rows] for _, fmt in labels]
    col_widths = [max(len(cells[r][c]) for r in range(len(labels)))
                  for c in range(len(rows))]
    for (name, _), row_cells in zip(labels, cells):
        padded = "  ".join(cell.rjust(w) for cell, w in zip(row_cells, col_widths))
        out.write(f"{name.ljust(name_width)}  {padded}\n")


def write_stats_csv(rows: list[CollectionStats], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for s in rows:
            writer.writerow({
                "doc_count": s.doc_count,
                "avg_len": f"{s.avg_len:.6f}",
                "min_len": s.min_len,
                "max_len": s.max_len,
                "stddev_len": f"{s.stddev_len:.6f}",
                "postings": s.postings,
                "vocab": s.vocab,
                "distinct_pairs": "" if s.distinct_pairs is None else s.distinct_pairs,
                "output_bytes": "" if s.output_bytes is None else s.output_bytes,
            })
