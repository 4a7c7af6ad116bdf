"""Inverted index construction and the blocked re-bucketing of postings.

The index is CSR over term ids: term t's postings (ascending doc ids) are
docs[offsets[t]:offsets[t+1]]. A Block covers a contiguous term-id range
and holds, per document that uses any term in the range, the ascending
sub-sequence of that document's terms falling inside it ("mini documents").
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from ._io import expect_magic, read_exact, read_struct
from .corpus import Collection
from .errors import FormatError

INDEX_MAGIC = b"COOCIDX1"


class InvertedIndex:
    def __init__(self, offsets: np.ndarray, docs: np.ndarray):
        self.offsets = np.ascontiguousarray(offsets, dtype=np.uint64)
        self.docs = np.ascontiguousarray(docs, dtype=np.uint32)

    @property
    def vocab_size(self) -> int:
        return len(self.offsets) - 1

    @property
    def postings_total(self) -> int:
        return int(self.docs.size)

    @property
    def doc_count(self) -> int:
        return int(self.docs.max()) + 1 if self.docs.size else 0

    def df(self, t: int) -> int:
        return int(self.offsets[t + 1] - self.offsets[t])

    def postings(self, t: int) -> np.ndarray:
        return self.docs[int(self.offsets[t]):int(self.offsets[t + 1])]

    def save(self, path):
        path = Path(path)
        with open(path, "wb") as f:
            f.write(INDEX_MAGIC)
            f.write(struct.pack("<I", self.vocab_size))
            offs = self.offsets.astype(np.int64)
            for t in range(self.vocab_size):
                row = self.docs[offs[t]:offs[t + 1]]
                f.write(struct.pack("<I", row.size))
                f.write(row.astype("<u4", copy=False).tobytes())

    @classmethod
    def load(cls, path) -> "InvertedIndex":
        path = Path(path)
        with open(path, "rb") as f:
            expect_magic(f, INDEX_MAGIC, path)
            (vocab,) = read_struct(f, "<I", path, "vocabulary size")
            offsets = np.zeros(vocab + 1, dtype=np.uint64)
            chunks = []
            total = 0
            for t in range(vocab):
                record_at = f.tell()
                (df,) = read_struct(f, "<I", path, f"term {t} header")
                raw = read_exact(f, 4 * df, path, f"term {t} postings")
                row = np.frombuffer(raw, dtype="<u4").astype(np.uint32, copy=False)
                if df > 1 and not np.all(row[1:] > row[:-1]):
                    raise FormatError(path, record_at, f"term {t} postings not strictly ascending")
                total += df
                offsets[t + 1] = total
                chunks.append(row)
            trailing = f.read(1)
            if trailing:
                raise FormatError(path, f.tell() - 1, "trailing bytes after last postings list")
        docs = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.uint32)
        return cls(offsets, docs)


def build_index(collection: Collection) -> InvertedIndex:
    """Invert the forward collection: term id -> ascending doc ids."""
    vocab = collection.vocab_size
    flat = collection.flat
    df = np.bincount(flat, minlength=vocab).astype(np.uint64) if vocab else np.empty(0, np.uint64)
    offsets = np.zeros(vocab + 1, dtype=np.uint64)
    np.cumsum(df, out=offsets[1:])
    doc_of = np.repeat(
        np.arange(len(collection), dtype=np.uint32),
        collection.lengths(),
    )
    # Stable sort by term keeps doc-major input order, so postings ascend.
    order = np.argsort(flat, kind="stable")
    return InvertedIndex(offsets, doc_of[order])


def intersect(a: np.ndarray, b: np.ndarray) -> int:
    """Number of doc ids common to two ascending postings lists."""
    return kernels.intersect_count(
        np.ascontiguousarray(a, dtype=np.uint32),
        np.ascontiguousarray(b, dtype=np.uint32),
    )


def default_block_width(vocab_size: int) -> int:
    """Round(sqrt(vocab)), half up, floored at 1: makes block count ~ width."""
    if vocab_size < 0:
        raise ValueError("vocab_size must be nonnegative")
    r = math.isqrt(vocab_size)
    return max(1, r + 1 if vocab_size > r * r + r else r)


@dataclass
class Block:
    """Postings of a contiguous term range, re-bucketed document-major."""

    block_index: int
    term_lo: int
    term_hi: int
    doc_ids: np.ndarray  # ascending doc ids with >= 1 term in range
    offsets: np.ndarray  # CSR offsets into flat, len(doc_ids) + 1
    flat: np.ndarray     # mini-document terms, ascending per doc

    def mini_doc(self, i: int) -> np.ndarray:
        return self.flat[int(self.offsets[i]):int(self.offsets[i + 1])]


def build_blocks(index: InvertedIndex, k: int) -> list[Block]:
    """Split the term space into ceil(vocab/k) blocks of up to k lists each."""
    if k < 1:
        raise ValueError("block width k must be >= 1")
    vocab = index.vocab_size
    b = (vocab + k - 1) // k
    offs = index.offsets.astype(np.int64)
    blocks = []
    for i in range(b):
        lo, hi = i * k, min((i + 1) * k, vocab)
        seg_docs = index.docs[offs[lo]:offs[hi]]
        df = (offs[lo + 1:hi + 1] - offs[lo:hi]).astype(np.int64)
        seg_terms = np.repeat(np.arange(lo, hi, dtype=np.uint32), df)
        # Stable sort by doc id; terms were concatenated in ascending term
        # order, so each mini document comes out ascending.
        order = np.argsort(seg_docs, kind="stable")
        d_sorted = seg_docs[order]
        t_sorted = np.ascontiguousarray(seg_terms[order])
        doc_ids, counts = np.unique(d_sorted, return_counts=True)
        block_offsets = np.zeros(len(doc_ids) + 1, dtype=np.uint64)
        np.cumsum(counts.astype(np.uint64), out=block_offsets[1:])
        blocks.append(Block(i, lo, hi, doc_ids.astype(np.uint32), block_offsets, t_sorted))
    return blocks
