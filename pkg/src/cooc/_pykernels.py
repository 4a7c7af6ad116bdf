"""Pure-Python counting kernels.

Reference implementations of the hot inner loops. `cooc._ckernels` is the
compiled twin with identical signatures and identical observable behaviour;
`cooc.kernels` picks one of the two at import time. Array arguments are
C-contiguous numpy arrays (uint32 data, uint64 offsets).

Accumulator tables are plain dicts. Pair tables map a packed 64-bit key
(primary << 32 | secondary) to a count; per-primary tables map the secondary
id to a count.
"""

from bisect import bisect_left, bisect_right

import numpy as np

BACKEND = "python"


def intersect_count(a, b):
    """Size of the intersection of two strictly ascending uint32 arrays."""
    a = a.tolist()
    b = b.tolist()
    i = j = hits = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            hits += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return hits


def add_doc_pairs(table, terms):
    """Add every i<j pair of `terms` (strictly ascending) to a packed table."""
    terms = terms.tolist()
    n = len(terms)
    for i in range(n):
        hi = terms[i] << 32
        for j in range(i + 1, n):
            key = hi | terms[j]
            table[key] = table.get(key, 0) + 1


def make_block_accumulator(term_lo, term_hi, vocab):
    """Accumulator for one outer block's (primary, secondary) counts.

    The compiled twin backs this with a dense count matrix when the block
    is small enough; here it is simply a packed-key dict.
    """
    del term_lo, term_hi, vocab
    return {}


def block_self_pairs(table, offsets, flat):
    """Per mini-document i<j pairs, summed into a block accumulator."""
    offsets = offsets.tolist()
    flat = flat.tolist()
    for d in range(len(offsets) - 1):
        row = flat[offsets[d]:offsets[d + 1]]
        n = len(row)
        for i in range(n):
            hi = row[i] << 32
            for j in range(i + 1, n):
                key = hi | row[j]
                table[key] = table.get(key, 0) + 1


def block_cross_pairs(table, docs_a, offs_a, flat_a, docs_b, offs_b, flat_b):
    """Cross pairs between two blocks' mini-documents with matching doc ids.

    Every term of block a is smaller than every term of block b, so packed
    keys are (term_a << 32 | term_b).
    """
    docs_a = docs_a.tolist()
    docs_b = docs_b.tolist()
    offs_a = offs_a.tolist()
    offs_b = offs_b.tolist()
    flat_a = flat_a.tolist()
    flat_b = flat_b.tolist()
    i = j = 0
    na, nb = len(docs_a), len(docs_b)
    while i < na and j < nb:
        da, db = docs_a[i], docs_b[j]
        if da == db:
            row_b = flat_b[offs_b[j]:offs_b[j + 1]]
            for p in flat_a[offs_a[i]:offs_a[i + 1]]:
                hi = p << 32
                for s in row_b:
                    key = hi | s
                    table[key] = table.get(key, 0) + 1
            i += 1
            j += 1
        elif da < db:
            i += 1
        else:
            j += 1


def block_drain(table):
    """Empty a block accumulator into (sorted packed keys, counts) arrays."""
    n = len(table)
    keys = np.fromiter(table.keys(), dtype=np.uint64, count=n)
    counts = np.fromiter(table.values(), dtype=np.uint64, count=n)
    table.clear()
    order = np.argsort(keys)
    return keys[order], counts[order].astype(np.uint32)


def row_intersect_nonzero(offsets, docs, t1, out_sec, out_cnt):
    """Intersect term t1's postings with every later term's postings.

    Fills out_sec/out_cnt with the nonzero intersections in ascending t2
    order and returns how many there are.
    """
    offsets = offsets.tolist()
    docs = docs.tolist()
    vocab = len(offsets) - 1
    a = docs[offsets[t1]:offsets[t1 + 1]]
    n_out = 0
    for t2 in range(t1 + 1, vocab):
        b = docs[offsets[t2]:offsets[t2 + 1]]
        i = j = hits = 0
        na, nb = len(a), len(b)
        while i < na and j < nb:
            x, y = a[i], b[j]
            if x == y:
                hits += 1
                i += 1
                j += 1
            elif x < y:
                i += 1
            else:
                j += 1
        if hits:
            out_sec[n_out] = t2
            out_cnt[n_out] = hits
            n_out += 1
    return n_out


def tail_count_sorted(flat, doc_offsets, postings, t, scratch, out_sec, out_cnt):
    """Count, over all docs in `postings`, each term greater than t.

    This is one primary-key step of the forward-scanning counter: the
    accumulator lives in `table` form here (the compiled twin uses the
    `scratch` dense array instead). Results land in out_sec/out_cnt sorted
    ascending by secondary; returns the number of distinct secondaries.
    """
    del scratch  # dense scratch only used by the compiled twin
    flat = flat.tolist()
    doc_offsets = doc_offsets.tolist()
    table = {}
    for d in postings.tolist():
        start, end = doc_offsets[d], doc_offsets[d + 1]
        row = flat[start:end]
        for u in row[bisect_right(row, t):]:
            table[u] = table.get(u, 0) + 1
    secs = sorted(table)
    for i, s in enumerate(secs):
        out_sec[i] = s
        out_cnt[i] = table[s]
    return len(secs)


def multi_scan_pass(flat, doc_offsets, lo, hi, tables):
    """One pass of the multi-accumulator scan for primaries in [lo, hi).

    tables[p - lo] collects secondary counts for primary p. Documents whose
    largest term id is below lo carry no work and are skipped. Returns the
    number of documents actually inspected.
    """
    flat = flat.tolist()
    doc_offsets = doc_offsets.tolist()
    inspected = 0
    for d in range(len(doc_offsets) - 1):
        start, end = doc_offsets[d], doc_offsets[d + 1]
        if start == end or flat[end - 1] < lo:
            continue
        inspected += 1
        row = flat[start:end]
        for i in range(bisect_left(row, lo), len(row)):
            p = row[i]
            if p >= hi:
                break
            table = tables[p - lo]
            for u in row[i + 1:]:
                table[u] = table.get(u, 0) + 1
    return inspected
