# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels. Signature-compatible with cooc._pykernels."""

from libc.stdint cimport uint32_t, uint64_t
from libcpp.algorithm cimport sort as cpp_sort
from libcpp.vector cimport vector

import numpy as np

BACKEND = "compiled"

# Above this many cells a block accumulator stays a dict instead of a
# dense count matrix (cells are 4 bytes each).
cdef Py_ssize_t DENSE_CELL_LIMIT = 67_108_864


def intersect_count(const uint32_t[::1] a, const uint32_t[::1] b):
    cdef Py_ssize_t i = 0, j = 0, hits = 0
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    while i < na and j < nb:
        if a[i] == b[j]:
            hits += 1
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return hits


cdef inline void _bump(dict table, object key):
    val = table.get(key)
    if val is None:
        table[key] = 1
    else:
        table[key] = val + 1


cdef inline void _doc_pairs(dict table, const uint32_t[::1] flat,
                            Py_ssize_t start, Py_ssize_t end):
    cdef Py_ssize_t i, j
    cdef uint64_t hi
    for i in range(start, end):
        hi = (<uint64_t> flat[i]) << 32
        for j in range(i + 1, end):
            _bump(table, hi | flat[j])


def add_doc_pairs(dict table, const uint32_t[::1] terms):
    _doc_pairs(table, terms, 0, terms.shape[0])


cdef class BlockAccumulator:
    """Counts for one outer block: dense (width x vocab) matrix plus a
    touched-key list when that fits, packed-key dict otherwise."""

    cdef uint64_t lo
    cdef Py_ssize_t stride
    cdef bint dense
    cdef uint32_t[::1] matrix
    cdef vector[uint64_t] touched
    cdef dict table

    def __cinit__(self, term_lo, term_hi, vocab):
        cdef Py_ssize_t cells = (term_hi - term_lo) * vocab
        self.lo = term_lo
        self.stride = vocab
        self.dense = 0 < cells <= DENSE_CELL_LIMIT
        if self.dense:
            self.matrix = np.zeros(cells, dtype=np.uint32)
        self.table = {}

    cdef inline void inc(self, uint64_t p, uint64_t s):
        cdef Py_ssize_t idx
        if self.dense:
            idx = (<Py_ssize_t> (p - self.lo)) * self.stride + <Py_ssize_t> s
            if self.matrix[idx] == 0:
                self.touched.push_back((p << 32) | s)
            self.matrix[idx] += 1
        else:
            _bump(self.table, (p << 32) | s)

    def drain(self):
        cdef Py_ssize_t n, i, idx
        cdef uint64_t key
        cdef uint64_t[::1] keys_view
        cdef uint32_t[::1] counts_view
        if not self.dense:
            n = len(self.table)
            keys = np.fromiter(self.table.keys(), dtype=np.uint64, count=n)
            counts = np.fromiter(self.table.values(), dtype=np.uint64, count=n)
            self.table.clear()
            order = np.argsort(keys)
            return keys[order], counts[order].astype(np.uint32)
        n = <Py_ssize_t> self.touched.size()
        if n > 1:
            cpp_sort(self.touched.begin(), self.touched.end())
        keys = np.empty(n, dtype=np.uint64)
        counts = np.empty(n, dtype=np.uint32)
        keys_view = keys
        counts_view = counts
        for i in range(n):
            key = self.touched[i]
            keys_view[i] = key
            idx = (<Py_ssize_t> ((key >> 32) - self.lo)) * self.stride \
                + <Py_ssize_t> (key & 0xFFFFFFFF)
            counts_view[i] = self.matrix[idx]
            self.matrix[idx] = 0
        self.touched.clear()
        return keys, counts


def make_block_accumulator(term_lo, term_hi, vocab):
    return BlockAccumulator(term_lo, term_hi, vocab)


def block_drain(acc):
    return (<BlockAccumulator> acc).drain()


def block_self_pairs(BlockAccumulator acc, const uint64_t[::1] offsets,
                     const uint32_t[::1] flat):
    cdef Py_ssize_t d, i, j, start, end
    for d in range(offsets.shape[0] - 1):
        start = <Py_ssize_t> offsets[d]
        end = <Py_ssize_t> offsets[d + 1]
        for i in range(start, end):
            for j in range(i + 1, end):
                acc.inc(flat[i], flat[j])


def block_cross_pairs(BlockAccumulator acc,
                      const uint32_t[::1] docs_a, const uint64_t[::1] offs_a,
                      const uint32_t[::1] flat_a,
                      const uint32_t[::1] docs_b, const uint64_t[::1] offs_b,
                      const uint32_t[::1] flat_b):
    cdef Py_ssize_t i = 0, j = 0, p, s
    cdef Py_ssize_t na = docs_a.shape[0], nb = docs_b.shape[0]
    while i < na and j < nb:
        if docs_a[i] == docs_b[j]:
            for p in range(<Py_ssize_t> offs_a[i], <Py_ssize_t> offs_a[i + 1]):
                for s in range(<Py_ssize_t> offs_b[j], <Py_ssize_t> offs_b[j + 1]):
                    acc.inc(flat_a[p], flat_b[s])
            i += 1
            j += 1
        elif docs_a[i] < docs_b[j]:
            i += 1
        else:
            j += 1


def row_intersect_nonzero(const uint64_t[::1] offsets, const uint32_t[::1] docs,
                          Py_ssize_t t1, uint32_t[::1] out_sec, uint32_t[::1] out_cnt):
    cdef Py_ssize_t vocab = offsets.shape[0] - 1
    cdef Py_ssize_t a0 = <Py_ssize_t> offsets[t1], a1 = <Py_ssize_t> offsets[t1 + 1]
    cdef Py_ssize_t t2, i, j, b1, hits, n_out = 0
    for t2 in range(t1 + 1, vocab):
        i = a0
        j = <Py_ssize_t> offsets[t2]
        b1 = <Py_ssize_t> offsets[t2 + 1]
        hits = 0
        while i < a1 and j < b1:
            if docs[i] == docs[j]:
                hits += 1
                i += 1
                j += 1
            elif docs[i] < docs[j]:
                i += 1
            else:
                j += 1
        if hits:
            out_sec[n_out] = <uint32_t> t2
            out_cnt[n_out] = <uint32_t> hits
            n_out += 1
    return n_out


cdef inline Py_ssize_t _upper_bound(const uint32_t[::1] a, Py_ssize_t lo,
                                    Py_ssize_t hi, uint32_t x):
    # First index in [lo, hi) whose value exceeds x.
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) // 2
        if a[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def tail_count_sorted(const uint32_t[::1] flat, const uint64_t[::1] doc_offsets,
                      const uint32_t[::1] postings, uint32_t t,
                      uint32_t[::1] scratch, uint32_t[::1] out_sec, uint32_t[::1] out_cnt):
    cdef Py_ssize_t k, i, start, end, d, n_out = 0
    cdef uint32_t u
    for k in range(postings.shape[0]):
        d = <Py_ssize_t> postings[k]
        start = <Py_ssize_t> doc_offsets[d]
        end = <Py_ssize_t> doc_offsets[d + 1]
        for i in range(_upper_bound(flat, start, end, t), end):
            u = flat[i]
            if scratch[u] == 0:
                out_sec[n_out] = u
                n_out += 1
            scratch[u] += 1
    if n_out > 1:
        cpp_sort(&out_sec[0], &out_sec[0] + n_out)
    for i in range(n_out):
        u = out_sec[i]
        out_cnt[i] = scratch[u]
        scratch[u] = 0
    return n_out


def multi_scan_pass(const uint32_t[::1] flat, const uint64_t[::1] doc_offsets,
                    uint32_t lo, uint32_t hi, list tables):
    cdef Py_ssize_t d, i, j, start, end, inspected = 0
    cdef uint32_t p
    cdef dict table
    for d in range(doc_offsets.shape[0] - 1):
        start = <Py_ssize_t> doc_offsets[d]
        end = <Py_ssize_t> doc_offsets[d + 1]
        if start == end or flat[end - 1] < lo:
            continue
        inspected += 1
        i = _upper_bound(flat, start, end, lo - 1) if lo > 0 else start
        while i < end:
            p = flat[i]
            if p >= hi:
                break
            table = <dict> tables[p - lo]
            for j in range(i + 1, end):
                _bump(table, <object> flat[j])
            i += 1
    return inspected
