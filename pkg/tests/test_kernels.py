"""Backend equivalence: the compiled kernels and the pure-Python kernels
must be observationally identical."""

import random

import numpy as np
import pytest

from cooc import _pykernels
from cooc import kernels

try:
    from cooc import _ckernels
except ImportError:
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels else [])


def _rand_sorted(rng, vocab, max_len):
    return np.array(sorted(rng.sample(range(vocab), rng.randint(0, max_len))),
                    dtype=np.uint32)


def _csr(rows):
    offsets = np.zeros(len(rows) + 1, dtype=np.uint64)
    offsets[1:] = np.cumsum([len(r) for r in rows], dtype=np.uint64)
    flat = np.concatenate([np.asarray(r, np.uint32) for r in rows]) \
        if rows else np.empty(0, np.uint32)
    return offsets, np.ascontiguousarray(flat, dtype=np.uint32)


def test_selected_backend_exposed():
    assert kernels.BACKEND in ("compiled", "python")


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_compiled_backend_is_default():
    import os
    if os.environ.get("COOC_PURE_PYTHON"):
        pytest.skip("pure-Python backend forced via COOC_PURE_PYTHON")
    assert kernels.BACKEND == "compiled"


@pytest.mark.parametrize("impl", BACKENDS)
def test_intersect_count_reference(impl):
    rng = random.Random(3)
    for _ in range(100):
        a = _rand_sorted(rng, 60, 25)
        b = _rand_sorted(rng, 60, 25)
        assert impl.intersect_count(a, b) == len(set(a.tolist()) & set(b.tolist()))


@pytest.mark.parametrize("impl", BACKENDS)
def test_add_doc_pairs_reference(impl):
    rng = random.Random(4)
    for _ in range(30):
        terms = _rand_sorted(rng, 40, 15)
        table = {}
        impl.add_doc_pairs(table, terms)
        lst = terms.tolist()
        expected = {(a << 32) | b: 1 for i, a in enumerate(lst) for b in lst[i + 1:]}
        assert table == expected


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_backends_agree_on_block_kernels():
    rng = random.Random(5)
    for trial in range(20):
        vocab = rng.randint(2, 50)
        lo = rng.randint(0, vocab - 1)
        mid = rng.randint(lo + 1, vocab)
        rows_a, rows_b, docs_a, docs_b = [], [], [], []
        for d in range(rng.randint(0, 20)):
            in_a = [t for t in range(lo, mid) if rng.random() < 0.3]
            in_b = [t for t in range(mid, vocab) if rng.random() < 0.3]
            if in_a:
                docs_a.append(d)
                rows_a.append(in_a)
            if in_b:
                docs_b.append(d)
                rows_b.append(in_b)
        offs_a, flat_a = _csr(rows_a)
        offs_b, flat_b = _csr(rows_b)
        docs_a = np.asarray(docs_a, np.uint32)
        docs_b = np.asarray(docs_b, np.uint32)

        results = []
        for impl in BACKENDS:
            acc = impl.make_block_accumulator(lo, mid, vocab)
            impl.block_self_pairs(acc, offs_a, flat_a)
            impl.block_cross_pairs(acc, docs_a, offs_a, flat_a,
                                   docs_b, offs_b, flat_b)
            keys, counts = impl.block_drain(acc)
            results.append((keys.tolist(), counts.tolist()))
        assert results[0] == results[1], f"trial {trial}"


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_backends_agree_on_scan_kernels():
    rng = random.Random(6)
    for trial in range(20):
        vocab = rng.randint(1, 40)
        rows = [sorted(rng.sample(range(vocab), rng.randint(0, vocab)))
                for _ in range(rng.randint(0, 15))]
        doc_offsets, flat = _csr(rows)
        postings = {t: [d for d, r in enumerate(rows) if t in r] for t in range(vocab)}

        for t in range(vocab):
            plist = np.asarray(postings[t], np.uint32)
            outs = []
            for impl in BACKENDS:
                scratch = np.zeros(vocab, np.uint32)
                out_sec = np.empty(vocab, np.uint32)
                out_cnt = np.empty(vocab, np.uint32)
                n = impl.tail_count_sorted(flat, doc_offsets, plist, t,
                                           scratch, out_sec, out_cnt)
                outs.append((out_sec[:n].tolist(), out_cnt[:n].tolist()))
                assert np.all(scratch == 0)  # dense scratch must be reset
            assert outs[0] == outs[1], f"trial {trial} t {t}"


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_backends_agree_on_multi_scan_and_row_intersect():
    rng = random.Random(7)
    for trial in range(20):
        vocab = rng.randint(1, 40)
        rows = [sorted(rng.sample(range(vocab), rng.randint(0, vocab)))
                for _ in range(rng.randint(0, 15))]
        doc_offsets, flat = _csr(rows)

        a = rng.randint(1, vocab + 2)
        for lo in range(0, vocab, a):
            hi = min(lo + a, vocab)
            per_impl = []
            for impl in BACKENDS:
                tables = [dict() for _ in range(hi - lo)]
                inspected = impl.multi_scan_pass(flat, doc_offsets, lo, hi, tables)
                per_impl.append((inspected, [sorted(t.items()) for t in tables]))
            assert per_impl[0] == per_impl[1], f"trial {trial} window {lo}"

        # Row intersections over the inverted form of the same rows.
        inv_rows = [[d for d, r in enumerate(rows) if t in r] for t in range(vocab)]
        inv_offsets, inv_flat = _csr(inv_rows)
        for t1 in range(vocab):
            outs = []
            for impl in BACKENDS:
                out_sec = np.empty(vocab + 1, np.uint32)
                out_cnt = np.empty(vocab + 1, np.uint32)
                n = impl.row_intersect_nonzero(inv_offsets, inv_flat, t1, out_sec, out_cnt)
                outs.append((out_sec[:n].tolist(), out_cnt[:n].tolist()))
            assert outs[0] == outs[1]


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_dense_and_dict_block_accumulators_agree():
    # Force the dict fallback by exceeding the dense cell limit via a fake
    # huge vocab; semantics must not change.
    rng = random.Random(8)
    rows = [sorted(rng.sample(range(30), rng.randint(1, 10))) for _ in range(10)]
    offs, flat = _csr(rows)
    dense_acc = _ckernels.make_block_accumulator(0, 30, 30)
    big_vocab = 1 << 40
    dict_acc = _ckernels.make_block_accumulator(0, 30, big_vocab)
    for acc in (dense_acc, dict_acc):
        _ckernels.block_self_pairs(acc, offs, flat)
    dk, dc = _ckernels.block_drain(dense_acc)
    sk, sc = _ckernels.block_drain(dict_acc)
    assert dk.tolist() == sk.tolist()
    assert dc.tolist() == sc.tolist()
