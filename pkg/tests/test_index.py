import random

import numpy as np
import pytest

from cooc import (Collection, build_blocks, build_index, default_block_width,
                  intersect)
from cooc.errors import FormatError
from cooc.index import InvertedIndex

from conftest import make_toy, random_collection


def test_build_index_toy():
    collection, dictionary = make_toy()
    idx = build_index(collection)
    assert idx.vocab_size == 7
    assert idx.postings_total == 12
    assert idx.postings(dictionary.id_of("cat")).tolist() == [0, 1, 2]
    assert idx.postings(dictionary.id_of("dog")).tolist() == [1]


def test_build_index_empty():
    idx = build_index(Collection.from_term_lists([]))
    assert idx.vocab_size == 0
    assert idx.postings_total == 0
    assert idx.doc_count == 0


def test_index_collection_duality():
    rng = random.Random(11)
    collection = random_collection(rng)
    idx = build_index(collection)
    assert idx.postings_total == collection.postings_total
    # Transpose the index back into forward documents.
    rebuilt = [[] for _ in range(len(collection))]
    for t in range(idx.vocab_size):
        for d in idx.postings(t).tolist():
            rebuilt[d].append(t)
    for d in range(len(collection)):
        assert rebuilt[d] == collection.doc_terms(d).tolist()


def test_postings_ascending_df_positive():
    rng = random.Random(13)
    collection = random_collection(rng)
    idx = build_index(collection)
    present = set(collection.flat.tolist())
    for t in range(idx.vocab_size):
        row = idx.postings(t)
        assert np.all(row[1:] > row[:-1])
        if t in present:
            assert idx.df(t) >= 1
        else:
            assert idx.df(t) == 0


def test_index_roundtrip(tmp_path):
    collection, _ = make_toy()
    idx = build_index(collection)
    path = tmp_path / "toy.idx"
    idx.save(path)
    loaded = InvertedIndex.load(path)
    assert np.array_equal(loaded.offsets, idx.offsets)
    assert np.array_equal(loaded.docs, idx.docs)


def test_index_bad_file(tmp_path):
    path = tmp_path / "bad.idx"
    path.write_bytes(b"COOCIDX1" + b"\xff\xff\xff\xff")
    with pytest.raises(FormatError):
        InvertedIndex.load(path)


def test_intersect_examples():
    assert intersect(np.array([0, 1, 2], np.uint32), np.array([1], np.uint32)) == 1
    x = np.array([3, 9, 12, 40], np.uint32)
    assert intersect(x, x) == len(x)
    assert intersect(np.array([1, 3], np.uint32), np.array([2, 4], np.uint32)) == 0


def test_intersect_properties():
    rng = random.Random(5)
    for _ in range(50):
        a = np.array(sorted(rng.sample(range(100), rng.randint(0, 30))), np.uint32)
        b = np.array(sorted(rng.sample(range(100), rng.randint(0, 30))), np.uint32)
        got = intersect(a, b)
        assert got == intersect(b, a)
        assert got == len(set(a.tolist()) & set(b.tolist()))
        assert got <= min(len(a), len(b))


def test_default_block_width():
    assert default_block_width(10000) == 100
    assert default_block_width(0) == 1
    assert default_block_width(1) == 1
    # round(sqrt(694000)) = 833: the sqrt rule at a 100k-document scale.
    assert default_block_width(694000) == 833
    assert default_block_width(2) == 1
    assert default_block_width(3) == 2


def test_build_blocks_ranges():
    collection, _ = make_toy()
    idx = build_index(collection)
    blocks = build_blocks(idx, 3)
    assert [(b.term_lo, b.term_hi) for b in blocks] == [(0, 3), (3, 6), (6, 7)]


def test_build_blocks_k_equals_vocab_is_forward_docs():
    collection, _ = make_toy()
    idx = build_index(collection)
    (block,) = build_blocks(idx, idx.vocab_size)
    assert block.doc_ids.tolist() == [0, 1, 2]
    for i, d in enumerate(block.doc_ids.tolist()):
        assert block.mini_doc(i).tolist() == collection.doc_terms(d).tolist()


def test_build_blocks_invalid_k():
    collection, _ = make_toy()
    idx = build_index(collection)
    with pytest.raises(ValueError):
        build_blocks(idx, 0)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 7, 50])
def test_blocks_concatenation_reproduces_documents(k):
    rng = random.Random(17)
    collection = random_collection(rng)
    idx = build_index(collection)
    blocks = build_blocks(idx, k)
    expected_blocks = (idx.vocab_size + k - 1) // k
    assert len(blocks) == expected_blocks
    rebuilt = {d: [] for d in range(len(collection))}
    total = 0
    for block in blocks:
        assert np.all(block.flat >= block.term_lo)
        assert np.all(block.flat < block.term_hi)
        total += block.flat.size
        for i, d in enumerate(block.doc_ids.tolist()):
            mini = block.mini_doc(i)
            assert np.all(mini[1:] > mini[:-1])
            rebuilt[d].extend(mini.tolist())
    assert total == collection.postings_total
    for d in range(len(collection)):
        assert rebuilt[d] == collection.doc_terms(d).tolist()
