import random

import numpy as np
import pytest

from cooc import Collection, RawDocument, TermDictionary, ingest, tokenize
from cooc.errors import FormatError, IngestError

from conftest import TOY_TEXTS, make_toy


def reference_tokenize(text: str) -> list[str]:
    """Character-class walk, independent of the regex implementation."""
    tokens, current = [], []
    for ch in text:
        if ch.isalnum() and ch != "_":
            current.append(ch)
        else:
            if current:
                tokens.append("".join(current).lower())
            current = []
    if current:
        tokens.append("".join(current).lower())
    return tokens


def test_tokenize_basics():
    assert tokenize(b"Dog and a CAT") == ["dog", "and", "a", "cat"]
    assert tokenize(b"") == []
    assert tokenize(b"cat-rug cat") == ["cat", "rug", "cat"]


@pytest.mark.parametrize("text", [
    "cat-rug cat",
    "Dog and a CAT",
    "x_y z9 9z __",
    "tabs\tand\nnewlines",
    "café iß 3.14 本語 عربي",
    "a. b, (c) [d]! e?",
    "", "   ", "123 456",
])
def test_tokenize_matches_character_class_reference(text):
    assert tokenize(text.encode()) == reference_tokenize(text)


def test_tokenize_repairs_invalid_utf8():
    # Broken byte sequence must not raise; replacement char is a separator.
    assert tokenize(b"good\xff\xfebad") == ["good", "bad"]
    assert tokenize(b"\xff") == []


def test_ingest_toy_counts():
    collection, dictionary = make_toy()
    assert [len(t) for t in collection.iter_docs()] == [4, 4, 4]
    assert len(dictionary) == 7
    assert collection.vocab_size == 7
    # First-encounter id order.
    assert [dictionary.term(i) for i in range(7)] == \
        ["cat", "with", "a", "rug", "dog", "and", "on"]


def test_ingest_dedups_repeated_word():
    d = TermDictionary()
    coll = ingest([RawDocument("d", b" ".join([b"word"] * 50))], d)
    assert list(coll.doc_terms(0)) == [0]


def test_ingest_empty_stream():
    d = TermDictionary()
    coll = ingest([], d)
    assert len(coll) == 0
    assert len(d) == 0


def test_ingest_duplicate_external_id():
    d = TermDictionary()
    docs = [RawDocument("same", b"a"), RawDocument("same", b"b")]
    with pytest.raises(IngestError, match="same"):
        ingest(docs, d)


def test_ingest_keeps_empty_documents():
    d = TermDictionary()
    coll = ingest([RawDocument("a", b"!!!"), RawDocument("b", b"one word")], d)
    assert len(coll) == 2
    assert len(coll.doc_terms(0)) == 0
    assert len(coll.doc_terms(1)) == 2


def test_ingest_deterministic():
    c1, d1 = make_toy()
    c2, d2 = make_toy()
    assert np.array_equal(c1.flat, c2.flat)
    assert np.array_equal(c1.offsets, c2.offsets)
    assert list(d1.terms()) == list(d2.terms())


def test_dictionary_roundtrip(tmp_path):
    _, dictionary = make_toy()
    dictionary.assign("café")
    path = tmp_path / "terms.dict"
    dictionary.save(path)
    loaded = TermDictionary.load(path)
    assert list(loaded.terms()) == list(dictionary.terms())
    assert loaded.id_of("café") == dictionary.id_of("café")


def test_forward_roundtrip_toy(tmp_path):
    collection, _ = make_toy()
    path = tmp_path / "c.fwd"
    collection.save(path)
    loaded = Collection.load(path)
    assert np.array_equal(loaded.flat, collection.flat)
    assert np.array_equal(loaded.offsets, collection.offsets)
    assert loaded.vocab_size == collection.vocab_size


def test_forward_roundtrip_empty(tmp_path):
    empty = Collection.from_term_lists([])
    path = tmp_path / "e.fwd"
    empty.save(path)
    loaded = Collection.load(path)
    assert len(loaded) == 0
    assert loaded.vocab_size == 0


def test_forward_roundtrip_random(tmp_path):
    rng = random.Random(7)
    docs = []
    for _ in range(1000):
        n = rng.randint(0, 30)
        docs.append(sorted(rng.sample(range(5000), n)))
    collection = Collection.from_term_lists(docs)
    path = tmp_path / "r.fwd"
    collection.save(path)
    loaded = Collection.load(path)
    assert len(loaded) == 1000
    for d in range(1000):
        assert np.array_equal(loaded.doc_terms(d), collection.doc_terms(d))


def test_forward_bad_magic(tmp_path):
    path = tmp_path / "bad.fwd"
    path.write_bytes(b"NOTMAGIC" + b"\x00" * 8)
    with pytest.raises(FormatError, match="magic"):
        Collection.load(path)


def test_forward_truncated(tmp_path):
    collection, _ = make_toy()
    path = tmp_path / "t.fwd"
    collection.save(path)
    data = path.read_bytes()
    path.write_bytes(data[:-5])
    with pytest.raises(FormatError, match="truncated"):
        Collection.load(path)


def test_forward_trailing_garbage(tmp_path):
    collection, _ = make_toy()
    path = tmp_path / "g.fwd"
    collection.save(path)
    path.write_bytes(path.read_bytes() + b"x")
    with pytest.raises(FormatError, match="trailing"):
        Collection.load(path)


def test_take_prefix_identity_and_empty():
    collection, _ = make_toy()
    full = collection.take_prefix(len(collection))
    assert np.array_equal(full.flat, collection.flat)
    empty = collection.take_prefix(0)
    assert len(empty) == 0
    assert empty.vocab_size == 0
    with pytest.raises(ValueError):
        collection.take_prefix(4)


def test_take_prefix_single_large_doc():
    # A first document of 182 distinct terms: the one-document prefix has
    # vocabulary-in-use 182 and 182 postings.
    docs = [list(range(182)), [0, 1, 2, 200], [5, 201]]
    collection = Collection.from_term_lists(docs + [[]])
    one = collection.take_prefix(1)
    assert len(one) == 1
    assert one.vocab_size == 182
    assert one.postings_total == 182


def test_take_prefix_matches_reingest():
    texts = TOY_TEXTS + ["rug dog zebra", "zebra cat"]
    d_full = TermDictionary()
    full = ingest([RawDocument(str(i), t.encode()) for i, t in enumerate(texts)], d_full)
    for n in range(len(texts) + 1):
        d_n = TermDictionary()
        expected = ingest([RawDocument(str(i), t.encode()) for i, t in enumerate(texts[:n])], d_n)
        got = full.take_prefix(n)
        assert np.array_equal(got.flat, expected.flat)
        assert np.array_equal(got.offsets, expected.offsets)


def test_forward_docs_strictly_ascending():
    collection, _ = make_toy()
    for terms in collection.iter_docs():
        assert np.all(terms[1:] > terms[:-1])


def test_cap_doc_terms():
    collection = Collection.from_term_lists([[0, 1, 2, 3], [2], []])
    capped = collection.cap_doc_terms(2)
    assert [t.tolist() for t in capped.iter_docs()] == [[0, 1], [2], []]
