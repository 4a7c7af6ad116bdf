import csv
import io

import pytest

from cooc import Collection, compute_stats, stats_sweep
from cooc.bench import SyntheticCorpusSpec, generate_corpus
from cooc.errors import ConsistencyError
from cooc.stats import format_magnitude, render_panel, write_stats_csv

from conftest import count_with, make_toy


def test_single_document_stats():
    collection = Collection.from_term_lists([list(range(182))])
    s = compute_stats(collection)
    assert s.doc_count == 1
    assert s.avg_len == 182.0
    assert s.min_len == s.max_len == 182
    assert s.stddev_len == 0.0
    assert s.postings == 182
    assert s.vocab == 182


def test_empty_collection_stats():
    s = compute_stats(Collection.from_term_lists([]))
    assert s.empty
    assert (s.doc_count, s.avg_len, s.min_len, s.max_len) == (0, 0.0, 0, 0)
    assert (s.postings, s.vocab) == (0, 0)


def test_toy_stats_with_run(tmp_path):
    collection, _ = make_toy()
    run, _ = count_with("naive", collection, tmp_path / "toy.run")
    s = compute_stats(collection, run_path=run.path)
    assert s.postings == 12
    assert s.vocab == 7
    assert s.distinct_pairs == 14
    assert s.output_bytes == run.path.stat().st_size
    assert s.min_len <= s.avg_len <= s.max_len


def test_run_collection_mismatch(tmp_path):
    collection, _ = make_toy()
    run, _ = count_with("naive", collection, tmp_path / "toy.run")
    small = Collection.from_term_lists([[0, 1]])
    with pytest.raises(ConsistencyError, match="mismatch"):
        compute_stats(small, run_path=run.path)


def test_sweep_monotonicity():
    spec = SyntheticCorpusSpec(doc_count=1000, mean_doc_len=30, stddev_doc_len=40,
                               new_term_prob=0.02, bootstrap_vocab=50,
                               max_doc_len=400, seed=3)
    collection, _ = generate_corpus(spec)
    sizes = [1, 10, 100, 1000]
    rows = stats_sweep(collection, sizes)
    assert [r.doc_count for r in rows] == sizes
    for a, b in zip(rows, rows[1:]):
        assert a.postings <= b.postings
        assert a.vocab <= b.vocab
        assert a.max_len <= b.max_len
        assert a.min_len >= b.min_len


def test_sweep_duplicate_sizes_identical():
    collection, _ = make_toy()
    a, b = stats_sweep(collection, [2, 2])
    assert a == b


def test_sweep_rejects_bad_sizes():
    collection, _ = make_toy()
    with pytest.raises(ValueError):
        stats_sweep(collection, [5])
    with pytest.raises(ValueError):
        stats_sweep(collection, [3, 1])


def test_single_doc_prefix_pair_identity(tmp_path):
    collection, _ = make_toy()
    one = collection.take_prefix(1)
    run, _ = count_with("naive", one, tmp_path / "one.run")
    s = compute_stats(one, run_path=run.path)
    assert s.distinct_pairs == s.avg_len * (s.avg_len - 1) / 2


def test_format_magnitude_matches_table_style():
    assert format_magnitude(182) == "182"
    assert format_magnitude(805) == "805"
    assert format_magnitude(1160) == "1.16K"
    assert format_magnitude(16471) == "16.5K"
    assert format_magnitude(25200) == "25.2K"
    assert format_magnitude(2220000) == "2.22M"
    assert format_magnitude(384_000_000) == "384M"
    assert format_magnitude(74_100_000_000) == "74.1B"


def test_render_panel_and_csv(tmp_path):
    collection, _ = make_toy()
    rows = stats_sweep(collection, [1, 3])
    out = io.StringIO()
    render_panel(rows, out)
    text = out.getvalue()
    assert "Vocabulary size" in text
    assert "Average document length" in text

    csv_path = tmp_path / "stats.csv"
    write_stats_csv(rows, csv_path)
    with open(csv_path) as f:
        got = list(csv.DictReader(f))
    assert got[0]["doc_count"] == "1"
    assert got[1]["postings"] == "12"
    assert got[1]["distinct_pairs"] == ""
