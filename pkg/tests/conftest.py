import random
from pathlib import Path

import pytest

from cooc import Collection, CounterConfig, RawDocument, TermDictionary, ingest
from cooc.counters import METHODS, run_counter

# The worked example: 3 documents, 7 distinct terms, 14 distinct pairs.
TOY_TEXTS = ["cat with a rug", "dog and a cat", "a cat on a rug"]

# Term ids in first-encounter order:
# cat=0 with=1 a=2 rug=3 dog=4 and=5 on=6
TOY_PAIRS = {
    (0, 1): 1, (0, 2): 3, (0, 3): 2, (0, 4): 1, (0, 5): 1, (0, 6): 1,
    (1, 2): 1, (1, 3): 1,
    (2, 3): 2, (2, 4): 1, (2, 5): 1, (2, 6): 1,
    (3, 6): 1,
    (4, 5): 1,
}

ALL_METHODS = list(METHODS)


def make_toy():
    dictionary = TermDictionary()
    docs = [RawDocument(f"doc{i}", text.encode()) for i, text in enumerate(TOY_TEXTS)]
    return ingest(docs, dictionary), dictionary


@pytest.fixture
def toy():
    return make_toy()


def random_collection(rng: random.Random, max_docs=60, max_len=40, vocab=120) -> Collection:
    """Small random collection; term usage need not be dense."""
    docs = []
    for _ in range(rng.randint(0, max_docs)):
        n = rng.randint(0, max_len)
        docs.append(sorted(rng.sample(range(vocab), min(n, vocab))))
    return Collection.from_term_lists(docs)


def count_with(method, collection, out_path, **config_kw):
    config = CounterConfig(method=method, output_path=Path(out_path), **config_kw)
    return run_counter(config, collection=collection)


def run_records(path):
    from cooc.pairstore import read_run
    return list(read_run(path))
