"""Document ingestion and the preprocessed forward collection.

A collection is the whole preprocessing product: every document reduced to
its sorted, deduplicated sequence of 32-bit term ids, with ids handed out
densely in first-encounter order. Stored row-major in two flat arrays
(CSR style) so the counting kernels can walk it without per-document
allocation.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._io import expect_magic, read_exact, read_struct
from .errors import FormatError, IngestError

FORWARD_MAGIC = b"COOCFWD1"
DICT_MAGIC = b"COOCDICT"

# Maximal runs of Unicode alphanumerics; underscore is a separator.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass
class RawDocument:
    """A document as handed to ingestion: opaque id plus UTF-8 bytes."""

    external_id: str
    text: bytes


def tokenize(text) -> list[str]:
    """Split text into lowercased alphanumeric runs.

    Accepts bytes (decoded as UTF-8, invalid sequences repaired with the
    replacement character) or str. Total: never raises on dirty input.
    """
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    return [tok.lower() for tok in _TOKEN_RE.findall(text)]


class TermDictionary:
    """Bidirectional term-string <-> term-id map with dense ordinal ids."""

    def __init__(self):
        self._terms: list[str] = []
        self._ids: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._terms)

    def assign(self, term: str) -> int:
        """Return the id for term, creating the next dense id if unseen."""
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._ids[term] = tid
            self._terms.append(term)
        return tid

    def id_of(self, term: str):
        return self._ids.get(term)

    def term(self, tid: int) -> str:
        return self._terms[tid]

    def terms(self) -> Sequence[str]:
        return self._terms

    def save(self, path):
        path = Path(path)
        with open(path, "wb") as f:
            f.write(DICT_MAGIC)
            f.write(struct.pack("<I", len(self._terms)))
            for term in self._terms:
                data = term.encode("utf-8")
                f.write(struct.pack("<I", len(data)))
                f.write(data)

    @classmethod
    def load(cls, path) -> "TermDictionary":
        path = Path(path)
        d = cls()
        with open(path, "rb") as f:
            expect_magic(f, DICT_MAGIC, path)
            (count,) = read_struct(f, "<I", path, "entry count")
            for i in range(count):
                (length,) = read_struct(f, "<I", path, f"entry {i} header")
                raw = read_exact(f, length, path, f"entry {i} bytes")
                try:
                    term = raw.decode("utf-8")
                except UnicodeDecodeError as exc:
                    raise FormatError(path, f.tell() - length, f"entry {i} is not UTF-8") from exc
                d.assign(term)
        return d


class Collection:
    """Forward collection: per-document sorted distinct term ids, CSR layout.

    offsets has doc_count + 1 entries; document d's terms are
    flat[offsets[d]:offsets[d+1]], strictly ascending. vocab_size is one
    past the largest term id present (0 for an empty collection).
    """

    def __init__(self, offsets: np.ndarray, flat: np.ndarray):
        self.offsets = np.ascontiguousarray(offsets, dtype=np.uint64)
        self.flat = np.ascontiguousarray(flat, dtype=np.uint32)
        self.vocab_size = self._compute_vocab()

    def _compute_vocab(self) -> int:
        if self.flat.size == 0:
            return 0
        nonempty = np.flatnonzero(np.diff(self.offsets.astype(np.int64)))
        # Rows are sorted, so each row's last element is its max.
        last = self.flat[self.offsets[nonempty + 1].astype(np.int64) - 1]
        return int(last.max()) + 1

    @classmethod
    def from_term_lists(cls, docs: Iterable[Sequence[int]]) -> "Collection":
        offsets = [0]
        chunks = []
        total = 0
        for terms in docs:
            arr = np.asarray(terms, dtype=np.uint32)
            total += arr.size
            offsets.append(total)
            chunks.append(arr)
        flat = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.uint32)
        return cls(np.asarray(offsets, dtype=np.uint64), flat)

    def __len__(self) -> int:
        return len(self.offsets) - 1

    @property
    def doc_count(self) -> int:
        return len(self)

    @property
    def postings_total(self) -> int:
        return int(self.flat.size)

    def doc_terms(self, d: int) -> np.ndarray:
        return self.flat[int(self.offsets[d]):int(self.offsets[d + 1])]

    def iter_docs(self) -> Iterator[np.ndarray]:
        offs = self.offsets.astype(np.int64)
        for d in range(len(self)):
            yield self.flat[offs[d]:offs[d + 1]]

    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets.astype(np.int64))

    def take_prefix(self, n: int) -> "Collection":
        """Restrict to the first n documents; term ids keep their values."""
        if not 0 <= n <= len(self):
            raise ValueError(f"prefix size {n} out of range [0, {len(self)}]")
        end = int(self.offsets[n])
        return Collection(self.offsets[:n + 1], self.flat[:end])

    def cap_doc_terms(self, max_terms: int) -> "Collection":
        """Truncate every document to its first max_terms term ids."""
        if max_terms < 0:
            raise ValueError("max_terms must be nonnegative")
        docs = [terms[:max_terms] for terms in self.iter_docs()]
        return Collection.from_term_lists(docs)

    def save(self, path):
        path = Path(path)
        with open(path, "wb") as f:
            f.write(FORWARD_MAGIC)
            f.write(struct.pack("<I", len(self)))
            offs = self.offsets.astype(np.int64)
            for d in range(len(self)):
                terms = self.flat[offs[d]:offs[d + 1]]
                f.write(struct.pack("<I", terms.size))
                f.write(terms.astype("<u4", copy=False).tobytes())

    @classmethod
    def load(cls, path) -> "Collection":
        path = Path(path)
        with open(path, "rb") as f:
            expect_magic(f, FORWARD_MAGIC, path)
            (doc_count,) = read_struct(f, "<I", path, "document count")
            offsets = np.zeros(doc_count + 1, dtype=np.uint64)
            chunks = []
            total = 0
            for d in range(doc_count):
                record_at = f.tell()
                (n,) = read_struct(f, "<I", path, f"document {d} header")
                raw = read_exact(f, 4 * n, path, f"document {d} terms")
                terms = np.frombuffer(raw, dtype="<u4").astype(np.uint32, copy=False)
                if n > 1 and not np.all(terms[1:] > terms[:-1]):
                    raise FormatError(path, record_at, f"document {d} terms not strictly ascending")
                total += n
                offsets[d + 1] = total
                chunks.append(terms)
            trailing = f.read(1)
            if trailing:
                raise FormatError(path, f.tell() - 1, "trailing bytes after last document")
        flat = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.uint32)
        return cls(offsets, flat)


def ingest(docs: Iterable[RawDocument], dictionary: TermDictionary) -> Collection:
    """Tokenize a document stream and build the forward collection.

    Extends `dictionary` with new terms in first-encounter order. Doc ids
    are assigned by stream position. Raises IngestError on a duplicate
    external id.
    """
    seen_ids = set()
    rows = []
    for doc in docs:
        if doc.external_id in seen_ids:
            raise IngestError(f"duplicate external document id: {doc.external_id!r}")
        seen_ids.add(doc.external_id)
        distinct = {dictionary.assign(tok) for tok in tokenize(doc.text)}
        rows.append(sorted(distinct))
    return Collection.from_term_lists(rows)


def collection_paths(prefix) -> tuple[Path, Path]:
    """Forward and dictionary file paths for a collection prefix."""
    prefix = Path(prefix)
    return prefix.with_name(prefix.name + ".fwd"), prefix.with_name(prefix.name + ".dict")


def save_collection(prefix, collection: Collection, dictionary: TermDictionary):
    fwd, dic = collection_paths(prefix)
    collection.save(fwd)
    dictionary.save(dic)


def load_collection(prefix) -> Collection:
    fwd, _ = collection_paths(prefix)
    return Collection.load(fwd)


def load_dictionary(prefix) -> TermDictionary:
    _, dic = collection_paths(prefix)
    return TermDictionary.load(dic)


def read_raw_documents(input_path, limit=None) -> Iterator[RawDocument]:
    """Yield raw documents from a directory (one file each) or a text file
    (one document per line)."""
    input_path = Path(input_path)
    count = 0
    if input_path.is_dir():
        for p in sorted(q for q in input_path.rglob("*") if q.is_file()):
            if limit is not None and count >= limit:
                return
            yield RawDocument(p.relative_to(input_path).as_posix(), p.read_bytes())
            count += 1
    else:
        with open(input_path, "rb") as f:
            for lineno, line in enumerate(f, start=1):
                if limit is not None and count >= limit:
                    return
                yield RawDocument(f"{input_path.name}:{lineno}", line.rstrip(b"\r\n"))
                count += 1
