"""Pair-count run files: bit-exact serialization, writing, and merging.

A run is a sorted stream of (primary, secondary, count) records grouped by
primary: magic, u64 group count, then per group a u32 primary, u32 tuple
count, and tuple_count x (u32 secondary, u32 count). Every counting method
and the final merged output use this one layout, so equal logical results
are equal byte-for-byte. A sidecar `<run>.idx` maps each primary to the
byte offset of its group.
"""

from __future__ import annotations

import bisect
import heapq
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._io import expect_magic, read_exact, read_struct
from .errors import ContractViolation, FormatError

RUN_MAGIC = b"COOCRUN1"
OFFSETS_MAGIC = b"COOCOFF1"

_U32_MAX = 0xFFFFFFFF
_GROUP_HEADER = struct.Struct("<II")


@dataclass
class PairCountRun:
    """Handle to a completed run file."""

    path: Path
    group_count: int
    tuple_count: int


def sidecar_path(run_path) -> Path:
    run_path = Path(run_path)
    return run_path.with_name(run_path.name + ".idx")


class RunWriter:
    """Streaming writer enforcing the sorted/grouped run contract.

    Records must arrive strictly ascending by (primary, secondary);
    duplicates are a contract violation, not a merge. Use as a context
    manager: on error the partial file is removed rather than left looking
    complete.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._f = open(self.path, "wb")
        self._f.write(RUN_MAGIC)
        self._f.write(struct.pack("<Q", 0))  # patched on close
        self._groups = 0
        self._tuples = 0
        self._offsets: list[tuple[int, int]] = []
        self._cur_primary = None
        self._cur_sec: list[int] = []
        self._cur_cnt: list[int] = []
        self._closed = False

    def add(self, primary, secondary, count):
        primary, secondary, count = int(primary), int(secondary), int(count)
        if self._cur_primary is None or primary > self._cur_primary:
            self._flush_group()
            if self._offsets and primary <= self._offsets[-1][0]:
                raise ContractViolation(
                    f"records not sorted: primary {primary} after {self._offsets[-1][0]}")
            self._check_ids(primary, secondary)
            self._cur_primary = primary
        elif primary < self._cur_primary:
            raise ContractViolation(
                f"records not sorted: primary {primary} after {self._cur_primary}")
        if self._cur_sec:
            last = self._cur_sec[-1]
            if secondary == last:
                raise ContractViolation(
                    f"duplicate key ({primary}, {secondary}) in run input")
            if secondary < last:
                raise ContractViolation(
                    f"records not sorted: secondary {secondary} after {last} "
                    f"under primary {primary}")
        self._check_record(primary, secondary, count)
        self._cur_sec.append(secondary)
        self._cur_cnt.append(count)

    def add_group(self, primary, secondaries: np.ndarray, counts: np.ndarray):
        """Append a whole group at once (arrays already ascending)."""
        primary = int(primary)
        if secondaries.size == 0:
            return
        self._flush_group()
        if self._offsets and primary <= self._offsets[-1][0]:
            raise ContractViolation(
                f"groups not sorted: primary {primary} after {self._offsets[-1][0]}")
        self._check_ids(primary, int(secondaries.max()))
        if secondaries.size > 1 and not np.all(secondaries[1:] > secondaries[:-1]):
            raise ContractViolation(f"group {primary}: secondaries not strictly ascending")
        if secondaries[0] <= primary:
            raise ContractViolation(
                f"group {primary}: secondary {int(secondaries[0])} not greater than primary")
        counts = np.asarray(counts)
        if counts.size and (int(counts.min()) < 1 or int(counts.max()) > _U32_MAX):
            raise ContractViolation(f"group {primary}: counts must be in [1, 2^32)")
        self._write_group(primary, secondaries.astype("<u4", copy=False),
                          counts.astype("<u4"))

    def _check_ids(self, primary, secondary):
        if primary > _U32_MAX or secondary > _U32_MAX:
            raise ContractViolation("term id exceeds 32 bits")

    def _check_record(self, primary, secondary, count):
        if secondary > _U32_MAX:
            raise ContractViolation("term id exceeds 32 bits")
        if secondary <= primary:
            raise ContractViolation(
                f"pair ({primary}, {secondary}) violates primary < secondary")
        if not 1 <= count <= _U32_MAX:
            raise ContractViolation(f"count {count} for ({primary}, {secondary}) not in [1, 2^32)")

    def _flush_group(self):
        if self._cur_primary is None:
            return
        if self._cur_sec:
            self._write_group(
                self._cur_primary,
                np.asarray(self._cur_sec, dtype="<u4"),
                np.asarray(self._cur_cnt, dtype="<u4"),
            )
        self._cur_primary = None
        self._cur_sec = []
        self._cur_cnt = []

    def _write_group(self, primary, sec, cnt):
        self._offsets.append((primary, self._f.tell()))
        self._f.write(_GROUP_HEADER.pack(primary, sec.size))
        interleaved = np.empty(2 * sec.size, dtype="<u4")
        interleaved[0::2] = sec
        interleaved[1::2] = cnt
        self._f.write(interleaved.tobytes())
        self._groups += 1
        self._tuples += int(sec.size)

    def close(self) -> PairCountRun:
        self._flush_group()
        self._f.seek(len(RUN_MAGIC))
        self._f.write(struct.pack("<Q", self._groups))
        self._f.close()
        self._closed = True
        with open(sidecar_path(self.path), "wb") as f:
            f.write(OFFSETS_MAGIC)
            f.write(struct.pack("<Q", len(self._offsets)))
            for primary, offset in self._offsets:
                f.write(struct.pack("<IQ", primary, offset))
        return PairCountRun(self.path, self._groups, self._tuples)

    def abort(self):
        if not self._closed:
            self._f.close()
            self._closed = True
            self.path.unlink(missing_ok=True)
            sidecar_path(self.path).unlink(missing_ok=True)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            self.abort()
        elif not self._closed:
            self.close()
        return False


def write_run(records, path) -> PairCountRun:
    """Write a sorted (primary, secondary, count) stream to a run file."""
    with RunWriter(path) as w:
        for primary, secondary, count in records:
            w.add(primary, secondary, count)
        return w.close()


def read_groups(path):
    """Yield (primary, secondaries, counts) groups, validating as it reads."""
    path = Path(path)
    with open(path, "rb") as f:
        expect_magic(f, RUN_MAGIC, path)
        (group_count,) = read_struct(f, "<Q", path, "group count")
        prev_primary = -1
        for g in range(group_count):
            group_at = f.tell()
            primary, n = read_struct(f, "<II", path, f"group {g} header")
            if primary <= prev_primary:
                raise FormatError(path, group_at,
                                  f"group order violation: primary {primary} after {prev_primary}")
            prev_primary = primary
            raw = read_exact(f, 8 * n, path, f"group {g} tuples")
            data = np.frombuffer(raw, dtype="<u4")
            sec = data[0::2]
            cnt = data[1::2]
            if n and (int(sec[0]) <= primary or (n > 1 and not np.all(sec[1:] > sec[:-1]))):
                raise FormatError(path, group_at, f"group {g} secondaries not strictly ascending")
            if n and int(cnt.min()) < 1:
                raise FormatError(path, group_at, f"group {g} contains a zero count")
            yield primary, np.ascontiguousarray(sec, dtype=np.uint32), \
                np.ascontiguousarray(cnt, dtype=np.uint32)
        trailing = f.read(1)
        if trailing:
            raise FormatError(path, f.tell() - 1, "trailing bytes after last group")


def read_run(path):
    """Yield (primary, secondary, count) records in sorted order."""
    for primary, sec, cnt in read_groups(path):
        for s, c in zip(sec.tolist(), cnt.tolist()):
            yield primary, s, c


def run_summary(path) -> PairCountRun:
    """Group/tuple totals of an existing run (header walk, skips payloads)."""
    path = Path(path)
    groups = tuples = 0
    with open(path, "rb") as f:
        expect_magic(f, RUN_MAGIC, path)
        (group_count,) = read_struct(f, "<Q", path, "group count")
        for g in range(group_count):
            _, n = read_struct(f, "<II", path, f"group {g} header")
            f.seek(8 * n, 1)
            groups += 1
            tuples += n
    return PairCountRun(path, groups, tuples)


def merge_runs(run_paths, out_path) -> PairCountRun:
    """K-way merge of sorted runs; counts of identical keys are summed.

    Streams group-at-a-time, so memory is proportional to the number of
    runs (times the widest group), never the total pair count.
    """
    streams = [read_groups(p) for p in run_paths]
    heap = []
    for i, stream in enumerate(streams):
        head = next(stream, None)
        if head is not None:
            heapq.heappush(heap, (head[0], i, head[1], head[2]))
    with RunWriter(out_path) as w:
        while heap:
            primary = heap[0][0]
            secs, cnts, sources = [], [], []
            while heap and heap[0][0] == primary:
                _, i, sec, cnt = heapq.heappop(heap)
                secs.append(sec)
                cnts.append(cnt)
                sources.append(i)
            if len(secs) == 1:
                w.add_group(primary, secs[0], cnts[0])
            else:
                sec_all = np.concatenate(secs)
                cnt_all = np.concatenate(cnts).astype(np.uint64)
                order = np.argsort(sec_all, kind="stable")
                sec_all = sec_all[order]
                cnt_all = cnt_all[order]
                starts = np.flatnonzero(np.r_[True, sec_all[1:] != sec_all[:-1]])
                summed = np.add.reduceat(cnt_all, starts)
                w.add_group(primary, sec_all[starts], summed)
            for i in sources:
                head = next(streams[i], None)
                if head is not None:
                    heapq.heappush(heap, (head[0], i, head[1], head[2]))
        return w.close()


def read_sidecar(path) -> list[tuple[int, int]]:
    """(primary, byte offset) pairs from a run's offset sidecar."""
    path = Path(path)
    entries = []
    with open(path, "rb") as f:
        expect_magic(f, OFFSETS_MAGIC, path)
        (n,) = read_struct(f, "<Q", path, "entry count")
        for i in range(n):
            primary, offset = read_struct(f, "<IQ", path, f"entry {i}")
            entries.append((primary, offset))
    return entries


def lookup_group(run_path, primary):
    """Random-access one primary's tuples via the offset sidecar.

    Returns (secondaries, counts) arrays, or None if the primary has no
    group.
    """
    run_path = Path(run_path)
    entries = read_sidecar(sidecar_path(run_path))
    keys = [p for p, _ in entries]
    i = bisect.bisect_left(keys, primary)
    if i == len(keys) or keys[i] != primary:
        return None
    with open(run_path, "rb") as f:
        f.seek(entries[i][1])
        got, n = read_struct(f, "<II", run_path, "group header")
        if got != primary:
            raise FormatError(run_path, entries[i][1],
                              f"sidecar points at primary {got}, expected {primary}")
        data = np.frombuffer(read_exact(f, 8 * n, run_path, "group tuples"), dtype="<u4")
    return (np.ascontiguousarray(data[0::2], dtype=np.uint32),
            np.ascontiguousarray(data[1::2], dtype=np.uint32))


def export_text(run_path, dictionary, out):
    """Write one `term1<TAB>term2<TAB>count` line per record, in run order."""
    vocab = len(dictionary)
    lines = 0
    for primary, sec, cnt in read_groups(run_path):
        if primary >= vocab:
            raise ContractViolation(f"term id {primary} missing from dictionary")
        p_term = dictionary.term(primary)
        for s, c in zip(sec.tolist(), cnt.tolist()):
            if s >= vocab:
                raise ContractViolation(f"term id {s} missing from dictionary")
            out.write(f"{p_term}\t{dictionary.term(s)}\t{c}\n")
            lines += 1
    return lines


def top_pairs(run_path, n=1) -> list[tuple[int, int, int]]:
    """The n highest-count (primary, secondary, count) records, count desc,
    ties broken by key order."""
    best: list[tuple[int, int, int]] = []
    for primary, sec, cnt in read_groups(run_path):
        if cnt.size == 0:
            continue
        take = min(n, cnt.size)
        idx = np.argpartition(cnt, -take)[-take:]
        for i in idx.tolist():
            item = (int(cnt[i]), -primary, -int(sec[i]))
            if len(best) < n:
                heapq.heappush(best, item)
            elif item > best[0]:
                heapq.heapreplace(best, item)
    result = [(-p, -s, c) for c, p, s in sorted(best, reverse=True)]
    return result
