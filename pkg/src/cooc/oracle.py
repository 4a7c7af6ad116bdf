"""Brute-force reference counter and run comparison.

Deliberately the dumbest possible implementation: enumerate every
in-document pair with itertools and tally in a Counter. It shares no code
with the counting methods, so agreement between the two is meaningful
evidence. Guarded to small collections; use prefix sampling beyond that.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, islice

from .corpus import Collection
from .errors import GuardExceeded
from .pairstore import read_run

PAIR_GUARD = 100_000_000


def brute_force_count(collection: Collection) -> dict[tuple[int, int], int]:
    """Exact pair counts as a sorted {(primary, secondary): count} dict."""
    candidate = 0
    for n in collection.lengths().tolist():
        candidate += n * (n - 1) // 2
        if candidate > PAIR_GUARD:
            raise GuardExceeded(
                f"collection generates more than {PAIR_GUARD} candidate pairs; "
                "verify a prefix instead (take_prefix / --limit)")
    counts: Counter = Counter()
    for terms in collection.iter_docs():
        counts.update(combinations(terms.tolist(), 2))
    return dict(sorted(counts.items()))


@dataclass
class Verdict:
    """Differences between a run file and the oracle result."""

    missing: list = field(default_factory=list)    # in oracle, not in run
    extra: list = field(default_factory=list)      # in run, not in oracle
    mismatched: list = field(default_factory=list)  # (pair, run count, oracle count)

    @property
    def passed(self) -> bool:
        return not (self.missing or self.extra or self.mismatched)

    def summary(self, limit: int = 20) -> str:
        if self.passed:
            return "PASS: run matches brute-force counts"
        lines = [
            f"FAIL: {len(self.missing)} missing, {len(self.extra)} extra, "
            f"{len(self.mismatched)} mismatched pairs"
        ]
        for pair, count in islice(self.missing, limit):
            lines.append(f"  missing {pair} (oracle count {count})")
        for pair, count in islice(self.extra, limit):
            lines.append(f"  extra {pair} (run count {count})")
        for pair, got, want in islice(self.mismatched, limit):
            lines.append(f"  count mismatch {pair}: run {got}, oracle {want}")
        shown = min(len(self.missing), limit) + min(len(self.extra), limit) \
            + min(len(self.mismatched), limit)
        total = len(self.missing) + len(self.extra) + len(self.mismatched)
        if total > shown:
            lines.append(f"  ... {total - shown} more")
        return "\n".join(lines)


def compare(run_path, oracle: dict[tuple[int, int], int]) -> Verdict:
    """Diff a run file against an oracle result."""
    verdict = Verdict()
    seen = set()
    for primary, secondary, count in read_run(run_path):
        pair = (primary, secondary)
        seen.add(pair)
        want = oracle.get(pair)
        if want is None:
            verdict.extra.append((pair, count))
        elif want != count:
            verdict.mismatched.append((pair, count, want))
    for pair, count in oracle.items():
        if pair not in seen:
            verdict.missing.append((pair, count))
    return verdict
