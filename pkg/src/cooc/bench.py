"""Scaling experiments: synthetic corpora, measurement, and the sweep driver.

The sweep runs every (method, prefix size) cell in a fresh child process so
that peak-memory numbers belong to exactly one run, and writes one CSV row
per cell. Infeasible cells (quadratic methods beyond the work limit) are
recorded as skipped rather than attempted.
"""

from __future__ import annotations

import csv
import json
import math
import os
import platform
import random
import resource
import subprocess
import sys
import tempfile
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .corpus import Collection, TermDictionary
from .errors import ConfigError

CSV_COLUMNS = [
    "method", "doc_count", "wall_time_s", "peak_mem_bytes", "pairs_emitted",
    "param_flush", "param_block_width", "param_accumulators", "status",
]

DEFAULT_WORK_LIMIT = 10_000_000_000


_peak_rss_seen = 0


def _current_rss_bytes():
    """Resident set size right now, or None when unavailable."""
    try:
        with open("/proc/self/statm") as f:
            pages = int(f.read().split()[1])
        return pages * os.sysconf("SC_PAGE_SIZE")
    except (OSError, IndexError, ValueError):
        pass
    # getrusage peak is a usable stand-in for a current reading; note that
    # some sandboxed kernels carry it across exec, so it may overreport.
    try:
        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    except (ValueError, OSError):
        return None
    if peak <= 0:
        return None
    return peak if sys.platform == "darwin" else peak * 1024


def peak_memory_probe():
    """High-water resident memory of this process, in bytes.

    Monotone over the process lifetime, fed by explicit probe calls at
    operation boundaries and by the sampler that runs during counting.
    Returns None where no resident-size source exists.
    """
    global _peak_rss_seen
    rss = _current_rss_bytes()
    if rss is None:
        return _peak_rss_seen or None
    _peak_rss_seen = max(_peak_rss_seen, rss)
    return _peak_rss_seen


class PeakMemorySampler:
    """Low-frequency background sampler feeding the peak-memory high-water.

    Counting runs can spike between operation boundaries; a 20Hz sampler
    is enough to catch anything that dominates a run's footprint while
    staying invisible in the timings.
    """

    def __init__(self, interval: float = 0.05):
        self.interval = interval
        self._stop = threading.Event()
        self._thread = None

    def __enter__(self):
        peak_memory_probe()
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()
        return self

    def _loop(self):
        while not self._stop.wait(self.interval):
            peak_memory_probe()

    def __exit__(self, exc_type, exc, tb):
        self._stop.set()
        self._thread.join()
        peak_memory_probe()
        return False


@dataclass
class BenchReport:
    """One measured counting run."""

    method: str
    doc_count: int
    wall_time_seconds: float
    peak_memory_bytes: int | None
    pairs_emitted: int
    parameters: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    status: str = "ok"
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    host: str = field(default_factory=lambda: f"{platform.node()} {platform.platform()}")

    def csv_row(self) -> dict:
        params = self.parameters or {}
        return {
            "method": self.method,
            "doc_count": self.doc_count,
            "wall_time_s": f"{self.wall_time_seconds:.6f}" if self.status == "ok" else "",
            "peak_mem_bytes": self.peak_memory_bytes
            if (self.status == "ok" and self.peak_memory_bytes is not None) else "",
            "pairs_emitted": self.pairs_emitted if self.status == "ok" else "",
            "param_flush": params.get("flush_threshold_pairs", ""),
            "param_block_width": params.get("block_width_k", ""),
            "param_accumulators": params.get("accumulators_a", ""),
            "status": self.status,
        }


@dataclass
class SyntheticCorpusSpec:
    """Knobs for the stand-in corpus generator.

    Documents draw a target distinct-term count from a lognormal fitted to
    (mean_doc_len, stddev_doc_len). Terms are then drawn one position at a
    time: a fresh term with probability new_term_prob (always, while the
    vocabulary is below bootstrap_vocab), otherwise an existing term with
    rank sampled Zipf-like (density ~ 1/rank); within-document repeats are
    discarded, as the preprocessing contract demands. Fully deterministic
    under a fixed seed.
    """

    doc_count: int
    mean_doc_len: float = 227.0
    stddev_doc_len: float = 521.0
    new_term_prob: float = 0.0015
    bootstrap_vocab: int = 512
    max_doc_len: int = 5000
    seed: int = 0

    @classmethod
    def from_json(cls, path) -> "SyntheticCorpusSpec":
        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"corpus spec {path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"corpus spec {path}: expected a JSON object")
        known = {f_.name for f_ in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown corpus spec keys: {sorted(unknown)}")
        if not isinstance(data.get("doc_count"), int) or data["doc_count"] < 0:
            raise ConfigError("corpus spec needs a nonnegative integer doc_count")
        return cls(**data)


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _truncated_lognormal_mean(mu: float, sigma: float, cap: float) -> float:
    """Mean of min(X, cap) for lognormal X."""
    if sigma == 0.0:
        return min(math.exp(mu), cap)
    lc = math.log(cap)
    body = math.exp(mu + sigma * sigma / 2.0) * _normal_cdf((lc - mu - sigma * sigma) / sigma)
    tail = cap * (1.0 - _normal_cdf((lc - mu) / sigma))
    return body + tail


def _solve_mu(mean: float, sigma: float, cap: float) -> float:
    """Location parameter so the cap-truncated lognormal mean hits `mean`."""
    if mean >= 0.95 * cap:
        raise ConfigError(
            f"mean_doc_len {mean} too close to max_doc_len {cap} to be attainable")
    if sigma == 0.0:
        return math.log(mean)
    lo = math.log(mean) - sigma * sigma / 2.0 - 1.0
    hi = math.log(cap)
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if _truncated_lognormal_mean(mid, sigma, cap) < mean:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def generate_corpus(spec: SyntheticCorpusSpec) -> tuple[Collection, TermDictionary]:
    """Build a reproducible synthetic collection matching the spec's shape."""
    rng = random.Random(spec.seed)
    mean = max(spec.mean_doc_len, 1e-9)
    ratio2 = (spec.stddev_doc_len / mean) ** 2
    sigma = math.sqrt(math.log1p(ratio2))
    # Lengths are capped, which would otherwise pull the realized mean
    # under the requested one; compensate in the location parameter.
    mu = _solve_mu(mean, sigma, float(spec.max_doc_len))

    vocab = 0
    rows = []
    for _ in range(spec.doc_count):
        target = min(spec.max_doc_len, round(rng.lognormvariate(mu, sigma)))
        seen: set[int] = set()
        budget = 8 * target + 16
        while len(seen) < target and budget > 0:
            budget -= 1
            if vocab < spec.bootstrap_vocab or rng.random() < spec.new_term_prob:
                tid = vocab
                vocab += 1
            else:
                # Inverse-CDF sample with density ~ 1/(rank+1): older
                # (smaller-id) terms are the frequent ones.
                tid = min(vocab - 1, int(vocab ** rng.random()) - 1)
            seen.add(tid)
        rows.append(sorted(seen))

    dictionary = TermDictionary()
    for tid in range(vocab):
        dictionary.assign(f"t{tid:07d}")
    return Collection.from_term_lists(rows), dictionary


def _guard_estimate(method: str, collection: Collection) -> int | None:
    """Pre-run work estimate for methods the paper could not scale."""
    if method == "naive":
        lens = collection.lengths().astype(object)
        return int(sum(lens * (lens - 1) // 2))
    if method == "list-pairs":
        v = collection.vocab_size
        return v * v
    return None


def _cell_args(method, collection_path, out_path, flush, block_width, accumulators):
    args = [
        sys.executable, "-m", "cooc._cell",
        "--method", method,
        "--collection-file", str(collection_path),
        "--out", str(out_path),
        "--flush-pairs", str(flush),
        "--block-width", str(block_width),
        "--accumulators", str(accumulators),
    ]
    return args


def bench_sweep(methods, sizes, collection: Collection, out_csv,
                work_limit: int = DEFAULT_WORK_LIMIT,
                flush_threshold_pairs: int = 100_000_000,
                block_width_k="auto", accumulators_a: int = 100,
                temp_dir=None, log=None) -> list[BenchReport]:
    """Run each (method, prefix size) cell in a fresh process; write CSV."""
    reports = []
    with tempfile.TemporaryDirectory(dir=temp_dir, prefix="cooc-bench-") as tmp:
        tmp = Path(tmp)
        for size in sizes:
            prefix = collection.take_prefix(size)
            coll_path = tmp / f"prefix-{size}.fwd"
            prefix.save(coll_path)
            for method in methods:
                estimate = _guard_estimate(method, prefix)
                if estimate is not None and estimate > work_limit:
                    reports.append(BenchReport(
                        method=method, doc_count=size, wall_time_seconds=0.0,
                        peak_memory_bytes=None, pairs_emitted=0,
                        status=f"skipped: guard ({estimate} > {work_limit})"))
                    if log:
                        log(f"{method} @ {size}: skipped (work estimate {estimate})")
                    continue
                out_path = tmp / f"{method}-{size}.run"
                proc = subprocess.run(
                    _cell_args(method, coll_path, out_path, flush_threshold_pairs,
                               block_width_k, accumulators_a),
                    capture_output=True, text=True)
                if proc.returncode != 0:
                    detail = proc.stderr.strip().splitlines()[-1] if proc.stderr.strip() else "?"
                    reports.append(BenchReport(
                        method=method, doc_count=size, wall_time_seconds=0.0,
                        peak_memory_bytes=None, pairs_emitted=0,
                        status=f"error: {detail}"))
                    if log:
                        log(f"{method} @ {size}: failed ({detail})")
                    continue
                payload = json.loads(proc.stdout)
                reports.append(BenchReport(
                    method=payload["method"], doc_count=payload["doc_count"],
                    wall_time_seconds=payload["wall_time_seconds"],
                    peak_memory_bytes=payload["peak_memory_bytes"],
                    pairs_emitted=payload["pairs_emitted"],
                    parameters=payload["parameters"], metrics=payload["metrics"]))
                if log:
                    log(f"{method} @ {size}: {payload['wall_time_seconds']:.2f}s, "
                        f"{payload['pairs_emitted']} pairs")
                out_path.unlink(missing_ok=True)
                Path(str(out_path) + ".idx").unlink(missing_ok=True)
    if out_csv is not None:
        write_reports_csv(reports, out_csv)
    return reports


def write_reports_csv(reports, out_csv):
    with open(out_csv, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for r in reports:
            writer.writerow(r.csv_row())
