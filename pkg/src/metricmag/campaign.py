"""Chunked, seeded sample campaigns with order-independent aggregation.

A campaign of ``N`` samples is cut into chunks of ``CHUNK`` samples; chunk
``c`` draws from ``spacegen.stream(seed, c)``. Chunks may run in worker
processes, and the merged report does not depend on the worker count.
"""
from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List

from .scalar import format_scalar

CHUNK = 1000
MAX_RECORDED = 50


@dataclass
class Tally:
    """Per-chunk accumulator; merged with ``+``."""

    samples: int = 0
    violation_count: int = 0
    violations: List[dict] = field(default_factory=list)
    histogram: Counter = field(default_factory=Counter)
    counters: Counter = field(default_factory=Counter)

    def violation(self, check: str, sample: int, space=None, **detail) -> None:
        self.violation_count += 1
        self.counters[f"violations:{check}"] += 1
        if len(self.violations) < MAX_RECORDED:
            rec = {"check": check, "sample": sample}
            if space is not None:
                rec["matrix"] = [[format_scalar(x) for x in row] for row in space.Z]
            rec.update({k: _jsonable(v) for k, v in detail.items()})
            self.violations.append(rec)

    def __add__(self, other: "Tally") -> "Tally":
        out = Tally(self.samples + other.samples, self.violation_count + other.violation_count)
        out.violations = sorted(self.violations + other.violations,
                                key=lambda v: (v["sample"], v["check"]))[:MAX_RECORDED]
        out.histogram = self.histogram + other.histogram
        out.counters = self.counters + other.counters
        return out


@dataclass
class CampaignReport:
    theorem: str
    samples: int
    seed: int
    violations: List[dict]
    violation_count: int
    case_histogram: Dict[str, int]
    stats: Dict[str, object]

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "samples": self.samples,
            "seed": self.seed,
            "violations": self.violations,
            "violation_count": self.violation_count,
            "case_histogram": dict(sorted(self.case_histogram.items())),
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, int):
        return v
    return format_scalar(v)


def _run_chunk(args):
    task, chunk, count, seed, kwargs = args
    return task(chunk, count, seed, **kwargs)


def run(theorem: str, task: Callable[..., Tally], n_samples: int, seed: int,
        workers: int = 1, **kwargs) -> CampaignReport:
    """Run ``task(chunk, count, seed, **kwargs) -> Tally`` over all chunks."""
    jobs = []
    for c, start in enumerate(range(0, n_samples, CHUNK)):
        jobs.append((task, c, min(CHUNK, n_samples - start), seed, kwargs))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(_run_chunk, jobs))
    else:
        tallies = [_run_chunk(j) for j in jobs]
    total = sum(tallies, Tally())
    return CampaignReport(
        theorem=theorem,
        samples=total.samples,
        seed=seed,
        violations=total.violations,
        violation_count=total.violation_count,
        case_histogram=dict(total.histogram),
        stats=dict(sorted(total.counters.items())),
    )
