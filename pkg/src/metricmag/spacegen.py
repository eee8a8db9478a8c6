"""Generators for valid metric and similarity spaces.

Random similarity spaces are drawn on the rational grid ``k / D`` (``D`` is
the configured denominator bound) and checked against the multiplicative
triangle constraints, so every emitted space is exactly valid.

Seed splitting: stream ``c`` of a run seeded with ``s`` is
``numpy.random.default_rng(SeedSequence(s, spawn_key=(c,)))``; campaigns
give each fixed-size chunk of samples its own stream, which makes results
independent of how chunks are spread over workers.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .core import FiniteMetricSpace, SimilaritySpace, determinant, is_positive_definite, restrict
from .errors import ConstructionError, ValidationError


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    denominator_bound: int = 64
    max_retries: int = 100_000

    def __post_init__(self):
        if self.denominator_bound < 2:
            raise ValueError("denominator_bound must be at least 2")
        if self.max_retries < 1:
            raise ValueError("max_retries must be positive")


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent RNG stream ``index`` derived from ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


class SimilaritySampler:
    """Draws random exact similarity spaces and tracks the acceptance rate.

    ``method="reject"`` draws every off-diagonal entry independently from the
    grid and rejects invalid matrices. ``method="sequential"`` adds one
    entry at a time inside the interval allowed by the entries already
    chosen (that interval is never empty), so acceptance stays at 1; plain
    rejection accepts only about 2% of 4-point draws. ``"auto"`` means
    sequential.
    """

    def __init__(self, config: GeneratorConfig = GeneratorConfig(), rng=None):
        self.config = config
        self.rng = rng if rng is not None else stream(config.seed)
        self.attempts = 0
        self.accepted = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0

    def sample(self, n: int, method: str = "auto") -> SimilaritySpace:
        if n < 1:
            raise ValueError("n must be at least 1")
        if method == "auto":
            method = "sequential"
        draw = {"reject": self._draw_reject, "sequential": self._draw_sequential}[method]
        for _ in range(self.config.max_retries):
            self.attempts += 1
            Z = draw(n)
            if Z is None:
                continue
            try:
                space = SimilaritySpace(Z)
            except ValidationError:
                continue
            self.accepted += 1
            return space
        raise ConstructionError(
            f"no valid {n}-point space after {self.config.max_retries} draws "
            f"(acceptance rate {self.acceptance_rate:.3g})"
        )

    def _grid(self, lo: Fraction, hi: Fraction, hi_open: bool) -> Optional[Fraction]:
        D = self.config.denominator_bound
        kmin = max(1, math.ceil(lo * D))
        kmax = min(D - 1, math.floor(hi * D))
        if hi_open and Fraction(kmax, D) >= hi:
            kmax -= 1
        if kmin > kmax:
            return None
        return Fraction(int(self.rng.integers(kmin, kmax + 1)), D)

    def _draw_reject(self, n: int):
        D = self.config.denominator_bound
        Z = [[Fraction(1) if i == j else None for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                Z[i][j] = Z[j][i] = Fraction(int(self.rng.integers(1, D)), D)
        return Z

    def _draw_sequential(self, n: int):
        Z = [[Fraction(1) if i == j else None for j in range(n)] for i in range(n)]
        for p in range(1, n):
            for q in self.rng.permutation(p).tolist():
                lo, hi = Fraction(0), Fraction(1)
                for r in range(n):
                    zpr, zqr = Z[p][r], Z[q][r]
                    if r in (p, q) or zpr is None or zqr is None:
                        continue
                    lo = max(lo, zpr * zqr)
                    hi = min(hi, zpr / zqr, zqr / zpr)
                if lo > hi or lo >= 1:
                    return None
                if lo == hi:
                    value = lo
                else:
                    value = self._grid(lo, hi, hi_open=hi == 1)
                    if value is None:
                        value = (lo + hi) / 2
                Z[p][q] = Z[q][p] = value
        return Z


def random_similarity(n: int, config: GeneratorConfig = GeneratorConfig(),
                      method: str = "auto") -> SimilaritySpace:
    return SimilaritySampler(config).sample(n, method)


def force_entry(space: SimilaritySpace, i: int, j: int, value) -> Optional[SimilaritySpace]:
    """``space`` with ``Z[i][j] := value``, or ``None`` if that leaves the domain."""
    try:
        return space.with_entry(i, j, value)
    except ValidationError:
        return None


# ---------------------------------------------------------------------------
# deterministic families

def geodesic_circle(angles: Sequence, labels=None) -> FiniteMetricSpace:
    """Points ``p(a·π)`` on the unit circle with the geodesic (arc-length) metric.

    ``angles`` are rational multiples of π (``Fraction`` or strings like
    ``"3/4"``); distances are floats.
    """
    turns = [Fraction(a) % 2 for a in angles]
    if len(set(turns)) != len(turns):
        raise ValidationError("duplicate angles modulo 2π")
    n = len(turns)
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(turns[i] - turns[j])
            d[i][j] = d[j][i] = float(min(gap, 2 - gap)) * math.pi
    return FiniteMetricSpace(d, labels)


def graph_distances(weighted_edges: Iterable[Tuple[int, int, object]], n: Optional[int] = None):
    """All-pairs shortest-path matrix by Floyd–Warshall (keeps ``Fraction`` weights exact)."""
    edges = [(int(u), int(v), w) for u, v, w in weighted_edges]
    if n is None:
        n = 1 + max(max(u, v) for u, v, _ in edges) if edges else 0
    inf = math.inf
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for u, v, w in edges:
        if u == v:
            raise ValidationError(f"self-loop at {u}")
        if not w > 0:
            raise ValidationError(f"edge ({u}, {v}) has non-positive weight {w}")
        if w < d[u][v]:
            d[u][v] = d[v][u] = w
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == inf:
                continue
            di = d[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    if any(x == inf for row in d for x in row):
        raise ValidationError("graph is disconnected")
    return d


def graph_metric(weighted_edges, n: Optional[int] = None, labels=None) -> FiniteMetricSpace:
    return FiniteMetricSpace(graph_distances(weighted_edges, n), labels)


def complete_bipartite(p: int, q: int) -> List[Tuple[int, int, int]]:
    return [(i, p + j, 1) for i in range(p) for j in range(q)]


def complete_graph(n: int) -> List[Tuple[int, int, int]]:
    return [(i, j, 1) for i in range(n) for j in range(i + 1, n)]


def scale(space: FiniteMetricSpace, t) -> FiniteMetricSpace:
    if not t > 0:
        raise ValueError(f"scale factor must be positive, got {t}")
    return FiniteMetricSpace([[x * t for x in row] for row in space.d], space.labels, space.tol)


def scale_similarity(space: SimilaritySpace, t: int) -> SimilaritySpace:
    """Similarity matrix of the metric scaled by a positive integer: ``Z ** t``."""
    if not (isinstance(t, int) and t > 0):
        raise ValueError("exact similarity scaling needs a positive integer t")
    return SimilaritySpace([[x ** t for x in row] for row in space.Z], space.labels, space.tol)


def similarity_from_integer_metric(d, q: Fraction) -> SimilaritySpace:
    """``Z = q ** d`` for an integer-valued metric: the zeta matrix of ``t·d``
    with ``t = -log q``, computed exactly."""
    q = Fraction(q)
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    return SimilaritySpace([[q ** int(x) for x in row] for row in d])


@dataclass(frozen=True)
class NonPosdefWitness:
    space: SimilaritySpace
    graph: str
    q: Fraction
    t: float
    determinant: Fraction

    @property
    def metric(self) -> FiniteMetricSpace:
        return FiniteMetricSpace([[-math.log(float(z)) if i != j else 0.0
                                   for j, z in enumerate(row)]
                                  for i, row in enumerate(self.space.Z)])


_CANDIDATE_GRAPHS = (
    ("K3,2", complete_bipartite(3, 2), 5),
    ("C5", [(i, (i + 1) % 5, 1) for i in range(5)], 5),
    ("K4,1", complete_bipartite(4, 1), 5),
)


def find_non_posdef_5pt(config: GeneratorConfig = GeneratorConfig()) -> NonPosdefWitness:
    """Search scaled graph metrics ``t·d`` for a 5-point space with ``det ζ <= 0``.

    For an integer graph metric the zeta matrix of ``t·d`` is ``q ** d`` with
    ``q = exp(-t)``, so scanning rational ``q`` keeps the check exact. ``q``
    runs upwards over ``k / D`` (``D`` = denominator bound), i.e. ``t``
    shrinks until positivity first breaks; K3,2 is tried first.
    """
    D = config.denominator_bound
    for name, edges, n in _CANDIDATE_GRAPHS:
        d = graph_distances(edges, n)
        for k in range(1, D):
            q = Fraction(k, D)
            space = similarity_from_integer_metric(d, q)
            det = determinant(space)
            if det <= 0:
                return NonPosdefWitness(space, name, q, -math.log(float(q)), det)
    raise ConstructionError(f"no non-positive-definite 5-point space found with D={D}")


def four_point_subspaces_positive_definite(space: SimilaritySpace) -> bool:
    return all(is_positive_definite(restrict(space, c))
               for c in itertools.combinations(range(space.n), 4))
