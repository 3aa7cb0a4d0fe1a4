"""Weighted graph instances: data model, edge-list parsing and generators.

Instance file format::

    # comment
    N
    i j w
    ...

Indices are 0-based, weights are non-negative decimals. Blank lines and
anything after ``#`` are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


class InstanceError(ValueError):
    """Invalid instance text or graph parameters."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


Edge = tuple[int, int, float]


@dataclass(frozen=True)
class WeightedGraph:
    vertex_count: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        n = self.vertex_count
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InstanceError(f"vertex count must be a positive integer, got {n!r}")
        edges = []
        seen = set()
        for k, edge in enumerate(self.edges):
            i, j, w = edge
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise InstanceError(f"edge {k}: self-loop on vertex {i}")
            if i > j:
                i, j = j, i
            if i < 0 or j >= n:
                raise InstanceError(f"edge {k}: vertex index out of range [0, {n})")
            if not math.isfinite(w) or w < 0:
                raise InstanceError(f"edge {k}: weight must be finite and >= 0, got {w}")
            if (i, j) in seen:
                raise InstanceError(f"edge {k}: duplicate edge ({i}, {j})")
            seen.add((i, j))
            edges.append((i, j, w))
        object.__setattr__(self, "vertex_count", int(n))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def n(self) -> int:
        return self.vertex_count

    def weight_matrix(self) -> np.ndarray:
        """Symmetric dense matrix of edge weights, zero diagonal."""
        a = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            a[i, j] = a[j, i] = w
        return a

    def render(self) -> str:
        lines = [str(self.n)]
        lines += [f"{i} {j} {w!r}" for i, j, w in self.edges]
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "vertices": self.n,
            "edges": len(self.edges),
            "total_weight": total_weight(self),
        }


def total_weight(g: WeightedGraph) -> float:
    """W = half the sum of all edge weights."""
    return 0.5 * math.fsum(w for _, _, w in g.edges)


def disjoint_union(g: WeightedGraph, h: WeightedGraph) -> WeightedGraph:
    shift = g.n
    edges = list(g.edges) + [(i + shift, j + shift, w) for i, j, w in h.edges]
    return WeightedGraph(g.n + h.n, tuple(edges))


def parse_instance(text: str) -> WeightedGraph:
    n = None
    edges: list[Edge] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 1:
                raise InstanceError("expected vertex count on first line", lineno)
            try:
                n = int(fields[0])
            except ValueError:
                raise InstanceError(f"bad vertex count {fields[0]!r}", lineno) from None
            if n < 1:
                raise InstanceError("vertex count must be >= 1", lineno)
            continue
        if len(fields) != 3:
            raise InstanceError(f"expected 'i j w', got {line!r}", lineno)
        try:
            i, j = int(fields[0]), int(fields[1])
            w = float(fields[2])
        except ValueError:
            raise InstanceError(f"malformed edge {line!r}", lineno) from None
        if not math.isfinite(w):
            raise InstanceError(f"non-finite weight {fields[2]!r}", lineno)
        if w < 0:
            raise InstanceError(f"negative weight {w}", lineno)
        if i == j:
            raise InstanceError(f"self-loop on vertex {i}", lineno)
        if not (0 <= i < n and 0 <= j < n):
            raise InstanceError(f"vertex index out of range [0, {n})", lineno)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise InstanceError(f"duplicate edge {key} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        edges.append((key[0], key[1], w))
    if n is None:
        raise InstanceError("empty instance: missing vertex count")
    return WeightedGraph(n, tuple(edges))


def load_instance(path) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- generators ---------------------------------------------------------------


def _check_weight(w: float) -> float:
    w = float(w)
    if not math.isfinite(w) or w < 0:
        raise InstanceError(f"weight must be finite and >= 0, got {w}")
    return w


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise InstanceError(f"n must be a positive integer, got {n}")
    return int(n)


def single_edge(w: float = 2.0) -> WeightedGraph:
    return WeightedGraph(2, ((0, 1, _check_weight(w)),))


def cycle(n: int, w: float = 1.0) -> WeightedGraph:
    n, w = _check_n(n), _check_weight(w)
    if n == 1:
        return WeightedGraph(1)
    if n == 2:
        return WeightedGraph(2, ((0, 1, w),))
    return WeightedGraph(n, tuple((k, (k + 1) % n, w) for k in range(n)))


def complete(n: int, w: float = 1.0) -> WeightedGraph:
    n, w = _check_n(n), _check_weight(w)
    return WeightedGraph(n, tuple((i, j, w) for i in range(n) for j in range(i + 1, n)))


def random_graph(n: int, p: float, w_max: float = 1.0, seed: int = 0) -> WeightedGraph:
    """Erdos-Renyi graph with weights uniform on (0, w_max]."""
    n = _check_n(n)
    if not 0.0 <= p <= 1.0:
        raise InstanceError(f"edge probability must lie in [0, 1], got {p}")
    w_max = _check_weight(w_max)
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            keep = rng.random() < p
            w = w_max * (1.0 - rng.random())
            if keep:
                edges.append((i, j, w))
    return WeightedGraph(n, tuple(edges))


def generate(spec: str) -> WeightedGraph:
    """Build a graph from a generator string such as ``cycle:5:1`` or ``random:6:0.5:1:7``."""
    kind, *args = spec.strip().split(":")
    try:
        if kind == "single_edge":
            return single_edge(*(float(a) for a in args))
        if kind in ("cycle", "complete"):
            if not 1 <= len(args) <= 2:
                raise InstanceError(f"{kind} takes n[:w]")
            n = int(args[0])
            w = float(args[1]) if len(args) > 1 else 1.0
            return cycle(n, w) if kind == "cycle" else complete(n, w)
        if kind == "random":
            if not 2 <= len(args) <= 4:
                raise InstanceError("random takes n:p[:w_max[:seed]]")
            n, p = int(args[0]), float(args[1])
            w_max = float(args[2]) if len(args) > 2 else 1.0
            seed = int(args[3]) if len(args) > 3 else 0
            return random_graph(n, p, w_max, seed)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(f"bad generator spec {spec!r}: {exc}") from None
    raise InstanceError(f"unknown generator kind {kind!r}")


def edgeless(n: int) -> WeightedGraph:
    return WeightedGraph(_check_n(n))


def from_edges(n: int, edges: Iterable[Edge]) -> WeightedGraph:
    return WeightedGraph(n, tuple(edges))
