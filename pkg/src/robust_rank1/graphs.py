"""Simple undirected and bipartite graph containers.

Vertices are numbered from 1 in both types, matching the text formats.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["Graph", "BipartiteGraph"]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``1..num_vertices``.

    ``edges`` keeps the input order (edge ``q`` is ``edges[q]``) with each
    pair normalized to ``(i, j)``, ``i < j``.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.num_vertices < 1:
            raise ValueError("a graph needs at least one vertex")
        seen = set()
        normalized = []
        for edge in self.edges:
            i, j = (int(x) for x in edge)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            i, j = min(i, j), max(i, j)
            if i < 1 or j > self.num_vertices:
                raise ValueError(
                    f"edge ({i}, {j}) out of range 1..{self.num_vertices}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            normalized.append((i, j))
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def cut_size(self, side) -> int:
        """Number of edges crossing the bipartition given by a 0/1 vector."""
        return sum(1 for i, j in self.edges if side[i - 1] != side[j - 1])

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, tuple((i, j) for i in range(1, n + 1)
                            for j in range(i + 1, n + 1)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, tuple((i, i % n + 1) for i in range(1, n + 1)))


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph with left vertices ``1..left_size`` and right ``1..right_size``."""

    left_size: int
    right_size: int
    edges: frozenset = field(default=frozenset())

    def __post_init__(self):
        if self.left_size < 1 or self.right_size < 1:
            raise ValueError("both sides need at least one vertex")
        edges = set()
        for s, t in self.edges:
            s, t = int(s), int(t)
            if not (1 <= s <= self.left_size and 1 <= t <= self.right_size):
                raise ValueError(f"edge ({s}, {t}) out of range")
            edges.add((s, t))
        object.__setattr__(self, "edges", frozenset(edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edges_between(self, left, right) -> int:
        """Count of edges inside ``left x right`` (1-based vertex sets)."""
        left, right = set(left), set(right)
        return sum(1 for s, t in self.edges if s in left and t in right)
