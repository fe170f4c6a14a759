"""Plain-text formats for matrices, factor pairs and graphs.

All formats skip blank lines and treat everything after ``#`` as a comment.
Diagnostics report 1-based line numbers.

Matrix::

    m n
    <m lines of n numbers>

Factor pair::

    factors m n
    <m numbers: u>
    <n numbers: v>

Graph::

    nv ne
    <ne lines "i j", 1-based>

Bipartite graph::

    m n e
    <e lines "i j", 1-based>
"""

from __future__ import annotations

import math

import numpy as np

from .community import from_biadjacency
from .core import RankOneFactors
from .graphs import BipartiteGraph, Graph
from .validation import check_matrix

__all__ = [
    "MatrixFormatError",
    "parse_matrix",
    "serialize_matrix",
    "parse_factors",
    "serialize_factors",
    "parse_graph",
    "serialize_graph",
    "parse_bipartite_graph",
    "serialize_bipartite_graph",
    "load_bipartite",
    "format_number",
]


class MatrixFormatError(ValueError):
    """Malformed text input; the message carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body.split()


def _parse_float(token, lineno):
    try:
        x = float(token)
    except ValueError:
        raise MatrixFormatError(f"non-numeric token {token!r}", lineno) from None
    if not math.isfinite(x):
        raise MatrixFormatError(f"non-finite value {token!r}", lineno)
    return x


def _parse_int_header(tokens, lineno, names):
    if len(tokens) != len(names):
        raise MatrixFormatError(
            f"malformed header, expected '{' '.join(names)}'", lineno)
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise MatrixFormatError(
            f"malformed header, expected integers '{' '.join(names)}'", lineno) from None
    return values


def format_number(x: float) -> str:
    """Shortest decimal text that parses back to exactly ``x``."""
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def parse_matrix(text: str) -> np.ndarray:
    lines = _content_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise MatrixFormatError("empty input, expected header 'm n'") from None
    m, n = _parse_int_header(tokens, lineno, ("m", "n"))
    if m < 1 or n < 1:
        raise MatrixFormatError("malformed header, dimensions must be positive", lineno)
    rows = []
    for lineno, tokens in lines:
        if len(rows) == m:
            raise MatrixFormatError(f"unexpected extra row (header declares {m} rows)", lineno)
        if len(tokens) != n:
            raise MatrixFormatError(
                f"row {len(rows) + 1} has {len(tokens)} of {n} expected entries", lineno)
        rows.append([_parse_float(t, lineno) for t in tokens])
    if len(rows) != m:
        raise MatrixFormatError(f"expected {m} rows, found {len(rows)}")
    return np.array(rows, dtype=np.float64)


def serialize_matrix(M, comments=()) -> str:
    M = check_matrix(M)
    out = [f"# {c}" for c in comments]
    out.append(f"{M.shape[0]} {M.shape[1]}")
    out.extend(" ".join(format_number(x) for x in row) for row in M)
    return "\n".join(out) + "\n"


def parse_factors(text: str) -> RankOneFactors:
    lines = _content_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise MatrixFormatError("empty input, expected header 'factors m n'") from None
    if not tokens or tokens[0] != "factors":
        raise MatrixFormatError("malformed header, expected 'factors m n'", lineno)
    m, n = _parse_int_header(tokens[1:], lineno, ("m", "n"))
    vectors = []
    for lineno, tokens in lines:
        if len(vectors) == 2:
            raise MatrixFormatError("unexpected extra line after u and v", lineno)
        expected = m if not vectors else n
        name = "u" if not vectors else "v"
        if len(tokens) != expected:
            raise MatrixFormatError(
                f"{name} has {len(tokens)} of {expected} expected entries", lineno)
        vectors.append([_parse_float(t, lineno) for t in tokens])
    if len(vectors) != 2:
        raise MatrixFormatError("expected two lines (u and v)")
    return RankOneFactors(vectors[0], vectors[1])


def serialize_factors(f: RankOneFactors, comments=()) -> str:
    out = [f"# {c}" for c in comments]
    out.append(f"factors {f.u.size} {f.v.size}")
    out.append(" ".join(format_number(x) for x in f.u))
    out.append(" ".join(format_number(x) for x in f.v))
    return "\n".join(out) + "\n"


def _parse_edges(lines, count):
    edges = []
    for lineno, tokens in lines:
        if len(edges) == count:
            raise MatrixFormatError(f"unexpected extra edge (header declares {count})", lineno)
        if len(tokens) != 2:
            raise MatrixFormatError("edge line must be 'i j'", lineno)
        try:
            edges.append((lineno, int(tokens[0]), int(tokens[1])))
        except ValueError:
            raise MatrixFormatError("edge endpoints must be integers", lineno) from None
    if len(edges) != count:
        raise MatrixFormatError(f"expected {count} edges, found {len(edges)}")
    return edges


def parse_graph(text: str) -> Graph:
    lines = _content_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise MatrixFormatError("empty input, expected header 'nv ne'") from None
    nv, ne = _parse_int_header(tokens, lineno, ("nv", "ne"))
    if nv < 1:
        raise MatrixFormatError("malformed header, need at least one vertex", lineno)
    edges, seen = [], set()
    for lineno, i, j in _parse_edges(lines, ne):
        key = (min(i, j), max(i, j))
        if i == j:
            raise MatrixFormatError(f"self-loop at vertex {i}", lineno)
        if key[0] < 1 or key[1] > nv:
            raise MatrixFormatError(f"edge ({i}, {j}) out of range 1..{nv}", lineno)
        if key in seen:
            raise MatrixFormatError(f"duplicate edge ({i}, {j})", lineno)
        seen.add(key)
        edges.append(key)
    return Graph(nv, tuple(edges))


def serialize_graph(G: Graph) -> str:
    out = [f"{G.num_vertices} {G.num_edges}"]
    out.extend(f"{i} {j}" for i, j in G.edges)
    return "\n".join(out) + "\n"


def parse_bipartite_graph(text: str) -> BipartiteGraph:
    lines = _content_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise MatrixFormatError("empty input, expected header 'm n e'") from None
    m, n, e = _parse_int_header(tokens, lineno, ("m", "n", "e"))
    seen = set()
    for lineno, s, t in _parse_edges(lines, e):
        if not (1 <= s <= m and 1 <= t <= n):
            raise MatrixFormatError(f"edge ({s}, {t}) out of range", lineno)
        if (s, t) in seen:
            raise MatrixFormatError(f"duplicate edge ({s}, {t})", lineno)
        seen.add((s, t))
    return BipartiteGraph(m, n, frozenset(seen))


def serialize_bipartite_graph(G: BipartiteGraph) -> str:
    out = [f"{G.left_size} {G.right_size} {G.num_edges}"]
    out.extend(f"{s} {t}" for s, t in sorted(G.edges))
    return "\n".join(out) + "\n"


def load_bipartite(text: str) -> BipartiteGraph:
    """Read either a bipartite edge list or a biadjacency matrix file."""
    first = next(_content_lines(text), (None, []))[1]
    if len(first) == 3:
        return parse_bipartite_graph(text)
    return from_biadjacency(parse_matrix(text))
