"""Ingestion and basic statistics for simple undirected graphs.

Readers accept Matrix Market coordinate files (pattern or real field,
symmetric or general symmetry) and plain whitespace edge lists.  All input
is normalized the same way: loops dropped, duplicates coalesced, weights
binarized, general-symmetry entries symmetrized by union.  The writer emits
pattern-symmetric Matrix Market.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import MLConvergenceError, ParseError
from . import matfun

__all__ = [
    "Graph",
    "GraphStats",
    "parse_matrix_market",
    "load_matrix_market",
    "parse_edge_list",
    "load_edge_list",
    "to_matrix_market",
    "save_matrix_market",
    "load_graph",
    "graph_stats",
    "DENSE_EIG_CAP",
]

#: Largest order for which dense eigensolves are attempted by graph_stats.
DENSE_EIG_CAP = 3000


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: node count plus sorted (i < j) edge pairs."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 0:
            raise ParseError(f"node count must be nonnegative, got {self.n}")
        for i, j in self.edges:
            if not (0 <= i < j < self.n):
                raise ParseError(f"edge ({i}, {j}) out of range for n={self.n}")

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Sparse symmetric 0/1 adjacency matrix."""
        if not self.edges:
            return sp.csr_matrix((self.n, self.n))
        rows = [i for i, _ in self.edges] + [j for _, j in self.edges]
        cols = [j for _, j in self.edges] + [i for i, _ in self.edges]
        data = np.ones(2 * self.m)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    degrees: np.ndarray
    rho: float
    lambda2: float | None


def _normalize_edges(n: int, raw_edges) -> tuple[tuple[int, int], ...]:
    seen = set()
    for i, j in raw_edges:
        if i == j:
            continue  # loops dropped
        a, b = (i, j) if i < j else (j, i)
        seen.add((a, b))
    return tuple(sorted(seen))


def _line_iter(source) -> tuple:
    """Accept a path, file object, str content or bytes content."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        path = Path(source)
        if path.exists():
            return path.read_text().splitlines(), str(path)
    if isinstance(source, bytes):
        return source.decode("utf-8").splitlines(), "<bytes>"
    if isinstance(source, str):
        return source.splitlines(), "<string>"
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return data.splitlines(), "<stream>"
    raise ParseError(f"cannot read graph from {type(source).__name__}")


def parse_matrix_market(source) -> Graph:
    """Parse a Matrix Market coordinate file into a normalized Graph.

    The declared dimensions fix the node count, so isolated nodes are
    preserved.  1-based indices become 0-based; pattern and real fields are
    accepted and values are discarded (binarized); 'general' symmetry is
    symmetrized by union; loops are dropped and duplicates coalesced.
    """
    lines, origin = _line_iter(source)
    if not lines:
        raise ParseError(f"{origin}: empty input")
    header = lines[0].strip().split()
    if len(header) < 5 or header[0] != "%%MatrixMarket":
        raise ParseError(f"{origin}: missing %%MatrixMarket header")
    _, obj, fmt, field, symmetry = header[:5]
    if obj.lower() != "matrix" or fmt.lower() != "coordinate":
        raise ParseError(f"{origin}: only 'matrix coordinate' files are supported")
    field = field.lower()
    if field not in ("pattern", "real", "integer"):
        raise ParseError(f"{origin}: unsupported field {field!r}")
    symmetry = symmetry.lower()
    if symmetry not in ("symmetric", "general"):
        raise ParseError(f"{origin}: unsupported symmetry {symmetry!r}")

    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ParseError(f"{origin}: missing size line")
    size = body[0].split()
    if len(size) != 3:
        raise ParseError(f"{origin}: malformed size line {body[0]!r}")
    try:
        rows, cols, nnz = (int(tok) for tok in size)
    except ValueError as exc:
        raise ParseError(f"{origin}: malformed size line {body[0]!r}") from exc
    if rows != cols:
        raise ParseError(f"{origin}: adjacency must be square, got {rows}x{cols}")
    entries = body[1:]
    if len(entries) != nnz:
        raise ParseError(f"{origin}: expected {nnz} entries, found {len(entries)}")

    raw = []
    for ln in entries:
        toks = ln.split()
        if len(toks) < 2 or (field != "pattern" and len(toks) < 3):
            raise ParseError(f"{origin}: malformed entry {ln!r}")
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError as exc:
            raise ParseError(f"{origin}: non-integer index in {ln!r}") from exc
        if not (1 <= i <= rows and 1 <= j <= rows):
            raise ParseError(f"{origin}: index out of bounds in {ln!r}")
        raw.append((i - 1, j - 1))
    return Graph(n=rows, edges=_normalize_edges(rows, raw))


def load_matrix_market(path) -> Graph:
    return parse_matrix_market(Path(path))


def parse_edge_list(source) -> Graph:
    """Parse a whitespace 'i j' edge list (0-based) with '#' comments.

    The node count is inferred as 1 + the largest index seen.
    """
    lines, origin = _line_iter(source)
    raw = []
    top = -1
    for ln in lines:
        stripped = ln.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = stripped.split()
        if len(toks) != 2:
            raise ParseError(f"{origin}: expected 'i j', got {ln!r}")
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError as exc:
            raise ParseError(f"{origin}: non-integer token in {ln!r}") from exc
        if i < 0 or j < 0:
            raise ParseError(f"{origin}: negative index in {ln!r}")
        top = max(top, i, j)
        raw.append((i, j))
    n = top + 1
    return Graph(n=n, edges=_normalize_edges(n, raw))


def load_edge_list(path) -> Graph:
    return parse_edge_list(Path(path))


def to_matrix_market(g: Graph, comment: str | None = None) -> str:
    """Serialize as pattern-symmetric Matrix Market (lower-triangle entries)."""
    out = ["%%MatrixMarket matrix coordinate pattern symmetric"]
    if comment:
        for ln in comment.splitlines():
            out.append(f"% {ln}")
    out.append(f"{g.n} {g.n} {g.m}")
    for i, j in g.edges:
        out.append(f"{j + 1} {i + 1}")  # store the lower triangle, 1-based
    return "\n".join(out) + "\n"


def save_matrix_market(g: Graph, path, comment: str | None = None) -> None:
    Path(path).write_text(to_matrix_market(g, comment))


def load_graph(path) -> Graph:
    """Dispatch on content: Matrix Market if the header is present,
    otherwise a plain edge list."""
    text = Path(path).read_text()
    if text.lstrip().startswith("%%MatrixMarket"):
        return parse_matrix_market(text)
    return parse_edge_list(text)


def graph_stats(g: Graph, tol: float = 1e-8) -> GraphStats:
    """Node/edge counts, degrees, spectral radius and second eigenvalue.

    The spectral radius comes from power iteration; if that stalls (tiny
    spectral gap) and the graph is within the dense cap, a dense
    eigendecomposition takes over.  lambda2 is only available on the dense
    path.
    """
    if g.n == 0:
        raise ParseError("graph_stats requires at least one node")
    if g.m == 0:
        return GraphStats(n=g.n, m=0, degrees=g.degrees, rho=0.0, lambda2=0.0)
    lambda2 = None
    rho = None
    try:
        rho = matfun.spectral_radius(g.adjacency, tol=tol)
    except MLConvergenceError:
        pass
    if g.n <= DENSE_EIG_CAP:
        w = np.linalg.eigvalsh(g.dense())
        lambda2 = float(w[-2]) if g.n >= 2 else None
        if rho is None:
            rho = float(max(abs(w[0]), w[-1]))
    if rho is None:
        raise MLConvergenceError(
            f"spectral radius did not converge and n={g.n} exceeds the dense cap"
        )
    return GraphStats(n=g.n, m=g.m, degrees=g.degrees, rho=float(rho), lambda2=lambda2)


def largest_component(g: Graph) -> np.ndarray:
    """Boolean mask of the largest connected component (ties broken by the
    smallest contained node index)."""
    n = g.n
    neighbors = [[] for _ in range(n)]
    for i, j in g.edges:
        neighbors[i].append(j)
        neighbors[j].append(i)
    seen = np.full(n, -1, dtype=np.int64)
    comp = 0
    best_comp, best_size, best_min = -1, -1, n
    for start in range(n):
        if seen[start] >= 0:
            continue
        stack = [start]
        seen[start] = comp
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for w in neighbors[u]:
                if seen[w] < 0:
                    seen[w] = comp
                    stack.append(w)
        if size > best_size:
            best_comp, best_size, best_min = comp, size, start
        comp += 1
    return seen == best_comp
