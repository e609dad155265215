"""Undirected graphs with a fixed edge orientation, discrete calculus, and graph I/O.

Vertices are dense 0-based integers. Every edge carries one fixed orientation
(lowest id first by default) so that gradients of node fields live on oriented
edges; quantities that must not depend on the orientation are covered by the
test suite with explicit orientation flips.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence

import numpy as np

from .errors import InvalidFieldError, InvalidSubsetError


class Graph:
    """Immutable undirected graph without self-loops or duplicate edges.

    Connectivity is computed once at construction and cached; operations that
    require a connected graph check the ``is_connected`` flag.
    """

    __slots__ = (
        "_n",
        "_src",
        "_dst",
        "_adjacency",
        "_degrees",
        "_connected",
        "_edge_set",
    )

    def __init__(
        self,
        n_vertices: int,
        edges: Iterable[tuple[int, int]],
        oriented_edges: Iterable[tuple[int, int]] | None = None,
    ) -> None:
        if n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        self._n = int(n_vertices)

        canonical: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        for pair in edges:
            v, w = int(pair[0]), int(pair[1])
            if not (0 <= v < self._n and 0 <= w < self._n):
                raise ValueError(f"edge ({v}, {w}) references an unknown vertex")
            if v == w:
                raise ValueError(f"self-loop at vertex {v} is not allowed")
            key = (min(v, w), max(v, w))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canonical.append(key)
        canonical.sort()
        self._edge_set = frozenset(canonical)

        if oriented_edges is None:
            oriented = canonical
        else:
            oriented = [(int(v), int(w)) for v, w in oriented_edges]
            keys = sorted((min(v, w), max(v, w)) for v, w in oriented)
            if keys != canonical or len(oriented) != len(canonical):
                raise ValueError("oriented_edges must contain exactly one orientation per edge")
            oriented = sorted(oriented, key=lambda e: (min(e), max(e)))

        self._src = np.array([e[0] for e in oriented], dtype=np.intp)
        self._dst = np.array([e[1] for e in oriented], dtype=np.intp)
        self._src.setflags(write=False)
        self._dst.setflags(write=False)

        neighbors: list[list[int]] = [[] for _ in range(self._n)]
        for v, w in canonical:
            neighbors[v].append(w)
            neighbors[w].append(v)
        self._adjacency = tuple(tuple(sorted(ns)) for ns in neighbors)
        self._degrees = np.array([len(ns) for ns in self._adjacency], dtype=np.intp)
        self._degrees.setflags(write=False)
        self._connected = self._compute_connected()

    def _compute_connected(self) -> bool:
        if self._n == 1:
            return True
        seen = np.zeros(self._n, dtype=bool)
        queue = deque([0])
        seen[0] = True
        while queue:
            v = queue.popleft()
            for w in self._adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        return bool(seen.all())

    @property
    def n_vertices(self) -> int:
        return self._n

    @property
    def n_edges(self) -> int:
        return len(self._src)

    @property
    def oriented_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((int(v), int(w)) for v, w in zip(self._src, self._dst))

    @property
    def edge_src(self) -> np.ndarray:
        return self._src

    @property
    def edge_dst(self) -> np.ndarray:
        return self._dst

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def is_connected(self) -> bool:
        return self._connected

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adjacency[int(v)]

    def degree(self, v: int) -> int:
        return int(self._degrees[int(v)])

    def has_edge(self, v: int, w: int) -> bool:
        return (min(int(v), int(w)), max(int(v), int(w))) in self._edge_set

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Subgraph on ``vertices``; returns (graph, sorted original ids)."""
        subset = check_subset(self, vertices)
        kept = tuple(sorted(subset))
        if not kept:
            raise InvalidSubsetError("induced subgraph needs at least one vertex")
        index = {old: new for new, old in enumerate(kept)}
        edges = [
            (index[v], index[w])
            for v, w in self._edge_set
            if v in subset and w in subset
        ]
        return Graph(len(kept), sorted(edges)), kept

    def __repr__(self) -> str:
        return f"Graph(n_vertices={self._n}, n_edges={self.n_edges})"


def check_node_field(g: Graph, values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Validate and return a node field as a float64 array of length |V|."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.shape[0] != g.n_vertices:
        raise InvalidFieldError(
            f"node field must have length {g.n_vertices}, got shape {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise InvalidFieldError("node field must be finite")
    return x


def check_edge_field(g: Graph, values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Validate and return an edge field as a float64 array of length |E|."""
    xi = np.asarray(values, dtype=float)
    if xi.ndim != 1 or xi.shape[0] != g.n_edges:
        raise InvalidFieldError(
            f"edge field must have length {g.n_edges}, got shape {xi.shape}"
        )
    if not np.all(np.isfinite(xi)):
        raise InvalidFieldError("edge field must be finite")
    return xi


def check_subset(g: Graph, vertices: Iterable[int]) -> frozenset[int]:
    subset = frozenset(int(v) for v in vertices)
    for v in subset:
        if not 0 <= v < g.n_vertices:
            raise InvalidSubsetError(f"unknown vertex id {v}")
    return subset


def grad(g: Graph, x: Sequence[float] | np.ndarray) -> np.ndarray:
    """Gradient of a node field: (v, w) maps to x(w) - x(v) per oriented edge."""
    x = check_node_field(g, x)
    return x[g.edge_dst] - x[g.edge_src]


def div(g: Graph, xi: Sequence[float] | np.ndarray) -> np.ndarray:
    """Divergence of an edge field: outgoing minus incoming flux at each vertex.

    Adjoint to ``grad`` up to sign: <grad x, xi> = -<x, div xi>, so the entries
    of the result always sum to zero.
    """
    xi = check_edge_field(g, xi)
    n = g.n_vertices
    return np.bincount(g.edge_src, weights=xi, minlength=n) - np.bincount(
        g.edge_dst, weights=xi, minlength=n
    )


def laplacian_apply(g: Graph, x: Sequence[float] | np.ndarray) -> np.ndarray:
    """Apply the combinatorial graph Laplacian, -div(grad(x))."""
    return -div(g, grad(g, x))


def perimeter(g: Graph, subset: Iterable[int]) -> int:
    """Number of edges with exactly one endpoint in ``subset``."""
    chosen = check_subset(g, subset)
    mask = np.zeros(g.n_vertices, dtype=bool)
    mask[list(chosen)] = True
    return int(np.count_nonzero(mask[g.edge_src] != mask[g.edge_dst]))


def connected_components(g: Graph, subset: Iterable[int]) -> list[frozenset[int]]:
    """Maximal connected pieces of the subgraph induced by ``subset``."""
    chosen = check_subset(g, subset)
    remaining = set(chosen)
    pieces: list[frozenset[int]] = []
    while remaining:
        root = min(remaining)
        component = {root}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if w in remaining and w not in component:
                    component.add(w)
                    queue.append(w)
        remaining -= component
        pieces.append(frozenset(component))
    pieces.sort(key=min)
    return pieces


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def complete_graph(n: int) -> Graph:
    return Graph(n, [(v, w) for v in range(n) for w in range(v + 1, n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(v, v + 1) for v in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(v, (v + 1) % n) for v in range(n)])


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with a seeded generator; connectivity is not guaranteed."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must be in [0, 1]")
    rng = np.random.default_rng(seed)
    edges = [
        (v, w)
        for v in range(n)
        for w in range(v + 1, n)
        if rng.random() < p
    ]
    return Graph(n, edges)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def load_edge_list(path: str) -> Graph:
    """Read a graph from text: one ``u v`` pair per line, ``#`` starts a comment.

    The vertex count is inferred as (largest id + 1); trailing isolated
    vertices therefore cannot be represented by this format.
    """
    edges: list[tuple[int, int]] = []
    max_id = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {raw!r}")
            try:
                v, w = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: vertex ids must be integers") from exc
            if v < 0 or w < 0:
                raise ValueError(f"{path}:{lineno}: vertex ids must be nonnegative")
            edges.append((v, w))
            max_id = max(max_id, v, w)
    if not edges:
        raise ValueError(f"{path}: no edges found")
    return Graph(max_id + 1, edges)


def save_edge_list(g: Graph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v, w in g.oriented_edges:
            fh.write(f"{v} {w}\n")


def read_node_field(path: str, n_vertices: int) -> np.ndarray:
    """Read a node field from text: one value per line, ``#`` starts a comment."""
    values: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: expected a number, got {raw!r}") from exc
    if len(values) != n_vertices:
        raise InvalidFieldError(
            f"{path}: expected {n_vertices} values, found {len(values)}"
        )
    x = np.array(values, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidFieldError(f"{path}: values must be finite")
    return x
