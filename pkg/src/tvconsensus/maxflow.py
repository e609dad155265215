"""Min-cut subproblem: augmented source/sink network and an exact max-flow solver.

Given a graph, a mean-zero node field u, and a penalty level lam, the network
couples every adjacent vertex pair with two opposite arcs of capacity lam and
attaches vertices to a source (where u > 0) or a sink (where u < 0) with
capacity |u|.  A minimum s-t cut with source side A then satisfies

    cut(A) = lam * perimeter(A) - <u, 1_A> + sum of positive u,

so minimizing the cut maximizes <u, 1_A> - lam * perimeter(A) over all subsets.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .graph import Graph, check_node_field, perimeter

# Residual capacities at or below this threshold are treated as saturated.
RESIDUAL_EPS = 1e-12

# Largest |mean(u)| accepted as "mean zero".
MEAN_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class FlowNetwork:
    """Directed capacitated network over vertices 0..n-1 plus source and sink.

    ``capacity[i, j]`` accumulates all arc capacity from node i to node j;
    the source is node ``n`` and the sink node ``n + 1``.
    """

    n_graph_vertices: int
    capacity: np.ndarray

    @property
    def source(self) -> int:
        return self.n_graph_vertices

    @property
    def sink(self) -> int:
        return self.n_graph_vertices + 1

    @property
    def total_source_capacity(self) -> float:
        return float(self.capacity[self.source].sum())

    def arcs(self) -> list[tuple[int, int, float]]:
        rows, cols = np.nonzero(self.capacity)
        return [(int(i), int(j), float(self.capacity[i, j])) for i, j in zip(rows, cols)]


@dataclass(frozen=True)
class CutResult:
    """Minimum cut with its dual certificate.

    ``source_side`` excludes the source node itself; ``flow`` holds the net
    flow matrix of a maximum flow so conservation and capacity constraints
    can be audited.
    """

    source_side: frozenset[int]
    cut_value: float
    max_flow_value: float
    flow: np.ndarray = field(repr=False)


def build_network(g: Graph, u, lam: float) -> FlowNetwork:
    """Assemble the min-cut network for (g, u, lam); u must have zero mean."""
    u = check_node_field(g, u)
    if not lam > 0.0:
        raise DomainError(f"penalty level must be positive, got {lam}")
    if abs(float(u.mean())) > MEAN_ZERO_TOL:
        raise DomainError(
            f"node field must have zero mean within {MEAN_ZERO_TOL}, got {u.mean()}"
        )
    n = g.n_vertices
    cap = np.zeros((n + 2, n + 2), dtype=float)
    src, dst = g.edge_src, g.edge_dst
    cap[src, dst] = lam
    cap[dst, src] = lam
    positive = u > 0.0
    negative = u < 0.0
    cap[n, : n][positive] = u[positive]
    cap[: n, n + 1][negative] = -u[negative]
    return FlowNetwork(n_graph_vertices=n, capacity=cap)


def _bfs_augmenting_path(residual: np.ndarray, source: int, sink: int) -> np.ndarray | None:
    """Shortest augmenting path by BFS; returns the parent array or None."""
    n_nodes = residual.shape[0]
    parent = np.full(n_nodes, -1, dtype=np.intp)
    parent[source] = source
    queue = deque([source])
    while queue:
        node = queue.popleft()
        open_arcs = np.nonzero((residual[node] > RESIDUAL_EPS) & (parent < 0))[0]
        for nxt in open_arcs:
            parent[nxt] = node
            if nxt == sink:
                return parent
            queue.append(nxt)
    return None


def min_cut(net: FlowNetwork) -> CutResult:
    """Exact max flow via shortest augmenting paths, then the canonical cut.

    The returned source side is the set of vertices reachable from the source
    in the final residual network (the minimal minimum cut); ties between
    minimum cuts are resolved that way deterministically.
    """
    residual = net.capacity.copy()
    source, sink = net.source, net.sink
    flow_value = 0.0
    while True:
        parent = _bfs_augmenting_path(residual, source, sink)
        if parent is None:
            break
        bottleneck = np.inf
        node = sink
        while node != source:
            prev = int(parent[node])
            bottleneck = min(bottleneck, residual[prev, node])
            node = prev
        node = sink
        while node != source:
            prev = int(parent[node])
            residual[prev, node] -= bottleneck
            residual[node, prev] += bottleneck
            node = prev
        flow_value += float(bottleneck)

    reachable = np.zeros(residual.shape[0], dtype=bool)
    reachable[source] = True
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for nxt in np.nonzero((residual[node] > RESIDUAL_EPS) & ~reachable)[0]:
            reachable[nxt] = True
            queue.append(nxt)

    cut_value = float(net.capacity[reachable][:, ~reachable].sum())
    side = frozenset(int(v) for v in np.nonzero(reachable[: net.n_graph_vertices])[0])
    net_flow = np.maximum(net.capacity - residual, 0.0)
    return CutResult(
        source_side=side,
        cut_value=cut_value,
        max_flow_value=flow_value,
        flow=net_flow,
    )


def maximize_cut_functional(g: Graph, u, lam: float) -> tuple[frozenset[int], float]:
    """Maximize <u, 1_A> - lam * perimeter(A) over all subsets A of V.

    The empty set and the full vertex set are legal maximizers (both give
    value 0 for mean-zero u), so the returned value is always nonnegative.
    """
    u = check_node_field(g, u)
    result = min_cut(build_network(g, u, lam))
    subset = result.source_side
    value = float(u[list(subset)].sum()) - lam * perimeter(g, subset) if subset else 0.0
    return subset, value
