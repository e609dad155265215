"""Dual norm of mean-zero node fields with respect to the graph TV norm.

The dual norm equals the best subset ratio |<u, 1_S>| / perimeter(S).  The
production path is a ratio iteration: given a current ratio lam, a min-cut
call maximizes <u, 1_A> - lam * perimeter(A); a strictly positive maximum
yields a strictly better ratio, and the perimeter of the maximizer drops by
at least one edge per improvement, so the number of min-cut calls never
exceeds |E|.  A subset-enumeration oracle is provided for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeCapError, UnsupportedGraphError
from .graph import Graph, check_node_field, perimeter
from .maxflow import maximize_cut_functional

# Relative stagnation tolerance on the ratio sequence.
RATIO_STAGNATION_RTOL = 1e-12


@dataclass(frozen=True)
class DualNormResult:
    """Dual norm value with the subset achieving it.

    ``iterations`` counts min-cut calls of the ratio iteration (0 for the
    enumeration oracle and for the zero field).  ``anomaly`` is set when the
    iteration was cut off at the |E| bound without stagnating, which should
    never happen.
    """

    value: float
    witness_subset: frozenset[int]
    iterations: int
    lambda_sequence: tuple[float, ...] = ()
    anomaly: bool = False


def _require_connected(g: Graph) -> None:
    if not g.is_connected:
        raise UnsupportedGraphError("dual norm is only defined on connected graphs")


def dual_norm_algorithm0(g: Graph, u) -> DualNormResult:
    """Dual norm by ratio iteration over min cuts.

    Starts from the singleton with the largest |u| (or its complement, so the
    subset sum is nonnegative) and repeatedly replaces the current ratio by
    the ratio of the subset maximizing the cut functional; stops as soon as
    the maximum drops to zero, i.e. when the ratio stagnates.
    """
    _require_connected(g)
    u = check_node_field(g, u)
    if not np.any(u):
        return DualNormResult(value=0.0, witness_subset=frozenset(), iterations=0)

    start = int(np.argmax(np.abs(u)))
    if u[start] >= 0.0:
        subset = frozenset([start])
    else:
        subset = frozenset(range(g.n_vertices)) - {start}
    lam = float(u[list(subset)].sum()) / perimeter(g, subset)
    sequence = [lam]

    value_tol = RATIO_STAGNATION_RTOL * max(1.0, float(np.abs(u).sum()))
    iterations = 0
    anomaly = False
    while True:
        if iterations >= g.n_edges:
            anomaly = True
            break
        iterations += 1
        candidate, gain = maximize_cut_functional(g, u, lam)
        if gain <= value_tol:
            break
        new_lam = float(u[list(candidate)].sum()) / perimeter(g, candidate)
        if new_lam <= lam * (1.0 + RATIO_STAGNATION_RTOL):
            break
        lam, subset = new_lam, candidate
        sequence.append(lam)

    return DualNormResult(
        value=lam,
        witness_subset=subset,
        iterations=iterations,
        lambda_sequence=tuple(sequence),
        anomaly=anomaly,
    )


def _neighbor_masks(g: Graph) -> list[int]:
    masks = [0] * g.n_vertices
    for v, w in g.oriented_edges:
        masks[v] |= 1 << w
        masks[w] |= 1 << v
    return masks


def _mask_is_connected(mask: int, neighbor_masks: list[int]) -> bool:
    frontier = mask & (-mask)
    seen = frontier
    while frontier:
        reached = 0
        rest = frontier
        while rest:
            bit = rest & (-rest)
            rest ^= bit
            reached |= neighbor_masks[bit.bit_length() - 1]
        frontier = reached & mask & ~seen
        seen |= frontier
    return seen == mask


def dual_norm_bruteforce(g: Graph, u, max_vertices: int = 16) -> DualNormResult:
    """Dual norm by enumerating connected subsets of size at most |V|/2.

    Restricting to connected subsets no larger than half the graph loses
    nothing: complements have equal perimeter and opposite subset sum, and a
    disconnected maximizer is never better than its best component.
    """
    _require_connected(g)
    u = check_node_field(g, u)
    n = g.n_vertices
    if n > max_vertices:
        raise SizeCapError(f"exhaustive enumeration capped at {max_vertices} vertices, got {n}")
    if not np.any(u):
        return DualNormResult(value=0.0, witness_subset=frozenset(), iterations=0)

    masks = np.arange(1, 1 << n, dtype=np.int64)
    sizes = np.zeros(masks.shape, dtype=np.int64)
    subset_sums = np.zeros(masks.shape, dtype=float)
    for v in range(n):
        bit = (masks >> v) & 1
        sizes += bit
        subset_sums += bit * u[v]
    perims = np.zeros(masks.shape, dtype=np.int64)
    for v, w in zip(g.edge_src, g.edge_dst):
        perims += ((masks >> int(v)) & 1) ^ ((masks >> int(w)) & 1)

    eligible = sizes <= (n / 2)
    ratios = np.abs(subset_sums) / np.maximum(perims, 1)

    # Scanning eligible masks in decreasing ratio order, the first connected
    # one realizes the maximum over the whole enumeration family.
    neighbor_masks = _neighbor_masks(g)
    best_value = 0.0
    best_mask = 0
    for idx in np.argsort(-ratios, kind="stable"):
        if not eligible[idx]:
            continue
        mask = int(masks[idx])
        if _mask_is_connected(mask, neighbor_masks):
            best_value = float(ratios[idx])
            best_mask = mask
            break

    witness = frozenset(v for v in range(n) if (best_mask >> v) & 1)
    return DualNormResult(value=best_value, witness_subset=witness, iterations=0)


def dual_feasibility_gap(g: Graph, u, lam: float) -> float:
    """Worst violation of <u, 1_A> <= lam * perimeter(A) over all subsets.

    Returns max over A of <u, 1_A> - lam * perimeter(A); the result is 0
    exactly when u lies in the dual-norm ball of radius lam (for mean-zero u).
    """
    _require_connected(g)
    _, value = maximize_cut_functional(g, u, lam)
    return value
