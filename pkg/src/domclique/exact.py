"""Exact clique and dominating-clique counts, and exhaustive small-n expectations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .errors import CapacityError, DomainError
from .graph import Graph, NodeSet

MAX_ORACLE_NODES = 6


@dataclass(frozen=True)
class CliqueCounts:
    """Maximal and dominating clique counts of one graph, indexed by size 0..n."""

    maximal: tuple[int, ...]
    dominating: tuple[int, ...]

    @property
    def total_maximal(self) -> int:
        return sum(self.maximal)

    def by_size(self, r: int) -> tuple[int, int]:
        return self.maximal[r], self.dominating[r]


def is_dominating(g: Graph, s: NodeSet) -> bool:
    """Every node outside ``s`` has a neighbour in ``s``."""
    _check_subset(g, s)
    covered = s.members
    for v in s:
        covered |= g.neighbors(v)
    return covered == (1 << g.n) - 1


def is_maximal_clique(g: Graph, s: NodeSet) -> bool:
    """``s`` is complete and no outside node is adjacent to all of it."""
    _check_subset(g, s)
    if s.size == 0:
        raise DomainError("maximality is defined for nonempty node sets")
    common = (1 << g.n) - 1
    for v in s:
        nb = g.neighbors(v)
        if (s.members & ~(1 << v)) & ~nb:
            return False
        common &= nb
    return common & ~s.members == 0


def _count(g: Graph, rmin: int, rmax: int, bound: bool) -> tuple[np.ndarray, np.ndarray]:
    y = np.zeros(g.n + 1, np.int64)
    x = np.zeros(g.n + 1, np.int64)
    if g.n:
        K.count_maximal_cliques(g.wtag, g.rows, g.n, rmin, rmax, y, x, bound)
    return y, x


def _check_r(g: Graph, r: int) -> None:
    if not 1 <= r <= g.n:
        raise DomainError(f"clique size r={r} outside 1..{g.n}")


def count_dominating_r_cliques(g: Graph, r: int) -> int:
    """Number of r-sets that are complete with every outside node seeing 1..r-1 of them.

    That is exactly the r-node cliques that are maximal and dominating.
    """
    _check_r(g, r)
    y, x = _count(g, r, r, True)
    return int(x[r])


def count_maximal_r_cliques(g: Graph, r: int) -> int:
    _check_r(g, r)
    y, x = _count(g, r, r, True)
    return int(y[r])


def enumerate_maximal_cliques(g: Graph) -> CliqueCounts:
    """All maximal cliques by size, via pivoted Bron-Kerbosch over bitsets."""
    y, x = _count(g, 1, max(g.n, 1), False)
    return CliqueCounts(tuple(int(v) for v in y), tuple(int(v) for v in x))


def clique_number(g: Graph) -> int:
    """Size of a largest clique.

    Vertices are relabelled by reverse degeneracy order and coloured
    greedily.  Each root vertex, taken from the highest colour down, spawns a
    branch-and-bound search on its later neighbours, compacted into a small
    local bitset so deep levels touch few words.
    """
    n = g.n
    if n < 1:
        raise DomainError("clique number needs at least one node")
    tag = g.wtag
    perm = K.degeneracy_order(tag, g.rows, n)[::-1].copy()
    rows = K.permute_rows(tag, g.rows, n, perm)
    order, color = K.root_coloring(tag, rows, n)
    cand = K._full_mask(tag, n)
    verts = np.empty(n, np.int64)
    rank = np.empty(n, np.int64)
    best = 1
    for i in range(n - 1, -1, -1):
        if color[i] <= best:
            break
        m = K.take_child(tag, rows, cand, order[i], verts)
        if m == 0 or 1 + m <= best:
            continue
        width = K.word_width(m)
        local = np.zeros((m, width), np.uint64)
        K.induced_rows(tag, rows, verts, m, rank, local)
        best = K.clique_search(K.wtag(width), local, m, 1, best)
    return int(best)


@lru_cache(maxsize=None)
def _table(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    edges, ytab, xtab = K.small_graph_table(n)
    for a in (edges, ytab, xtab):
        a.flags.writeable = False
    return edges, ytab, xtab


def _oracle_args(n: int, r: int, p: float) -> None:
    if n > MAX_ORACLE_NODES:
        raise CapacityError(f"exhaustive oracles support n <= {MAX_ORACLE_NODES}, got {n}")
    if n < 1:
        raise DomainError(f"node count n={n} must be positive")
    if not 1 <= r <= n:
        raise DomainError(f"clique size r={r} outside 1..{n}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"edge probability p={p} outside (0, 1)")


def _weighted_sum(n: int, p: float, values: np.ndarray) -> float:
    # Pr[G] depends only on the edge count, so group graphs by it
    edges = _table(n)[0]
    pairs = n * (n - 1) // 2
    per_count = np.bincount(edges, weights=values, minlength=pairs + 1)
    terms = [
        float(per_count[m]) * p**m * (1.0 - p) ** (pairs - m)
        for m in range(pairs + 1)
        if per_count[m]
    ]
    return math.fsum(terms)


def exhaustive_expectation_Xr(n: int, r: int, p: float) -> float:
    """E(X_r) over G(n, p) by summing Pr[G] X_r(G) over every labelled graph."""
    _oracle_args(n, r, p)
    return _weighted_sum(n, p, _table(n)[2][:, r].astype(np.float64))


def exhaustive_expectation_Yr(n: int, r: int, p: float) -> float:
    """E(Y_r), the expected number of maximal r-cliques, by exhaustive summation."""
    _oracle_args(n, r, p)
    return _weighted_sum(n, p, _table(n)[1][:, r].astype(np.float64))


def exhaustive_second_moment_Xr(n: int, r: int, p: float) -> float:
    """E(X_r^2) by exhaustive summation."""
    _oracle_args(n, r, p)
    x = _table(n)[2][:, r]
    return _weighted_sum(n, p, (x * x).astype(np.float64))


def _check_subset(g: Graph, s: NodeSet) -> None:
    if s.members >> g.n:
        raise DomainError(f"node set is not contained in 0..{g.n - 1}")
