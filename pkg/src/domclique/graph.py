"""Undirected simple graphs with packed bit-vector rows, and the G(n, p) sampler."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import numpy as np

from . import _kernels as K
from .errors import CapacityError, DomainError

MAX_NODES = 8192
MAX_ENUMERATION_NODES = 7


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable graph on nodes ``0..n-1``.

    ``rows`` has shape ``(n, word_width(n))``; row ``i`` is the neighbourhood
    of node ``i`` as a little-endian bit vector.  Build graphs through the
    constructors below rather than by hand: they enforce symmetry and the
    absence of self-loops.
    """

    n: int
    rows: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.rows.flags.writeable = False

    @classmethod
    def _adopt(cls, n: int, rows: np.ndarray) -> Graph:
        return cls(n, rows)

    @classmethod
    def empty(cls, n: int) -> Graph:
        _check_capacity(n)
        return cls(n, np.zeros((max(n, 1), K.word_width(n)), np.uint64)[:n])

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        _check_capacity(n)
        rows = np.zeros((n, K.word_width(n)), np.uint64)
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise DomainError(f"edge ({i}, {j}) outside 0..{n - 1}")
            if i == j:
                raise DomainError(f"self-loop at node {i}")
            rows[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
            rows[j, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        return cls(n, rows)

    @classmethod
    def from_edge_mask(cls, n: int, mask: int) -> Graph:
        """Graph whose pair number k (row-major over i < j) is present iff bit k of ``mask`` is set."""
        pairs = list(_pairs(n))
        if mask < 0 or mask >> len(pairs):
            raise DomainError(f"edge mask {mask} does not fit {len(pairs)} pairs")
        return cls.from_edges(n, (pq for k, pq in enumerate(pairs) if mask >> k & 1))

    @property
    def wtag(self) -> tuple:
        return K.wtag(self.rows.shape[1])

    def neighbors(self, i: int) -> int:
        """Neighbourhood of ``i`` as a Python int bitmask."""
        return int.from_bytes(self.rows[i].tobytes(), "little")

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.rows[i, j >> 6] >> np.uint64(j & 63) & np.uint64(1))

    def degree(self, i: int) -> int:
        return self.neighbors(i).bit_count()

    @property
    def edge_count(self) -> int:
        return sum(self.degree(i) for i in range(self.n)) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for i in range(self.n):
            nb = self.neighbors(i) >> (i + 1)
            j = i + 1
            while nb:
                if nb & 1:
                    yield i, j
                nb >>= 1
                j += 1

    def edge_mask(self) -> int:
        return sum(1 << k for k, (i, j) in enumerate(_pairs(self.n)) if self.has_edge(i, j))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.rows, other.rows)

    def __hash__(self) -> int:
        return hash((self.n, self.rows.tobytes()))


@dataclass(frozen=True)
class NodeSet:
    """Subset of ``0..width-1`` held as an int bitmask."""

    width: int
    members: int
    size: int = field(init=False)

    def __post_init__(self) -> None:
        if self.members < 0 or self.members >> self.width:
            raise DomainError(f"node set {self.members:#x} exceeds width {self.width}")
        object.__setattr__(self, "size", self.members.bit_count())

    @classmethod
    def of(cls, width: int, nodes: Iterable[int]) -> NodeSet:
        mask = 0
        for v in nodes:
            mask |= 1 << v
        return cls(width, mask)

    @classmethod
    def all(cls, width: int) -> NodeSet:
        return cls(width, (1 << width) - 1)

    def __iter__(self) -> Iterator[int]:
        m = self.members
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __contains__(self, v: int) -> bool:
        return bool(self.members >> v & 1)

    def __len__(self) -> int:
        return self.size


@dataclass(frozen=True)
class GnpParams:
    n: int
    p: float
    seed: int
    max_nodes: int = MAX_NODES

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0 or math.isnan(self.p):
            raise DomainError(f"edge probability p={self.p} outside [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed {self.seed} is not a 64-bit unsigned integer")
        if self.n < 0:
            raise DomainError(f"node count n={self.n} is negative")
        if self.n > self.max_nodes:
            raise CapacityError(f"n={self.n} exceeds the configured maximum {self.max_nodes}")


def sample_gnp(params: GnpParams) -> Graph:
    """Draw a graph from G(n, p); a pure function of ``(n, p, seed)``.

    Pair number k in row-major order over i < j uses the k-th output of the
    SplitMix64 generator seeded with ``seed`` (see ``_kernels.fill_gnp``).
    Samples for the same seed and different p are coupled: the same uniforms
    are thresholded, so the edge sets are nested in p.
    """
    n = params.n
    rows = np.zeros((max(n, 1), K.word_width(n)), np.uint64)
    K.fill_gnp(n, float(params.p), np.uint64(params.seed), rows)
    return Graph(n, rows[:n])


def graph_probability_log(g: Graph, p: float) -> float:
    """Natural log of Pr[G] in G(n, p)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"log-probability needs 0 < p < 1, got p={p}")
    m = g.edge_count
    return m * math.log(p) + (math.comb(g.n, 2) - m) * math.log1p(-p)


def all_graphs(n: int) -> Iterator[Graph]:
    """Every labelled graph on ``n`` nodes, in increasing edge-mask order."""
    if n > MAX_ENUMERATION_NODES:
        raise CapacityError(f"all_graphs supports n <= {MAX_ENUMERATION_NODES}, got {n}")
    if n < 0:
        raise DomainError(f"node count n={n} is negative")
    pairs = list(_pairs(n))
    width = K.word_width(n)
    for mask in range(1 << len(pairs)):
        rows = np.zeros((n, width), np.uint64)
        for k, (i, j) in enumerate(pairs):
            if mask >> k & 1:
                rows[i, 0] |= np.uint64(1 << j)
                rows[j, 0] |= np.uint64(1 << i)
        yield Graph(n, rows)


def dump_graph(g: Graph, fh: IO[str]) -> None:
    edges = list(g.edges())
    fh.write(f"{g.n} {len(edges)}\n")
    for i, j in edges:
        fh.write(f"{i} {j}\n")


def load_graph(fh: IO[str]) -> Graph:
    header = fh.readline().split()
    if len(header) != 2:
        raise DomainError("graph dump must start with 'n m'")
    n, m = int(header[0]), int(header[1])
    edges = []
    for line in fh:
        if line.strip():
            i, j = map(int, line.split())
            edges.append((i, j))
    if len(edges) != m:
        raise DomainError(f"graph dump declares {m} edges but lists {len(edges)}")
    return Graph.from_edges(n, edges)


def _pairs(n: int) -> Iterator[tuple[int, int]]:
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j


def _check_capacity(n: int) -> None:
    if n < 0:
        raise DomainError(f"node count n={n} is negative")
    if n > MAX_NODES:
        raise CapacityError(f"n={n} exceeds the configured maximum {MAX_NODES}")
