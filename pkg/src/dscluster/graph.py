"""Network graph construction and all-pairs distance tables.

Nodes are integers ``0..n-1``.  A graph is either built from planar node
positions and a transmission range (unit-disk adjacency, boundary
inclusive: two nodes are linked iff their Euclidean distance is <= r) or
ingested verbatim from a fixture's edge list plus Euclidean matrix.  Hop
distances always come from breadth-first search over the adjacency.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import FixtureFormatError, InvalidArgumentError

#: Sentinel hop distance for node pairs with no connecting path.
UNREACHABLE = -1


@dataclass(frozen=True)
class NetworkGraph:
    """Undirected network topology, immutable once built.

    ``range_`` and ``positions`` are only present in position mode; a graph
    ingested from a fixture carries the adjacency alone.
    """

    adj: np.ndarray
    range_: float | None = None
    positions: np.ndarray | None = None

    def __post_init__(self):
        adj = np.asarray(self.adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InvalidArgumentError("adjacency must be a square matrix")
        if adj.diagonal().any():
            raise InvalidArgumentError("adjacency must be irreflexive")
        if not np.array_equal(adj, adj.T):
            raise InvalidArgumentError("adjacency must be symmetric")
        object.__setattr__(self, "adj", adj)

    @property
    def node_count(self) -> int:
        return self.adj.shape[0]

    def neighbors(self, u: int) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.adj[u])]

    def degree(self, u: int) -> int:
        return int(self.adj[u].sum())

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def edges(self) -> list[tuple[int, int]]:
        """All edges once, as (u, v) with u < v, in lexicographic order."""
        iu, iv = np.nonzero(np.triu(self.adj, k=1))
        return [(int(u), int(v)) for u, v in zip(iu, iv)]

    def edge_count(self) -> int:
        return int(self.adj.sum()) // 2

    def components(self) -> list[list[int]]:
        """Connected components as sorted node lists, ordered by least node."""
        seen = np.zeros(self.node_count, dtype=bool)
        out = []
        for start in range(self.node_count):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v in np.flatnonzero(self.adj[u]):
                    if not seen[v]:
                        seen[v] = True
                        comp.append(int(v))
                        queue.append(int(v))
            out.append(sorted(comp))
        return out

    @property
    def is_connected(self) -> bool:
        return len(self.components()) == 1


@dataclass(frozen=True)
class DistanceTables:
    """All-pairs hop and Euclidean distance matrices.

    Both matrices are symmetric with zero diagonal.  ``hop`` holds
    ``UNREACHABLE`` (-1) for disconnected pairs; consumers must check for
    it explicitly rather than treat it as a large distance.
    """

    hop: np.ndarray
    euclid: np.ndarray


@dataclass(frozen=True)
class FixtureOverrides:
    """Per-node metric values supplied by a fixture, taking precedence
    over recomputation.  Each field is either None or a length-n list."""

    ns: list[float] | None = None
    g_h: list[float] | None = None
    g_ed: list[float] | None = None
    w: list[float] | None = None

    def validate(self, n: int) -> None:
        for name in ("ns", "g_h", "g_ed", "w"):
            values = getattr(self, name)
            if values is not None and len(values) != n:
                raise FixtureFormatError(
                    f"override '{name}' has {len(values)} entries, expected {n}"
                )


def deploy_random(n: int, terrain_size: float, seed: int) -> np.ndarray:
    """Drop ``n`` nodes uniformly at random on the [0, terrain_size]^2 square.

    Returns an (n, 2) float array of positions; identical seeds yield
    identical deployments.
    """
    if n < 1:
        raise InvalidArgumentError(f"node count must be >= 1, got {n}")
    if terrain_size <= 0:
        raise InvalidArgumentError(f"terrain size must be positive, got {terrain_size}")
    rng = np.random.default_rng(seed)
    return sample_positions(rng, n, terrain_size)


def sample_positions(rng: np.random.Generator, n: int, terrain_size: float) -> np.ndarray:
    """Uniform positions drawn from an existing generator (keeps all
    randomness flowing from a single scenario seed)."""
    return rng.uniform(0.0, terrain_size, size=(n, 2))


def euclidean_distance_table(positions: np.ndarray) -> np.ndarray:
    """Pairwise planar Euclidean distances; symmetric with zero diagonal."""
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[0] < 1 or pos.shape[1] != 2:
        raise InvalidArgumentError("positions must be a non-empty (n, 2) array")
    delta = pos[:, None, :] - pos[None, :, :]
    return np.sqrt((delta ** 2).sum(axis=2))


def build_graph(positions: np.ndarray, range_: float) -> NetworkGraph:
    """Unit-disk graph over the given positions: (u, v) adjacent iff
    ed(u, v) <= range_ (ties at exactly the range are adjacent)."""
    if range_ <= 0:
        raise InvalidArgumentError(f"transmission range must be positive, got {range_}")
    pos = np.asarray(positions, dtype=float)
    euclid = euclidean_distance_table(pos)
    adj = euclid <= range_
    np.fill_diagonal(adj, False)
    return NetworkGraph(adj=adj, range_=float(range_), positions=pos)


def hop_distance_table(graph: NetworkGraph) -> np.ndarray:
    """All-pairs hop distances by BFS from every node (UNREACHABLE = -1)."""
    n = graph.node_count
    hop = np.full((n, n), UNREACHABLE, dtype=np.int64)
    neighbor_lists = [np.flatnonzero(graph.adj[u]) for u in range(n)]
    for src in range(n):
        hop[src, src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = hop[src, u]
            for v in neighbor_lists[u]:
                if hop[src, v] == UNREACHABLE:
                    hop[src, v] = du + 1
                    queue.append(int(v))
    return hop


def compute_tables(graph: NetworkGraph, euclid: np.ndarray | None = None) -> DistanceTables:
    """Hop table by BFS plus the Euclidean table (from the graph's own
    positions unless an explicit matrix is supplied)."""
    if euclid is None:
        if graph.positions is None:
            raise InvalidArgumentError("graph has no positions; supply a euclid matrix")
        euclid = euclidean_distance_table(graph.positions)
    return DistanceTables(hop=hop_distance_table(graph), euclid=np.asarray(euclid, dtype=float))


def graph_from_edges(n: int, edges: list[tuple[int, int]]) -> NetworkGraph:
    """Graph over ``n`` nodes from an explicit edge list (no geometry)."""
    adj = np.zeros((n, n), dtype=bool)
    for edge in edges:
        if len(edge) != 2:
            raise FixtureFormatError(f"edge {edge!r} is not a pair")
        u, v = int(edge[0]), int(edge[1])
        if u == v:
            raise FixtureFormatError(f"self-loop on node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise FixtureFormatError(f"edge ({u}, {v}) out of range for {n} nodes")
        adj[u, v] = adj[v, u] = True
    return NetworkGraph(adj=adj)


def ingest_fixture(
    edges: list[tuple[int, int]],
    euclid: np.ndarray,
    overrides: FixtureOverrides | None = None,
) -> tuple[NetworkGraph, DistanceTables, FixtureOverrides]:
    """Build graph and tables from fixture data taken verbatim.

    The adjacency is used as given (no range thresholding), the hop table
    is recomputed by BFS, and the Euclidean matrix is validated and kept.
    Malformed input raises FixtureFormatError.
    """
    euclid = np.asarray(euclid, dtype=float)
    if euclid.ndim != 2 or euclid.shape[0] != euclid.shape[1]:
        raise FixtureFormatError(f"euclid matrix must be square, got shape {euclid.shape}")
    n = euclid.shape[0]
    if n < 1:
        raise FixtureFormatError("euclid matrix is empty")
    if not np.array_equal(euclid, euclid.T):
        bad = np.argwhere(euclid != euclid.T)[0]
        raise FixtureFormatError(
            f"euclid matrix is asymmetric at ({bad[0]}, {bad[1]})"
        )
    if np.any(euclid.diagonal() != 0.0):
        raise FixtureFormatError("euclid matrix must have a zero diagonal")
    if np.any(euclid < 0.0):
        raise FixtureFormatError("euclid matrix has negative entries")

    graph = graph_from_edges(n, edges)
    tables = DistanceTables(hop=hop_distance_table(graph), euclid=euclid)
    overrides = overrides or FixtureOverrides()
    overrides.validate(n)
    return graph, tables, overrides
