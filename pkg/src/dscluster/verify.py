"""Structural property checks for cluster states.

Every check returns a CheckResult whose failures carry concrete witnesses
(cluster ids, nodes or node pairs).  The edge-domination helpers use
exhaustive search and are deliberately capped at desk scale.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .engine import ClusterState, NodeStatus, PHASE_FORMATION
from .errors import InvalidArgumentError, SizeLimitError
from .graph import UNREACHABLE, NetworkGraph

#: Brute-force bound for line_graph_domination_number.
EDGE_LIMIT = 20


@dataclass
class CheckResult:
    name: str
    passed: bool
    witnesses: list = field(default_factory=list)
    note: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "witnesses": self.witnesses}
        if self.note:
            out["note"] = self.note
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class PropertyReport:
    checks: list[CheckResult]
    radius: int | None = None
    diameter: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "radius": self.radius,
            "diameter": self.diameter,
            "checks": [c.to_dict() for c in self.checks],
        }


def _induced_bfs(graph: NetworkGraph, members: set[int], src: int) -> dict[int, int]:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors(u):
            if v in members and v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def check_cluster_diameter(state: ClusterState, graph: NetworkGraph) -> CheckResult:
    """Every cluster's member-induced subgraph has diameter at most 3."""
    witnesses = []
    for cluster in state.clusters:
        members = cluster.members
        for src in sorted(members):
            dist = _induced_bfs(graph, members, src)
            for v in sorted(members):
                if v not in dist:
                    witnesses.append({"cluster": cluster.id, "pair": [src, v],
                                      "distance": None})
                elif dist[v] > 3:
                    witnesses.append({"cluster": cluster.id, "pair": [src, v],
                                      "distance": dist[v]})
    return CheckResult("cluster-diameter", not witnesses, witnesses)


def check_double_star(state: ClusterState, graph: NetworkGraph) -> CheckResult:
    """A spanning double star embeds in every two-leader cluster: the
    (master, proxy) edge exists and every other member is adjacent to one
    of them, so that edge dominates every spoke.  Clusters without a proxy
    pass vacuously (a plain star)."""
    witnesses = []
    starless = 0
    for cluster in state.clusters:
        if cluster.proxy is None:
            starless += 1
            continue
        m, p = cluster.master, cluster.proxy
        if not graph.adjacent(m, p):
            witnesses.append({"cluster": cluster.id, "missing_edge": [m, p]})
            continue
        for v in sorted(cluster.members - {m, p}):
            if not (graph.adjacent(v, m) or graph.adjacent(v, p)):
                witnesses.append({"cluster": cluster.id, "stranded_member": v})
    note = f"{starless} cluster(s) without a proxy: star form, vacuous pass" if starless else ""
    return CheckResult("double-star", not witnesses, witnesses, note)


def check_partition(state: ClusterState, graph: NetworkGraph) -> CheckResult:
    """Cluster member sets are pairwise disjoint and every node holds one
    status.  Once formation is complete (no critical set) or adjustment /
    maintenance has run, every node must additionally lie in exactly one
    cluster."""
    witnesses = []
    seen: dict[int, int] = {}
    for cluster in state.clusters:
        for v in sorted(cluster.members):
            if v in seen:
                witnesses.append({"node": v, "clusters": [seen[v], cluster.id]})
            else:
                seen[v] = cluster.id
    statuses = state.statuses()
    for v in range(state.node_count):
        if v not in statuses:
            witnesses.append({"node": v, "missing_status": True})
    coverage_required = state.phase != PHASE_FORMATION or not state.critical
    if coverage_required:
        for v in range(state.node_count):
            if v not in seen:
                witnesses.append({"node": v, "uncovered": True})
    else:
        # mid-formation, only critical nodes may sit outside every cluster
        uncovered = {v for v in range(state.node_count) if v not in seen}
        for v in sorted(uncovered - state.critical):
            witnesses.append({"node": v, "uncovered_non_critical": True})
    return CheckResult("partition", not witnesses, witnesses)


def check_dominance_and_independence(
    state: ClusterState, graph: NetworkGraph, hop: np.ndarray
) -> CheckResult:
    """Every ordinary member sits within 2 hops of its own master or proxy,
    and no two masters are adjacent.  The two halves are reported
    separately in ``details`` (motion may be allowed to break master
    independence while dominance must still hold)."""
    dominance_witnesses = []
    for cluster in state.clusters:
        for v in sorted(cluster.members - cluster.leaders):
            dists = [hop[v, l] for l in cluster.leaders]
            reachable = [d for d in dists if d != UNREACHABLE]
            if not reachable or min(reachable) > 2:
                dominance_witnesses.append({"cluster": cluster.id, "node": v})
    independence_witnesses = []
    masters = sorted(state.masters())
    for i, a in enumerate(masters):
        for b in masters[i + 1:]:
            if graph.adjacent(a, b):
                independence_witnesses.append({"masters": [a, b]})
    witnesses = dominance_witnesses + independence_witnesses
    return CheckResult(
        "dominance-and-independence",
        not witnesses,
        witnesses,
        details={
            "slave_dominance_ok": not dominance_witnesses,
            "master_independence_ok": not independence_witnesses,
        },
    )


def edge_domination_counts(
    edge_set: list[tuple[int, int]], graph: NetworkGraph
) -> dict[tuple[int, int], int]:
    """For every graph edge, how many edges of ``edge_set`` share an
    endpoint with it (an edge dominates itself)."""
    chosen = []
    for u, v in edge_set:
        if not graph.adjacent(u, v):
            raise InvalidArgumentError(f"({u}, {v}) is not an edge of the graph")
        chosen.append((u, v))
    counts = {}
    for a, b in graph.edges():
        counts[(a, b)] = sum(
            1 for u, v in chosen if a in (u, v) or b in (u, v)
        )
    return counts


def check_efficient_edge_domination(
    edge_set: list[tuple[int, int]], graph: NetworkGraph
) -> bool:
    """True iff every edge of the graph shares an endpoint with exactly
    one edge of ``edge_set``."""
    return all(c == 1 for c in edge_domination_counts(edge_set, graph).values())


def line_graph_domination_number(graph: NetworkGraph, limit: int = EDGE_LIMIT) -> int:
    """Minimum size of an edge set dominating every edge, by exhaustive
    search in increasing subset size.  Refuses graphs with more than
    ``limit`` edges."""
    edges = graph.edges()
    if len(edges) > limit:
        raise SizeLimitError(f"{len(edges)} edges exceeds brute-force bound {limit}")
    if not edges:
        return 0
    for k in range(1, len(edges) + 1):
        for subset in itertools.combinations(edges, k):
            endpoints = set()
            for u, v in subset:
                endpoints.add(u)
                endpoints.add(v)
            if all(a in endpoints or b in endpoints for a, b in edges):
                return k
    return len(edges)


def graph_radius_diameter(hop: np.ndarray) -> tuple[int | None, int | None]:
    """(radius, diameter) from a hop table; None when disconnected."""
    if hop.shape[0] == 0 or np.any(hop == UNREACHABLE):
        return None, None
    ecc = hop.max(axis=1)
    return int(ecc.min()), int(ecc.max())


def run_property_checks(
    state: ClusterState, graph: NetworkGraph, hop: np.ndarray
) -> PropertyReport:
    """The four structural checks plus the graph's radius and diameter."""
    radius, diameter = graph_radius_diameter(hop)
    checks = [
        check_cluster_diameter(state, graph),
        check_double_star(state, graph),
        check_partition(state, graph),
        check_dominance_and_independence(state, graph, hop),
    ]
    return PropertyReport(checks=checks, radius=radius, diameter=diameter)
