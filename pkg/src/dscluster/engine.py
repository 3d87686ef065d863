"""Cluster formation and adjustment.

Formation elects (master, proxy) pairs in descending weight order.  The
first master is the global maximum-weight node; every later master must
sit exactly 3 hops from one previously elected master or proxy while
staying at least 3 hops from all of them, which keeps clusters from
overlapping.  Each cluster is the elected pair plus both leaders'
unclaimed neighbours, so a double star (the (m, p) edge plus one spoke
per member) always embeds in it.

Nodes that fail the distance conditions are deferred; deferred nodes plus
type-I hidden masters (a proxy's neighbours that outweigh the proxy) form
the critical set.  The adjustment pass then regroups critical nodes into
new clusters, pulling members out of existing ones where needed, and
declares any node still uncovered a master on its own.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import DisconnectedGraphError, InvalidArgumentError
from .graph import DistanceTables, NetworkGraph
from .metrics import NetworkMetrics

PHASE_FORMATION = "formation"
PHASE_ADJUSTED = "adjusted"
PHASE_MAINTENANCE = "maintenance"

CLASS_PERFECT = "perfect"
CLASS_FAIRLY_PERFECT = "fairly-perfect"
CLASS_IMPERFECT = "imperfect"


class NodeStatus(str, Enum):
    MASTER = "master"
    PROXY = "proxy"
    SLAVE = "slave"
    HIDDEN_MASTER_I = "hm1"
    HIDDEN_MASTER_II = "hm2"
    UNCLUSTERED = "unclustered"


@dataclass
class ClusterRecord:
    """One cluster: its leaders plus the full member set (leaders included)."""

    id: int
    master: int
    proxy: int | None
    members: set[int]

    def copy(self) -> "ClusterRecord":
        return ClusterRecord(self.id, self.master, self.proxy, set(self.members))

    @property
    def leaders(self) -> set[int]:
        return {self.master} if self.proxy is None else {self.master, self.proxy}


@dataclass(frozen=True)
class NeighborPartitions:
    """Weight/role partitions of a node's neighbourhood.

    ``n_prime``: heavier neighbours (masters excluded).  ``n_dprime``:
    lighter neighbours that are neither masters nor proxies.  ``n_m``:
    neighbours adjacent to at least one master.
    """

    n_prime: frozenset[int]
    n_dprime: frozenset[int]
    n_m: frozenset[int]


@dataclass
class ClusterState:
    """Snapshot of the clustering at the end of a phase.

    ``hidden_masters_1``/``hidden_masters_2``/``deferred`` record the
    formation outcome and are kept unchanged through adjustment so reports
    can show how the final structure came about.  ``critical`` is the set
    still awaiting treatment (empty after a completed adjustment).
    """

    node_count: int
    clusters: list[ClusterRecord]
    critical: set[int]
    hidden_masters_1: set[int]
    hidden_masters_2: set[int]
    deferred: set[int]
    phase: str = PHASE_FORMATION
    events: list[dict] = field(default_factory=list)

    def copy(self) -> "ClusterState":
        return ClusterState(
            node_count=self.node_count,
            clusters=[c.copy() for c in self.clusters],
            critical=set(self.critical),
            hidden_masters_1=set(self.hidden_masters_1),
            hidden_masters_2=set(self.hidden_masters_2),
            deferred=set(self.deferred),
            phase=self.phase,
            events=list(self.events),
        )

    def masters(self) -> set[int]:
        return {c.master for c in self.clusters}

    def proxies(self) -> set[int]:
        return {c.proxy for c in self.clusters if c.proxy is not None}

    def cluster_of(self, node: int) -> ClusterRecord | None:
        for c in self.clusters:
            if node in c.members:
                return c
        return None

    def membership(self) -> dict[int, int]:
        """node -> cluster id; when duplicated, the lowest cluster id wins
        (the partition check reports duplicates with witnesses)."""
        owner: dict[int, int] = {}
        for c in sorted(self.clusters, key=lambda c: c.id):
            for m in c.members:
                owner.setdefault(m, c.id)
        return owner

    def statuses(self) -> dict[int, NodeStatus]:
        st: dict[int, NodeStatus] = {}
        formation = self.phase == PHASE_FORMATION
        for c in self.clusters:
            for m in c.members:
                if m == c.master:
                    st[m] = NodeStatus.MASTER
                elif m == c.proxy:
                    st[m] = NodeStatus.PROXY
                elif formation and m in self.hidden_masters_1:
                    st[m] = NodeStatus.HIDDEN_MASTER_I
                else:
                    st[m] = NodeStatus.SLAVE
        for v in range(self.node_count):
            if v not in st:
                if formation and v in self.hidden_masters_2:
                    st[v] = NodeStatus.HIDDEN_MASTER_II
                else:
                    st[v] = NodeStatus.UNCLUSTERED
        return st


def _weight_key(metrics: NetworkMetrics):
    """Deterministic extraction order: weight, then NS, then lower node id."""
    return lambda v: (metrics.weight(v), metrics.ns(v), -v)


def master_eligibility(
    candidate: int, elected_pairs: list[tuple[int, int | None]], hop: np.ndarray
) -> bool:
    """Distance conditions for a subsequent master.

    Eligible iff the candidate is >= 3 hops from every elected master and
    proxy, and exactly 3 hops from at least one of them.  The first master
    (no elected pairs yet) is unconditionally eligible; a pair's missing
    proxy imposes no constraint.
    """
    if not elected_pairs:
        return True
    exactly_three = False
    for m, p in elected_pairs:
        dm = int(hop[candidate, m])
        dp = int(hop[candidate, p]) if p is not None else None
        if dm < 3 or (dp is not None and dp < 3):
            return False
        if dm == 3 or dp == 3:
            exactly_three = True
    return exactly_three


def elect_proxy(
    master: int,
    elected_pairs: list[tuple[int, int | None]],
    metrics: NetworkMetrics,
    hop: np.ndarray,
) -> int | None:
    """Max-weight neighbour of the master that keeps >= 3 hops to every
    previously elected master and proxy; None when no neighbour qualifies
    (the cluster then forms with a master only)."""
    n = hop.shape[0]
    candidates = []
    for v in range(n):
        if hop[master, v] != 1:
            continue
        ok = True
        for m, p in elected_pairs:
            if hop[v, m] < 3 or (p is not None and hop[v, p] < 3):
                ok = False
                break
        if ok:
            candidates.append(v)
    if not candidates:
        return None
    return max(candidates, key=_weight_key(metrics))


def neighbor_partitions(
    u: int, state: ClusterState, graph: NetworkGraph, metrics: NetworkMetrics
) -> NeighborPartitions:
    """The three neighbourhood partitions of ``u`` against a state's roles."""
    return _partitions(u, graph, metrics, state.masters(), state.proxies())


def _partitions(
    u: int,
    graph: NetworkGraph,
    metrics: NetworkMetrics,
    masters: set[int],
    proxies: set[int],
) -> NeighborPartitions:
    w_u = metrics.weight(u)
    nbrs = graph.neighbors(u)
    n_prime = frozenset(
        v for v in nbrs if metrics.weight(v) > w_u and v not in masters
    )
    n_dprime = frozenset(
        v for v in nbrs
        if v not in masters and v not in proxies and metrics.weight(v) < w_u
    )
    n_m = frozenset(v for v in nbrs if any(graph.adjacent(v, m) for m in masters))
    return NeighborPartitions(n_prime, n_dprime, n_m)


def run_m_dsec(
    graph: NetworkGraph, tables: DistanceTables, metrics: NetworkMetrics | None
) -> ClusterState:
    """Formation pass: returns clusters, hidden masters, the critical set
    and the deferred set.  Refuses disconnected graphs."""
    components = graph.components()
    if len(components) > 1:
        raise DisconnectedGraphError(components)
    n = graph.node_count
    if n == 1:
        # Degenerate network: the lone node is its own master, no weights needed.
        record = ClusterRecord(id=1, master=0, proxy=None, members={0})
        events = [
            {"action": "elect_master", "node": 0},
            {"action": "form_cluster", "id": 1, "master": 0, "proxy": None,
             "members": [0], "hidden_masters": []},
        ]
        return ClusterState(
            node_count=1, clusters=[record], critical=set(),
            hidden_masters_1=set(), hidden_masters_2=set(), deferred=set(),
            phase=PHASE_FORMATION, events=events,
        )
    if metrics is None:
        raise InvalidArgumentError("metrics with weights are required for n > 1")

    hop = tables.hop
    key = _weight_key(metrics)
    clustered: set[int] = set()
    deferred: set[int] = set()
    hm1: set[int] = set()
    clusters: list[ClusterRecord] = []
    pairs: list[tuple[int, int | None]] = []
    events: list[dict] = []

    def form_cluster(x: int) -> None:
        y = elect_proxy(x, pairs, metrics, hop)
        if y is not None:
            events.append({"action": "elect_proxy", "node": y, "master": x})
        members = {x} | (set(graph.neighbors(x)) - clustered)
        hidden: set[int] = set()
        if y is not None:
            members |= {y} | (set(graph.neighbors(y)) - clustered)
            masters_now = {c.master for c in clusters} | {x}
            w_y = metrics.weight(y)
            hidden = {
                v for v in graph.neighbors(y)
                if metrics.weight(v) > w_y and v not in masters_now
            } & members
        record = ClusterRecord(id=len(clusters) + 1, master=x, proxy=y, members=members)
        clusters.append(record)
        pairs.append((x, y))
        hm1.update(hidden)
        clustered.update(members)
        events.append({
            "action": "form_cluster", "id": record.id, "master": x, "proxy": y,
            "members": sorted(members), "hidden_masters": sorted(hidden),
        })

    first = max(range(n), key=key)
    events.append({"action": "elect_master", "node": first})
    form_cluster(first)

    while True:
        pool = [v for v in range(n) if v not in clustered and v not in deferred]
        if not pool:
            break
        z = max(pool, key=key)
        if master_eligibility(z, pairs, hop):
            events.append({"action": "elect_master", "node": z})
            form_cluster(z)
        else:
            deferred.add(z)
            events.append({"action": "defer", "node": z})

    critical = (set(range(n)) - clustered) | hm1
    proxies = {p for _, p in pairs if p is not None}
    hm2 = {
        v for v in deferred
        if v not in clustered and not any(graph.adjacent(v, p) for p in proxies)
    }
    return ClusterState(
        node_count=n, clusters=clusters, critical=critical,
        hidden_masters_1=hm1, hidden_masters_2=hm2, deferred=deferred,
        phase=PHASE_FORMATION, events=events,
    )


def run_adjusted(
    state: ClusterState,
    graph: NetworkGraph,
    metrics: NetworkMetrics,
    hop: np.ndarray,
) -> ClusterState:
    """Adjustment pass over the critical nodes, in descending weight order.

    A type-I hidden master pairs with the best non-leader neighbour on the
    far side of its proxy; other critical nodes pair within their lighter,
    master-free neighbourhood.  Members pulled into a new cluster leave
    their old one.  Critical nodes that cannot form a cluster stay slaves
    if already covered, otherwise become masters on their own.
    """
    if not state.critical:
        return state

    key = _weight_key(metrics)
    working: dict[int, ClusterRecord] = {c.id: c.copy() for c in state.clusters}
    membership: dict[int, int] = {}
    for c in state.clusters:
        for m in c.members:
            membership[m] = c.id
    masters = state.masters()
    proxies = state.proxies()
    unresolved = set(state.critical)
    leftovers: list[int] = []
    events = list(state.events)
    next_id = max(working, default=0) + 1

    def lighter_non_leaders(u: int) -> set[int]:
        w_u = metrics.weight(u)
        return {
            v for v in graph.neighbors(u)
            if v not in masters and v not in proxies and metrics.weight(v) < w_u
        }

    def near_masters(u: int) -> set[int]:
        return {
            v for v in graph.neighbors(u)
            if any(graph.adjacent(v, m) for m in masters)
        }

    def attempt(c: int):
        """Pick a partner and member set for critical node c, or None."""
        adjacent_proxy = None
        if c in state.hidden_masters_1:
            own = membership.get(c)
            own_proxy = working[own].proxy if own is not None else None
            if own_proxy is not None and graph.adjacent(c, own_proxy):
                adjacent_proxy = own_proxy
            else:
                nearby = sorted(v for v in graph.neighbors(c) if v in proxies)
                adjacent_proxy = nearby[0] if nearby else None
        if adjacent_proxy is not None:
            base = {
                v for v in graph.neighbors(c)
                if v != adjacent_proxy and v not in masters and v not in proxies
            }
            still_critical = unresolved | set(leftovers)
            for partner in sorted(base, key=key, reverse=True):
                if partner in still_critical:
                    if partner in state.hidden_masters_1:
                        extra = lighter_non_leaders(partner)
                    else:
                        extra = set(graph.neighbors(partner))
                    return partner, {c, partner} | base | extra
                # partner is an ordinary member: unusable if it touches a master
                if any(graph.adjacent(partner, m) for m in masters):
                    continue
                return partner, {c, partner} | base | lighter_non_leaders(partner)
            return None
        pool = lighter_non_leaders(c) - near_masters(c)
        if not pool:
            return None
        partner = max(pool, key=key)
        members = {c, partner} | pool | (
            lighter_non_leaders(partner) - near_masters(partner)
        )
        return partner, members

    def detach(node: int, lost: dict[int, list[int]]) -> None:
        old = membership.get(node)
        if old is not None:
            working[old].members.discard(node)
            lost.setdefault(old, []).append(node)

    while unresolved:
        c = max(unresolved, key=key)
        unresolved.discard(c)
        outcome = attempt(c)
        if outcome is None:
            leftovers.append(c)
            continue
        partner, members = outcome
        members -= masters | proxies  # existing leaders are never pulled
        lost: dict[int, list[int]] = {}
        for m in sorted(members):
            detach(m, lost)
            membership[m] = next_id
        record = ClusterRecord(id=next_id, master=c, proxy=partner, members=members)
        working[next_id] = record
        masters.add(c)
        proxies.add(partner)
        events.append({
            "action": "adjust_cluster", "id": next_id, "master": c,
            "proxy": partner, "members": sorted(members),
        })
        for old_id in sorted(lost):
            if old_id != next_id:
                events.append({
                    "action": "prune_cluster", "id": old_id,
                    "removed": sorted(lost[old_id]),
                })
        unresolved -= members
        leftovers = [v for v in leftovers if v not in members]
        next_id += 1

    for c in leftovers:
        if membership.get(c) is not None:
            continue  # still covered as a slave; nothing left to improve
        record = ClusterRecord(id=next_id, master=c, proxy=None, members={c})
        working[next_id] = record
        membership[c] = next_id
        masters.add(c)
        events.append({"action": "singleton_master", "id": next_id, "node": c})
        next_id += 1

    clusters = [working[cid] for cid in sorted(working)]
    covered = set().union(*(c.members for c in clusters)) if clusters else set()
    return ClusterState(
        node_count=state.node_count,
        clusters=clusters,
        critical=set(range(state.node_count)) - covered,
        hidden_masters_1=set(state.hidden_masters_1),
        hidden_masters_2=set(state.hidden_masters_2),
        deferred=set(state.deferred),
        phase=PHASE_ADJUSTED,
        events=events,
    )


def classify(initial: ClusterState, adjusted: ClusterState | None = None) -> str:
    """Categorise the run: perfect (no critical nodes after formation),
    fairly-perfect (critical nodes all resolved by adjustment), imperfect
    (never produced by this engine's fallback rules; kept for completeness)."""
    if not initial.critical:
        return CLASS_PERFECT
    if adjusted is None:
        raise InvalidArgumentError("critical nodes present but adjustment not run")
    if not adjusted.critical:
        return CLASS_FAIRLY_PERFECT
    warnings.warn("imperfect clustering reached; the singleton-master fallback "
                  "should make this impossible", RuntimeWarning, stacklevel=2)
    return CLASS_IMPERFECT


def form_and_adjust(
    graph: NetworkGraph, tables: DistanceTables, metrics: NetworkMetrics | None
) -> tuple[ClusterState, ClusterState, str]:
    """Run formation, then adjustment when critical nodes remain.

    Returns (formation state, final state, classification); for a perfect
    run the final state is the formation state itself.
    """
    initial = run_m_dsec(graph, tables, metrics)
    if not initial.critical:
        return initial, initial, CLASS_PERFECT
    final = run_adjusted(initial, graph, metrics, tables.hop)
    return initial, final, classify(initial, final)
