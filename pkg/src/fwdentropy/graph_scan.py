"""Graph-guided computation of low-order forward differences.

Given an undirected independence graph, only *node clusters* are scanned:
sets in which some node is adjacent to every other member. Clusters are
connected by construction, and nested enough that the lower-order
differences needed for interpretation are always available.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .entropy import EntropyOracle, default_zero_tol, to_millibits
from .exceptions import CyclicGraph, InputError
from .forward_diff import DeltaTable, _alternating_sum, conditional_delta
from .sets import EMPTY, VariableSet, as_set, check_disjoint
from .synergy import SynergyFinding, make_finding

RED, YELLOW, WHITE = "red", "yellow", "white"


class Graph:
    """Undirected simple graph on nodes ``0 .. p-1``.

    Parameters
    ----------
    p : int
        Number of nodes.
    edges : iterable of (int, int)
    names : sequence of str, optional
    """

    def __init__(self, p: int, edges: Iterable = (), names: Sequence[str] | None = None):
        self.p = int(p)
        self.names = tuple(names) if names is not None else tuple(f"X{i + 1}" for i in range(self.p))
        if len(self.names) != self.p:
            raise InputError(f"{len(self.names)} names for {self.p} nodes")
        self._adj = [0] * self.p
        es = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise InputError(f"self loop at node {a}")
            if not (0 <= a < self.p and 0 <= b < self.p):
                raise InputError(f"edge ({a}, {b}) refers to a node outside 0..{self.p - 1}")
            es.add((min(a, b), max(a, b)))
            self._adj[a] |= 1 << b
            self._adj[b] |= 1 << a
        self.edges = frozenset(es)

    @classmethod
    def from_names(cls, names: Sequence[str], pairs: Iterable[tuple[str, str]]) -> "Graph":
        index = {n: i for i, n in enumerate(names)}
        try:
            edges = [(index[a], index[b]) for a, b in pairs]
        except KeyError as exc:
            raise InputError(f"unknown node name {exc.args[0]!r}") from None
        return cls(len(names), edges, names)

    @classmethod
    def complete(cls, p: int, names=None) -> "Graph":
        return cls(p, combinations(range(p), 2), names)

    def neighbours(self, i: int) -> VariableSet:
        return VariableSet.from_bits(self._adj[i])

    def degree(self, i: int) -> int:
        return bin(self._adj[i]).count("1")

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self._adj[a] >> b & 1)

    def induced_connected(self, S) -> bool:
        S = as_set(S)
        members = list(S)
        if len(members) <= 1:
            return True
        seen = 1 << members[0]
        stack = [members[0]]
        while stack:
            v = stack.pop()
            nxt = self._adj[v] & int(S) & ~seen
            seen |= nxt
            stack.extend(VariableSet.from_bits(nxt))
        return seen == int(S)

    def separates(self, A, B, C) -> bool:
        """Whether every path from ``A`` to ``B`` passes through ``C``."""
        A, B, C = as_set(A), as_set(B), as_set(C)
        check_disjoint(A, B, C)
        blocked = int(C)
        seen = int(A)
        queue = deque(A)
        while queue:
            v = queue.popleft()
            if int(B) >> v & 1:
                return False
            nxt = self._adj[v] & ~blocked & ~seen
            seen |= nxt
            queue.extend(VariableSet.from_bits(nxt))
        return True

    def __repr__(self):
        return f"Graph(p={self.p}, n_edges={len(self.edges)})"


def skeleton(parents: Sequence[Sequence[int]], names=None) -> Graph:
    """Undirected graph of a DAG given as per-node parent lists."""
    p = len(parents)
    return Graph(p, ((q, v) for v, ps in enumerate(parents) for q in ps), names)


def moral_graph(parents: Sequence[Sequence[int]], names=None) -> Graph:
    """Skeleton plus an edge between every pair of co-parents."""
    g = skeleton(parents, names)
    extra = [pair for ps in parents for pair in combinations(sorted(ps), 2)]
    return Graph(g.p, list(g.edges) + extra, g.names)


def topological_order(parents: Sequence[Sequence[int]]) -> list[int]:
    from graphlib import CycleError, TopologicalSorter

    ts = TopologicalSorter({v: list(ps) for v, ps in enumerate(parents)})
    try:
        return list(ts.static_order())
    except CycleError as exc:
        raise CyclicGraph(f"directed graph has a cycle through {exc.args[1]}") from None


def is_node_cluster(g: Graph, S) -> bool:
    S = as_set(S)
    return any(not (S.remove(c) - g.neighbours(c)) for c in S)


def enumerate_node_clusters(g: Graph, order: int) -> list[VariableSet]:
    """All node clusters of the given size, in ascending lexicographic order."""
    if order < 1:
        raise InputError("order must be positive")
    found = set()
    for c in range(g.p):
        nb = list(g.neighbours(c))
        for combo in combinations(nb, order - 1):
            found.add(VariableSet(combo).add(c))
    return sorted(found, key=lambda s: tuple(s))


@dataclass
class ScanResult:
    """Output of :func:`cluster_scan`.

    ``clusters`` and ``findings`` are in visiting order; ``deltas`` holds
    every cluster and all of its subsets.
    """

    deltas: DeltaTable
    clusters: list[VariableSet]
    findings: list[SynergyFinding]
    threshold: float
    zero_tol: float

    def cluster_deltas(self, order: int | None = None) -> list[tuple[VariableSet, float]]:
        return [(c, self.deltas[c]) for c in self.clusters if order is None or len(c) == order]


def _tuple_strength(oracle, tup) -> float:
    h = oracle.entropy
    return math.fsum(
        to_millibits(h(VariableSet([a])) + h(VariableSet([b])) - h(VariableSet([a, b])))
        for a, b in combinations(tup, 2)
    )


def cluster_scan(
    g: Graph,
    oracle: EntropyOracle,
    max_order: int = 3,
    threshold: float = 0.0,
    zero_tol: float | None = None,
    response: int | None = None,
) -> ScanResult:
    """Forward differences over the node clusters of ``g``.

    Orders are processed breadth first starting at three. Within an order,
    nodes are visited by decreasing degree (ties by index) and, for each,
    the tuples of its neighbours are visited weakest first, by the sum of
    the pairwise marginal informations inside the tuple (ties by index).
    Each new cluster has its difference, and those of all of its subsets,
    computed from the oracle's stored entropies; no entropy is evaluated
    twice.

    Order-three clusters with ``delta < -threshold`` are reported as
    synergies. Clusters of order four and above are visited only when they
    contain a synergy found at order three; for them every connected triple
    inside is checked for a partial synergy given the remaining members.
    """
    if max_order < 3:
        raise InputError("max_order must be at least 3")
    if g.p != oracle.p:
        raise InputError(f"graph has {g.p} nodes but the oracle has {oracle.p} variables")
    tol = default_zero_tol(oracle) if zero_tol is None else zero_tol
    cut = -max(threshold, tol)
    h = oracle.entropy
    values: dict[VariableSet, float] = {EMPTY: 0.0}
    clusters: list[VariableSet] = []
    findings: list[SynergyFinding] = []
    seen: set[int] = set()
    synergy_triples: list[VariableSet] = []

    def store(subset: VariableSet) -> None:
        for sub in subset.subsets():
            if sub not in values:
                values[sub] = to_millibits(_alternating_sum(h, sub))

    node_order = sorted(range(g.p), key=lambda v: (-g.degree(v), v))
    for kappa in range(3, max_order + 1):
        for c in node_order:
            nb = list(g.neighbours(c))
            if len(nb) < kappa - 1:
                continue
            tuples = sorted(combinations(nb, kappa - 1), key=lambda t: (_tuple_strength(oracle, t), t))
            for tup in tuples:
                subset = VariableSet(tup).add(c)
                if int(subset) in seen:
                    continue
                if kappa > 3 and not any(t <= subset for t in synergy_triples):
                    continue
                seen.add(int(subset))
                clusters.append(subset)
                store(subset)
                if kappa == 3:
                    d = values[subset]
                    if d < cut:
                        synergy_triples.append(subset)
                        findings.append(make_finding(oracle, subset, EMPTY, d, response))
                else:
                    for t in subset.subsets(min_size=3, max_size=3):
                        if not g.induced_connected(t):
                            continue
                        rest = subset - t
                        d = conditional_delta(oracle, t, rest)
                        if d < cut:
                            findings.append(make_finding(oracle, t, rest, d, response))

    table = DeltaTable(oracle.p, values, oracle.names, provenance=oracle.describe())
    return ScanResult(table, clusters, findings, threshold, tol)


@dataclass
class ColouredGraph:
    base: Graph
    node_colours: dict[int, str]
    edge_highlights: frozenset = field(default_factory=frozenset)

    def nodes_with(self, colour: str) -> list[int]:
        return [v for v in range(self.base.p) if self.node_colours[v] == colour]

    def to_dot(self, name: str = "synergies") -> str:
        return to_dot(self, name)


def colour_synergies(g: Graph, findings: Sequence[SynergyFinding]) -> ColouredGraph:
    """Colour colliders red and the other members of synergies yellow.

    A node that is the collider of any finding stays red even when it is a
    non-collider member of another. The two edges joining each collider to
    the rest of its triple are highlighted when present in ``g``.
    """
    colours = {v: WHITE for v in range(g.p)}
    highlights = set()
    for f in findings:
        if not f.triple <= VariableSet.full(g.p):
            raise InputError(f"finding {f.triple!r} is not within the graph")
        colours[f.collider] = RED
    for f in findings:
        for v in f.triple:
            if colours[v] != RED:
                colours[v] = YELLOW
        for v in f.triple:
            if v != f.collider and g.has_edge(v, f.collider):
                highlights.add((min(v, f.collider), max(v, f.collider)))
    return ColouredGraph(g, colours, frozenset(highlights))


def _dot_id(name: str) -> str:
    return '"' + str(name).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(cg: ColouredGraph, name: str = "synergies") -> str:
    """Graphviz source with a fixed node, edge and attribute order."""
    g = cg.base
    lines = [f"graph {_dot_id(name)} {{", "  node [style=filled];"]
    for v in range(g.p):
        lines.append(f"  {_dot_id(g.names[v])} [fillcolor={cg.node_colours[v]}];")
    for a, b in sorted(g.edges):
        attr = " [color=red, penwidth=2]" if (a, b) in cg.edge_highlights else ""
        lines.append(f"  {_dot_id(g.names[a])} -- {_dot_id(g.names[b])}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def check_separation_zero(g: Graph, oracle: EntropyOracle, A, B, C=EMPTY, zero_tol: float | None = None) -> bool:
    """Model-versus-oracle diagnostic for separation.

    Returns True when ``C`` separates ``A`` from ``B`` in ``g`` and the
    conditional difference ``delta_{A u B | C}`` vanishes within
    ``zero_tol``. When ``C`` does not separate, there is nothing to check
    and False is returned.
    """
    A, B, C = as_set(A), as_set(B), as_set(C)
    check_disjoint(A, B, C)
    if not A or not B:
        raise InputError("A and B must be nonempty")
    if not g.separates(A, B, C):
        return False
    tol = default_zero_tol(oracle) if zero_tol is None else zero_tol
    return abs(conditional_delta(oracle, A | B, C)) <= tol


def disconnected_triples(g: Graph) -> list[VariableSet]:
    """Triples whose induced subgraph is not connected."""
    return [
        VariableSet(t) for t in combinations(range(g.p), 3) if not g.induced_connected(VariableSet(t))
    ]
