"""Signed undirected co-spreading graph.

Users are nodes; two users who spread the same news item are linked by an
edge carrying that item's sign. Nodes are densely re-indexed (first
appearance order) and the original user ids kept in ``users``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from cospread.ingest import Dataset

RULES = ("tree", "chain", "clique")


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    weight: int
    news_id: str


@dataclass(frozen=True)
class GraphStats:
    n_nodes: int
    n_edges: int
    avg_degree: float

    def to_json(self) -> dict:
        return {"nodes": self.n_nodes, "edges": self.n_edges, "avg_degree": self.avg_degree}


class SignedGraph:
    """Undirected multigraph with +1/-1 edge weights.

    ``adj[u]`` maps each neighbour of ``u`` to the indices of the edges
    joining them; more than one index means the pair co-spread several news
    items. Metrics that talk about neighbours use the key sets, metrics that
    count edges (propensity) walk the index lists.
    """

    def __init__(self, users, edges):
        self.users = list(users)
        self.index = {u: i for i, u in enumerate(self.users)}
        self.edges = list(edges)
        n = len(self.users)
        self.adj: list[dict[int, list[int]]] = [{} for _ in range(n)]
        for k, e in enumerate(self.edges):
            if e.a == e.b:
                raise GraphError(f"self-loop on node {e.a}")
            if e.weight not in (-1, 1):
                raise GraphError(f"edge {k} has weight {e.weight}")
            self.adj[e.a].setdefault(e.b, []).append(k)
            self.adj[e.b].setdefault(e.a, []).append(k)
        for u, nb in enumerate(self.adj):
            if not nb:
                raise GraphError(f"node {self.users[u]} is isolated")
        self.ea = np.fromiter((e.a for e in self.edges), dtype=np.int64, count=len(self.edges))
        self.eb = np.fromiter((e.b for e in self.edges), dtype=np.int64, count=len(self.edges))
        self.weights = np.fromiter((e.weight for e in self.edges), dtype=np.int64, count=len(self.edges))

    @classmethod
    def from_triples(cls, triples, n_nodes: int | None = None) -> "SignedGraph":
        """Graph over integer nodes from ``(u, v, weight[, news_id])`` tuples.

        Handy for fixtures; news ids default to the tuple position.
        """
        edges = []
        for k, t in enumerate(triples):
            u, v, w = t[:3]
            news = str(t[3]) if len(t) > 3 else str(k)
            edges.append(Edge(min(u, v), max(u, v), int(w), news))
        n = n_nodes if n_nodes is not None else 1 + max(max(e.a, e.b) for e in edges)
        return cls([str(i) for i in range(n)], edges)

    @property
    def n_nodes(self) -> int:
        return len(self.users)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def _check(self, u):
        if not 0 <= u < len(self.adj):
            raise GraphError(f"unknown node {u!r}")

    def node(self, user_id: str) -> int:
        try:
            return self.index[user_id]
        except KeyError:
            raise GraphError(f"unknown user {user_id!r}") from None

    def neighbors(self, u: int) -> set[int]:
        self._check(u)
        return set(self.adj[u])

    def common_neighbors(self, u: int, v: int) -> set[int]:
        self._check(u)
        self._check(v)
        small, large = sorted((self.adj[u], self.adj[v]), key=len)
        return {w for w in small if w in large}

    def degree(self, u: int) -> int:
        self._check(u)
        return len(self.adj[u])

    def incident_edges(self, u: int) -> list[int]:
        self._check(u)
        return [k for ks in self.adj[u].values() for k in ks]

    def pair_weights(self, u: int, v: int) -> list[int]:
        return [self.edges[k].weight for k in self.adj[u].get(v, ())]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["a", "b", "weight", "news_id"])
            for e in self.edges:
                w.writerow([self.users[e.a], self.users[e.b], e.weight, e.news_id])


def _pairs(rec, rule):
    s = rec.spreaders
    if rule == "clique":
        return combinations(s, 2)
    if rule == "tree" and rec.parent_of is not None:
        return ((rec.parent_of[c], c) for c in s if c in rec.parent_of)
    return zip(s, s[1:])


def build_graph(ds: Dataset, rule: str = "tree") -> SignedGraph:
    """Link co-spreaders of every news item under ``rule``.

    ``chain`` joins consecutive spreaders, ``tree`` joins each spreader to
    its propagation parent (chain when the record has no parent links),
    ``clique`` joins every pair. Self-loops are dropped and only users that
    end up with at least one edge become nodes. Each (pair, news) is one
    edge, so pairs that co-spread several items carry parallel edges.
    """
    if rule not in RULES:
        raise GraphError(f"unknown construction rule {rule!r}; choose from {RULES}")
    if not len(ds):
        raise GraphError("empty dataset")
    index: dict[str, int] = {}
    users: list[str] = []
    edges: list[Edge] = []
    seen: set[tuple[int, int, str]] = set()

    def idx(user):
        i = index.get(user)
        if i is None:
            i = index[user] = len(users)
            users.append(user)
        return i

    for rec in ds.records:
        for x, y in _pairs(rec, rule):
            if x == y:
                continue
            i, j = idx(x), idx(y)
            a, b = (i, j) if i < j else (j, i)
            key = (a, b, rec.news_id)
            if key in seen:
                continue
            seen.add(key)
            edges.append(Edge(a, b, rec.label, rec.news_id))
    if not edges:
        raise GraphError("construction produced no edges")
    return SignedGraph(users, edges)


def graph_stats(g: SignedGraph) -> GraphStats:
    if g.n_nodes == 0:
        raise GraphError("empty graph")
    return GraphStats(g.n_nodes, g.n_edges, 2.0 * g.n_edges / g.n_nodes)


def stats_json(stats: dict[str, GraphStats]) -> str:
    return json.dumps({rule: s.to_json() for rule, s in stats.items()}, indent=2)

