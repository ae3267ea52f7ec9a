"""Brute-force reference implementations used only by the tests.

They read the raw edge list / a dense adjacency matrix and share no code
with ``cospread.features``.
"""

import math

import numpy as np

from cospread.graph import SignedGraph


def random_signed_graph(rng, max_nodes=50, density=None, parallel_prob=0.15):
    n = int(rng.integers(2, max_nodes + 1))
    p = density if density is not None else rng.uniform(0.03, 0.4)
    triples = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                triples.append((u, v, int(rng.choice([-1, 1]))))
                if rng.random() < parallel_prob:
                    triples.append((u, v, int(rng.choice([-1, 1]))))
    if not triples:
        triples.append((0, 1, 1))
    used = sorted({x for t in triples for x in t[:2]})
    relabel = {old: new for new, old in enumerate(used)}
    return SignedGraph.from_triples([(relabel[u], relabel[v], w) for u, v, w in triples])


def edge_list(g):
    return [(e.a, e.b, e.weight) for e in g.edges]


def dense_adjacency(g):
    A = np.zeros((g.n_nodes, g.n_nodes))
    for a, b, _ in edge_list(g):
        A[a, b] = A[b, a] = 1.0
    return A


def neighbor_sets(g):
    nb = [set() for _ in range(g.n_nodes)]
    for a, b, _ in edge_list(g):
        nb[a].add(b)
        nb[b].add(a)
    return nb


def degree(g, u):
    return int(dense_adjacency(g)[u].sum())


def clustering(g, u):
    A = dense_adjacency(g)
    nb = np.flatnonzero(A[u])
    d = len(nb)
    if d < 2:
        return 0.0
    links = sum(A[i, j] for k, i in enumerate(nb) for j in nb[k + 1:])
    return links / (d * (d - 1) / 2)


def propensity(g, u):
    ws = [w for a, b, w in edge_list(g) if u in (a, b)]
    return sum(w > 0 for w in ws) / len(ws)


def majority_sign(g, x, y):
    s = sum(w for a, b, w in edge_list(g) if {a, b} == {x, y})
    return 1 if s >= 0 else -1


def mutual_sign(g, u, v):
    nb = neighbor_sets(g)
    common = [i for i in range(g.n_nodes) if i in nb[u] and i in nb[v]]
    if not common:
        return 0.0
    return sum(majority_sign(g, u, i) == majority_sign(g, v, i) for i in common) / len(common)


def masked_shortest_path(g, u, v):
    """Floyd-Warshall on the adjacency with the u-v entry zeroed."""
    n = g.n_nodes
    D = np.where(dense_adjacency(g) > 0, 1.0, np.inf)
    D[u, v] = D[v, u] = np.inf
    np.fill_diagonal(D, 0.0)
    for k in range(n):
        D = np.minimum(D, D[:, [k]] + D[[k], :])
    d = D[u, v]
    return n if math.isinf(d) else int(d)


def jaccard(g, u, v):
    nb = neighbor_sets(g)
    union = nb[u] | nb[v]
    return len(nb[u] & nb[v]) / len(union) if union else 0.0


def adamic_adar(g, u, v):
    nb = neighbor_sets(g)
    return sum(1.0 / math.log(len(nb[w])) for w in nb[u] & nb[v])


def eigenvector(g):
    """Normalized projection of the all-ones vector onto the top eigenspace of A."""
    A = dense_adjacency(g)
    vals, vecs = np.linalg.eigh(A)
    top = vals >= vals.max() - 1e-9
    V = vecs[:, top]
    x = V @ (V.T @ np.ones(len(A)))
    return x / np.linalg.norm(x)


def check_against_oracles(g):
    """Assert every metric op in ``cospread.features`` agrees with the versions here."""
    from cospread import features as F

    eig = F.eigenvector_centrality(g)
    np.testing.assert_allclose(eig, eigenvector(g), atol=1e-6)
    assert np.all(eig >= 0)
    for u in range(g.n_nodes):
        assert F.degree(g, u) == degree(g, u)
        assert abs(F.degree_centrality(g, u) - degree(g, u) / (g.n_nodes - 1)) <= 1e-9
        assert abs(F.clustering_coefficient(g, u) - clustering(g, u)) <= 1e-9
        assert abs(F.propensity(g, u) - propensity(g, u)) <= 1e-9
    pairs = {(e.a, e.b) for e in g.edges}
    # a few non-adjacent pairs as well
    rng = np.random.default_rng(g.n_nodes)
    for _ in range(3):
        u, v = rng.integers(0, g.n_nodes, 2)
        if u != v:
            pairs.add((int(min(u, v)), int(max(u, v))))
    for u, v in pairs:
        assert abs(F.mutual_sign_ratio(g, u, v) - mutual_sign(g, u, v)) <= 1e-9
        assert F.shortest_path_linking(g, u, v) == masked_shortest_path(g, u, v)
        assert abs(F.jaccard(g, u, v) - jaccard(g, u, v)) <= 1e-9
        assert abs(F.adamic_adar(g, u, v) - adamic_adar(g, u, v)) <= 1e-9
