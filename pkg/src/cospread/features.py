"""Structural edge features on a signed co-spreading graph.

Each edge sample gets 14 numbers: five node metrics for each endpoint
(degree, degree centrality, eigenvector centrality, clustering, propensity)
and four pair metrics (mutual-sign ratio, shortest path with the direct link
masked, Jaccard, Adamic-Adar).
"""

from __future__ import annotations

import csv
import logging
import math
import multiprocessing as mp
from dataclasses import dataclass

import numpy as np

from cospread.graph import GraphError, SignedGraph

logger = logging.getLogger(__name__)

COLUMNS = (
    "deg_a", "deg_b",
    "cent_a", "cent_b",
    "eig_a", "eig_b",
    "clust_a", "clust_b",
    "prop_a", "prop_b",
    "mutual_sign_ratio", "shortest_path",
    "jaccard", "adamic_adar",
)
LEAKAGE_MODES = ("paper", "exclude_self")
# propensity of an endpoint whose only edge is the masked target edge
NO_EVIDENCE_PROPENSITY = 0.5


class CentralityError(RuntimeError):
    def __init__(self, delta, cfg):
        super().__init__(
            f"eigenvector centrality did not converge: last delta {delta:.3e} "
            f"> tol {cfg.tol:g} after {cfg.max_iter} iterations"
        )
        self.delta = delta


@dataclass(frozen=True)
class CentralityConfig:
    tol: float = 1e-8
    max_iter: int = 1000

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError(f"invalid centrality config {self}")


@dataclass
class FeatureMatrix:
    X: np.ndarray
    y: np.ndarray
    columns: tuple[str, ...] = COLUMNS

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2 or self.X.shape[1] != len(self.columns):
            raise ValueError(f"matrix shape {self.X.shape} does not match {len(self.columns)} columns")
        if len(self.y) != len(self.X):
            raise ValueError("row/target count mismatch")
        if not np.isin(self.y, (-1, 1)).all():
            raise ValueError("targets must be -1 or +1")

    def __len__(self):
        return len(self.X)

    def take(self, rows) -> "FeatureMatrix":
        return FeatureMatrix(self.X[rows], self.y[rows], self.columns)

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([*self.columns, "target"])
            for row, t in zip(self.X, self.y):
                w.writerow([f"{v:.10g}" for v in row] + [int(t)])

    @classmethod
    def from_csv(cls, path) -> "FeatureMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0][-1] != "target":
            raise ValueError(f"{path}: expected a header ending in 'target'")
        header, body = rows[0], rows[1:]
        data = np.array(body, dtype=np.float64).reshape(len(body), len(header))
        return cls(data[:, :-1], data[:, -1].astype(np.int64), tuple(header[:-1]))


# -- node metrics ------------------------------------------------------------

def degree(g: SignedGraph, u: int) -> int:
    return g.degree(u)


def degree_centrality(g: SignedGraph, u: int) -> float:
    if g.n_nodes < 2:
        raise GraphError("degree centrality needs at least two nodes")
    return g.degree(u) / (g.n_nodes - 1)


def _csr(g: SignedGraph):
    rows = np.repeat(np.arange(g.n_nodes), [len(nb) for nb in g.adj])
    cols = np.fromiter((v for nb in g.adj for v in nb), dtype=np.int64, count=len(rows))
    return rows, cols


def eigenvector_centrality(g: SignedGraph, cfg: CentralityConfig = CentralityConfig()) -> np.ndarray:
    """Leading eigenvector of the unsigned 0/1 adjacency, by power iteration.

    Iterates with ``A + I``: same eigenvectors, but the shift keeps the
    iteration from oscillating on bipartite graphs (stars, trees). Starts
    from the all-ones vector; returned vector has unit L2 norm.
    """
    n = g.n_nodes
    if n == 0:
        raise GraphError("empty graph")
    rows, cols = _csr(g)
    x = np.full(n, 1.0 / math.sqrt(n))
    delta = math.inf
    for _ in range(cfg.max_iter):
        y = x + np.bincount(rows, weights=x[cols], minlength=n)
        y /= np.linalg.norm(y)
        delta = float(np.linalg.norm(y - x))
        x = y
        if delta < cfg.tol:
            return x
    raise CentralityError(delta, cfg)


def triangles(g: SignedGraph, u: int) -> int:
    nb = g.adj[u]
    t = 0
    for w in nb:
        other = g.adj[w]
        small, large = (nb, other) if len(nb) <= len(other) else (other, nb)
        t += sum(1 for z in small if z in large)
    return t // 2


def clustering_coefficient(g: SignedGraph, u: int) -> float:
    d = g.degree(u)
    if d < 2:
        return 0.0
    return 2.0 * triangles(g, u) / (d * (d - 1))


def propensity(g: SignedGraph, u: int, exclude: int | None = None) -> float:
    """Fraction of ``u``'s incident edges that are positive.

    Parallel edges count separately. ``exclude`` is an edge index left out of
    both counts.
    """
    pos = total = 0
    for k in g.incident_edges(u):
        if k == exclude:
            continue
        total += 1
        pos += g.edges[k].weight > 0
    if total == 0:
        raise GraphError(f"node {u} has no edges left to measure propensity on")
    return pos / total


# -- pair metrics ------------------------------------------------------------

def _pair_sign(g: SignedGraph, u: int, v: int) -> int:
    # majority over parallel edges, ties count as positive
    return 1 if sum(g.pair_weights(u, v)) >= 0 else -1


def mutual_sign_ratio(g: SignedGraph, u: int, v: int, common=None) -> float:
    if common is None:
        common = g.common_neighbors(u, v)
    if not common:
        return 0.0
    same = sum(1 for i in common if _pair_sign(g, u, i) == _pair_sign(g, v, i))
    return same / len(common)


def shortest_path_linking(g: SignedGraph, u: int, v: int) -> int:
    """Hop distance from ``u`` to ``v`` once every direct u-v edge is masked.

    Returns ``g.n_nodes`` when masking leaves no path. The graph itself is
    never modified; the mask is applied during the search.
    """
    g._check(u)
    g._check(v)
    if u == v:
        return 0
    return _masked_distance(g.adj, u, v, g.n_nodes)


def _masked_distance(adj, u, v, sentinel):
    # bidirectional BFS, always growing the smaller frontier by one full level
    dist_u, dist_v = {u: 0}, {v: 0}
    front_u, front_v = [u], [v]
    while front_u and front_v:
        if len(front_u) > len(front_v):
            front_u, front_v = front_v, front_u
            dist_u, dist_v = dist_v, dist_u
        best = None
        nxt = []
        for x in front_u:
            dx = dist_u[x] + 1
            for y in adj[x]:
                if (x == u and y == v) or (x == v and y == u):
                    continue
                if y in dist_v:
                    cand = dx + dist_v[y]
                    if best is None or cand < best:
                        best = cand
                elif y not in dist_u:
                    dist_u[y] = dx
                    nxt.append(y)
        if best is not None:
            return best
        front_u = nxt
    return sentinel


def bridges(g: SignedGraph) -> set[tuple[int, int]]:
    """Node pairs whose removal (all parallel edges included) disconnects them.

    Iterative Tarjan low-link over the simple neighbour graph.
    """
    n = g.n_nodes
    disc = [-1] * n
    low = [0] * n
    out = set()
    timer = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(g.adj[root]))]
        while stack:
            node, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if disc[w] < 0:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, node, iter(g.adj[w])))
                    advanced = True
                    break
                low[node] = min(low[node], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent >= 0:
                low[parent] = min(low[parent], low[node])
                if low[node] > disc[parent]:
                    out.add((min(parent, node), max(parent, node)))
    return out


def jaccard(g: SignedGraph, u: int, v: int) -> float:
    nu, nv = g.adj[u], g.adj[v]
    inter = len(g.common_neighbors(u, v))
    union = len(nu) + len(nv) - inter
    return inter / union if union else 0.0


def adamic_adar(g: SignedGraph, u: int, v: int, common=None) -> float:
    if common is None:
        common = g.common_neighbors(u, v)
    # a common neighbour touches both u and v, so its degree is >= 2
    return sum(1.0 / math.log(len(g.adj[w])) for w in sorted(common))


# -- assembly ----------------------------------------------------------------

class _NodeTable:
    def __init__(self, g: SignedGraph, eig: np.ndarray):
        n = g.n_nodes
        self.deg = np.array([len(nb) for nb in g.adj], dtype=np.float64)
        self.cent = self.deg / (n - 1) if n > 1 else np.zeros(n)
        self.eig = eig
        self.tri = np.array([triangles(g, u) for u in range(n)], dtype=np.float64)
        self.n_edges = np.zeros(n)
        self.n_pos = np.zeros(n)
        np.add.at(self.n_edges, g.ea, 1)
        np.add.at(self.n_edges, g.eb, 1)
        pos = g.weights > 0
        np.add.at(self.n_pos, g.ea[pos], 1)
        np.add.at(self.n_pos, g.eb[pos], 1)


def _endpoint(g, table, u, other, k, n_common, exclude_self):
    d = table.deg[u]
    tri = table.tri[u]
    n_e, n_p = table.n_edges[u], table.n_pos[u]
    if exclude_self:
        n_e -= 1
        n_p -= g.edges[k].weight > 0
        if len(g.adj[u][other]) == 1:
            d -= 1
            tri -= n_common
    clust = 2.0 * tri / (d * (d - 1)) if d >= 2 else 0.0
    prop = n_p / n_e if n_e > 0 else NO_EVIDENCE_PROPENSITY
    cent = d / (g.n_nodes - 1) if g.n_nodes > 1 else 0.0
    return d, cent, table.eig[u], clust, prop


_WORK = {}


def _rows(lo, hi):
    g, table, bridge_set, exclude_self = (
        _WORK["g"], _WORK["table"], _WORK["bridges"], _WORK["exclude_self"]
    )
    out = np.empty((hi - lo, len(COLUMNS)))
    for r, k in enumerate(range(lo, hi)):
        e = g.edges[k]
        a, b = e.a, e.b
        common = g.common_neighbors(a, b)
        fa = _endpoint(g, table, a, b, k, len(common), exclude_self)
        fb = _endpoint(g, table, b, a, k, len(common), exclude_self)
        if (a, b) in bridge_set:
            sp = g.n_nodes
        else:
            sp = _masked_distance(g.adj, a, b, g.n_nodes)
        union = len(g.adj[a]) + len(g.adj[b]) - len(common)
        out[r, 0:10:2] = fa
        out[r, 1:10:2] = fb
        out[r, 10] = mutual_sign_ratio(g, a, b, common)
        out[r, 11] = sp
        out[r, 12] = len(common) / union if union else 0.0
        out[r, 13] = adamic_adar(g, a, b, common)
    return out


def featurize_all(
    g: SignedGraph,
    leakage_mode: str = "paper",
    cfg: CentralityConfig = CentralityConfig(),
    threads: int = 1,
    eig: np.ndarray | None = None,
) -> FeatureMatrix:
    """One 14-feature row per edge, in edge order (endpoint ``a`` first).

    ``paper`` lets the target edge count towards its own endpoints' degree,
    clustering and propensity. ``exclude_self`` masks that one edge for those
    endpoint metrics; eigenvector centrality stays global.
    """
    if leakage_mode not in LEAKAGE_MODES:
        raise ValueError(f"unknown leakage mode {leakage_mode!r}")
    if eig is None:
        eig = eigenvector_centrality(g, cfg)
    _WORK.update(g=g, table=_NodeTable(g, eig), bridges=bridges(g),
                 exclude_self=leakage_mode == "exclude_self")
    m = g.n_edges
    try:
        threads = max(1, int(threads))
        if threads == 1 or m < 2000 or "fork" not in mp.get_all_start_methods():
            X = _rows(0, m)
        else:
            step = -(-m // (threads * 8))
            bounds = [(lo, min(lo + step, m)) for lo in range(0, m, step)]
            with mp.get_context("fork").Pool(threads) as pool:
                X = np.vstack(pool.starmap(_rows, bounds))
    finally:
        _WORK.clear()
    return FeatureMatrix(X, g.weights.copy())
