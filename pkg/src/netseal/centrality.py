"""Degree, betweenness, harmonic closeness, eccentricity and eigenvector
centrality for undirected graphs.

Shortest-path measures share one batched breadth-first pass (Brandes
accumulation over blocks of sources, carried out with sparse products).
Every reduction runs in a fixed order so that equal graphs give
bit-identical floats; the values are hashed downstream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from netseal.graph import Graph

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000
SOURCE_BATCH = 128


class NotConverged(ArithmeticError):
    pass


class DegenerateSpectrum(RuntimeWarning):
    """Two components share the leading eigenvalue; the eigenvector
    split between them depends on the start vector."""


@dataclass(frozen=True)
class CentralityRecord:
    node: int
    degree: float
    betweenness: float
    harmonic_closeness: float
    eccentricity: float
    eigenvector: float

    def values(self) -> tuple[float, float, float, float, float]:
        return (self.degree, self.betweenness, self.harmonic_closeness,
                self.eccentricity, self.eigenvector)


@dataclass(frozen=True)
class CentralityTable:
    records: tuple[CentralityRecord, ...]

    def __post_init__(self):
        ids = [r.node for r in self.records]
        if any(a >= b for a, b in zip(ids, ids[1:])):
            raise ValueError("records must be strictly ascending by node")

    @property
    def node_count(self) -> int:
        return len(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def get(self, node: int) -> CentralityRecord:
        for r in self.records:
            if r.node == node:
                return r
        raise KeyError(node)

    @classmethod
    def from_records(cls, records) -> CentralityTable:
        return cls(tuple(sorted(records, key=lambda r: r.node)))


def adjacency_matrix(g: Graph) -> sparse.csr_matrix:
    """CSR adjacency with rows/columns in ascending node-id order."""
    index = {v: i for i, v in enumerate(g.nodes)}
    n = len(index)
    indptr = [0]
    indices: list[int] = []
    for v in g.nodes:
        indices.extend(sorted(index[w] for w in g.neighbors(v)))
        indptr.append(len(indices))
    data = np.ones(len(indices))
    return sparse.csr_matrix((data, np.asarray(indices, dtype=np.int64),
                              np.asarray(indptr, dtype=np.int64)), shape=(n, n))


def _path_measures(A: sparse.csr_matrix, batch: int = SOURCE_BATCH):
    """Betweenness, harmonic closeness and eccentricity in one sweep.

    Each block of sources runs a level-synchronous BFS (shortest-path
    counts) followed by the dependency back-propagation. Blocks are reduced
    in ascending source order.
    """
    n = A.shape[0]
    btw = np.zeros(n)
    harm = np.zeros(n)
    ecc = np.zeros(n)
    for start in range(0, n, batch):
        src = np.arange(start, min(start + batch, n))
        cols = np.arange(len(src))
        shape = (n, len(src))
        dist = np.full(shape, -1, dtype=np.int32)
        sigma = np.zeros(shape)
        dist[src, cols] = 0
        sigma[src, cols] = 1.0
        frontier = sigma.copy()
        # flat views: fancy indexing on a raveled view beats ndarray.flat
        dist_f, sigma_f, front_f = dist.reshape(-1), sigma.reshape(-1), frontier.reshape(-1)
        levels = [np.ravel_multi_index((src, cols), shape)]
        unseen = (dist < 0).reshape(-1)
        while True:
            reach = (A @ frontier).reshape(-1)
            idx = np.flatnonzero(reach > 0.0)
            idx = idx[unseen[idx]]
            if not idx.size:
                break
            dist_f[idx] = len(levels)
            unseen[idx] = False
            sigma_f[idx] = reach[idx]
            front_f[levels[-1]] = 0.0
            front_f[idx] = reach[idx]
            levels.append(idx)

        delta = np.zeros(shape)
        coeff = np.zeros(shape)
        delta_f, coeff_f = delta.reshape(-1), coeff.reshape(-1)
        for d in range(len(levels) - 1, 0, -1):
            here, prev = levels[d], levels[d - 1]
            coeff_f[here] = (1.0 + delta_f[here]) / sigma_f[here]
            pulled = (A @ coeff).reshape(-1)
            coeff_f[here] = 0.0
            delta_f[prev] += sigma_f[prev] * pulled[prev]
        delta[src, cols] = 0.0
        btw += delta.sum(axis=1)

        harm[src] = np.where(dist > 0, 1.0 / np.maximum(dist, 1), 0.0).sum(axis=0)
        connected = (dist >= 0).all(axis=0)
        far = dist.max(axis=0)
        ecc[src] = np.where(connected & (far > 0), 1.0 / np.maximum(far, 1), 0.0)
    # every unordered pair was visited from both ends
    return btw / 2.0, harm, ecc


def _by_node(g: Graph, values) -> dict[int, float]:
    return {v: float(x) for v, x in zip(g.nodes, values)}


def degree_centrality(g: Graph) -> dict[int, float]:
    n = len(g)
    if n <= 1:
        return dict.fromkeys(g.nodes, 0.0)
    return {v: g.degree(v) / (n - 1) for v in g.nodes}


def betweenness_centrality(g: Graph) -> dict[int, float]:
    """Raw (unnormalized) betweenness; each unordered pair counted once."""
    if len(g) <= 1:
        return dict.fromkeys(g.nodes, 0.0)
    return _by_node(g, _path_measures(adjacency_matrix(g))[0])


def harmonic_closeness(g: Graph) -> dict[int, float]:
    """Sum of 1/dist(v, t); unreachable t contribute nothing."""
    if len(g) <= 1:
        return dict.fromkeys(g.nodes, 0.0)
    return _by_node(g, _path_measures(adjacency_matrix(g))[1])


def eccentricity_centrality(g: Graph) -> dict[int, float]:
    """1 / max dist(v, t), and 0 when some node is unreachable from v."""
    if len(g) <= 1:
        return dict.fromkeys(g.nodes, 0.0)
    return _by_node(g, _path_measures(adjacency_matrix(g))[2])


def _components(A: sparse.csr_matrix) -> np.ndarray:
    return csgraph.connected_components(A, directed=False)[1]


def _power_iteration(A: sparse.csr_matrix, tol: float, max_iter: int):
    n = A.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    change = np.inf
    for _ in range(max_iter):
        # shift by the identity so bipartite graphs (eigenvalues +-lambda) converge
        y = A @ x + x
        y /= np.linalg.norm(y)
        change = float(np.max(np.abs(y - x)))
        x = y
        Ax = A @ x
        lam = float(x @ Ax)
        if change < tol and float(np.max(np.abs(Ax - lam * x))) <= tol:
            break
    else:
        if change >= tol:
            raise NotConverged(f"power iteration stalled at change {change:.3e} after {max_iter} steps")
    return x, lam


def _check_degenerate(A: sparse.csr_matrix, x: np.ndarray, lam: float, tol: float) -> None:
    labels = _components(A)
    carrying = []
    for c in np.unique(labels):
        part = labels == c
        w = x[part]
        if np.linalg.norm(w) > 1e-6:
            sub = A[part][:, part]
            carrying.append(float(w @ (sub @ w)) / float(w @ w))
    if len(carrying) > 1 and max(carrying) - min(carrying) < max(tol, tol * abs(lam)):
        warnings.warn(
            f"{len(carrying)} components share leading eigenvalue {lam:.6f}; "
            "eigenvector centrality depends on the start vector",
            DegenerateSpectrum,
            stacklevel=3,
        )


def eigenvector_centrality(g: Graph, tol: float = DEFAULT_TOL,
                           max_iter: int = DEFAULT_MAX_ITER) -> tuple[dict[int, float], float]:
    """Unit-norm leading eigenvector of the adjacency matrix and its eigenvalue.

    Power iteration from the uniform vector. Stops once successive iterates
    differ by less than ``tol`` in every entry (and the residual
    ``|Av - lambda v|`` is below ``tol`` too, when reachable within
    ``max_iter``). Raises :class:`NotConverged` otherwise.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if len(g) <= 1:
        return dict.fromkeys(g.nodes, 0.0), 0.0
    A = adjacency_matrix(g)
    x, lam = _eigen(A, tol, max_iter)
    return _by_node(g, x), lam


def _eigen(A, tol, max_iter):
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, lam = _power_iteration(A, tol, max_iter)
    if x.sum() < 0:
        x = -x
    x = np.maximum(x, 0.0)
    _check_degenerate(A, x, lam, tol)
    return x, lam


def compute_all(g: Graph, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> CentralityTable:
    """All five measures for every node, ascending by node id."""
    n = len(g)
    if n == 0:
        return CentralityTable(())
    if n == 1:
        return CentralityTable((CentralityRecord(g.nodes[0], 0.0, 0.0, 0.0, 0.0, 0.0),))
    A = adjacency_matrix(g)
    deg = degree_centrality(g)
    btw, harm, ecc = _path_measures(A)
    eig, _ = _eigen(A, tol, max_iter)
    return CentralityTable(tuple(
        CentralityRecord(v, deg[v], float(btw[i]), float(harm[i]), float(ecc[i]), float(eig[i]))
        for i, v in enumerate(g.nodes)
    ))
