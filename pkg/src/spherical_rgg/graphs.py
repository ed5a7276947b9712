"""Labeled simple graphs, their statistics, and random graph samplers.

Graphs are labeled: inclusion means every edge of the pattern is an edge of
the host with the same endpoints.  The text format is a header line
``n <count>`` followed by one ``j k`` pair per line; lines starting with
``#`` are comments.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .estimate import as_generator
from .exceptions import DomainError


@dataclass(frozen=True)
class GraphStats:
    """Nonisolated vertex count, edge count, maximum degree, triangle count."""

    mu: int
    sigma: int
    delta: int
    tau: int


class Graph:
    """Simple undirected graph on vertices ``0 .. n-1``.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of pairs
        Unordered pairs ``(j, k)`` with ``j != k``.  Duplicates are rejected.
    """

    def __init__(self, n, edges=()):
        n = int(n)
        if n < 0:
            raise DomainError("vertex count must be nonnegative")
        canon = []
        for j, k in edges:
            j, k = int(j), int(k)
            if j == k:
                raise DomainError(f"self-loop at vertex {j}")
            if not (0 <= j < n and 0 <= k < n):
                raise DomainError(f"edge ({j}, {k}) has an endpoint outside 0..{n - 1}")
            canon.append((j, k) if j < k else (k, j))
        edge_set = frozenset(canon)
        if len(edge_set) != len(canon):
            raise DomainError("duplicate edge")
        self.n = n
        self.edges = tuple(sorted(edge_set))

    @classmethod
    def complete(cls, n):
        return cls(n, ((j, k) for j in range(n) for k in range(j + 1, n)))

    @classmethod
    def empty(cls, n):
        return cls(n)

    @classmethod
    def path(cls, n):
        return cls(n, ((j, j + 1) for j in range(n - 1)))

    @cached_property
    def adjacency(self):
        """Sorted neighbor lists."""
        nbrs = [[] for _ in range(self.n)]
        for j, k in self.edges:
            nbrs[j].append(k)
            nbrs[k].append(j)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def edge_set(self):
        return frozenset(self.edges)

    @property
    def num_edges(self):
        return len(self.edges)

    def degrees(self):
        return np.array([len(a) for a in self.adjacency], dtype=int)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={list(self.edges)})"

    def to_text(self, comment=None):
        """Serialize to the edge-list format."""
        lines = []
        if comment:
            lines.extend("# " + c for c in str(comment).splitlines())
        lines.append(f"n {self.n}")
        lines.extend(f"{j} {k}" for j, k in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        """Parse the edge-list format written by :meth:`to_text`."""
        n = None
        edges = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 2 or parts[0] != "n":
                    raise DomainError(f"expected header 'n <count>', got {line!r}")
                n = int(parts[1])
                continue
            if len(parts) != 2:
                raise DomainError(f"expected 'j k', got {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
        if n is None:
            raise DomainError("missing 'n <count>' header")
        return cls(n, edges)

    def strip_isolated(self):
        """Drop isolated vertices and relabel the rest in increasing order.

        Returns
        -------
        Graph
            Graph on the nonisolated vertices only.
        list of int
            ``kept[i]`` is the original label of new vertex ``i``.
        """
        kept = sorted({v for e in self.edges for v in e})
        index = {v: i for i, v in enumerate(kept)}
        return Graph(len(kept), ((index[j], index[k]) for j, k in self.edges)), kept


def graph_stats(g):
    """Return the :class:`GraphStats` of ``g``.

    Triangles are counted once each by merging the sorted neighbor lists of
    the two endpoints of every edge and keeping common neighbors above both.
    """
    adj = g.adjacency
    deg = [len(a) for a in adj]
    mu = sum(1 for x in deg if x > 0)
    tau = 0
    for j, k in g.edges:
        a, b = adj[j], adj[k]
        i = jj = 0
        while i < len(a) and jj < len(b):
            if a[i] == b[jj]:
                if a[i] > k:
                    tau += 1
                i += 1
                jj += 1
            elif a[i] < b[jj]:
                i += 1
            else:
                jj += 1
    return GraphStats(mu=mu, sigma=len(g.edges), delta=max(deg, default=0), tau=tau)


def sample_sphere_points(count, d, rng):
    """Draw ``count`` independent uniform points on the unit sphere in ``R^d``.

    Returns
    -------
    ndarray, shape (count, d)
    """
    if d < 1:
        raise DomainError(f"dimension must be at least 1, got {d}")
    z = as_generator(rng).standard_normal((int(count), int(d)))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _upper_pairs(n):
    return np.triu_indices(n, k=1)


def sample_rgg(n, d, t, rng):
    """Sample ``G(n, p, d)`` with threshold ``t``: edge iff ``<x_j, x_k> >= t``."""
    if n < 1:
        raise DomainError("need at least one vertex")
    x = sample_sphere_points(n, d, rng)
    gram = x @ x.T
    rows, cols = _upper_pairs(n)
    keep = gram[rows, cols] >= t
    return Graph(n, zip(rows[keep].tolist(), cols[keep].tolist()))


def sample_er(n, p, rng):
    """Sample the Erdos-Renyi graph ``G(n, p)``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    rows, cols = _upper_pairs(int(n))
    keep = as_generator(rng).random(rows.size) < p
    return Graph(n, zip(rows[keep].tolist(), cols[keep].tolist()))


def sample_gram(n, d, size, rng):
    """Off-diagonal Gram entries of ``n`` uniform sphere points, ``size`` times.

    Uses the Bartlett decomposition of a Wishart matrix: the rows of a lower
    triangular ``L`` with ``L_ii ~ chi(d - i)`` and standard normal entries
    below the diagonal have the same Gram matrix law as ``n`` iid standard
    Gaussian vectors in ``R^d``.  Normalizing rows then gives the exact law
    of the sphere inner products at a cost independent of ``d``.

    Returns
    -------
    ndarray, shape (size, n, n)
        Symmetric with unit diagonal.
    """
    if d < n:
        # Bartlett needs d >= n; fall back to explicit points
        out = np.empty((int(size), n, n))
        gen = as_generator(rng)
        for s in range(int(size)):
            x = sample_sphere_points(n, d, gen)
            out[s] = x @ x.T
        return out
    gen = as_generator(rng)
    size = int(size)
    lower = np.zeros((size, n, n))
    for i in range(n):
        lower[:, i, i] = np.sqrt(gen.chisquare(d - i, size))
        if i:
            lower[:, i, :i] = gen.standard_normal((size, i))
    lower /= np.linalg.norm(lower, axis=2, keepdims=True)
    return lower @ np.swapaxes(lower, 1, 2)


def contains(host, pattern):
    """Labeled inclusion: every edge of ``pattern`` is an edge of ``host``."""
    if pattern.n > host.n:
        raise DomainError(f"pattern has {pattern.n} vertices, host only {host.n}")
    return pattern.edge_set <= host.edge_set


def class_membership(stats, n, K):
    """Membership in the class of well-behaved graphs on ``n`` vertices.

    True iff ``mu <= n``, ``sigma <= K n``, ``delta <= log n`` and
    ``tau <= log n``.
    """
    if n < 2:
        raise DomainError("class membership needs n >= 2")
    log_n = math.log(n)
    return bool(
        stats.mu <= n and stats.sigma <= K * n and stats.delta <= log_n and stats.tau <= log_n
    )
