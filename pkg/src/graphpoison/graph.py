"""Immutable graph values: construction, normalization, connectivity, flips.

The adjacency matrix is kept dense (the attack gradient is a dense N x N
matrix anyway, and all benchmark graphs here have a few thousand nodes at
most). Graphs are value objects: every mutation constructs a new ``Graph``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

Array = np.ndarray


def _frozen(a: Array) -> Array:
    """Return a read-only copy of ``a`` (C-contiguous)."""
    out = np.ascontiguousarray(a).copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Graph:
    """An undirected, unweighted attributed graph with a labeled/unlabeled split.

    Attributes
    ----------
    adjacency : (N, N) float array
        Symmetric binary adjacency with zero diagonal.
    features : (N, d) float array
        Node feature matrix.
    labels : (N,) int array
        Class index per node, in ``{0 .. n_classes-1}``.
    labeled_mask : (N,) bool array
        True for nodes whose label is visible to the attacker (the training
        set); the complement is the unlabeled pool used for the attack loss
        and for evaluation.
    """

    adjacency: Array
    features: Array
    labels: Array
    labeled_mask: Array
    n_classes: int = field(default=0)

    def __post_init__(self) -> None:
        A = np.asarray(self.adjacency, dtype=np.float64)
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        m = np.asarray(self.labeled_mask, dtype=bool)

        n = A.shape[0]
        if A.ndim != 2 or A.shape[1] != n:
            raise ValueError(f"adjacency must be square, got shape {A.shape}")
        if X.ndim != 2 or X.shape[0] != n:
            raise ValueError(f"features must have {n} rows, got shape {X.shape}")
        if y.shape != (n,) or m.shape != (n,):
            raise ValueError("labels and labeled_mask must be 1-d of length n_nodes")
        if not np.array_equal(A, A.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diagonal(A) != 0.0):
            raise ValueError("adjacency diagonal must be zero")
        if not np.all((A == 0.0) | (A == 1.0)):
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(y < 0):
            raise ValueError("labels must be nonnegative class indices")
        k = self.n_classes if self.n_classes > 0 else int(y.max()) + 1 if n else 0
        if np.any(y >= k):
            raise ValueError(f"label index >= n_classes ({k})")
        if not (m.any() and (~m).any()):
            raise ValueError("labeled_mask needs at least one labeled and one unlabeled node")

        object.__setattr__(self, "adjacency", _frozen(A))
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y))
        object.__setattr__(self, "labeled_mask", _frozen(m))
        object.__setattr__(self, "n_classes", k)

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        """Number of undirected edges."""
        return int(self.adjacency.sum()) // 2

    @property
    def unlabeled_mask(self) -> Array:
        return ~self.labeled_mask

    def degrees(self) -> Array:
        return self.adjacency.sum(axis=1)

    def with_adjacency(self, adjacency: Array) -> "Graph":
        """New Graph sharing features/labels/mask with a different adjacency."""
        return Graph(adjacency, self.features, self.labels, self.labeled_mask, self.n_classes)


@dataclass(frozen=True)
class NormalizedAdjacency:
    """The symmetrically normalized adjacency D^{-1/2} (A + I) D^{-1/2}."""

    matrix: Array

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _frozen(np.asarray(self.matrix, dtype=np.float64)))

    def sparse(self) -> sp.csr_matrix:
        """CSR view for fast products (the matrix is as sparse as A + I)."""
        return sp.csr_matrix(self.matrix)


def build_graph(edges, features, labels, labeled_mask, n_classes: int = 0) -> Graph:
    """Build a Graph from an undirected edge list.

    Each ``(i, j)`` pair sets both ``A[i, j]`` and ``A[j, i]``; duplicates
    collapse. Node count comes from ``features``.

    Raises
    ------
    ValueError
        On out-of-range node indices, self-loop pairs, or labels outside
        ``{0 .. n_classes-1}``.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("features must be a 2-d (N, d) array")
    n = X.shape[0]
    A = np.zeros((n, n), dtype=np.float64)
    for i, j in edges:
        i, j = int(i), int(j)
        if i == j:
            raise ValueError(f"self-loop ({i}, {j}) not allowed")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) out of range for {n} nodes")
        A[i, j] = 1.0
        A[j, i] = 1.0
    return Graph(A, X, labels, labeled_mask, n_classes)


def normalize_dense(adjacency: Array) -> Array:
    """D^{-1/2} (A + I) D^{-1/2} for a dense (possibly non-binary) adjacency.

    Degrees are row sums of A + I, so they are strictly positive for any
    nonnegative A and the normalization never divides by zero. Accepting
    non-binary input lets the finite-difference oracle evaluate the same
    map on relaxed adjacencies.
    """
    A = np.asarray(adjacency, dtype=np.float64)
    tilde = A + np.eye(A.shape[0])
    inv_sqrt = 1.0 / np.sqrt(tilde.sum(axis=1))
    return tilde * np.outer(inv_sqrt, inv_sqrt)


def normalize_adjacency(g: Graph) -> NormalizedAdjacency:
    """Symmetrically normalized adjacency of ``g`` (self-loops added)."""
    return NormalizedAdjacency(normalize_dense(g.adjacency))


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component.

    Node indices are remapped densely, preserving relative order. Ties
    between equal-size components go to the one containing the smallest
    original node index.
    """
    n_comp, comp = connected_components(sp.csr_matrix(g.adjacency), directed=False)
    sizes = np.bincount(comp, minlength=n_comp)
    best_size = sizes.max()
    # among max-size components, the winner is the first one encountered
    # scanning nodes in index order
    winner = next(int(comp[v]) for v in range(g.n_nodes) if sizes[comp[v]] == best_size)
    keep = np.flatnonzero(comp == winner)
    sub = Graph(
        g.adjacency[np.ix_(keep, keep)],
        g.features[keep],
        g.labels[keep],
        g.labeled_mask[keep],
        g.n_classes,
    )
    return sub


def flip_edge(g: Graph, i: int, j: int) -> Graph:
    """Toggle the undirected edge {i, j}; returns a new Graph."""
    if i == j:
        raise ValueError("cannot flip a self-loop")
    A = g.adjacency.copy()
    A[i, j] = 1.0 - A[i, j]
    A[j, i] = A[i, j]
    return g.with_adjacency(A)


def count_flips(g: Graph, g2: Graph) -> int:
    """Number of undirected edge positions where two graphs differ."""
    if g.n_nodes != g2.n_nodes:
        raise ValueError("graphs must have the same node count")
    diff = g.adjacency != g2.adjacency
    return int(np.triu(diff, k=1).sum())
