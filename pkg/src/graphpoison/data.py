"""Dataset ingestion from plain text files.

A dataset directory holds:

    edges.txt      one undirected edge per line, "i j" (whitespace separated)
    labels.txt     one integer class per line; line number = node id
    features.csv   optional; row v = comma-separated feature values of node v
                   (absent file -> identity features, the featureless-graph
                   convention)

Loading applies largest-connected-component extraction and a seeded
labeled/unlabeled split. Self-loop lines and duplicate edges are dropped.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .graph import Graph

EDGES_FILE = "edges.txt"
LABELS_FILE = "labels.txt"
FEATURES_FILE = "features.csv"

PLAIN = "plain"


class DatasetError(ValueError):
    """A dataset directory failed to parse or is internally inconsistent."""


def seeded_split(n_nodes: int, fraction: float, seed: int) -> np.ndarray:
    """Boolean labeled mask over nodes: a deterministic function of (seed, n)."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("split fraction must be in (0, 1)")
    n_labeled = max(1, int(np.floor(fraction * n_nodes)))
    if n_labeled >= n_nodes:
        raise ValueError("split leaves no unlabeled nodes")
    order = np.random.default_rng(seed).permutation(n_nodes)
    mask = np.zeros(n_nodes, dtype=bool)
    mask[order[:n_labeled]] = True
    return mask


def _read_labels(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            labels = [int(line.strip()) for line in fh if line.strip()]
    except FileNotFoundError:
        raise DatasetError(f"missing labels file: {path}")
    except ValueError as e:
        raise DatasetError(f"bad label line in {path}: {e}")
    if not labels:
        raise DatasetError(f"labels file is empty: {path}")
    out = np.asarray(labels, dtype=np.int64)
    if out.min() < 0:
        raise DatasetError(f"negative class index in {path}")
    return out


def _read_edges(path: str, n_nodes: int) -> np.ndarray:
    adj = np.zeros((n_nodes, n_nodes), dtype=np.float64)
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != 2:
                    raise DatasetError(f"{path}:{lineno}: expected 'i j', got {line.strip()!r}")
                try:
                    i, j = int(parts[0]), int(parts[1])
                except ValueError:
                    raise DatasetError(f"{path}:{lineno}: non-integer node id")
                if not (0 <= i < n_nodes and 0 <= j < n_nodes):
                    raise DatasetError(f"{path}:{lineno}: node id out of range for {n_nodes} nodes")
                if i == j:
                    continue
                adj[i, j] = 1.0
                adj[j, i] = 1.0
    except FileNotFoundError:
        raise DatasetError(f"missing edges file: {path}")
    return adj


def _read_features(path: str, n_nodes: int) -> np.ndarray | None:
    """Feature matrix, or None when the file is absent (featureless graph)."""
    if not os.path.exists(path):
        return None
    try:
        feats = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as e:
        raise DatasetError(f"bad features file {path}: {e}")
    if feats.shape[0] != n_nodes:
        raise DatasetError(f"features have {feats.shape[0]} rows but labels define {n_nodes} nodes")
    return feats


def _lcc_nodes(adj: np.ndarray) -> np.ndarray:
    """Indices of the largest connected component (smallest-index tie break)."""
    n_comp, comp = connected_components(sp.csr_matrix(adj), directed=False)
    sizes = np.bincount(comp, minlength=n_comp)
    best = sizes.max()
    winner = next(int(comp[v]) for v in range(adj.shape[0]) if sizes[comp[v]] == best)
    return np.flatnonzero(comp == winner)


def load_dataset(
    dir_path: str,
    format: str = PLAIN,
    split_fraction: float = 0.10,
    split_seed: int = 0,
    apply_lcc: bool = True,
) -> Graph:
    """Load a dataset directory into a Graph (LCC-reduced, seeded split).

    The node count is defined by the labels file. LCC reduction happens
    before the split, so the labeled fraction refers to the graph actually
    attacked; identity features for featureless graphs are built at the
    reduced size.
    """
    if format != PLAIN:
        raise DatasetError(f"unknown dataset format {format!r}")
    labels = _read_labels(os.path.join(dir_path, LABELS_FILE))
    n = labels.size
    adj = _read_edges(os.path.join(dir_path, EDGES_FILE), n)
    feats = _read_features(os.path.join(dir_path, FEATURES_FILE), n)

    if apply_lcc:
        keep = _lcc_nodes(adj)
        adj = adj[np.ix_(keep, keep)]
        labels = labels[keep]
        if feats is not None:
            feats = feats[keep]
    if feats is None:
        feats = np.eye(adj.shape[0])

    mask = seeded_split(adj.shape[0], split_fraction, split_seed)
    return Graph(adj, feats, labels, mask)
