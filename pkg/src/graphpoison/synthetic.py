"""Seeded synthetic graphs for tests and demos."""

from __future__ import annotations

import numpy as np

from .graph import Graph, largest_connected_component

Array = np.ndarray


def sbm_graph(
    block_sizes=(50, 50),
    p_in: float = 0.2,
    p_out: float = 0.01,
    feature_noise: float = 1.0,
    labeled_fraction: float = 0.1,
    seed: int = 0,
    connected: bool = True,
) -> Graph:
    """Stochastic block model with noisy block-indicator features.

    Labels are block ids; features are one-hot block indicators plus
    ``feature_noise`` times standard Gaussian noise, so classification has
    to lean on structure. The labeled set is a stratified
    ``labeled_fraction`` sample per block (at least one per block). With
    ``connected=True`` the result is restricted to its largest component.
    """
    rng = np.random.default_rng(seed)
    sizes = list(block_sizes)
    n = sum(sizes)
    labels = np.repeat(np.arange(len(sizes)), sizes)

    probs = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    upper = np.triu(rng.random((n, n)) < probs, k=1)
    adj = (upper | upper.T).astype(np.float64)

    features = np.eye(len(sizes))[labels] + feature_noise * rng.normal(size=(n, len(sizes)))

    mask = np.zeros(n, dtype=bool)
    for b in range(len(sizes)):
        members = np.flatnonzero(labels == b)
        take = max(1, int(np.floor(labeled_fraction * members.size)))
        mask[rng.choice(members, size=take, replace=False)] = True

    g = Graph(adj, features, labels, mask, n_classes=len(sizes))
    if connected:
        g = largest_connected_component(g)
    return g
