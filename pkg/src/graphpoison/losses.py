"""Attack losses: negative log-likelihood, the clamped-margin (CW) loss,
and the margin-weighted cost-aware variants of both.

The cost-aware weight of a node is ``alpha * exp(-beta * margin^2)`` with
separate ``(alpha, beta)`` pairs for nonnegative and negative margins, so
a run can prioritize nearly-flipped nodes while discounting both resilient
and already-misclassified ones. Weights are a priority schedule, not part
of the differentiated objective: the gradient engine treats them as
constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import log_softmax, margins

Array = np.ndarray

NLL = "nll"
CW = "cw"
_BASES = (NLL, CW)


@dataclass(frozen=True)
class CAWeightParams:
    """Weight-schedule hyperparameters.

    ``alpha1/beta1`` apply where the margin is >= 0 (zero margin counts as
    the not-yet-misclassified branch), ``alpha2/beta2`` where it is < 0.
    Betas may be zero, which makes the schedule constant per branch.
    """

    alpha1: float = 1.0
    beta1: float = 1.0
    alpha2: float = 1.0
    beta2: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha1 <= 0 or self.alpha2 <= 0:
            raise ValueError("alphas must be positive")
        if self.beta1 < 0 or self.beta2 < 0:
            raise ValueError("betas must be nonnegative")


@dataclass(frozen=True)
class LossSpec:
    """Which base loss to attack with, and whether to wrap it cost-aware."""

    base: str = NLL
    ca_enabled: bool = False
    ca_params: CAWeightParams | None = None
    cw_kappa: float = 0.0

    def __post_init__(self) -> None:
        if self.base not in _BASES:
            raise ValueError(f"base must be one of {_BASES}, got {self.base!r}")
        if self.ca_enabled and self.ca_params is None:
            raise ValueError("ca_enabled requires ca_params")
        if not self.ca_enabled and self.ca_params is not None:
            raise ValueError("ca_params given but ca_enabled is False")
        if self.cw_kappa < 0:
            raise ValueError("cw_kappa must be nonnegative")


def _check_mask(mask: Array) -> Array:
    raw = np.asarray(mask)
    if raw.dtype != bool and not np.isin(raw, (0, 1)).all():
        raise ValueError("mask must be boolean per node, not node indices")
    mask = raw.astype(bool)
    if not mask.any():
        raise ValueError("mask selects no nodes")
    return mask


def nll_loss(logits: Array, labels: Array, mask: Array) -> tuple[float, Array]:
    """Per-node -log softmax(z)[label] and its sum over ``mask``."""
    mask = _check_mask(mask)
    logp = log_softmax(logits)
    per_node = -logp[np.arange(logits.shape[0]), labels]
    return float(per_node[mask].sum()), per_node


def cw_loss(logits: Array, labels: Array, mask: Array, kappa: float = 0.0) -> tuple[float, Array]:
    """Clamped margin max(margin, -kappa) per node, summed over ``mask``.

    The attack drives this down: once a node's margin falls below -kappa it
    stops contributing.
    """
    mask = _check_mask(mask)
    per_node = np.maximum(margins(logits, labels), -kappa)
    return float(per_node[mask].sum()), per_node


def ca_weights(margin_values: Array, params: CAWeightParams) -> Array:
    """alpha * exp(-beta * margin^2) with the branch picked by the margin sign."""
    phi = np.asarray(margin_values, dtype=np.float64)
    negative = phi < 0
    alpha = np.where(negative, params.alpha2, params.alpha1)
    beta = np.where(negative, params.beta2, params.beta1)
    return alpha * np.exp(-beta * phi * phi)


def base_loss(
    logits: Array, labels: Array, mask: Array, base: str, cw_kappa: float = 0.0
) -> tuple[float, Array]:
    if base == NLL:
        return nll_loss(logits, labels, mask)
    return cw_loss(logits, labels, mask, cw_kappa)


def ca_loss(
    logits: Array,
    labels: Array,
    mask: Array,
    params: CAWeightParams,
    base: str = NLL,
    cw_kappa: float = 0.0,
) -> tuple[float, Array]:
    """Margin-weighted base loss: per-node ``w(v) * loss(v)``, summed over ``mask``.

    Weights come from the margins of ``logits`` against ``labels`` and are
    held constant by the gradient engine (no derivative flows through them).
    """
    mask = _check_mask(mask)
    _, per_node = base_loss(logits, labels, mask, base, cw_kappa)
    weighted = ca_weights(margins(logits, labels), params) * per_node
    return float(weighted[mask].sum()), weighted


def loss_value(
    logits: Array, labels: Array, mask: Array, spec: LossSpec, weights: Array | None = None
) -> tuple[float, Array]:
    """Evaluate ``spec`` on logits; ``weights`` overrides the CA schedule.

    Passing precomputed ``weights`` freezes the stop-gradient weights when a
    caller (the finite-difference oracle) re-evaluates the loss at perturbed
    adjacencies.
    """
    mask = _check_mask(mask)
    _, per_node = base_loss(logits, labels, mask, spec.base, spec.cw_kappa)
    if weights is None:
        if spec.ca_enabled:
            assert spec.ca_params is not None
            weights = ca_weights(margins(logits, labels), spec.ca_params)
        else:
            weights = np.ones(logits.shape[0])
    weighted = weights * per_node
    return float(weighted[mask].sum()), weighted
