"""Greedy budgeted edge-flip poisoning and the random DICE baseline.

The greedy loop alternates surrogate retraining with gradient-guided flip
selection: per iteration it scores every unordered pair by the gradient of
the attack objective in the feasible flip direction, filters candidates
through the unnoticeability constraints, and applies the best one. DICE
replaces the gradient with seeded coin flips (delete within a class, add
across classes) over the surrogate's pseudo-labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gradients import GradMatrix, attack_gradient, attack_objective
from .graph import Graph, count_flips
from .losses import LossSpec
from .models import SurrogateHyper, pseudo_labels, train_surrogate

Array = np.ndarray

ADD = "add"
DELETE = "delete"


@dataclass(frozen=True)
class AttackConstraints:
    """Unnoticeability rules applied to every candidate flip.

    The singleton rule rejects deletions that would isolate a node. The
    optional degree test rejects flips whose degree sequence no longer
    looks drawn from the same power law as the reference graph's, using
    the likelihood-ratio statistic over degrees >= d_min.
    """

    forbid_singletons: bool = True
    degree_test: bool = False
    degree_test_threshold: float = 0.004
    degree_test_d_min: int = 2


@dataclass(frozen=True)
class AttackConfig:
    """Knobs of one attack run.

    ``refresh_pseudo_labels=False`` (the default) fixes the attack targets
    to the initial clean-graph surrogate's predictions, the self-training
    convention: nodes the attack has already flipped develop negative
    margins and the cost-aware schedule moves budget off them. ``True``
    re-labels at every retraining step instead, which keeps targets synced
    to the evolving surrogate but can never see a negative margin when
    ``retrain_every == 1``.
    """

    budget: int = 0
    loss_spec: LossSpec = field(default_factory=LossSpec)
    retrain_every: int = 1
    surrogate_hyper: SurrogateHyper = field(default_factory=SurrogateHyper)
    constraints: AttackConstraints = field(default_factory=AttackConstraints)
    seed: int = 0
    refresh_pseudo_labels: bool = False
    dice_add_prob: float = 0.5
    dice_max_retries: int = 200

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if self.retrain_every < 1:
            raise ValueError("retrain_every must be >= 1")
        if not 0.0 <= self.dice_add_prob <= 1.0:
            raise ValueError("dice_add_prob must be in [0, 1]")


@dataclass(frozen=True)
class AttackResult:
    flips: list[tuple[int, int, str]]
    poisoned: Graph
    trace: list[dict]
    pseudo_labels: Array
    exhausted: bool = False


def score_flips(grad: GradMatrix, g: Graph) -> list[tuple[int, int, float]]:
    """Rank every unordered pair by gradient saliency in its feasible direction.

    ``score = M[i, j] * (1 - 2 A[i, j])``: positive means the one flip the
    pair admits (add when absent, delete when present) increases the attack
    objective. Descending by score, ties by (i, j). Materializes all
    N(N-1)/2 candidates; the attack loop itself uses an incremental argmax.
    """
    n = g.n_nodes
    iu, ju = np.triu_indices(n, k=1)
    scores = grad.matrix[iu, ju] * (1.0 - 2.0 * g.adjacency[iu, ju])
    order = np.lexsort((ju, iu, -scores))
    return [(int(iu[k]), int(ju[k]), float(scores[k])) for k in order]


def _powerlaw_ll(log_degrees: Array, n: int, d_min: int) -> float:
    """Log-likelihood of a fitted Zipf-type tail over degrees >= d_min."""
    if n == 0:
        return 0.0
    sum_log = float(log_degrees.sum())
    alpha = 1.0 + n / (sum_log - n * np.log(d_min - 0.5))
    return n * np.log(alpha) + n * alpha * np.log(d_min) - (alpha + 1.0) * sum_log


def degree_likelihood_ratio(deg_ref, deg_new, d_min: int = 2) -> float:
    """Likelihood-ratio statistic comparing two degree sequences' power-law tails.

    Small values mean the sequences are plausibly from one distribution.
    """
    a = np.asarray(deg_ref, dtype=np.float64)
    b = np.asarray(deg_new, dtype=np.float64)
    la = np.log(a[a >= d_min])
    lb = np.log(b[b >= d_min])
    lc = np.concatenate([la, lb])
    ll_a = _powerlaw_ll(la, la.size, d_min)
    ll_b = _powerlaw_ll(lb, lb.size, d_min)
    ll_c = _powerlaw_ll(lc, lc.size, d_min)
    return -2.0 * ll_c + 2.0 * (ll_a + ll_b)


def constraint_check(
    g: Graph, i: int, j: int, cfg: AttackConfig, reference: Graph | None = None
) -> str | None:
    """Check flipping {i, j} on ``g`` against ``cfg.constraints``.

    Returns None when allowed, otherwise a reject reason ("singleton" or
    "degree_test"). ``reference`` is the graph whose degree distribution
    the test compares against (the clean graph inside the attack loop;
    defaults to ``g``).
    """
    if i == j:
        raise ValueError("self-loops cannot be flipped")
    rules = cfg.constraints
    deleting = g.adjacency[i, j] == 1.0
    if rules.forbid_singletons and deleting:
        deg = g.degrees()
        if deg[i] <= 1.0 or deg[j] <= 1.0:
            return "singleton"
    if rules.degree_test:
        ref = g if reference is None else reference
        deg_new = g.degrees()
        delta = -1.0 if deleting else 1.0
        deg_new[i] += delta
        deg_new[j] += delta
        ratio = degree_likelihood_ratio(ref.degrees(), deg_new, rules.degree_test_d_min)
        if ratio > rules.degree_test_threshold:
            return "degree_test"
    return None


def _margin_summary(phi: Array, mask: Array) -> dict:
    vals = phi[mask]
    return {
        "mean": float(vals.mean()),
        "min": float(vals.min()),
        "max": float(vals.max()),
        "frac_negative": float((vals < 0).mean()),
    }


def meta_attack(g: Graph, cfg: AttackConfig) -> AttackResult:
    """Gradient-guided greedy poisoning under a flip budget.

    Per iteration: retrain the surrogate every ``retrain_every`` steps
    (re-deriving pseudo-labels only when ``cfg.refresh_pseudo_labels``),
    compute the attack gradient under ``cfg.loss_spec`` with weights from
    the current margins, and apply the best-scoring constraint-allowed
    flip. Stops early, flagged ``exhausted``, when no allowed candidate
    still has positive score. A pair is never flipped twice. Deterministic
    given the config.
    """
    n = g.n_nodes
    if cfg.budget > n * (n - 1) // 2:
        raise ValueError("budget exceeds the number of unordered pairs")
    clean = g
    adj = g.adjacency.copy()
    blocked = np.eye(n, dtype=bool)  # diagonal plus every pair already flipped
    flips: list[tuple[int, int, str]] = []
    trace: list[dict] = []
    params = None
    pseudo: Array | None = None
    exhausted = False

    for step in range(cfg.budget):
        current = clean.with_adjacency(adj)
        if params is None or step % cfg.retrain_every == 0:
            params = train_surrogate(current, cfg.surrogate_hyper)
            if pseudo is None or cfg.refresh_pseudo_labels:
                pseudo = pseudo_labels(params, current)
        grad, info = attack_gradient(current, params, cfg.loss_spec, pseudo, return_info=True)

        scores = grad.matrix * (1.0 - 2.0 * adj)
        scores[blocked] = -np.inf
        chosen = None
        while True:
            flat = int(scores.argmax())
            i, j = divmod(flat, n)
            best = scores[i, j]
            if not best > 0.0:
                exhausted = True
                break
            if i > j:
                i, j = j, i
            if constraint_check(current, i, j, cfg, reference=clean) is None:
                chosen = (i, j, float(best))
                break
            scores[i, j] = -np.inf
            scores[j, i] = -np.inf
        if chosen is None:
            break

        i, j, score = chosen
        op = DELETE if adj[i, j] == 1.0 else ADD
        adj[i, j] = 1.0 - adj[i, j]
        adj[j, i] = adj[i, j]
        blocked[i, j] = blocked[j, i] = True
        objective_after = attack_objective(
            adj, g.features, params, pseudo, g.unlabeled_mask, cfg.loss_spec, info["weights"]
        )
        flips.append((i, j, op))
        trace.append(
            {
                "iteration": step,
                "flip": [i, j, op],
                "score": score,
                "objective_before": info["objective"],
                "objective_after": objective_after,
                "margins": _margin_summary(info["margins"], g.unlabeled_mask),
            }
        )

    assert pseudo is not None or cfg.budget == 0
    if pseudo is None:
        params = train_surrogate(clean, cfg.surrogate_hyper)
        pseudo = pseudo_labels(params, clean)
    poisoned = clean.with_adjacency(adj)
    assert count_flips(clean, poisoned) == len(flips)
    return AttackResult(flips, poisoned, trace, pseudo, exhausted)


def dice_attack(g: Graph, cfg: AttackConfig) -> AttackResult:
    """Random baseline: delete within-class edges, add cross-class non-edges.

    Class membership is the surrogate's pseudo-labeling (gray-box, like the
    gradient attack). Each step flips a seeded coin for the operation, draws
    a uniform candidate of that kind, and retries -- recoining -- when the
    draw is infeasible or constraint-rejected, up to
    ``cfg.dice_max_retries`` attempts per step.
    """
    params = train_surrogate(g, cfg.surrogate_hyper)
    pseudo = pseudo_labels(params, g)
    rng = np.random.default_rng(cfg.seed)
    n = g.n_nodes
    clean = g
    adj = g.adjacency.copy()
    blocked = np.eye(n, dtype=bool)
    flips: list[tuple[int, int, str]] = []
    trace: list[dict] = []

    for step in range(cfg.budget):
        placed = False
        for _ in range(cfg.dice_max_retries):
            if rng.random() < cfg.dice_add_prob:
                i, j = int(rng.integers(n)), int(rng.integers(n))
                if i == j or adj[i, j] == 1.0 or pseudo[i] == pseudo[j]:
                    continue
                op = ADD
            else:
                iu, ju = np.where(np.triu(adj, k=1) == 1.0)
                same = pseudo[iu] == pseudo[ju]
                iu, ju = iu[same], ju[same]
                if iu.size == 0:
                    continue
                k = int(rng.integers(iu.size))
                i, j = int(iu[k]), int(ju[k])
                op = DELETE
            if i > j:
                i, j = j, i
            if blocked[i, j]:
                continue
            current = clean.with_adjacency(adj)
            if constraint_check(current, i, j, cfg, reference=clean) is not None:
                continue
            adj[i, j] = 1.0 - adj[i, j]
            adj[j, i] = adj[i, j]
            blocked[i, j] = blocked[j, i] = True
            flips.append((i, j, op))
            trace.append({"iteration": step, "flip": [i, j, op]})
            placed = True
            break
        if not placed:
            raise RuntimeError(
                f"DICE found no feasible flip within {cfg.dice_max_retries} retries at step {step}"
            )

    poisoned = clean.with_adjacency(adj)
    assert count_flips(clean, poisoned) == len(flips)
    return AttackResult(flips, poisoned, trace, pseudo, exhausted=False)
