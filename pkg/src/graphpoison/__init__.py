"""graphpoison: gradient-based graph structure poisoning attacks on GNN
node classifiers, with margin-weighted (cost-aware) attack losses."""

from .attack import (
    AttackConfig,
    AttackConstraints,
    AttackResult,
    constraint_check,
    degree_likelihood_ratio,
    dice_attack,
    meta_attack,
    score_flips,
)
from .data import DatasetError, load_dataset, seeded_split
from .evaluation import EvalReport, evaluate, margin_gradient_scatter
from .experiment import ConfigError, ExperimentConfig, apply_flips, run_experiment
from .gradients import (
    GradMatrix,
    attack_gradient,
    attack_objective,
    finite_difference_gradient,
    node_gradient,
    per_node_gradients,
)
from .graph import (
    Graph,
    NormalizedAdjacency,
    build_graph,
    count_flips,
    flip_edge,
    largest_connected_component,
    normalize_adjacency,
)
from .losses import CAWeightParams, LossSpec, ca_loss, ca_weights, cw_loss, nll_loss
from .models import (
    SurrogateHyper,
    SurrogateParams,
    VictimHyper,
    VictimParams,
    forward_logits,
    margins,
    pseudo_labels,
    train_surrogate,
    train_victim,
)
from .synthetic import sbm_graph

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackConstraints",
    "AttackResult",
    "CAWeightParams",
    "ConfigError",
    "DatasetError",
    "EvalReport",
    "ExperimentConfig",
    "GradMatrix",
    "Graph",
    "LossSpec",
    "NormalizedAdjacency",
    "SurrogateHyper",
    "SurrogateParams",
    "VictimHyper",
    "VictimParams",
    "apply_flips",
    "attack_gradient",
    "attack_objective",
    "build_graph",
    "ca_loss",
    "ca_weights",
    "constraint_check",
    "count_flips",
    "cw_loss",
    "degree_likelihood_ratio",
    "dice_attack",
    "evaluate",
    "finite_difference_gradient",
    "flip_edge",
    "forward_logits",
    "largest_connected_component",
    "load_dataset",
    "margin_gradient_scatter",
    "margins",
    "meta_attack",
    "nll_loss",
    "node_gradient",
    "normalize_adjacency",
    "per_node_gradients",
    "pseudo_labels",
    "run_experiment",
    "sbm_graph",
    "score_flips",
    "seeded_split",
    "train_surrogate",
    "train_victim",
]
