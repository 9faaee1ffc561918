"""Market-making simulation and learning toolkit (Python bindings)."""

import json

from ._mmlab import (
    ACTION_COUNT,
    Fill,
    OrderBook,
    Side,
    action_to_etas,
    dominates,
    etas_to_action,
    forward,
    hypervolume_2d,
    pareto_mask,
    powdts_weights,
    reward_single,
    rim_penalty,
    sections_from_weights,
    sparsity,
    spearman,
    weights_from_coefs,
)
from . import _mmlab


def default_config(scale="desk"):
    return json.loads(_mmlab.default_config_json(scale))


def train(overrides=None, scale="desk"):
    """Runs a training experiment; `overrides` is a partial config dict."""
    return json.loads(_mmlab.train_json(json.dumps(overrides or {}), scale))


__all__ = [
    "ACTION_COUNT",
    "Fill",
    "OrderBook",
    "Side",
    "action_to_etas",
    "default_config",
    "dominates",
    "etas_to_action",
    "forward",
    "hypervolume_2d",
    "pareto_mask",
    "powdts_weights",
    "reward_single",
    "rim_penalty",
    "sections_from_weights",
    "sparsity",
    "spearman",
    "train",
    "weights_from_coefs",
]
