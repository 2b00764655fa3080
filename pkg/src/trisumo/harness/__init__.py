"""Operational shell: config, training loop, evaluation, checkpoints, metrics, plots."""

from .config import RunConfig, load_config, parse_config
from .evaluation import EvalReport, evaluate_checkpoint, rollout_checkpoint
from .training import TrainResult, train

__all__ = [
    "EvalReport",
    "RunConfig",
    "TrainResult",
    "evaluate_checkpoint",
    "load_config",
    "parse_config",
    "rollout_checkpoint",
    "train",
]
