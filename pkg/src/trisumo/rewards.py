"""Reward shaping for the learner: approach, push, stay centered, hurry up.

The dense per-step signal pays for closing distance to the opponent and for
velocity pointed at it, charges for loitering near the edge, and applies a
small constant step cost. Episode ends add a single sparse bonus or penalty.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .arena import Outcome, Role, WorldState
from .errors import ConfigError, ContractError

# Below this learner-opponent distance the unit heading is treated as zero.
_HEADING_EPS = 1e-9

# Edge penalty turns on once |pos| exceeds this fraction of the ring radius.
_EDGE_FRACTION = 0.8


@dataclass(frozen=True)
class RewardConfig:
    w_dist: float = 10.0
    w_vel: float = 1.0
    w_ring: float = 5.0
    step_penalty: float = 0.01
    r_win: float = 100.0
    r_lose: float = -100.0
    r_draw: float = -20.0

    def validate(self) -> None:
        for name in ("w_dist", "w_vel", "w_ring", "step_penalty"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ConfigError(f"reward.{name} must be finite and >= 0")
        for name in ("r_win", "r_lose", "r_draw"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"reward.{name} must be finite")
        if not (self.r_win > self.r_draw > self.r_lose):
            warnings.warn(
                "reward config does not order r_win > r_draw > r_lose; "
                "training may optimize for the wrong outcome",
                stacklevel=2,
            )


def _learner_opponent_distance(world: WorldState) -> float:
    d = world.bodies[Role.OPPONENT].pos - world.bodies[Role.LEARNER].pos
    return math.hypot(d[0], d[1])


def shaped_reward(prev: WorldState, cur: WorldState, config: RewardConfig) -> float:
    """Dense reward for the transition prev -> cur.

    distance term: w_dist * (d_prev - d_cur) with d the learner-opponent
    center distance, so the per-episode sum telescopes. velocity term:
    w_vel * (v_learner . u) with u the unit vector learner -> opponent in
    cur (zero when the centers nearly coincide). ring term:
    -w_ring * max(0, |pos_learner|/R - 0.8). Constant step_penalty off all.
    """
    if prev.config != cur.config:
        raise ContractError("shaped_reward needs two states of the same episode")
    learner = cur.bodies[Role.LEARNER]
    opponent = cur.bodies[Role.OPPONENT]

    d_prev = _learner_opponent_distance(prev)
    d_cur = _learner_opponent_distance(cur)
    r = config.w_dist * (d_prev - d_cur)

    if d_cur >= _HEADING_EPS:
        u = (opponent.pos - learner.pos) / d_cur
        r += config.w_vel * (learner.vel[0] * u[0] + learner.vel[1] * u[1])

    edge = math.hypot(*learner.pos) / cur.config.ring_radius - _EDGE_FRACTION
    if edge > 0.0:
        r -= config.w_ring * edge

    return r - config.step_penalty


def terminal_reward(outcome: Outcome, config: RewardConfig) -> float:
    """Sparse bonus for a finished episode; zero while still ongoing."""
    if outcome is Outcome.TEAM_WIN:
        return config.r_win
    if outcome is Outcome.TEAM_LOSE:
        return config.r_lose
    if outcome is Outcome.DRAW:
        return config.r_draw
    return 0.0
