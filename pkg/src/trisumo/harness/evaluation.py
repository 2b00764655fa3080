"""Greedy evaluation episodes: outcome rates, steps-to-win, and rollout traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..arena import Outcome, Role, new_world, observe, step
from ..ddpg import DdpgAgent, act
from ..opponents import scripted_action
from ..rewards import shaped_reward, terminal_reward
from .checkpoint import load_checkpoint
from .config import RunConfig

ROLLOUT_HEADER = (
    "step,"
    "learner_pos_x,learner_pos_y,learner_vel_x,learner_vel_y,"
    "learner_act_x,learner_act_y,"
    "partner_pos_x,partner_pos_y,partner_vel_x,partner_vel_y,"
    "partner_act_x,partner_act_y,"
    "opponent_pos_x,opponent_pos_y,opponent_vel_x,opponent_vel_y,"
    "opponent_act_x,opponent_act_y,"
    "reward,outcome"
)


@dataclass(frozen=True)
class EvalReport:
    win_rate: float
    lose_rate: float
    draw_rate: float
    mean_steps_to_win: float | None  # None when no episode was won


@dataclass(frozen=True)
class RolloutResult:
    steps: int
    outcome: Outcome
    out_path: str


def _greedy_episode(
    agent: DdpgAgent, cfg: RunConfig, world_seed: int, rng: np.random.Generator
) -> tuple[Outcome, int]:
    """One exploration-free episode; rng only feeds scripted randomness."""
    world = new_world(cfg.arena, seed=world_seed)
    obs = observe(world, Role.LEARNER)
    outcome = Outcome.ONGOING
    while outcome is Outcome.ONGOING:
        actions = {
            Role.LEARNER: act(agent, obs, explore=False, rng=rng),
            Role.PARTNER: scripted_action(cfg.partner_policy, world, Role.PARTNER, rng),
            Role.OPPONENT: scripted_action(
                cfg.opponent_policy, world, Role.OPPONENT, rng
            ),
        }
        world, obs_map, outcome = step(world, actions)
        obs = obs_map[Role.LEARNER]
    return outcome, world.step_count


def evaluate_agent(
    agent: DdpgAgent, cfg: RunConfig, episodes: int, seed: int
) -> EvalReport:
    """Run `episodes` greedy episodes, each on an independent seeded stream.

    Episode i draws from default_rng([seed, i]), so results do not depend on
    execution order and the report is reproducible from (checkpoint, seed).
    """
    outcomes: list[Outcome] = []
    steps: list[int] = []
    for i in range(episodes):
        rng = np.random.default_rng([seed, i])
        outcome, n_steps = _greedy_episode(agent, cfg, world_seed=i, rng=rng)
        outcomes.append(outcome)
        steps.append(n_steps)

    wins = [s for o, s in zip(outcomes, steps) if o is Outcome.TEAM_WIN]
    win_rate = len(wins) / episodes
    lose_rate = sum(o is Outcome.TEAM_LOSE for o in outcomes) / episodes
    # Defining the draw rate as the complement makes the three rates sum to
    # exactly 1.0 in floating point, which w/n + l/n + d/n does not.
    draw_rate = 1.0 - (win_rate + lose_rate)
    return EvalReport(
        win_rate=win_rate,
        lose_rate=lose_rate,
        draw_rate=draw_rate,
        mean_steps_to_win=sum(wins) / len(wins) if wins else None,
    )


def evaluate_checkpoint(path: str, episodes: int, seed: int) -> EvalReport:
    ckpt = load_checkpoint(path)
    return evaluate_agent(ckpt.agent, ckpt.config, episodes, seed)


def rollout_checkpoint(path: str, seed: int, out_path: str) -> RolloutResult:
    """Replay one greedy episode and write its per-step trace as CSV.

    Each row holds the state after that step, the forces applied during it,
    the learner's reward, and the outcome; the last row is terminal.
    """
    ckpt = load_checkpoint(path)
    agent, cfg = ckpt.agent, ckpt.config
    rng = np.random.default_rng(seed)
    world = new_world(cfg.arena, seed=seed)
    obs = observe(world, Role.LEARNER)
    outcome = Outcome.ONGOING
    lines = [ROLLOUT_HEADER]
    while outcome is Outcome.ONGOING:
        actions = {
            Role.LEARNER: act(agent, obs, explore=False, rng=rng),
            Role.PARTNER: scripted_action(cfg.partner_policy, world, Role.PARTNER, rng),
            Role.OPPONENT: scripted_action(
                cfg.opponent_policy, world, Role.OPPONENT, rng
            ),
        }
        prev = world
        world, obs_map, outcome = step(world, actions)
        reward = shaped_reward(prev, world, cfg.reward) + terminal_reward(
            outcome, cfg.reward
        )
        obs = obs_map[Role.LEARNER]
        cells = [str(world.step_count)]
        for role in (Role.LEARNER, Role.PARTNER, Role.OPPONENT):
            body = world.bodies[role]
            cells += [repr(float(v)) for v in (*body.pos, *body.vel, *actions[role])]
        cells += [repr(float(reward)), outcome.value]
        lines.append(",".join(cells))

    with open(out_path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
    return RolloutResult(steps=world.step_count, outcome=outcome, out_path=out_path)
