"""The training loop: collect, learn, log, evaluate, checkpoint.

A run is a pure function of its RunConfig: one master PRNG seeded from
config.seed drives network initialization, exploration noise, scripted
randomness, and replay sampling, in a fixed consumption order, so two runs
of the same config produce byte-identical metrics files and checkpoints.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..arena import Outcome, Role, new_world, observe, step
from ..ddpg import ReplayBuffer, Transition, act, new_agent, push, reset_noise, sample, update
from ..errors import ConfigError
from ..opponents import scripted_action
from ..rewards import shaped_reward, terminal_reward
from .checkpoint import save_checkpoint
from .config import RunConfig
from .evaluation import evaluate_agent
from .metrics import EpisodeResult, MetricsRow, MetricsWriter, window_row

log = logging.getLogger(__name__)

METRICS_FILENAME = "metrics.csv"
FINAL_CHECKPOINT = "checkpoint_final.ckpt"

ProgressFn = Callable[[MetricsRow], None]


@dataclass(frozen=True)
class TrainResult:
    metrics_path: str
    checkpoint_path: str  # the final checkpoint
    episodes: int
    final_window_win_rate: float


def train(cfg: RunConfig, progress: ProgressFn | None = None) -> TrainResult:
    """Run the full training schedule described by cfg.

    Per episode: reset the world and the exploration noise, act with noise,
    step the arena with the scripted partner/opponent, store the transition,
    and run one DDPG update per environment step once warmup_steps have been
    collected (and the buffer can fill a batch). Every eval_every episodes a
    greedy evaluation runs and a checkpoint is written; a final checkpoint
    always is. Appends one metrics row per episode.
    """
    cfg.validate()
    if cfg.output_dir is None:
        raise ConfigError("output_dir must be set (config key or --out)")
    os.makedirs(cfg.output_dir, exist_ok=True)
    metrics_path = os.path.join(cfg.output_dir, METRICS_FILENAME)

    rng = np.random.default_rng(cfg.seed)
    agent = new_agent(cfg.ddpg, rng)
    buffer = ReplayBuffer(cfg.ddpg.buffer_capacity)
    total_steps = 0
    results: list[EpisodeResult] = []

    with open(metrics_path, "w", encoding="utf-8", newline="") as stream:
        writer = MetricsWriter(stream)
        for episode in range(1, cfg.episodes + 1):
            world = new_world(cfg.arena, seed=episode)
            reset_noise(agent)
            obs = observe(world, Role.LEARNER)
            ep_return = 0.0
            outcome = Outcome.ONGOING
            while outcome is Outcome.ONGOING:
                action = act(agent, obs, explore=True, rng=rng)
                actions = {
                    Role.LEARNER: action,
                    Role.PARTNER: scripted_action(
                        cfg.partner_policy, world, Role.PARTNER, rng
                    ),
                    Role.OPPONENT: scripted_action(
                        cfg.opponent_policy, world, Role.OPPONENT, rng
                    ),
                }
                prev = world
                world, obs_map, outcome = step(world, actions)
                reward = shaped_reward(prev, world, cfg.reward) + terminal_reward(
                    outcome, cfg.reward
                )
                done = outcome is not Outcome.ONGOING
                next_obs = obs_map[Role.LEARNER]
                push(buffer, Transition(obs, action, reward, next_obs, done))
                obs = next_obs
                ep_return += reward
                total_steps += 1
                if (
                    total_steps >= cfg.ddpg.warmup_steps
                    and buffer.size >= cfg.ddpg.batch_size
                ):
                    update(agent, sample(buffer, cfg.ddpg.batch_size, rng))

            results.append(EpisodeResult(outcome, world.step_count, ep_return))

            eval_win_rate = None
            if episode % cfg.eval_every == 0:
                report = evaluate_agent(
                    agent, cfg, cfg.eval_episodes, seed=cfg.seed + episode
                )
                eval_win_rate = report.win_rate
                ckpt_path = os.path.join(
                    cfg.output_dir, f"checkpoint_{episode:06d}.ckpt"
                )
                save_checkpoint(ckpt_path, cfg, agent, episode, rng)
                log.info(
                    "episode %d: eval win rate %.2f, checkpoint %s",
                    episode,
                    report.win_rate,
                    ckpt_path,
                )

            row = window_row(results, episode, cfg.metrics_window, eval_win_rate)
            writer.write_row(row)
            if progress is not None:
                progress(row)

        final_path = os.path.join(cfg.output_dir, FINAL_CHECKPOINT)
        save_checkpoint(final_path, cfg, agent, cfg.episodes, rng)

    final_row = window_row(results, cfg.episodes, cfg.metrics_window)
    return TrainResult(
        metrics_path=metrics_path,
        checkpoint_path=final_path,
        episodes=cfg.episodes,
        final_window_win_rate=final_row.win_rate_window,
    )
