"""Pydantic request/response models for the HTTP service.

The config models mirror the JSON config file: every field is optional and
omitted fields fall back to the package defaults, which live in one place
(the core dataclasses) — these models only pin structure and types, then
hand a plain dict to the strict config parser. extra="forbid" everywhere, so
typos are rejected at the HTTP boundary with a 422.
"""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")

    def to_plain(self) -> dict[str, Any]:
        """The fields actually provided, as a parse_config-ready dict."""
        out = {}
        for name, value in self:
            if value is None:
                continue
            out[name] = value.to_plain() if isinstance(value, _Strict) else value
        return out


class ArenaModel(_Strict):
    ring_radius: float | None = None
    agent_radius: float | None = None
    agent_mass: float | None = None
    dt: float | None = None
    friction: float | None = None
    max_force: float | None = None
    max_speed: float | None = None
    restitution: float | None = None
    max_steps: int | None = None


class RewardModel(_Strict):
    w_dist: float | None = None
    w_vel: float | None = None
    w_ring: float | None = None
    step_penalty: float | None = None
    r_win: float | None = None
    r_lose: float | None = None
    r_draw: float | None = None


class NoiseModel(_Strict):
    kind: str | None = None
    theta: float | None = None
    sigma: float | None = None
    mu: float | None = None
    dt: float | None = None


class DdpgModel(_Strict):
    gamma: float | None = None
    tau: float | None = None
    lr_actor: float | None = None
    lr_critic: float | None = None
    batch_size: int | None = None
    buffer_capacity: int | None = None
    warmup_steps: int | None = None
    hidden: list[int] | None = None
    noise: NoiseModel | None = None


class PolicyModel(_Strict):
    kind: str | None = None
    sigma: float | None = None
    gain: float | None = None


class RunConfigModel(_Strict):
    arena: ArenaModel | None = None
    reward: RewardModel | None = None
    ddpg: DdpgModel | None = None
    partner_policy: PolicyModel | None = None
    opponent_policy: PolicyModel | None = None
    episodes: int | None = None
    eval_every: int | None = None
    eval_episodes: int | None = None
    metrics_window: int | None = None
    seed: int | None = None
    output_dir: str | None = None


class TrainRequest(_Strict):
    config: RunConfigModel


class JobInfo(_Strict):
    job_id: str
    state: str  # queued | running | finished | failed
    episode: int
    episodes: int
    error: str | None = None
    metrics_path: str | None = None
    checkpoint_path: str | None = None


class TrainStarted(_Strict):
    job_id: str


class EvaluateRequest(_Strict):
    checkpoint: str
    episodes: int = 50
    seed: int = 0


class EvaluateResponse(_Strict):
    win_rate: float
    lose_rate: float
    draw_rate: float
    mean_steps_to_win: float | None = None


class RolloutRequest(_Strict):
    checkpoint: str
    seed: int = 0
    out: str


class RolloutResponse(_Strict):
    out_path: str
    steps: int
    outcome: str


class PlotRequest(_Strict):
    metrics: str
    out: str


class PlotResponse(_Strict):
    out_path: str


class HealthResponse(_Strict):
    status: str
    version: str
