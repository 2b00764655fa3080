"""DDPG learner for the teammate: replay, exploration noise, actor-critic updates.

The actor maps the 14-entry observation to a 2-D force through a scaled-tanh
head; the critic scores (observation, action) pairs through a linear head.
Targets are slow Polyak copies. One `update` call performs one critic step
(MSE to the bootstrapped target), one actor step (ascend the critic with its
parameters frozen), then soft-updates both targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tinynet
from .arena import OBS_DIM, clamp_magnitude
from .errors import ConfigError, ContractError, InsufficientDataError, ShapeError
from .tinynet import AdamState, Mlp, adam_init, adam_step, backward, forward

ACTION_DIM = 2
NOISE_KINDS = ("ou", "gaussian")


@dataclass(frozen=True)
class NoiseConfig:
    """Exploration noise: temporally correlated ('ou') or white ('gaussian')."""

    kind: str = "ou"
    theta: float = 0.15
    sigma: float = 0.2
    mu: float = 0.0
    dt: float = 1.0

    def validate(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"ddpg.noise.kind must be one of {NOISE_KINDS}")
        for name in ("theta", "sigma"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ConfigError(f"ddpg.noise.{name} must be finite and >= 0")
        if not math.isfinite(self.mu):
            raise ConfigError("ddpg.noise.mu must be finite")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("ddpg.noise.dt must be finite and > 0")


@dataclass(frozen=True)
class DdpgConfig:
    gamma: float = 0.99
    tau: float = 0.005
    lr_actor: float = 1e-4
    lr_critic: float = 1e-3
    batch_size: int = 128
    buffer_capacity: int = 100_000
    warmup_steps: int = 1000
    hidden: tuple[int, int] = (64, 64)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    action_bound: float = 2.0  # set from the arena's max_force by the harness

    def validate(self) -> None:
        if not (0.0 <= self.gamma < 1.0):
            raise ConfigError("ddpg.gamma must lie in [0, 1)")
        if not (0.0 < self.tau <= 1.0):
            raise ConfigError("ddpg.tau must lie in (0, 1]")
        for name in ("lr_actor", "lr_critic"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigError(f"ddpg.{name} must be finite and > 0")
        if self.batch_size <= 0:
            raise ConfigError("ddpg.batch_size must be > 0")
        if self.buffer_capacity <= 0:
            raise ConfigError("ddpg.buffer_capacity must be > 0")
        if self.batch_size > self.buffer_capacity:
            raise ConfigError("ddpg.batch_size must not exceed buffer_capacity")
        if self.warmup_steps < 0:
            raise ConfigError("ddpg.warmup_steps must be >= 0")
        if len(self.hidden) == 0 or any(h <= 0 for h in self.hidden):
            raise ConfigError("ddpg.hidden must list positive layer sizes")
        if not (math.isfinite(self.action_bound) and self.action_bound > 0):
            raise ConfigError("ddpg.action_bound must be finite and > 0")
        self.noise.validate()


@dataclass
class Transition:
    obs: np.ndarray
    action: np.ndarray  # post-clamp force actually applied
    reward: float
    next_obs: np.ndarray
    done: bool


class ReplayBuffer:
    """Fixed-capacity ring over preallocated arrays; overwrites oldest-first."""

    def __init__(self, capacity: int, obs_dim: int = OBS_DIM, act_dim: int = ACTION_DIM):
        if capacity <= 0:
            raise ConfigError("replay capacity must be > 0")
        self.capacity = capacity
        self.size = 0
        self.write_index = 0
        self.obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, act_dim))
        self.rewards = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_dim))
        self.dones = np.zeros(capacity)


def push(buffer: ReplayBuffer, t: Transition) -> None:
    i = buffer.write_index
    buffer.obs[i] = t.obs
    buffer.actions[i] = t.action
    buffer.rewards[i] = t.reward
    buffer.next_obs[i] = t.next_obs
    buffer.dones[i] = 1.0 if t.done else 0.0
    buffer.write_index = (i + 1) % buffer.capacity
    buffer.size = min(buffer.size + 1, buffer.capacity)


@dataclass
class Batch:
    obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_obs: np.ndarray
    dones: np.ndarray


def sample(buffer: ReplayBuffer, n: int, rng: np.random.Generator) -> Batch:
    """Uniform over current contents, with replacement, deterministic given rng."""
    if buffer.size < n:
        raise InsufficientDataError(
            f"replay buffer holds {buffer.size} transitions, need {n}"
        )
    idx = rng.integers(0, buffer.size, size=n)
    return Batch(
        obs=buffer.obs[idx],
        actions=buffer.actions[idx],
        rewards=buffer.rewards[idx],
        next_obs=buffer.next_obs[idx],
        dones=buffer.dones[idx],
    )


@dataclass
class NoiseState:
    x: np.ndarray  # OU internal state, length ACTION_DIM


def ou_step(
    state: NoiseState,
    theta: float,
    sigma: float,
    mu: float,
    dt: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, NoiseState]:
    """x <- x + theta*(mu - x)*dt + sigma*sqrt(dt)*z; the sample is the new x."""
    z = rng.standard_normal(state.x.shape[0])
    x = state.x + theta * (mu - state.x) * dt + sigma * math.sqrt(dt) * z
    return x, NoiseState(x)


@dataclass
class DdpgAgent:
    actor: Mlp
    critic: Mlp
    actor_target: Mlp
    critic_target: Mlp
    actor_adam: AdamState
    critic_adam: AdamState
    noise_state: NoiseState
    config: DdpgConfig


def new_agent(config: DdpgConfig, seed: int | np.random.Generator) -> DdpgAgent:
    """Seeded agent; targets start as exact copies of the online nets."""
    config.validate()
    rng = np.random.default_rng(seed)
    actor_dims = (OBS_DIM, *config.hidden, ACTION_DIM)
    critic_dims = (OBS_DIM + ACTION_DIM, *config.hidden, 1)
    actor = tinynet.init(actor_dims, "tanh", rng, bound=config.action_bound)
    critic = tinynet.init(critic_dims, "linear", rng)
    return DdpgAgent(
        actor=actor,
        critic=critic,
        actor_target=actor.clone(),
        critic_target=critic.clone(),
        actor_adam=adam_init(actor.n_params, config.lr_actor),
        critic_adam=adam_init(critic.n_params, config.lr_critic),
        noise_state=NoiseState(np.full(ACTION_DIM, config.noise.mu)),
        config=config,
    )


def reset_noise(agent: DdpgAgent) -> None:
    """Return the OU state to its mean; called at each episode start."""
    agent.noise_state = NoiseState(np.full(ACTION_DIM, agent.config.noise.mu))


def act(
    agent: DdpgAgent, obs: np.ndarray, explore: bool, rng: np.random.Generator
) -> np.ndarray:
    """Policy action for one observation, clamped to the action bound.

    explore=True adds exploration noise (advancing the OU state); the greedy
    path never touches the rng, so evaluation stays rng-independent.
    """
    action, _ = forward(agent.actor, obs)
    if explore:
        noise = agent.config.noise
        if noise.kind == "ou":
            sample_vec, agent.noise_state = ou_step(
                agent.noise_state, noise.theta, noise.sigma, noise.mu, noise.dt, rng
            )
        else:
            sample_vec = noise.sigma * rng.standard_normal(ACTION_DIM)
        action = action + sample_vec
    return clamp_magnitude(action, agent.config.action_bound)


def soft_update(target: Mlp, online: Mlp, tau: float) -> Mlp:
    """Polyak blend: returns a target with theta' = tau*theta + (1-tau)*theta'."""
    if target.dims != online.dims:
        raise ShapeError(
            f"target dims {target.dims} != online dims {online.dims}"
        )
    blended = tau * online.theta + (1.0 - tau) * target.theta
    return Mlp(target.dims, target.head, target.bound, blended)


def update(agent: DdpgAgent, batch: Batch) -> tuple[float, float]:
    """One DDPG update on a batch; returns (critic_loss, actor_loss).

    Targets y = r + gamma*(1-done)*Q_target(s', mu_target(s')). The critic
    takes one Adam step on the MSE to y; the actor takes one Adam step on
    -mean Q(s, mu(s)) with the gradient flowing through the critic's action
    input while critic parameters stay frozen; both targets are then blended.
    Each returned loss is the value before its own step.
    """
    n = batch.obs.shape[0]
    if n == 0:
        raise ContractError("update requires a non-empty batch")
    cfg = agent.config

    next_actions, _ = forward(agent.actor_target, batch.next_obs)
    q_next, _ = forward(
        agent.critic_target, np.hstack([batch.next_obs, next_actions])
    )
    y = batch.rewards + cfg.gamma * (1.0 - batch.dones) * q_next[:, 0]

    q, cache_q = forward(agent.critic, np.hstack([batch.obs, batch.actions]))
    err = q[:, 0] - y
    critic_loss = float(np.mean(err * err))
    grad_q = (2.0 / n) * err.reshape(n, 1)
    critic_grads, _ = backward(agent.critic, cache_q, grad_q)
    agent.critic.theta, agent.critic_adam = adam_step(
        agent.critic.theta, critic_grads.flat, agent.critic_adam
    )

    # Actor objective uses the critic as just updated.
    actions, cache_a = forward(agent.actor, batch.obs)
    q_act, cache_qa = forward(agent.critic, np.hstack([batch.obs, actions]))
    actor_loss = float(-np.mean(q_act))
    grad_qa = np.full((n, 1), -1.0 / n)
    _, grad_critic_in = backward(agent.critic, cache_qa, grad_qa)
    actor_grads, _ = backward(agent.actor, cache_a, grad_critic_in[:, OBS_DIM:])
    agent.actor.theta, agent.actor_adam = adam_step(
        agent.actor.theta, actor_grads.flat, agent.actor_adam
    )

    agent.actor_target = soft_update(agent.actor_target, agent.actor, cfg.tau)
    agent.critic_target = soft_update(agent.critic_target, agent.critic, cfg.tau)
    return critic_loss, actor_loss
