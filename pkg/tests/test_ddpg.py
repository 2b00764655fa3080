"""Learner mechanics: replay ring, noise, acting, soft updates, the update step."""

import math

import numpy as np
import pytest

from trisumo.arena import OBS_DIM
from trisumo.ddpg import (
    ACTION_DIM,
    Batch,
    DdpgConfig,
    NoiseConfig,
    NoiseState,
    ReplayBuffer,
    Transition,
    act,
    new_agent,
    ou_step,
    push,
    reset_noise,
    sample,
    soft_update,
    update,
)
from trisumo.errors import ConfigError, ContractError, InsufficientDataError, ShapeError
from trisumo.tinynet import Mlp, forward


def transition(tag: float) -> Transition:
    return Transition(
        obs=np.full(OBS_DIM, tag),
        action=np.array([tag, -tag]),
        reward=tag,
        next_obs=np.full(OBS_DIM, tag + 0.5),
        done=False,
    )


# --- config ------------------------------------------------------------------


def test_config_validation():
    DdpgConfig().validate()
    with pytest.raises(ConfigError, match="gamma"):
        DdpgConfig(gamma=1.0).validate()
    with pytest.raises(ConfigError, match="tau"):
        DdpgConfig(tau=0.0).validate()
    with pytest.raises(ConfigError, match="batch_size"):
        DdpgConfig(batch_size=65, buffer_capacity=64).validate()
    with pytest.raises(ConfigError, match="noise.kind"):
        DdpgConfig(noise=NoiseConfig(kind="pink")).validate()


# --- replay buffer -----------------------------------------------------------


def test_push_grows_then_overwrites_oldest():
    buf = ReplayBuffer(capacity=2)
    push(buf, transition(1.0))
    assert buf.size == 1
    push(buf, transition(2.0))
    assert buf.size == 2
    push(buf, transition(3.0))
    assert buf.size == 2
    assert sorted(buf.rewards.tolist()) == [2.0, 3.0]


def test_push_exactly_to_capacity_keeps_everything():
    buf = ReplayBuffer(capacity=5)
    for i in range(5):
        push(buf, transition(float(i)))
    assert buf.size == 5
    assert sorted(buf.rewards.tolist()) == [0.0, 1.0, 2.0, 3.0, 4.0]


def test_sample_with_replacement_produces_duplicates():
    # n == size, so any duplicate index proves replacement
    buf = ReplayBuffer(capacity=8)
    for i in range(8):
        push(buf, transition(float(i)))
    saw_duplicate = False
    for seed in range(20):
        batch = sample(buf, 8, np.random.default_rng(seed))
        assert batch.obs.shape == (8, OBS_DIM)
        if len(set(batch.rewards.tolist())) < 8:
            saw_duplicate = True
    assert saw_duplicate


def test_sample_insufficient_data_leaves_buffer_untouched():
    buf = ReplayBuffer(capacity=4)
    push(buf, transition(1.0))
    with pytest.raises(InsufficientDataError):
        sample(buf, 2, np.random.default_rng(0))
    assert buf.size == 1 and buf.write_index == 1


def test_sample_deterministic_given_rng_state():
    buf = ReplayBuffer(capacity=8)
    for i in range(8):
        push(buf, transition(float(i)))
    a = sample(buf, 5, np.random.default_rng(42)).rewards
    b = sample(buf, 5, np.random.default_rng(42)).rewards
    assert np.array_equal(a, b)


def test_sample_only_draws_live_region():
    # capacity is larger than the live region; no zero-filled slot may leak out
    buf = ReplayBuffer(capacity=100)
    for i in range(3):
        push(buf, transition(float(i + 1)))
    for seed in range(10):
        batch = sample(buf, 3, np.random.default_rng(seed))
        assert set(batch.rewards.tolist()) <= {1.0, 2.0, 3.0}


# --- noise -------------------------------------------------------------------


def test_ou_fixed_point_at_mu_with_zero_sigma():
    state = NoiseState(np.array([0.3, 0.3]))
    for _ in range(10):
        x, state = ou_step(state, theta=0.5, sigma=0.0, mu=0.3, dt=0.1,
                           rng=np.random.default_rng(0))
    np.testing.assert_allclose(x, [0.3, 0.3], rtol=1e-12)


def test_ou_deterministic_decay_hand_value():
    state = NoiseState(np.array([1.0, 1.0]))
    x, _ = ou_step(state, theta=1.0, sigma=0.0, mu=0.0, dt=0.1,
                   rng=np.random.default_rng(0))
    np.testing.assert_allclose(x, [0.9, 0.9], rtol=0, atol=0)


def test_ou_pure_random_walk_step_std():
    # theta=0, sigma=1: increments are N(0, dt) per component
    rng = np.random.default_rng(8)
    state = NoiseState(np.zeros(2))
    dt = 0.25
    increments = []
    for _ in range(4000):
        x, new_state = ou_step(state, theta=0.0, sigma=1.0, mu=0.0, dt=dt, rng=rng)
        increments.extend((x - state.x).tolist())
        state = new_state
    std = np.std(increments)
    assert abs(std - math.sqrt(dt)) < 0.02


def test_ou_seeded_determinism():
    s0 = NoiseState(np.zeros(2))
    x1, _ = ou_step(s0, 0.15, 0.2, 0.0, 1.0, np.random.default_rng(5))
    x2, _ = ou_step(NoiseState(np.zeros(2)), 0.15, 0.2, 0.0, 1.0, np.random.default_rng(5))
    assert np.array_equal(x1, x2)


# --- agent and acting --------------------------------------------------------


def test_new_agent_wiring():
    cfg = DdpgConfig(action_bound=2.0)
    agent = new_agent(cfg, seed=3)
    assert agent.actor.dims == (OBS_DIM, 64, 64, ACTION_DIM)
    assert agent.critic.dims == (OBS_DIM + ACTION_DIM, 64, 64, 1)
    assert agent.actor.head == "tanh" and agent.actor.bound == 2.0
    assert agent.critic.head == "linear"
    assert np.array_equal(agent.actor.theta, agent.actor_target.theta)
    assert np.array_equal(agent.critic.theta, agent.critic_target.theta)
    again = new_agent(cfg, seed=3)
    assert np.array_equal(agent.actor.theta, again.actor.theta)


def test_act_zero_actor_greedy_is_zero():
    agent = new_agent(DdpgConfig(), seed=0)
    agent.actor.theta = np.zeros_like(agent.actor.theta)
    a = act(agent, np.ones(OBS_DIM), explore=False, rng=np.random.default_rng(0))
    assert np.array_equal(a, np.zeros(2))


def test_act_respects_action_bound_under_any_parameters():
    cfg = DdpgConfig(action_bound=2.0, noise=NoiseConfig(sigma=50.0))
    agent = new_agent(cfg, seed=1)
    agent.actor.theta = agent.actor.theta * 1e3  # saturated actor
    rng = np.random.default_rng(2)
    for _ in range(50):
        a = act(agent, rng.normal(size=OBS_DIM), explore=True, rng=rng)
        assert math.hypot(*a) <= 2.0 + 1e-12  # rounding slack on the clamp


def test_act_greedy_does_not_consume_rng():
    agent = new_agent(DdpgConfig(), seed=4)
    rng = np.random.default_rng(9)
    before = rng.bit_generator.state
    act(agent, np.zeros(OBS_DIM), explore=False, rng=rng)
    assert rng.bit_generator.state == before


def test_act_exploring_is_reproducible_across_fresh_agents():
    obs = np.linspace(-1, 1, OBS_DIM)
    outs = []
    for _ in range(2):
        agent = new_agent(DdpgConfig(), seed=6)
        outs.append(act(agent, obs, explore=True, rng=np.random.default_rng(7)))
    assert np.array_equal(outs[0], outs[1])


def test_gaussian_noise_kind_also_bounded_and_seeded():
    cfg = DdpgConfig(noise=NoiseConfig(kind="gaussian", sigma=1.0))
    agent = new_agent(cfg, seed=8)
    a1 = act(agent, np.zeros(OBS_DIM), explore=True, rng=np.random.default_rng(3))
    agent2 = new_agent(cfg, seed=8)
    a2 = act(agent2, np.zeros(OBS_DIM), explore=True, rng=np.random.default_rng(3))
    assert np.array_equal(a1, a2)
    assert math.hypot(*a1) <= cfg.action_bound + 1e-12


def test_reset_noise_returns_state_to_mu():
    cfg = DdpgConfig(noise=NoiseConfig(mu=0.25))
    agent = new_agent(cfg, seed=0)
    act(agent, np.zeros(OBS_DIM), explore=True, rng=np.random.default_rng(0))
    assert not np.all(agent.noise_state.x == 0.25)
    reset_noise(agent)
    assert np.all(agent.noise_state.x == 0.25)


# --- soft update -------------------------------------------------------------


def test_soft_update_extremes_and_hand_value():
    online = Mlp((2, 2), theta=np.array([1.0] * 6))
    target = Mlp((2, 2), theta=np.array([0.0] * 6))
    assert np.array_equal(soft_update(target, online, 1.0).theta, online.theta)
    assert np.array_equal(soft_update(target, online, 0.0).theta, target.theta)
    once = soft_update(target, online, 0.5)
    twice = soft_update(once, online, 0.5)
    np.testing.assert_array_equal(twice.theta, np.full(6, 0.75))


def test_soft_update_shape_mismatch():
    with pytest.raises(ShapeError):
        soft_update(Mlp((2, 2)), Mlp((2, 3)), 0.5)


def test_soft_update_contraction_law_small_k():
    # theta frozen: ||theta'_k - theta||_inf = (1-tau)^k ||theta'_0 - theta||_inf
    rng = np.random.default_rng(11)
    online = Mlp((3, 4, 2), theta=rng.normal(size=Mlp((3, 4, 2)).n_params))
    target = Mlp((3, 4, 2), theta=rng.normal(size=online.n_params))
    d0 = np.max(np.abs(target.theta - online.theta))
    tau = 0.005
    for k in range(1, 51):
        target = soft_update(target, online, tau)
        lhs = np.max(np.abs(target.theta - online.theta))
        assert lhs == pytest.approx((1 - tau) ** k * d0, rel=1e-12)


# --- update ------------------------------------------------------------------


def tiny_agent(seed=0, **overrides):
    cfg = DdpgConfig(hidden=(4,), batch_size=2, buffer_capacity=16,
                     warmup_steps=0, **overrides)
    return new_agent(cfg, seed=seed)


def random_batch(n, rng):
    return Batch(
        obs=rng.normal(size=(n, OBS_DIM)),
        actions=rng.normal(size=(n, ACTION_DIM)),
        rewards=rng.normal(size=n),
        next_obs=rng.normal(size=(n, OBS_DIM)),
        dones=rng.integers(0, 2, size=n).astype(float),
    )


def test_update_empty_batch_rejected():
    agent = tiny_agent()
    empty = Batch(
        obs=np.zeros((0, OBS_DIM)),
        actions=np.zeros((0, ACTION_DIM)),
        rewards=np.zeros(0),
        next_obs=np.zeros((0, OBS_DIM)),
        dones=np.zeros(0),
    )
    with pytest.raises(ContractError):
        update(agent, empty)


def test_update_critic_loss_is_pre_step_mse():
    agent = tiny_agent(seed=5)
    batch = random_batch(4, np.random.default_rng(6))
    # recompute the target and MSE from the pre-update parameters
    na, _ = forward(agent.actor_target, batch.next_obs)
    qn, _ = forward(agent.critic_target, np.hstack([batch.next_obs, na]))
    y = batch.rewards + agent.config.gamma * (1 - batch.dones) * qn[:, 0]
    q, _ = forward(agent.critic, np.hstack([batch.obs, batch.actions]))
    expected = float(np.mean((q[:, 0] - y) ** 2))
    critic_loss, _ = update(agent, batch)
    assert critic_loss == pytest.approx(expected, rel=1e-12)


def test_update_terminal_transitions_bootstrap_to_reward_only():
    # gamma=0 and all-done must produce identical critic targets (= rewards);
    # identical targets from identical states mean identical critic losses
    batch = random_batch(6, np.random.default_rng(7))
    batch.dones[:] = 1.0
    loss_done, _ = update(tiny_agent(seed=9), batch)
    loss_g0, _ = update(tiny_agent(seed=9, gamma=0.0), batch)
    assert loss_done == loss_g0


def test_update_moves_targets_toward_online():
    agent = tiny_agent(seed=10, tau=0.5)
    batch = random_batch(4, np.random.default_rng(11))
    update(agent, batch)
    # after one update: target = tau*online_new + (1-tau)*online_old
    assert not np.array_equal(agent.actor_target.theta, agent.actor.theta)
    gap = np.max(np.abs(agent.actor_target.theta - agent.actor.theta))
    assert gap > 0.0
    for _ in range(60):
        update(agent, batch)
    gap_later = np.max(np.abs(agent.critic_target.theta - agent.critic.theta))
    assert np.isfinite(gap_later)


def test_update_is_deterministic():
    batch = random_batch(5, np.random.default_rng(12))
    a1 = tiny_agent(seed=13)
    a2 = tiny_agent(seed=13)
    l1 = update(a1, batch)
    l2 = update(a2, batch)
    assert l1 == l2
    assert np.array_equal(a1.actor.theta, a2.actor.theta)
    assert np.array_equal(a1.critic.theta, a2.critic.theta)


def test_update_first_step_matches_finite_difference_gradients():
    """Recover the gradients Adam consumed on a fresh agent and check them.

    At t=1 Adam's update is exactly -lr*g/(|g|+eps) per coordinate, so the
    parameter delta predicts g's sign and, where |g| >> eps, its step size.
    The reference gradients come from finite differences of each objective.
    """
    from trisumo.tinynet import finite_diff_grad

    agent = tiny_agent(seed=20)
    cfg = agent.config
    batch = random_batch(3, np.random.default_rng(21))

    na, _ = forward(agent.actor_target, batch.next_obs)
    qn, _ = forward(agent.critic_target, np.hstack([batch.next_obs, na]))
    y = batch.rewards + cfg.gamma * (1 - batch.dones) * qn[:, 0]

    def critic_mse(theta):
        probe = Mlp(agent.critic.dims, "linear", theta=theta)
        q, _ = forward(probe, np.hstack([batch.obs, batch.actions]))
        return float(np.mean((q[:, 0] - y) ** 2))

    critic_before = agent.critic.theta.copy()
    critic_fd = finite_diff_grad(critic_mse, critic_before, 1e-5)

    # actor objective -mean Q(s, mu(s)) uses the critic as updated by this
    # same call, so snapshot that by replaying the critic's own adam step
    from trisumo.tinynet import adam_init, adam_step, backward

    q, cache_q = forward(agent.critic, np.hstack([batch.obs, batch.actions]))
    gq = (2.0 / 3) * (q[:, 0] - y).reshape(3, 1)
    cg, _ = backward(agent.critic, cache_q, gq)
    critic_after, _ = adam_step(critic_before, cg.flat, adam_init(critic_before.size, cfg.lr_critic))

    def actor_objective(theta):
        probe = Mlp(agent.actor.dims, "tanh", cfg.action_bound, theta)
        a, _ = forward(probe, batch.obs)
        qc = Mlp(agent.critic.dims, "linear", theta=critic_after)
        qv, _ = forward(qc, np.hstack([batch.obs, a]))
        return float(-np.mean(qv))

    actor_before = agent.actor.theta.copy()
    actor_fd = finite_diff_grad(actor_objective, actor_before, 1e-5)

    update(agent, batch)

    for before, after, fd, lr in (
        (critic_before, agent.critic.theta, critic_fd, cfg.lr_critic),
        (actor_before, agent.actor.theta, actor_fd, cfg.lr_actor),
    ):
        delta = after - before
        predicted = -lr * fd / (np.abs(fd) + 1e-8)
        big = np.abs(fd) > 1e-5
        assert np.any(big)
        np.testing.assert_allclose(delta[big], predicted[big], rtol=1e-3)
