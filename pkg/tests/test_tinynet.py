"""Network stack: forward oracles, hand and finite-difference gradients, Adam."""

import math

import numpy as np
import pytest

from trisumo.errors import ConfigError, ContractError, ShapeError
from trisumo.tinynet import (
    Mlp,
    adam_init,
    adam_step,
    backward,
    finite_diff_grad,
    forward,
    init,
)


def rel_err(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-12)


# --- construction and init ---------------------------------------------------


def test_weight_shapes_follow_dims():
    net = Mlp((3, 8, 8, 2))
    assert [w.shape for w in net.weights] == [(8, 3), (8, 8), (2, 8)]
    assert [b.shape for b in net.biases] == [(8,), (8,), (2,)]
    assert net.n_params == 8 * 3 + 8 + 8 * 8 + 8 + 2 * 8 + 2


def test_init_seeded_bounds_and_zero_biases():
    net = init((5, 16, 2), seed=11)
    for w in net.weights:
        limit = 1.0 / math.sqrt(w.shape[1])
        assert np.all(np.abs(w) <= limit)
        assert np.any(w != 0.0)
    for b in net.biases:
        assert np.all(b == 0.0)
    again = init((5, 16, 2), seed=11)
    assert np.array_equal(net.theta, again.theta)
    other = init((5, 16, 2), seed=12)
    assert not np.array_equal(net.theta, other.theta)


def test_bad_dims_and_head_rejected():
    with pytest.raises(ConfigError):
        Mlp((4,))
    with pytest.raises(ConfigError):
        Mlp((4, 0, 2))
    with pytest.raises(ConfigError):
        Mlp((4, 2), head="relu")
    with pytest.raises(ConfigError):
        Mlp((4, 2), head="tanh", bound=0.0)


# --- forward -----------------------------------------------------------------


def test_zero_parameters_linear_head_gives_zeros():
    net = Mlp((6, 4, 3))
    y, _ = forward(net, np.ones(6))
    assert np.array_equal(y, np.zeros(3))


def test_single_linear_layer_hand_value():
    # weight 2, bias 1, input 3 -> 2*3 + 1 = 7
    net = Mlp((1, 1))
    net.theta[:] = [2.0, 1.0]
    y, _ = forward(net, np.array([3.0]))
    assert y[0] == 7.0


def test_forward_matches_scalar_hand_computation():
    # independent recomputation with math.tanh, scalar by scalar
    net = Mlp((2, 2, 1))
    w0 = [[0.5, -0.25], [0.1, 0.3]]
    b0 = [0.1, -0.2]
    w1 = [[0.7, -0.4]]
    b1 = [0.05]
    net.weights[0][:] = w0
    net.biases[0][:] = b0
    net.weights[1][:] = w1
    net.biases[1][:] = b1
    x = [0.2, -0.4]
    h = [
        math.tanh(w0[0][0] * x[0] + w0[0][1] * x[1] + b0[0]),
        math.tanh(w0[1][0] * x[0] + w0[1][1] * x[1] + b0[1]),
    ]
    expected = w1[0][0] * h[0] + w1[0][1] * h[1] + b1[0]
    y, _ = forward(net, np.array(x))
    assert y[0] == pytest.approx(expected, rel=1e-15)


def test_tanh_head_bounds_output():
    net = init((3, 8, 4), head="tanh", seed=0, bound=2.0)
    rng = np.random.default_rng(1)
    for _ in range(20):
        y, _ = forward(net, rng.normal(scale=5.0, size=3))
        assert np.all(np.abs(y) < 2.0)
    # under saturation tanh rounds to 1.0 in float64, touching the bound
    net.theta[:] *= 50.0
    y, _ = forward(net, np.full(3, 10.0))
    assert np.all(np.abs(y) <= 2.0)


def test_batched_forward_equals_vector_forward():
    # batched and single-row matmuls may take different BLAS kernels, so
    # agreement is to rounding, not bit-for-bit
    net = init((4, 8, 8, 2), head="tanh", seed=3, bound=1.5)
    xs = np.random.default_rng(2).normal(size=(10, 4))
    ys, _ = forward(net, xs)
    for i in range(10):
        yi, _ = forward(net, xs[i])
        np.testing.assert_allclose(ys[i], yi, rtol=1e-13, atol=1e-15)


def test_forward_length_mismatch_is_shape_error():
    net = Mlp((4, 2))
    with pytest.raises(ShapeError):
        forward(net, np.zeros(5))
    with pytest.raises(ShapeError):
        forward(net, np.zeros((3, 5)))


# --- backward ----------------------------------------------------------------


def test_backward_single_linear_layer_hand_gradients():
    # y = w*x + b, grad_output 1: dW = x, db = 1, grad_input = w
    net = Mlp((1, 1))
    net.theta[:] = [1.7, 0.3]
    x = np.array([2.5])
    y, cache = forward(net, x)
    grads, grad_in = backward(net, cache, np.array([1.0]))
    assert grads.weights[0][0, 0] == 2.5
    assert grads.biases[0][0] == 1.0
    assert grad_in[0] == 1.7


def test_backward_zero_grad_output_gives_zero_gradients():
    net = init((3, 5, 2), seed=4)
    y, cache = forward(net, np.ones(3))
    grads, grad_in = backward(net, cache, np.zeros(2))
    assert np.all(grads.flat == 0.0)
    assert np.all(grad_in == 0.0)


def test_backward_matches_finite_differences_both_heads():
    rng = np.random.default_rng(20)
    for head, bound in (("linear", 1.0), ("tanh", 2.0)):
        net = init((4, 8, 3), head=head, seed=21, bound=bound)
        x = rng.normal(size=4)
        g_out = rng.normal(size=3)
        _, cache = forward(net, x)
        grads, grad_in = backward(net, cache, g_out)

        def loss(theta, x=x, net=net, g_out=g_out):
            probe = Mlp(net.dims, net.head, net.bound, theta)
            y, _ = forward(probe, x)
            return float(y @ g_out)

        fd = finite_diff_grad(loss, net.theta, 1e-5)
        assert rel_err(grads.flat, fd) < 1e-4

        def loss_x(xv, net=net, g_out=g_out):
            y, _ = forward(net, xv)
            return float(y @ g_out)

        fd_in = finite_diff_grad(loss_x, x, 1e-5)
        assert rel_err(grad_in, fd_in) < 1e-4


def test_backward_batch_gradient_matches_sum_of_rows():
    net = init((3, 6, 2), seed=30)
    xs = np.random.default_rng(31).normal(size=(5, 3))
    gs = np.random.default_rng(32).normal(size=(5, 2))
    _, cache = forward(net, xs)
    batch_grads, batch_gin = backward(net, cache, gs)
    acc = np.zeros(net.n_params)
    for i in range(5):
        _, ci = forward(net, xs[i])
        gi, gini = backward(net, ci, gs[i])
        acc += gi.flat
        np.testing.assert_allclose(batch_gin[i], gini, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(batch_grads.flat, acc, rtol=1e-12, atol=1e-14)


def test_stale_cache_rejected():
    net = init((3, 4, 2), seed=5)
    _, cache = forward(net, np.ones(3))
    net.theta = net.theta.copy()  # parameter replacement invalidates the cache
    with pytest.raises(ContractError):
        backward(net, cache, np.zeros(2))


def test_grad_output_shape_mismatch_rejected():
    net = init((3, 4, 2), seed=6)
    _, cache = forward(net, np.ones(3))
    with pytest.raises(ShapeError):
        backward(net, cache, np.zeros(3))


# --- adam --------------------------------------------------------------------


def test_adam_zero_grads_leave_params_unchanged():
    params = np.array([1.0, -2.0, 0.5])
    state = adam_init(3, lr=0.01)
    new_params, new_state = adam_step(params, np.zeros(3), state)
    assert np.array_equal(new_params, params)
    assert new_state.t == 1
    assert state.t == 0  # input state untouched


def test_adam_first_step_equals_hand_formula():
    # bias correction at t=1 collapses to -lr * g / (|g| + eps)
    g = np.array([0.5, -3.0, 1e-4])
    params = np.zeros(3)
    state = adam_init(3, lr=0.01)
    new_params, _ = adam_step(params, g, state)
    expected = -0.01 * g / (np.abs(g) + 1e-8)
    np.testing.assert_allclose(new_params, expected, rtol=1e-12)


def test_adam_two_identical_calls_are_deterministic():
    g = np.array([0.3, -0.7])
    p0 = np.array([1.0, 1.0])
    s0 = adam_init(2, lr=0.05)
    p1, s1 = adam_step(p0, g, s0)
    p2, s2 = adam_step(p1, g, s1)
    assert s2.t == 2
    p1b, s1b = adam_step(p0, g, adam_init(2, lr=0.05))
    p2b, _ = adam_step(p1b, g, s1b)
    assert np.array_equal(p2, p2b)


def test_adam_sign_invariance_under_joint_scaling():
    # scaling one gradient coordinate and lr keeps that update's sign
    g = np.array([0.4, -0.2])
    p = np.zeros(2)
    d1, _ = adam_step(p, g, adam_init(2, lr=0.01))
    g2 = g.copy()
    g2[0] *= 100.0
    d2, _ = adam_step(p, g2, adam_init(2, lr=1.0))
    assert np.sign(d1[0]) == np.sign(d2[0])


def test_adam_shape_mismatch_rejected():
    with pytest.raises(ShapeError):
        adam_step(np.zeros(3), np.zeros(4), adam_init(3, lr=0.1))
    with pytest.raises(ShapeError):
        adam_step(np.zeros(4), np.zeros(4), adam_init(3, lr=0.1))


# --- finite differences ------------------------------------------------------


def test_finite_diff_constant_function_is_zero():
    g = finite_diff_grad(lambda p: 4.2, np.ones(5), 1e-5)
    assert np.array_equal(g, np.zeros(5))


def test_finite_diff_quadratic():
    g = finite_diff_grad(lambda p: float(p[0] ** 2), np.array([3.0]), 1e-5)
    assert abs(g[0] - 6.0) < 1e-6


def test_finite_diff_exact_on_linear():
    c = np.array([2.0, -1.5, 0.25])
    g = finite_diff_grad(lambda p: float(p @ c), np.zeros(3), 1e-3)
    np.testing.assert_allclose(g, c, rtol=1e-10)


def test_finite_diff_does_not_mutate_params():
    p = np.array([1.0, 2.0])
    finite_diff_grad(lambda q: float(q.sum()), p, 1e-5)
    assert np.array_equal(p, [1.0, 2.0])


# --- randomized gradient sweep (small version of the acceptance gate) --------


def test_random_net_gradients_match_finite_differences():
    rng = np.random.default_rng(77)
    for _ in range(10):
        depth = rng.integers(2, 4)
        dims = tuple(int(d) for d in rng.integers(2, 9, size=depth + 1))
        head = "tanh" if rng.random() < 0.5 else "linear"
        net = init(dims, head=head, seed=int(rng.integers(1 << 31)), bound=1.5)
        x = rng.normal(size=dims[0])
        g_out = rng.normal(size=dims[-1])
        _, cache = forward(net, x)
        grads, _ = backward(net, cache, g_out)

        def loss(theta, net=net, x=x, g_out=g_out):
            y, _ = forward(Mlp(net.dims, net.head, net.bound, theta), x)
            return float(y @ g_out)

        fd = finite_diff_grad(loss, net.theta, 1e-5)
        assert rel_err(grads.flat, fd) < 1e-4
