"""Small dense networks with hand-derived backprop, plus Adam.

Everything is float64 and there is no computation graph: the topology is a
fixed MLP (affine + tanh hidden layers, linear or scaled-tanh output head),
so the backward pass is written out by hand and checked against a central
finite-difference oracle. Parameters live in one flat vector per network;
the per-layer weight matrices and bias vectors are views into it, which
makes optimizer steps and target-network blending single-array operations.

Weight matrices have shape (fan_out, fan_in); a layer computes W @ a + b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, ContractError, ShapeError

HEADS = ("linear", "tanh")


def _layout(dims: Sequence[int]) -> tuple[tuple[tuple[int, int, int, int], ...], int]:
    """Flat-vector offsets: per layer (w_start, w_end, b_start, b_end)."""
    spans = []
    offset = 0
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w_end = offset + fan_out * fan_in
        b_end = w_end + fan_out
        spans.append((offset, w_end, w_end, b_end))
        offset = b_end
    return tuple(spans), offset


class Mlp:
    """Dense net: tanh hidden layers, 'linear' or 'tanh' (scaled) output head.

    theta is the single parameter vector; weights[i] and biases[i] are views
    into it with shapes (dims[i+1], dims[i]) and (dims[i+1],).
    """

    def __init__(
        self,
        dims: Sequence[int],
        head: str = "linear",
        bound: float = 1.0,
        theta: np.ndarray | None = None,
    ):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 2 or any(d <= 0 for d in dims):
            raise ConfigError("net dims must list at least 2 positive sizes")
        if head not in HEADS:
            raise ConfigError(f"net head must be one of {HEADS}, got {head!r}")
        if head == "tanh" and not (math.isfinite(bound) and bound > 0):
            raise ConfigError("net bound must be finite and > 0 for the tanh head")
        self.dims = dims
        self.head = head
        self.bound = float(bound)
        self.spans, self.n_params = _layout(dims)
        if theta is None:
            theta = np.zeros(self.n_params)
        else:
            theta = np.asarray(theta, dtype=float)
            if theta.shape != (self.n_params,):
                raise ShapeError(
                    f"theta must have shape ({self.n_params},), got {theta.shape}"
                )
        self.theta = theta

    @property
    def weights(self) -> list[np.ndarray]:
        return [
            self.theta[ws:we].reshape(fan_out, fan_in)
            for (ws, we, _, _), fan_in, fan_out in zip(
                self.spans, self.dims[:-1], self.dims[1:]
            )
        ]

    @property
    def biases(self) -> list[np.ndarray]:
        return [self.theta[bs:be] for _, _, bs, be in self.spans]

    def clone(self) -> "Mlp":
        return Mlp(self.dims, self.head, self.bound, self.theta.copy())


def init(
    dims: Sequence[int],
    head: str = "linear",
    seed: int | np.random.Generator = 0,
    bound: float = 1.0,
) -> Mlp:
    """Seeded initialization: weights U(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases 0."""
    net = Mlp(dims, head, bound)
    rng = np.random.default_rng(seed)
    for w in net.weights:
        limit = 1.0 / math.sqrt(w.shape[1])
        w[:] = rng.uniform(-limit, limit, size=w.shape)
    return net


@dataclass
class Cache:
    """Activations retained by forward for the matching backward call."""

    acts: list[np.ndarray]  # inputs to each affine layer, batch-shaped (N, d)
    head_t: np.ndarray | None  # tanh(z_out) when the head is 'tanh'
    out_shape: tuple[int, ...]
    was_vector: bool
    theta: np.ndarray  # identity of the parameters used by forward


def _as_batch(x: np.ndarray, dim: int, what: str) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if x.shape[0] != dim:
            raise ShapeError(f"{what} must have length {dim}, got {x.shape[0]}")
        return x.reshape(1, dim), True
    if x.ndim == 2:
        if x.shape[1] != dim:
            raise ShapeError(f"{what} rows must have length {dim}, got {x.shape[1]}")
        return x, False
    raise ShapeError(f"{what} must be a vector or a batch of rows")


def forward(net: Mlp, x: np.ndarray) -> tuple[np.ndarray, Cache]:
    """Run the net on one input vector or a (N, dims[0]) batch.

    Returns the output plus a Cache for backward. The cache is bound to the
    exact parameter vector used here; replacing net.theta invalidates it.
    """
    a, was_vector = _as_batch(x, net.dims[0], "net input")
    acts = [a]
    ws, bs = net.weights, net.biases
    for w, b in zip(ws[:-1], bs[:-1]):
        a = np.tanh(a @ w.T + b)
        acts.append(a)
    z = a @ ws[-1].T + bs[-1]
    head_t = None
    if net.head == "tanh":
        head_t = np.tanh(z)
        y = net.bound * head_t
    else:
        y = z
    if was_vector:
        y = y[0]
    cache = Cache(acts, head_t, y.shape, was_vector, net.theta)
    return y, cache


def backward(
    net: Mlp, cache: Cache, grad_output: np.ndarray
) -> tuple["Grads", np.ndarray]:
    """Reverse-mode gradients of sum(output * grad_output).

    Returns parameter gradients (summed over the batch) and the gradient
    with respect to the input, matching the input's original shape.
    """
    if cache.theta is not net.theta:
        raise ContractError("stale cache: net parameters changed since forward")
    g = np.asarray(grad_output, dtype=float)
    if g.shape != cache.out_shape:
        raise ShapeError(
            f"grad_output shape {g.shape} does not match output {cache.out_shape}"
        )
    if cache.was_vector:
        g = g.reshape(1, -1)

    if cache.head_t is not None:
        dz = g * (net.bound * (1.0 - cache.head_t * cache.head_t))
    else:
        dz = g

    grads = zero_grads(net)
    ws = net.weights
    for i in range(len(ws) - 1, -1, -1):
        a_prev = cache.acts[i]
        grads.weights[i][:] = dz.T @ a_prev
        grads.biases[i][:] = dz.sum(axis=0)
        da = dz @ ws[i]
        if i > 0:
            dz = da * (1.0 - a_prev * a_prev)  # a_prev = tanh of the prior z
    grad_input = da[0] if cache.was_vector else da
    return grads, grad_input


@dataclass
class Grads:
    """Parameter gradients; same layout as the net, views into one flat vector."""

    flat: np.ndarray
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def zero_grads(net: Mlp) -> Grads:
    flat = np.zeros(net.n_params)
    weights = [
        flat[ws:we].reshape(fan_out, fan_in)
        for (ws, we, _, _), fan_in, fan_out in zip(
            net.spans, net.dims[:-1], net.dims[1:]
        )
    ]
    biases = [flat[bs:be] for _, _, bs, be in net.spans]
    return Grads(flat, weights, biases)


@dataclass
class AdamState:
    """Adam accumulators and hyperparameters for one flat parameter vector."""

    m: np.ndarray
    v: np.ndarray
    t: int
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(n_params: int, lr: float) -> AdamState:
    if not (math.isfinite(lr) and lr > 0):
        raise ConfigError("adam lr must be finite and > 0")
    return AdamState(m=np.zeros(n_params), v=np.zeros(n_params), t=0, lr=lr)


def adam_step(
    params: np.ndarray, grads: np.ndarray, state: AdamState
) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam step; pure, returns (new params, new state)."""
    if params.shape != grads.shape:
        raise ShapeError(
            f"params shape {params.shape} != grads shape {grads.shape}"
        )
    if state.m.shape != params.shape:
        raise ShapeError(
            f"adam state shape {state.m.shape} != params shape {params.shape}"
        )
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    v = state.beta2 * state.v + (1.0 - state.beta2) * (grads * grads)
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    new_state = AdamState(m, v, t, state.lr, state.beta1, state.beta2, state.eps)
    return new_params, new_state


def finite_diff_grad(
    f: Callable[[np.ndarray], float], params: np.ndarray, eps: float
) -> np.ndarray:
    """Central-difference gradient oracle: (f(p+eps*e_i) - f(p-eps*e_i)) / 2eps.

    eps must be > 0. f must not retain or mutate the array it is handed.
    """
    p = np.asarray(params, dtype=float).copy()
    g = np.empty_like(p)
    flat = p.ravel()
    gflat = g.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        f_plus = f(p)
        flat[i] = orig - eps
        f_minus = f(p)
        flat[i] = orig
        gflat[i] = (f_plus - f_minus) / (2.0 * eps)
    return g
