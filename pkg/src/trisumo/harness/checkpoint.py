"""Binary checkpoints: full training state with bit-exact round-trips.

Layout, all little-endian:

    magic  8 bytes  b"TRISUMO1"
    u32    format version (currently 1)
    u64    length of the canonical-JSON run config, then that many bytes
    u64    episode index
    u64    actor Adam step count t
    u64    critic Adam step count t
    9 arrays, each a u64 element count followed by that many f64 values:
        actor theta, critic theta, actor-target theta, critic-target theta,
        actor Adam m, actor Adam v, critic Adam m, critic Adam v,
        exploration-noise state x
    u64    length of the JSON PRNG state, then that many bytes

The config block is human-inspectable with `tail -c +13`. Loading rebuilds
the agent from the embedded config and verifies every array length against
it, so a checkpoint cannot silently pair arrays with the wrong topology.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from ..ddpg import ACTION_DIM, DdpgAgent, NoiseState, new_agent
from ..errors import CheckpointError
from ..tinynet import AdamState
from .config import RunConfig, canonical_json, parse_config

MAGIC = b"TRISUMO1"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    config: RunConfig
    agent: DdpgAgent
    episode: int
    rng: np.random.Generator


def _pack_array(arr: np.ndarray) -> bytes:
    data = np.ascontiguousarray(arr, dtype="<f8")
    return struct.pack("<Q", data.size) + data.tobytes()


class _Reader:
    def __init__(self, buf: bytes, path: str):
        self.buf = buf
        self.pos = 0
        self.path = path

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.buf):
            raise CheckpointError(f"{self.path}: truncated while reading {what}")
        chunk = self.buf[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def u64(self, what: str) -> int:
        return struct.unpack("<Q", self.take(8, what))[0]

    def array(self, what: str) -> np.ndarray:
        count = self.u64(f"{what} length")
        raw = self.take(8 * count, what)
        return np.frombuffer(raw, dtype="<f8").astype(float)


def save_checkpoint(
    path: str,
    config: RunConfig,
    agent: DdpgAgent,
    episode: int,
    rng: np.random.Generator,
) -> None:
    config_bytes = canonical_json(config).encode("utf-8")
    rng_bytes = json.dumps(
        rng.bit_generator.state, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")

    parts = [
        MAGIC,
        struct.pack("<I", FORMAT_VERSION),
        struct.pack("<Q", len(config_bytes)),
        config_bytes,
        struct.pack("<Q", episode),
        struct.pack("<Q", agent.actor_adam.t),
        struct.pack("<Q", agent.critic_adam.t),
        _pack_array(agent.actor.theta),
        _pack_array(agent.critic.theta),
        _pack_array(agent.actor_target.theta),
        _pack_array(agent.critic_target.theta),
        _pack_array(agent.actor_adam.m),
        _pack_array(agent.actor_adam.v),
        _pack_array(agent.critic_adam.m),
        _pack_array(agent.critic_adam.v),
        _pack_array(agent.noise_state.x),
        struct.pack("<Q", len(rng_bytes)),
        rng_bytes,
    ]
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def load_checkpoint(path: str) -> Checkpoint:
    with open(path, "rb") as f:
        buf = f.read()
    r = _Reader(buf, path)

    magic = r.take(len(MAGIC), "magic")
    if magic != MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    version = r.u32("format version")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: unsupported format version {version}, expected {FORMAT_VERSION}"
        )

    config_raw = r.take(r.u64("config length"), "config block")
    try:
        config = parse_config(json.loads(config_raw.decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: unreadable config block: {e}") from e

    episode = r.u64("episode")
    actor_t = r.u64("actor adam t")
    critic_t = r.u64("critic adam t")

    # Rebuild the agent skeleton from the config, then overwrite every array.
    agent = new_agent(config.ddpg, seed=0)
    slots = [
        ("actor theta", agent.actor.n_params),
        ("critic theta", agent.critic.n_params),
        ("actor-target theta", agent.actor.n_params),
        ("critic-target theta", agent.critic.n_params),
        ("actor adam m", agent.actor.n_params),
        ("actor adam v", agent.actor.n_params),
        ("critic adam m", agent.critic.n_params),
        ("critic adam v", agent.critic.n_params),
        ("noise state", ACTION_DIM),
    ]
    arrays = []
    for what, expected in slots:
        arr = r.array(what)
        if arr.size != expected:
            raise CheckpointError(
                f"{path}: {what} holds {arr.size} values, config implies {expected}"
            )
        arrays.append(arr)
    agent.actor.theta = arrays[0]
    agent.critic.theta = arrays[1]
    agent.actor_target.theta = arrays[2]
    agent.critic_target.theta = arrays[3]
    agent.actor_adam = AdamState(
        m=arrays[4], v=arrays[5], t=actor_t, lr=config.ddpg.lr_actor
    )
    agent.critic_adam = AdamState(
        m=arrays[6], v=arrays[7], t=critic_t, lr=config.ddpg.lr_critic
    )
    agent.noise_state = NoiseState(arrays[8])

    rng_raw = r.take(r.u64("rng length"), "rng state")
    try:
        rng_state = json.loads(rng_raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: unreadable rng state: {e}") from e
    if r.pos != len(buf):
        raise CheckpointError(f"{path}: {len(buf) - r.pos} trailing bytes")
    try:
        bit_gen = np.random.PCG64()
        bit_gen.state = rng_state
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"{path}: rng state not restorable: {e}") from e
    rng = np.random.Generator(bit_gen)

    return Checkpoint(config=config, agent=agent, episode=episode, rng=rng)
