"""Run configuration: one JSON document mirroring RunConfig field-for-field.

Parsing is strict: unknown keys anywhere in the document are rejected, every
error names the offending field, and booleans are not accepted where numbers
are expected. Missing keys fall back to the package defaults. One field is
derived rather than read: the learner's action bound always equals the
arena's max_force.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable

from ..arena import ArenaConfig
from ..ddpg import DdpgConfig, NoiseConfig
from ..errors import ConfigError
from ..opponents import ScriptedPolicy
from ..rewards import RewardConfig


@dataclass(frozen=True)
class RunConfig:
    arena: ArenaConfig = field(default_factory=ArenaConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    ddpg: DdpgConfig = field(default_factory=DdpgConfig)
    partner_policy: ScriptedPolicy = field(
        default_factory=lambda: ScriptedPolicy(kind="chase", gain=1.0)
    )
    opponent_policy: ScriptedPolicy = field(
        default_factory=lambda: ScriptedPolicy(kind="chase", gain=1.0)
    )
    episodes: int = 5000
    eval_every: int = 100
    eval_episodes: int = 50
    metrics_window: int = 100
    seed: int = 0
    output_dir: str | None = None

    def validate(self) -> None:
        self.arena.validate()
        self.reward.validate()
        self.ddpg.validate()
        self.partner_policy.validate()
        self.opponent_policy.validate()
        if self.episodes <= 0:
            raise ConfigError("episodes must be > 0")
        if self.eval_every <= 0:
            raise ConfigError("eval_every must be > 0")
        if self.eval_episodes <= 0:
            raise ConfigError("eval_episodes must be > 0")
        if self.metrics_window <= 0:
            raise ConfigError("metrics_window must be > 0")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.ddpg.action_bound != self.arena.max_force:
            raise ConfigError(
                "ddpg.action_bound is derived from arena.max_force; do not set it"
            )


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number")
    if not math.isfinite(value):
        raise ConfigError(f"{where} must be finite")
    return float(value)


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer")
    return value


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{where} must be a string")
    return value


def _opt_str(value: Any, where: str) -> str | None:
    if value is None:
        return None
    return _str(value, where)


def _int_list(value: Any, where: str) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise ConfigError(f"{where} must be a list of integers")
    return tuple(_int(v, where) for v in value)


def _section(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be an object")
    return value


def _take(obj: dict, where: str, fields: dict[str, Callable[[Any, str], Any]]) -> dict:
    """Convert known keys, rejecting anything not in `fields`."""
    unknown = sorted(set(obj) - set(fields))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}")
    return {k: conv(obj[k], f"{where}.{k}") for k, conv in fields.items() if k in obj}


_ARENA_FIELDS = {
    "ring_radius": _num,
    "agent_radius": _num,
    "agent_mass": _num,
    "dt": _num,
    "friction": _num,
    "max_force": _num,
    "max_speed": _num,
    "restitution": _num,
    "max_steps": _int,
}

_REWARD_FIELDS = {
    "w_dist": _num,
    "w_vel": _num,
    "w_ring": _num,
    "step_penalty": _num,
    "r_win": _num,
    "r_lose": _num,
    "r_draw": _num,
}

_NOISE_FIELDS = {
    "kind": _str,
    "theta": _num,
    "sigma": _num,
    "mu": _num,
    "dt": _num,
}

# action_bound is intentionally absent: it is always arena.max_force.
_DDPG_FIELDS = {
    "gamma": _num,
    "tau": _num,
    "lr_actor": _num,
    "lr_critic": _num,
    "batch_size": _int,
    "buffer_capacity": _int,
    "warmup_steps": _int,
    "hidden": _int_list,
    "noise": _section,
}

_POLICY_FIELDS = {
    "kind": _str,
    "sigma": _num,
    "gain": _num,
}

_RUN_FIELDS = {
    "arena": _section,
    "reward": _section,
    "ddpg": _section,
    "partner_policy": _section,
    "opponent_policy": _section,
    "episodes": _int,
    "eval_every": _int,
    "eval_episodes": _int,
    "metrics_window": _int,
    "seed": _int,
    "output_dir": _opt_str,
}


def parse_config(doc: Any) -> RunConfig:
    """Build a validated RunConfig from a parsed JSON document."""
    top = _take(_section(doc, "config"), "config", _RUN_FIELDS)

    arena = ArenaConfig(**_take(top.pop("arena", {}), "arena", _ARENA_FIELDS))
    reward = RewardConfig(**_take(top.pop("reward", {}), "reward", _REWARD_FIELDS))

    ddpg_kw = _take(top.pop("ddpg", {}), "ddpg", _DDPG_FIELDS)
    noise_kw = _take(ddpg_kw.pop("noise", {}), "ddpg.noise", _NOISE_FIELDS)
    ddpg = DdpgConfig(
        noise=NoiseConfig(**noise_kw), action_bound=arena.max_force, **ddpg_kw
    )

    partner = ScriptedPolicy(
        **_take(top.pop("partner_policy", {"kind": "chase", "gain": 1.0}),
                "partner_policy", _POLICY_FIELDS)
    )
    opponent = ScriptedPolicy(
        **_take(top.pop("opponent_policy", {"kind": "chase", "gain": 1.0}),
                "opponent_policy", _POLICY_FIELDS)
    )

    cfg = RunConfig(
        arena=arena,
        reward=reward,
        ddpg=ddpg,
        partner_policy=partner,
        opponent_policy=opponent,
        **top,
    )
    cfg.validate()
    return cfg


def load_config(path: str) -> RunConfig:
    """Read and parse a JSON config file; bad JSON reports the parse position."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    return parse_config(doc)


def config_to_dict(cfg: RunConfig) -> dict:
    """Full nested dict, parseable back by parse_config to an equal RunConfig."""
    out: dict[str, Any] = {
        "arena": {k: getattr(cfg.arena, k) for k in _ARENA_FIELDS},
        "reward": {k: getattr(cfg.reward, k) for k in _REWARD_FIELDS},
        "ddpg": {
            **{k: getattr(cfg.ddpg, k) for k in _DDPG_FIELDS if k != "noise"},
            "noise": {k: getattr(cfg.ddpg.noise, k) for k in _NOISE_FIELDS},
        },
        "partner_policy": {k: getattr(cfg.partner_policy, k) for k in _POLICY_FIELDS},
        "opponent_policy": {k: getattr(cfg.opponent_policy, k) for k in _POLICY_FIELDS},
        "episodes": cfg.episodes,
        "eval_every": cfg.eval_every,
        "eval_episodes": cfg.eval_episodes,
        "metrics_window": cfg.metrics_window,
        "seed": cfg.seed,
    }
    out["ddpg"]["hidden"] = list(cfg.ddpg.hidden)
    if cfg.output_dir is not None:
        out["output_dir"] = cfg.output_dir
    return out


def canonical_json(cfg: RunConfig) -> str:
    """Key-sorted, whitespace-free JSON; the form embedded in checkpoints."""
    return json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
