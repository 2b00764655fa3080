"""Scripted policies for the non-learning agents.

Four behaviours close the 3-agent loop without a second learner: do nothing,
push with random Gaussian force, chase the nearest adversary, or home toward
the ring center. All outputs are clamped to the arena's force limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arena import Role, WorldState, clamp_magnitude
from .errors import ConfigError, InputError

KINDS = ("stationary", "random_force", "chase", "hold_center")

# Who counts as an adversary for the Chase behaviour.
_ADVERSARIES = {
    Role.LEARNER: (Role.OPPONENT,),
    Role.PARTNER: (Role.OPPONENT,),
    Role.OPPONENT: (Role.LEARNER, Role.PARTNER),
}


@dataclass(frozen=True)
class ScriptedPolicy:
    """kind plus its single parameter: sigma for random_force, gain otherwise."""

    kind: str = "stationary"
    sigma: float = 0.5
    gain: float = 1.0

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"policy kind must be one of {KINDS}, got {self.kind!r}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ConfigError("policy sigma must be finite and >= 0")
        if not (math.isfinite(self.gain) and self.gain >= 0):
            raise ConfigError("policy gain must be finite and >= 0")


def scripted_action(
    policy: ScriptedPolicy,
    world: WorldState,
    role: Role,
    rng: np.random.Generator,
) -> np.ndarray:
    """Force chosen by the scripted policy for `role`, clamped to max_force.

    chase pushes with gain * unit-vector toward the nearest adversary (the
    opponent chases whichever teammate is closer; ties go to the learner).
    hold_center pushes with gain * (-pos). stationary never consumes rng.
    """
    max_force = world.config.max_force
    me = world.bodies[role]

    if policy.kind == "stationary":
        return np.zeros(2)

    if policy.kind == "random_force":
        return clamp_magnitude(policy.sigma * rng.standard_normal(2), max_force)

    if policy.kind == "chase":
        target = min(
            _ADVERSARIES[role],
            key=lambda adv: math.hypot(*(world.bodies[adv].pos - me.pos)),
        )
        delta = world.bodies[target].pos - me.pos
        dist = math.hypot(delta[0], delta[1])
        if dist < 1e-9:
            return np.zeros(2)
        return clamp_magnitude(policy.gain * delta / dist, max_force)

    if policy.kind == "hold_center":
        return clamp_magnitude(-policy.gain * me.pos, max_force)

    raise InputError(f"unknown policy kind {policy.kind!r}")
