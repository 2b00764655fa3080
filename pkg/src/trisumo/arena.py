"""Planar sumo arena: three force-controlled discs in a circular ring.

Two teammates (learner + partner) face a single opponent. Bodies are discs
with linear velocity damping standing in for floor friction; control inputs
are 2-D forces clamped by magnitude. Whoever's center leaves the ring is out;
the team wins by ejecting the opponent while the learner stays in.

All dynamics run at 64-bit precision and are deterministic: a fixed
(config, seed, action sequence) always reproduces the same trajectory.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError, ContractError, InputError

OBS_DIM = 14


class Role(enum.Enum):
    LEARNER = "learner"
    PARTNER = "partner"
    OPPONENT = "opponent"


# Fixed iteration order; collision pairs and observation layouts rely on it.
ROLE_ORDER = (Role.LEARNER, Role.PARTNER, Role.OPPONENT)

# Spawn bearings in degrees, one per role, at half the ring radius.
_SPAWN_ANGLE_DEG = {Role.LEARNER: 90.0, Role.PARTNER: 210.0, Role.OPPONENT: 330.0}

_COLLISION_PAIRS = (
    (Role.LEARNER, Role.PARTNER),
    (Role.LEARNER, Role.OPPONENT),
    (Role.PARTNER, Role.OPPONENT),
)


class Outcome(enum.Enum):
    ONGOING = "ongoing"
    TEAM_WIN = "team_win"
    TEAM_LOSE = "team_lose"
    DRAW = "draw"


@dataclass(frozen=True)
class ArenaConfig:
    """Geometry, dynamics, and termination parameters of the ring."""

    ring_radius: float = 2.0
    agent_radius: float = 0.15
    agent_mass: float = 1.0
    dt: float = 0.05
    friction: float = 1.0  # linear damping coefficient, 1/s
    max_force: float = 2.0
    max_speed: float = 1.5
    restitution: float = 0.1
    max_steps: int = 500

    def validate(self) -> None:
        """Raise ConfigError naming the offending field."""
        if not (math.isfinite(self.ring_radius) and self.ring_radius > 0):
            raise ConfigError("arena.ring_radius must be finite and > 0")
        if not (math.isfinite(self.agent_radius) and self.agent_radius > 0):
            raise ConfigError("arena.agent_radius must be finite and > 0")
        if self.ring_radius <= 2.0 * self.agent_radius:
            raise ConfigError("arena.ring_radius must exceed twice agent_radius")
        if not (math.isfinite(self.agent_mass) and self.agent_mass > 0):
            raise ConfigError("arena.agent_mass must be finite and > 0")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("arena.dt must be finite and > 0")
        if not (math.isfinite(self.friction) and self.friction >= 0):
            raise ConfigError("arena.friction must be finite and >= 0")
        if not (math.isfinite(self.max_force) and self.max_force > 0):
            raise ConfigError("arena.max_force must be finite and > 0")
        if not (math.isfinite(self.max_speed) and self.max_speed > 0):
            raise ConfigError("arena.max_speed must be finite and > 0")
        if not (0.0 <= self.restitution <= 1.0):
            raise ConfigError("arena.restitution must lie in [0, 1]")
        if self.max_steps <= 0:
            raise ConfigError("arena.max_steps must be > 0")


@dataclass
class AgentBody:
    role: Role
    pos: np.ndarray  # (2,) meters
    vel: np.ndarray  # (2,) meters/second
    mass: float
    radius: float


@dataclass
class WorldState:
    bodies: dict[Role, AgentBody]
    step_count: int
    config: ArenaConfig


def clamp_magnitude(v: np.ndarray, limit: float) -> np.ndarray:
    """Scale v down so its Euclidean norm is at most limit; direction kept."""
    norm = math.hypot(v[0], v[1])
    if norm <= limit:
        return v
    return v * (limit / norm)


def new_world(config: ArenaConfig, seed: int) -> WorldState:
    """Spawn the three discs at rest, evenly fanned at half the ring radius.

    The seed parameter is reserved for randomized spawn layouts; the current
    layout is fixed, so any seed yields the same world.
    """
    del seed
    config.validate()
    bodies: dict[Role, AgentBody] = {}
    r = 0.5 * config.ring_radius
    for role in ROLE_ORDER:
        angle = math.radians(_SPAWN_ANGLE_DEG[role])
        pos = np.array([r * math.cos(angle), r * math.sin(angle)])
        bodies[role] = AgentBody(
            role=role,
            pos=pos,
            vel=np.zeros(2),
            mass=config.agent_mass,
            radius=config.agent_radius,
        )
    return WorldState(bodies=bodies, step_count=0, config=config)


def resolve_collision(
    a: AgentBody, b: AgentBody, restitution: float
) -> tuple[AgentBody, AgentBody]:
    """Separate an overlapping disc pair and exchange a normal impulse.

    Non-overlapping pairs pass through unchanged. Overlapping pairs are first
    moved apart along the center line in proportion to inverse mass until the
    discs exactly touch, then an impulse is applied iff they are approaching.
    Total momentum is conserved to floating-point accuracy.
    """
    delta = b.pos - a.pos
    dist = math.hypot(delta[0], delta[1])
    if dist >= a.radius + b.radius:
        return a, b

    if dist < 1e-12:
        # coincident centers: separate along a fixed axis
        normal = np.array([1.0, 0.0])
    else:
        normal = delta / dist

    inv_a = 1.0 / a.mass
    inv_b = 1.0 / b.mass
    inv_sum = inv_a + inv_b
    overlap = a.radius + b.radius - dist
    pos_a = a.pos - normal * (overlap * inv_a / inv_sum)
    pos_b = b.pos + normal * (overlap * inv_b / inv_sum)

    vel_a = a.vel
    vel_b = b.vel
    v_rel = vel_b - vel_a
    vn = v_rel[0] * normal[0] + v_rel[1] * normal[1]
    if vn < 0.0:  # approaching; separating pairs get no impulse
        j = -(1.0 + restitution) * vn / inv_sum
        vel_a = vel_a - (j * inv_a) * normal
        vel_b = vel_b + (j * inv_b) * normal

    body_a = AgentBody(a.role, pos_a, vel_a, a.mass, a.radius)
    body_b = AgentBody(b.role, pos_b, vel_b, b.mass, b.radius)
    return body_a, body_b


def outcome_of(world: WorldState) -> Outcome:
    """Ring-out rules: an agent is out iff its center is strictly outside.

    The learner leaving loses immediately (even if the opponent is also out);
    otherwise the opponent out wins, the partner out (with the opponent still
    in) loses, and hitting the step limit draws.
    """
    ring = world.config.ring_radius
    out = {
        role: math.hypot(*world.bodies[role].pos) > ring for role in ROLE_ORDER
    }
    if out[Role.LEARNER]:
        return Outcome.TEAM_LOSE
    if out[Role.OPPONENT]:
        return Outcome.TEAM_WIN
    if out[Role.PARTNER]:
        return Outcome.TEAM_LOSE
    if world.step_count >= world.config.max_steps:
        return Outcome.DRAW
    return Outcome.ONGOING


# Observation slot 1 ("mate") and slot 2 ("adversary") per observing role.
_OBS_SLOTS = {
    Role.LEARNER: (Role.PARTNER, Role.OPPONENT),
    Role.PARTNER: (Role.LEARNER, Role.OPPONENT),
    Role.OPPONENT: (Role.LEARNER, Role.PARTNER),
}


def observe(world: WorldState, role: Role) -> np.ndarray:
    """Build the fixed 14-entry observation vector for one agent.

    Layout: own position / R (2), own velocity / max_speed (2), edge margin
    (R - |pos|)/R (1), then relative position / R and relative velocity /
    max_speed for the mate slot and the adversary slot (2+2 each), and the
    episode progress step_count / max_steps (1). Relative quantities are
    other minus self. The opponent sees the learner in the mate slot.
    """
    cfg = world.config
    me = world.bodies[role]
    mate, adversary = (world.bodies[r] for r in _OBS_SLOTS[role])
    obs = np.empty(OBS_DIM)
    obs[0:2] = me.pos / cfg.ring_radius
    obs[2:4] = me.vel / cfg.max_speed
    obs[4] = (cfg.ring_radius - math.hypot(*me.pos)) / cfg.ring_radius
    obs[5:7] = (mate.pos - me.pos) / cfg.ring_radius
    obs[7:9] = (mate.vel - me.vel) / cfg.max_speed
    obs[9:11] = (adversary.pos - me.pos) / cfg.ring_radius
    obs[11:13] = (adversary.vel - me.vel) / cfg.max_speed
    obs[13] = world.step_count / cfg.max_steps
    return obs


def step(
    world: WorldState, actions: Mapping[Role, np.ndarray]
) -> tuple[WorldState, dict[Role, np.ndarray], Outcome]:
    """Advance the world one tick under the given per-role forces.

    Pipeline: clamp forces, semi-implicit Euler with velocity damping and a
    speed clamp, position update, one collision pass over the three pairs in
    fixed order, then a final speed clamp so collision impulses cannot break
    the per-body speed bound. Terminal worlds must not be stepped again.
    """
    if outcome_of(world) is not Outcome.ONGOING:
        raise ContractError("cannot step a terminal world")
    cfg = world.config

    new_bodies: dict[Role, AgentBody] = {}
    for role in ROLE_ORDER:
        if role not in actions:
            raise InputError(f"missing action for role {role.value!r}")
        force = np.asarray(actions[role], dtype=float)
        if force.shape != (2,):
            raise InputError(f"action for {role.value!r} must be a 2-vector")
        if not np.all(np.isfinite(force)):
            raise InputError(f"action for {role.value!r} contains NaN or Inf")
        body = world.bodies[role]
        force = clamp_magnitude(force, cfg.max_force)
        vel = body.vel + (force / body.mass) * cfg.dt
        vel = vel * max(0.0, 1.0 - cfg.friction * cfg.dt)
        vel = clamp_magnitude(vel, cfg.max_speed)
        pos = body.pos + vel * cfg.dt
        new_bodies[role] = AgentBody(role, pos, vel, body.mass, body.radius)

    for role_a, role_b in _COLLISION_PAIRS:
        new_bodies[role_a], new_bodies[role_b] = resolve_collision(
            new_bodies[role_a], new_bodies[role_b], cfg.restitution
        )
    for role in ROLE_ORDER:
        body = new_bodies[role]
        body.vel = clamp_magnitude(body.vel, cfg.max_speed)

    next_world = WorldState(new_bodies, world.step_count + 1, cfg)
    outcome = outcome_of(next_world)
    observations = {role: observe(next_world, role) for role in ROLE_ORDER}
    return next_world, observations, outcome
