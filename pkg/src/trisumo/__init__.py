"""trisumo: a 2-vs-1 sumo ring-out game with a DDPG-trained teammate.

Three force-controlled discs share a circular ring; two teammates win by
pushing the opponent out. The package bundles the physics (`arena`), reward
shaping (`rewards`), a self-contained neural net stack (`tinynet`), the DDPG
learner (`ddpg`), scripted opponents (`opponents`), and the training /
evaluation harness with its CLI and HTTP service (`harness`, `service`).
"""

__version__ = "0.1.0"

from .arena import ArenaConfig, Outcome, Role, WorldState
from .ddpg import DdpgAgent, DdpgConfig
from .errors import TrisumoError
from .opponents import ScriptedPolicy
from .rewards import RewardConfig

__all__ = [
    "ArenaConfig",
    "DdpgAgent",
    "DdpgConfig",
    "Outcome",
    "RewardConfig",
    "Role",
    "ScriptedPolicy",
    "TrisumoError",
    "WorldState",
    "__version__",
]
