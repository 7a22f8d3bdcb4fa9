"""Turn a line-per-step use case into a CFG, then watch the validator react to damage.

    python3 demos/01_build_and_validate.py
"""

from uctestgen import Cfg, FlowSteps, build_cfg_from_steps, validate_cfg
from uctestgen.model import Edge

flow = FlowSteps.of(
    "Customer inserts card",
    "System asks for PIN",
    ("PIN is wrong", True),
    "System rejects the card",
    "System shows the main menu",
)
cfg = build_cfg_from_steps(flow)
for e in cfg.edges:
    print(f"{e.source} -> {e.target}  weight {e.weight}")
print("builder output:", validate_cfg(cfg).summary())

# Drop every edge touching the last node: it becomes isolated.
broken = Cfg(cfg.nodes, tuple(e for e in cfg.edges if e.target != cfg.nodes[-1].id))
print("without the last edge:", validate_cfg(broken).summary())

# Point an edge at a node that does not exist.
dangling = Cfg(cfg.nodes, cfg.edges + (Edge("S2", "S99"),))
print("with a dangling edge:", validate_cfg(dangling).summary())
