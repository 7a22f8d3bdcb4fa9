"""Enumerate test paths of a small branching CFG and render template test cases.

No model is called: the template renderer is deterministic.

    python3 demos/02_paths_and_testcases.py
"""

from uctestgen import Cfg, UseCase, extract_paths
from uctestgen.testcases import render_test_suite, suite_to_markdown
from uctestgen.model import Edge, Node
from uctestgen.testcases import RenderConfig, Renderer

use_case = UseCase("UC-7", "Shopper checks out a cart.", "Check out")
cfg = Cfg(
    (
        Node("S1", "Shopper opens the cart"),
        Node("S2", "System checks stock"),
        Node("S3", "System reports missing items"),
        Node("S4", "Shopper pays"),
        Node("S5", "System confirms the order"),
    ),
    (
        Edge("S1", "S2"),
        Edge("S2", "S3", 2, "an item is out of stock"),
        Edge("S2", "S4", 2, "all items are in stock"),
        Edge("S3", "S1", 3, "shopper edits the cart"),  # loop back, pruned during extraction
        Edge("S4", "S5", 3),
    ),
)

paths = extract_paths(cfg)
for nodes, steps in zip(paths.node_paths, paths.translated):
    print(" -> ".join(nodes))
    for step in steps:
        print("     ", step)

suite, _ = render_test_suite(use_case, paths.translated, None, RenderConfig(Renderer.TEMPLATE))
print()
print(suite_to_markdown(use_case, suite))
