import json
import sys
from pathlib import Path

import pytest

from uctestgen.model import Cfg, Edge, Node, UseCase

DATA = Path(__file__).parent / "data"
MINI = Path(__file__).parent.parent / "datasets" / "mini"


def make_cfg(nodes, edges):
    """``nodes``: ids or (id, statement); ``edges``: (from, to) or (from, to, condition)."""
    ns = [Node(n, f"statement {n}") if isinstance(n, str) else Node(*n) for n in nodes]
    es = [Edge(e[0], e[1], 1, e[2] if len(e) > 2 else None) for e in edges]
    return Cfg(tuple(ns), tuple(es))


DIAMOND = Cfg(
    (
        Node("S1", "User submits form"),
        Node("S2", "System validates input"),
        Node("S3", "System shows error message"),
        Node("S4", "System saves record"),
    ),
    (
        Edge("S1", "S2", 1),
        Edge("S2", "S3", 2, "input invalid"),
        Edge("S2", "S4", 2, "input valid"),
    ),
)
CYCLE = make_cfg(["S1", "S2", "S3"], [("S1", "S2"), ("S2", "S3"), ("S3", "S2")])
SELF_LOOP = make_cfg(["S1", "S2"], [("S1", "S1"), ("S1", "S2")])
SINGLE = make_cfg(["S1"], [])
LINE3 = make_cfg(["S1", "S2", "S3"], [("S1", "S2"), ("S2", "S3")])

FIXTURE_CFGS = {"diamond": DIAMOND, "cycle": CYCLE, "self_loop": SELF_LOOP, "single": SINGLE, "line3": LINE3}

DIAMOND_UC = UseCase("UC-D", "User submits a form; the system validates the input and either saves the record or shows an error.", "Submit form")


@pytest.fixture
def diamond():
    return DIAMOND


@pytest.fixture
def diamond_uc():
    return DIAMOND_UC


def load_json(name):
    return json.loads((DATA / name).read_text(encoding="utf-8"))


class ScriptedProvider:
    """Returns canned responses in order; records the requests it saw."""

    name = "scripted"

    def __init__(self, responses):
        self.responses = list(responses)
        self.requests = []

    def complete(self, request):
        self.requests.append(request)
        if not self.responses:
            raise AssertionError("scripted provider ran out of responses")
        return self.responses.pop(0)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
