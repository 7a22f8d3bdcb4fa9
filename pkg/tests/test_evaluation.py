import importlib
import json
import math
import random

import httpx
import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uctestgen.evaluation import (
    EmptyRecordSet,
    EndpointError,
    EvalReport,
    PathCountRecord,
    ReportInconsistent,
    SimilarityConfig,
    SizeCapExceeded,
    UndefinedForEmptyPair,
    avg_abs_delta,
    compare_edges,
    discrepancy_rate,
    evaluate_use_case,
    ged,
    ged_upper_bound,
    graph_edit_distance,
    match_nodes,
    nged,
    prf1,
    similarity,
    solve_assignment,
)
from uctestgen.evaluation.ged import mapping_cost
from uctestgen.model import Cfg, Edge, Node

from conftest import DIAMOND, FIXTURE_CFGS, make_cfg
from oracles import best_assignment_total, brute_force_ged

sim_mod = importlib.import_module("uctestgen.evaluation.similarity")

# --- similarity ---------------------------------------------------------------


def test_similarity_spot_values():
    assert similarity("System validates input", "System validates input") == pytest.approx(1.0, abs=1e-12)
    assert similarity("alpha beta", "gamma delta") == 0.0
    # hand cosine: 3 shared unit terms, norms sqrt(3) and sqrt(5)
    assert similarity("system validates input", "system validates the input data") == pytest.approx(3 / math.sqrt(15), abs=1e-12)


def test_similarity_normalises_case_and_punctuation():
    assert similarity("System: validates, INPUT!", "system validates input") == pytest.approx(1.0)
    assert similarity("b a a", "a b a") == pytest.approx(1.0)
    assert similarity("", "") == 1.0 and similarity("", "x") == 0.0


@given(st.text(max_size=40), st.text(max_size=40))
def test_similarity_symmetric_and_bounded(a, b):
    s = similarity(a, b)
    assert 0.0 <= s <= 1.0
    assert s == similarity(b, a)


def test_threshold_bounds():
    with pytest.raises(ValueError):
        SimilarityConfig(threshold=1.2)


def test_embedding_endpoint(monkeypatch):
    vectors = {"a": [1.0, 0.0], "b": [1.0, 1.0], "c": [-1.0, 0.0]}

    def handler(request):
        texts = json.loads(request.content)["texts"]
        return httpx.Response(200, json={"vectors": [vectors[t] for t in texts]})

    client = sim_mod.EmbeddingClient("http://emb.test/embed", transport=httpx.MockTransport(handler))
    monkeypatch.setitem(sim_mod._clients, "http://emb.test/embed", client)
    cfg = SimilarityConfig("embedding-endpoint", endpoint="http://emb.test/embed")
    assert similarity("a", "b", cfg) == pytest.approx(1 / math.sqrt(2))
    assert similarity("a", "c", cfg) == 0.0  # clamped
    m = sim_mod.similarity_matrix(["a", "b"], ["a", "c"], cfg)
    assert m.shape == (2, 2) and m[0, 0] == pytest.approx(1.0)


def test_embedding_endpoint_errors(monkeypatch):
    client = sim_mod.EmbeddingClient("http://bad", transport=httpx.MockTransport(lambda r: httpx.Response(500)))
    monkeypatch.setitem(sim_mod._clients, "http://bad", client)
    with pytest.raises(EndpointError):
        similarity("a", "b", SimilarityConfig("embedding-endpoint", endpoint="http://bad"))
    with pytest.raises(EndpointError):
        similarity("a", "b", SimilarityConfig("embedding-endpoint"))


# --- assignment ---------------------------------------------------------------


def test_assignment_two_by_two():
    m = [[0.9, 0.2], [0.3, 0.8]]
    # brute force: 0.9+0.8=1.7 vs 0.2+0.3=0.5
    assert set(solve_assignment(m)) == {(0, 0), (1, 1)}


def test_assignment_identity():
    assert solve_assignment(np.eye(3)) == [(0, 0), (1, 1), (2, 2)]


def test_assignment_rectangular_and_empty():
    m = [[0.1, 0.9, 0.3]]
    assert solve_assignment(m) == [(0, 1)]
    assert len(solve_assignment(np.random.default_rng(0).random((5, 2)))) == 2
    assert solve_assignment(np.zeros((0, 3))) == []


@pytest.mark.parametrize("seed", range(30))
def test_assignment_matches_permutation_search(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 7, size=2)
    s = rng.random((m, n))
    pairs = solve_assignment(s)
    assert len(pairs) == min(m, n)
    assert len({r for r, _ in pairs}) == len({c for _, c in pairs}) == len(pairs)
    assert sum(s[r, c] for r, c in pairs) == pytest.approx(best_assignment_total(s.tolist()), abs=1e-9)


# --- prf1 ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "counts, expected",
    [
        ((2, 1, 0), (2 / 3, 1.0, 0.8)),
        ((0, 0, 0), (1.0, 1.0, 1.0)),
        ((2, 1, 1), (2 / 3, 2 / 3, 2 / 3)),
        ((0, 3, 0), (0.0, 0.0, 0.0)),
        ((0, 0, 2), (0.0, 0.0, 0.0)),
    ],
)
def test_prf1(counts, expected):
    assert prf1(*counts) == pytest.approx(expected, abs=1e-12)


# --- matching -----------------------------------------------------------------


def test_match_identical():
    r = match_nodes(DIAMOND, DIAMOND)
    assert (r.node_counts.tp, r.node_counts.fp, r.node_counts.fn) == (4, 0, 0)
    assert (r.edge_counts.tp, r.edge_counts.fp, r.edge_counts.fn) == (3, 0, 0)


def test_match_extra_node_is_fp():
    extra = Cfg(DIAMOND.nodes + (Node("S5", "Printer emits paper jam beep"),), DIAMOND.edges + (Edge("S4", "S5"),))
    r = match_nodes(extra, DIAMOND)
    assert (r.node_counts.tp, r.node_counts.fp, r.node_counts.fn) == (4, 1, 0)
    assert (r.edge_counts.tp, r.edge_counts.fp, r.edge_counts.fn) == (3, 1, 0)


def test_match_reworded_below_threshold():
    gen = make_cfg([("A", "User opens the login page"), ("B", "System validates the credentials"), ("C", "System opens the dashboard")],
                   [("A", "B"), ("B", "C")])
    truth = make_cfg([("T1", "User opens the login page"), ("T2", "System validates the credentials"), ("T3", "Dashboard appears on screen")],
                     [("T1", "T2"), ("T2", "T3")])
    # hand-computed: C vs T3 share only "dashboard" -> 1/(2*2) = 0.25; C vs T1 -> 2/sqrt(20) ~ 0.447
    r = match_nodes(gen, truth)
    assert (r.node_counts.tp, r.node_counts.fp, r.node_counts.fn) == (2, 1, 1)
    assert r.mapping == {"A": "T1", "B": "T2"}
    # B->C has an unmatched endpoint: FP; T2->T3 likewise FN
    assert (r.edge_counts.tp, r.edge_counts.fp, r.edge_counts.fn) == (1, 1, 1)


def test_compare_edges_rules():
    ident = {n: n for n in DIAMOND.node_ids}
    missing = Cfg(DIAMOND.nodes, DIAMOND.edges[:2])
    c = compare_edges(missing, DIAMOND, ident)
    assert (c.tp, c.fp, c.fn) == (2, 0, 1)
    partial = {"S1": "S1", "S2": "S2", "S3": "S3"}
    c = compare_edges(DIAMOND, DIAMOND, partial)
    assert (c.tp, c.fp, c.fn) == (2, 1, 1)
    reversed_ = Cfg(DIAMOND.nodes, (Edge("S2", "S1"),) + DIAMOND.edges[1:])
    c = compare_edges(reversed_, DIAMOND, ident)
    assert (c.tp, c.fp, c.fn) == (2, 1, 1)


def test_compare_edges_multiset():
    g = make_cfg(["A", "B"], [("A", "B"), ("A", "B")])
    t = make_cfg(["A", "B"], [("A", "B")])
    c = compare_edges(g, t, {"A": "A", "B": "B"})
    assert (c.tp, c.fp, c.fn) == (1, 1, 0)


def test_unmatched_id_collision_is_not_a_match():
    # generated node "T2" is unmatched; it must not pair with truth node "T2"
    g = make_cfg([("T1", "alpha"), ("T2", "zzz qqq")], [("T1", "T2")])
    t = make_cfg([("T1", "alpha"), ("T2", "beta")], [("T1", "T2")])
    r = match_nodes(g, t)
    assert r.node_counts.tp == 1 and r.edge_counts.tp == 0


@settings(max_examples=40)
@given(st.lists(st.text(alphabet="abcde ", min_size=1, max_size=12).filter(str.strip), min_size=1, max_size=5),
       st.lists(st.text(alphabet="abcde ", min_size=1, max_size=12).filter(str.strip), min_size=1, max_size=5),
       st.floats(0, 1), st.floats(0, 1))
def test_lowering_threshold_never_reduces_tp(gs, ts, t1, t2):
    lo, hi = sorted((t1, t2))
    g = Cfg(tuple(Node(f"G{i}", s) for i, s in enumerate(gs)), ())
    t = Cfg(tuple(Node(f"T{i}", s) for i, s in enumerate(ts)), ())
    assert match_nodes(g, t, SimilarityConfig(threshold=lo)).node_counts.tp >= match_nodes(g, t, SimilarityConfig(threshold=hi)).node_counts.tp


# --- GED ----------------------------------------------------------------------

PAIR_AB = (make_cfg(["A", "B"], [("A", "B")]), make_cfg(["A", "B", "C"], [("A", "B"), ("B", "C")]))
PAIR_DIAMOND = (DIAMOND, Cfg(DIAMOND.nodes, DIAMOND.edges[:2]))


def to_nx(cfg):
    g = nx.DiGraph()
    g.add_nodes_from(cfg.node_ids)
    g.add_edges_from((e.source, e.target) for e in cfg.edges)
    return g


def test_ged_examples_against_brute_force():
    assert brute_force_ged(DIAMOND, DIAMOND) == 0
    assert brute_force_ged(*PAIR_AB) == 2
    assert brute_force_ged(*PAIR_DIAMOND) == 1
    assert ged(DIAMOND, DIAMOND) == 0
    assert ged(*PAIR_AB) == 2
    assert ged(*PAIR_DIAMOND) == 1


def test_nged_examples():
    assert nged(DIAMOND, DIAMOND) == 1.0
    assert nged(*PAIR_AB) == pytest.approx(1 - 2 / (2 + 1 + 3 + 2), abs=1e-12)
    a, b = make_cfg([("X", "left")], []), make_cfg([("Y", "right")], [])
    assert nged(a, b) == 1.0
    with pytest.raises(UndefinedForEmptyPair):
        nged(Cfg(), Cfg())


def random_graph(rng, max_nodes=5, max_edges=7):
    n = rng.randint(0, max_nodes)
    ids = [f"N{i}" for i in range(n)]
    edges = [(rng.choice(ids), rng.choice(ids)) for _ in range(rng.randint(0, max_edges))] if ids else []
    return make_cfg(ids, edges)


@pytest.mark.parametrize("seed", range(40))
def test_ged_matches_partial_mapping_brute_force(seed):
    rng = random.Random(seed)
    g1, g2 = random_graph(rng, 4, 6), random_graph(rng, 4, 6)
    assert ged(g1, g2) == brute_force_ged(g1, g2)
    assert ged(g1, g2) == ged(g2, g1)


@pytest.mark.parametrize("seed", range(15))
def test_ged_matches_networkx_on_simple_digraphs(seed):
    # loop-free only: networkx can pair a self-loop with an edge of a deleted node
    rng = random.Random(100 + seed)
    def simple(n):
        ids = [f"N{i}" for i in range(n)]
        pairs = [(a, b) for a in ids for b in ids if a != b]
        return make_cfg(ids, rng.sample(pairs, rng.randint(0, min(6, len(pairs)))))
    g1, g2 = simple(rng.randint(1, 5)), simple(rng.randint(1, 5))
    assert ged(g1, g2) == nx.graph_edit_distance(to_nx(g1), to_nx(g2))


def test_ged_cap_and_upper_bound():
    big = make_cfg([f"S{i}" for i in range(13)], [(f"S{i}", f"S{i + 1}") for i in range(12)])
    with pytest.raises(SizeCapExceeded):
        ged(big, big)
    res = graph_edit_distance(big, big, seed={n: n for n in big.node_ids})
    assert res.exact is False and res.distance == 0
    shifted = {f"S{i}": f"S{(i + 1) % 13}" for i in range(13)}
    assert ged_upper_bound(big, big, shifted) >= 0
    assert graph_edit_distance(DIAMOND, DIAMOND).exact


def test_mapping_cost_identity_and_injectivity():
    assert mapping_cost(DIAMOND, DIAMOND, {n: n for n in DIAMOND.node_ids}) == 0
    with pytest.raises(ValueError):
        mapping_cost(DIAMOND, DIAMOND, {"S1": "S1", "S2": "S1"})


def test_ged_with_orphan_edges_counts_them():
    bad = make_cfg(["S1"], [("S1", "S9")])
    assert ged(bad, make_cfg(["S1"], [])) == 1
    assert ged(bad, bad) == 2  # orphan edges can never be matched


@pytest.mark.parametrize("name", sorted(FIXTURE_CFGS))
def test_self_comparison_perfect(name):
    c = FIXTURE_CFGS[name]
    row = evaluate_use_case(name, c, c)
    assert (row.node_precision, row.node_recall, row.node_f1) == (1.0, 1.0, 1.0)
    assert (row.edge_precision, row.edge_recall, row.edge_f1) == (1.0, 1.0, 1.0)
    assert row.nged == 1.0 and row.ged == 0


# --- path-count metrics -------------------------------------------------------


def records(n, mismatches):
    return [PathCountRecord(f"u{i}", 3 + (1 if i < mismatches else 0), 3) for i in range(n)]


def test_discrepancy_and_delta():
    assert discrepancy_rate(records(13, 1)) == pytest.approx(100 / 13)
    assert discrepancy_rate(records(5, 0)) == 0.0
    assert avg_abs_delta(records(13, 1)) == pytest.approx(1 / 13)
    assert avg_abs_delta(records(5, 0)) == 0.0
    assert avg_abs_delta([PathCountRecord("a", 1, 4), PathCountRecord("b", 5, 4)]) == 2.0
    with pytest.raises(EmptyRecordSet):
        discrepancy_rate([])
    with pytest.raises(EmptyRecordSet):
        avg_abs_delta([])


# --- report -------------------------------------------------------------------


def sample_report():
    return EvalReport([evaluate_use_case("a", DIAMOND, DIAMOND), evaluate_use_case("b", *PAIR_AB)])


def test_report_aggregates_recompute():
    rep = sample_report()
    agg = rep.aggregates
    assert agg["n_ucs"] == 2 and agg["n_diff"] == 0
    assert agg["avg_nged"] == pytest.approx((1.0 + 0.75) / 2, abs=1e-9)
    back = EvalReport.from_json(rep.to_json())
    assert back.rows == rep.rows


def test_report_rejects_tampered_aggregates():
    doc = json.loads(sample_report().to_json())
    doc["aggregates"]["avg_nged"] += 1e-6
    with pytest.raises(ReportInconsistent):
        EvalReport.from_dict(doc)


def test_report_csv():
    lines = sample_report().to_csv().splitlines()
    assert lines[0].startswith("use_case,gen_nodes,truth_nodes,node_precision")
    assert lines[-2].startswith("Total,")
    assert lines[-1] == "Discrepancy Rate (%),0.00"
