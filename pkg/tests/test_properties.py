"""Trace-level properties of the strategies."""

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyndecon.dynamics import DynamicityModel, HideEdgeAdversary, RandomFTEAAdversary, StaticAdversary, WheelRimAdversary, wheel
from dyndecon.engine import LocalView, OutcomeKind, PortView, RunSpec, run
from dyndecon.generators import cycle
from dyndecon.graph import cyclomatic_number, diameter, from_adjacency, is_connected
from dyndecon.strategies import get_strategy
from dyndecon.strategies.sweep import BACKTRACK, EXHAUSTED, SweepMemory, dfs_next
from dyndecon.strategies.uni import UniMemory

from .conftest import connected_footprints
from .make_catalog import load as load_catalog


def _view(dirty, present=None):
    present = present if present is not None else [True] * len(dirty)
    ports = tuple(PortView(p, pr, c) for p, (c, pr) in enumerate(zip(dirty, present)))
    return LocalView(1, len(ports), ports, False, ((1, None),))


def test_dfs_next():
    assert dfs_next(SweepMemory(1), _view([True, True, True])) == 0
    assert dfs_next(SweepMemory(1), _view([False, True, True], [True, False, True])) == 1
    deep = SweepMemory(1, stack=(("a", None), ("b", 0)))
    assert dfs_next(deep, _view([False, False])) is BACKTRACK
    assert dfs_next(SweepMemory(1), _view([False, False])) is EXHAUSTED


def test_exchange_unions_and_is_idempotent():
    strat = get_strategy("infinite")
    a = SweepMemory(1, known=frozenset({("x", 0, "y", 1)}))
    b = SweepMemory(2, known=frozenset({("y", 2, "z", 0)}))
    merged = strat.exchange([a, b])
    assert all(m.known == a.known | b.known for m in merged)
    assert strat.exchange(merged) == merged
    uni = get_strategy("uni")
    u = [UniMemory(1, links=frozenset({(0, 0, 1, 0)})), UniMemory(2, links=frozenset({(1, 1, 2, 0)}))]
    assert all(len(m.links) == 2 for m in uni.exchange(u))
    assert uni.exchange(uni.exchange(u)) == uni.exchange(u)


def _trees():
    for g in load_catalog():
        if nx.is_tree(g) and g.number_of_nodes() <= 8:
            yield from_adjacency(g.number_of_nodes(), list(g.edges()))


def test_every_tree_up_to_8_nodes_with_d_plus_1():
    trees = list(_trees())
    assert len(trees) == 1 + 1 + 1 + 2 + 3 + 6 + 11 + 23
    for fp in trees:
        for home in range(fp.n):
            trace, out = run(RunSpec(fp, DynamicityModel.ftea(1), StaticAdversary(fp), get_strategy("modified"),
                                     diameter(fp) + 1, home=home))
            assert out.kind is OutcomeKind.FULL_SUCCESS, (fp.n, home)


def test_hidden_edge_leaves_exactly_that_edge():
    fp = cycle(6)
    trace, out = run(RunSpec(fp, DynamicityModel.ided(), HideEdgeAdversary(fp, 3), get_strategy("infinite"), 3))
    assert out.kind is OutcomeKind.NODE_SUCCESS and out.exit_code == 2
    assert trace.records[-2]["edge_dirty"] == "000100"


def test_uni_strict_visibility():
    fp = cycle(6)
    spec = RunSpec(fp, DynamicityModel.ftea(2), RandomFTEAAdversary(fp, 4, 2, 0.4), get_strategy("uni"), 6,
                   strict_visibility=True)
    assert run(spec)[1].kind is OutcomeKind.FULL_SUCCESS


def _edges(records):
    return [tuple(e[:2]) for e in records[0]["edges"]]


def _check_trace_properties(records):
    edges = _edges(records)
    home = records[0]["home"]
    visited = {home}
    for rec in records[1:]:
        if rec.get("type") != "round":
            continue
        assert rec["node_dirty"][home] == "0"  # Home stays clean
        occupied = {m[2] for m in rec["agents"]}
        visited |= occupied
        dirty_edges = {i for i, c in enumerate(rec["edge_dirty"]) if c == "1"}
        for v in visited:
            if any(v in edges[i] for i in dirty_edges):
                assert v in occupied, f"round {rec['round']}: node {v} left with a contaminated edge"
    return visited


@settings(max_examples=30, deadline=None)
@given(connected_footprints(n_min=2, n_max=10), st.sampled_from(["modified", "infinite"]), st.integers(1, 3), st.integers(0, 999))
def test_guard_persistence_and_full_visitation(fp, name, T, seed):
    agents = get_strategy(name).required_agents(fp.n, diameter(fp), cyclomatic_number(fp))
    trace, out = run(RunSpec(fp, DynamicityModel.ftea(T), RandomFTEAAdversary(fp, seed, T, 0.3), get_strategy(name), agents))
    visited = _check_trace_properties(trace.records)
    assert out.kind is OutcomeKind.FULL_SUCCESS and visited == set(range(fp.n))


@pytest.mark.parametrize("n", [5, 8])
def test_guard_persistence_on_wheel(n):
    fp = wheel(n)
    trace, out = run(RunSpec(fp, DynamicityModel.ided(), WheelRimAdversary(fp), get_strategy("infinite"), 2 + 2 * (n - 1)))
    assert _check_trace_properties(trace.records) == set(range(n))


def test_view_has_no_node_identity_without_oracle():
    fp = cycle(4)
    seen = []

    class Spy(type(get_strategy("uni"))):
        def decide(self, view, agent_id):
            seen.append(view.node_handle)
            return super().decide(view, agent_id)

    run(RunSpec(fp, DynamicityModel.ftea(1), StaticAdversary(fp), Spy(), 4))
    assert seen and all(h is None for h in seen)
    assert "node" not in LocalView.__dataclass_fields__


def test_split_group_finds_stranded_guards():
    # two agents run ahead of the group and end up guarding separate frontier
    # nodes; the exhausted group must find them through the clean region
    fp = from_adjacency(10, [(0, 1), (0, 2), (1, 2), (2, 6), (3, 6), (3, 7), (3, 8), (4, 5), (5, 7), (5, 9)])
    trace, out = run(RunSpec(fp, DynamicityModel.ftea(2), RandomFTEAAdversary(fp, 0, 2, 0.3), get_strategy("infinite"), 8))
    assert out.kind is OutcomeKind.FULL_SUCCESS
    assert _check_trace_properties(trace.records) == set(range(10))
