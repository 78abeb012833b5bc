from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyndecon.dynamics import (
    AbsenceLedger,
    BadScenario,
    DynamicityModel,
    HideEdgeAdversary,
    ModelKind,
    RandomFTEAAdversary,
    ScheduleAdversary,
    StaticAdversary,
    ViolationKind,
    WheelRimAdversary,
    bipartite_scenario,
    diameter_tree_scenario,
    validate_decision,
    wheel,
    wheel_scenario,
)
from dyndecon.engine import Agent, Configuration
from dyndecon.generators import cycle, path, random_connected
from dyndecon.graph import cyclomatic_number, diameter

from .conftest import connected_footprints

DATA = Path(__file__).parent / "data"


def _config(positions):
    return Configuration(0, frozenset(), [Agent(i + 1, p, None) for i, p in enumerate(positions)], None, None)


def test_model_parse_and_bounds():
    assert DynamicityModel.parse("ftea:3") == DynamicityModel.ftea(3)
    assert DynamicityModel.parse("IDED").kind is ModelKind.IDED
    assert str(DynamicityModel.ftea(2)) == "FTEA:2"
    with pytest.raises(ValueError):
        DynamicityModel.ftea(0)


def test_static_adversary():
    fp = cycle(5)
    adv = StaticAdversary(fp)
    assert all(adv.step(None) == frozenset(range(5)) for _ in range(3))


def test_t_bound_exceeded():
    fp = cycle(4)
    ledger = AbsenceLedger(fp.m)
    for _ in range(2):
        ledger.update(frozenset({1, 2, 3}))
    v = validate_decision(fp, DynamicityModel.ftea(2), ledger, frozenset({1, 2, 3}))
    assert v.kind is ViolationKind.T_BOUND_EXCEEDED and v.edge == 0
    assert validate_decision(fp, DynamicityModel.ftea(3), ledger, frozenset({1, 2, 3})) is None


def test_disconnected_round():
    fp = path(3)
    v = validate_decision(fp, DynamicityModel.ided(), AbsenceLedger(fp.m), frozenset({0}))
    assert v.kind is ViolationKind.DISCONNECTED_ROUND


def test_ided_long_absence_ok():
    fp = wheel(9)
    spokes = frozenset(i for i, e in enumerate(fp.edges) if e.u == 0)
    ledger = AbsenceLedger(fp.m)
    ledger.counts = [0 if i in spokes else 10**6 for i in range(fp.m)]
    assert validate_decision(fp, DynamicityModel.ided(), ledger, spokes) is None


def test_wheel_rim_adversary():
    fp = wheel(9)
    adv = WheelRimAdversary(fp)
    spokes = frozenset(i for i, e in enumerate(fp.edges) if e.u == 0)
    assert adv.step(_config([0] * 8)) == spokes
    assert adv.step(_config([1, 2, 3, 4, 5, 6, 7])) == spokes  # node 8 still empty
    assert adv.step(_config(list(range(1, 9)))) == frozenset(range(fp.m))
    assert adv.step(_config([0] * 8)) == frozenset(range(fp.m))  # for good


def test_random_p0_equals_static():
    fp = random_connected(8, 4, 3)
    adv = RandomFTEAAdversary(fp, 1, 2, 0.0)
    assert all(adv.step(None) == frozenset(range(fp.m)) for _ in range(20))


def test_random_p1_on_tree_keeps_everything():
    fp = random_connected(9, 0, 5)
    adv = RandomFTEAAdversary(fp, 7, 1, 1.0)
    assert all(adv.step(None) == frozenset(range(fp.m)) for _ in range(20))


def _golden_rows(n_rounds=60):
    adv = RandomFTEAAdversary(cycle(4), seed=42, T=1, p=0.5)
    return [sorted(set(range(4)) - adv.step(None)) for _ in range(n_rounds)]


def test_golden_sequence_seed42_c4():
    expected = [[int(x) for x in line.split()] for line in (DATA / "golden_random_c4_seed42.txt").read_text().splitlines()]
    assert _golden_rows(len(expected)) == expected


def test_golden_sequence_is_legal():
    fp = cycle(4)
    ledger = AbsenceLedger(fp.m)
    for absent in _golden_rows():
        present = frozenset(range(4)) - set(absent)
        assert validate_decision(fp, DynamicityModel.ftea(1), ledger, present) is None
        ledger.update(present)


def test_schedule_adversary(tmp_path):
    fp = cycle(4)
    f = tmp_path / "s.txt"
    f.write_text("0\n1  # comment\n\n2\n")
    adv = ScheduleAdversary.load(fp, f, DynamicityModel.ftea(1))
    assert [sorted(adv.step(None)) for _ in range(5)] == [[1, 2, 3], [0, 2, 3], [0, 1, 2, 3], [0, 1, 3], [0, 1, 2, 3]]
    assert adv.quiescent()


def test_schedule_rejected_on_load(tmp_path):
    fp = cycle(4)
    f = tmp_path / "s.txt"
    f.write_text("0\n0\n")
    with pytest.raises(ValueError):
        ScheduleAdversary.load(fp, f, DynamicityModel.ftea(1))
    f.write_text("0 1\n")
    with pytest.raises(ValueError):
        ScheduleAdversary.load(fp, f, DynamicityModel.ided())
    f.write_text("9\n")
    with pytest.raises(ValueError):
        ScheduleAdversary.load(fp, f)


def test_hide_edge_rejects_bridge():
    with pytest.raises(ValueError):
        HideEdgeAdversary(path(3), 0)


def test_scenarios():
    sc = bipartite_scenario(8)
    assert sc.footprint.m == 16 and sc.home == 0 and isinstance(sc.adversary, StaticAdversary)
    assert bipartite_scenario(6).footprint.m == 9
    for bad in (5, 4, 7):
        with pytest.raises(BadScenario):
            bipartite_scenario(bad)
    w = wheel_scenario(9)
    assert cyclomatic_number(w.footprint) == 8 and w.model.kind is ModelKind.IDED
    assert cyclomatic_number(wheel_scenario(5).footprint) == 4
    with pytest.raises(BadScenario):
        wheel_scenario(4)
    t = diameter_tree_scenario(2)
    assert t.footprint.n == 7 and diameter(t.footprint) == 4
    assert diameter_tree_scenario(1).footprint.n == 3
    with pytest.raises(BadScenario):
        diameter_tree_scenario(0)


@settings(max_examples=40, deadline=None)
@given(connected_footprints(n_min=2, n_max=32), st.integers(1, 4), st.floats(0, 1), st.integers(0, 10**6))
def test_random_adversary_always_legal(fp, T, p, seed):
    adv = RandomFTEAAdversary(fp, seed, T, p)
    model = DynamicityModel.ftea(T)
    ledger = AbsenceLedger(fp.m)
    last_seen = [0] * fp.m
    for t in range(1, 301):
        present = adv.step(None)
        assert validate_decision(fp, model, ledger, present) is None
        ledger.update(present)
        for i in present:
            last_seen[i] = t
        # every window of T+1 rounds contains a presence
        assert all(t - s <= T for s in last_seen)
