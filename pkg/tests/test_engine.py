import pytest

from dyndecon.dynamics import DynamicityModel, RandomFTEAAdversary, StaticAdversary
from dyndecon.engine import OutcomeKind, RunSpec, detect_stall, run
from dyndecon.generators import cycle, path, random_connected
from dyndecon.strategies import STAY, InsufficientAgents, Move, Strategy, get_strategy
from dyndecon.verify import parse_records, verify_records


class Idle(Strategy):
    name = "idle"

    def initial_memory(self, agent_id):
        return None

    def decide(self, view, agent_id):
        return STAY, None


class Pendulum(Strategy):
    """Single agent bouncing on port 0; leaves contaminated edges behind."""

    name = "pendulum"

    def initial_memory(self, agent_id):
        return None

    def decide(self, view, agent_id):
        return Move(0), None


def _spec(fp, strategy, agents, model=DynamicityModel.ftea(1), adversary=None, **kw):
    return RunSpec(fp, model, adversary or StaticAdversary(fp), strategy, agents, **kw)


def test_idle_stalls_with_exit_3():
    fp = path(3)
    _, out = run(_spec(fp, Idle(), 1, stall_window=5))
    assert out.kind is OutcomeKind.STALL and out.exit_code == 3
    assert out.detail["stalled_for"] == 5


def test_pendulum_recontaminates():
    fp = path(3)
    trace, out = run(_spec(fp, Pendulum(), 1))
    assert out.kind is OutcomeKind.MONOTONICITY_VIOLATION and out.exit_code == 4
    assert out.round == 2 and out.detail["nodes"] == [1]
    report = verify_records(trace.records)
    assert report.checks_failed() == {"monotonicity"} and report.first.round == 2


def test_bad_schedule_is_model_violation():
    fp = path(3)
    class Cutter(StaticAdversary):
        def step(self, observation):
            return frozenset({1})

    adv = Cutter(fp)
    trace, out = run(_spec(fp, Idle(), 1, adversary=adv))
    assert out.kind is OutcomeKind.MODEL_VIOLATION and out.exit_code == 5 and out.round == 1
    assert out.detail["violation"] == "DisconnectedRound"
    assert verify_records(trace.records).checks_failed() == {"connectivity"}


def test_round_limit_exit_6():
    fp = path(3)
    _, out = run(_spec(fp, Idle(), 1, max_rounds=3, stall_window=100))
    assert out.kind is OutcomeKind.ROUND_LIMIT and out.exit_code == 6


def test_single_node_is_clean_at_round_zero():
    _, out = run(_spec(path(1), Idle(), 1))
    assert out.kind is OutcomeKind.FULL_SUCCESS and out.round == 0 and out.exit_code == 0


@pytest.mark.parametrize("name", ["uni", "modified", "infinite"])
def test_full_success_and_determinism(name):
    fp = random_connected(10, 4, 11)
    def spec():
        return _spec(fp, get_strategy(name), 10, adversary=RandomFTEAAdversary(fp, 5, 2, 0.3),
                     model=DynamicityModel.ftea(2), seed=5)
    t1, o1 = run(spec())
    t2, o2 = run(spec())
    assert o1.kind is OutcomeKind.FULL_SUCCESS
    assert t1.to_text() == t2.to_text()
    assert verify_records(parse_records(t1.to_text())).ok


def test_halt_on_completion_off_keeps_running():
    fp = cycle(5)
    spec = _spec(fp, get_strategy("modified"), 5, max_rounds=200, halt_on_completion=False)
    trace, out = run(spec)
    assert out.kind is OutcomeKind.FULL_SUCCESS and out.round < 200
    assert trace.records[-2]["round"] == 200
    assert verify_records(trace.records).ok


def test_enforce_budget():
    fp = cycle(6)
    with pytest.raises(InsufficientAgents):
        run(_spec(fp, get_strategy("modified"), 2, enforce_budget=True))
    _, out = run(_spec(fp, get_strategy("modified"), 2))  # off by default: just runs
    assert out.kind in (OutcomeKind.STALL, OutcomeKind.FULL_SUCCESS)


def test_bad_spec():
    with pytest.raises(ValueError):
        run(_spec(path(2), Idle(), 0))
    with pytest.raises(ValueError):
        run(_spec(path(2), Idle(), 1, home=5))


def test_shuffle_exchange_does_not_change_outcome():
    fp = random_connected(9, 3, 2)
    base = run(_spec(fp, get_strategy("modified"), 9, seed=0))[0].to_text()
    shuffled = run(_spec(fp, get_strategy("modified"), 9, shuffle_exchange=True, seed=0))[0].to_text()
    assert base == shuffled


def test_detect_stall():
    snap = ((0,), 1, 1, 3, True)
    assert detect_stall([snap] * 3, 3)
    assert not detect_stall([snap] * 2, 3)
    assert not detect_stall([snap, snap, ((1,), 1, 1, 3, True)], 3)
    assert not detect_stall([snap[:4] + (False,)] * 3, 3)


def test_trace_records_shape():
    trace, _ = run(_spec(path(3), get_strategy("uni"), 3))
    head, r0 = trace.records[0], trace.records[1]
    assert head["format"] == "dyndecon-trace/1" and head["n"] == 3
    assert r0["node_dirty"] == "011" and r0["edge_dirty"] == "11"
    assert trace.records[-1]["type"] == "outcome"
