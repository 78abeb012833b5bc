"""Synchronous round loop.

Round ``t`` runs, in order: adversary decision and legality check; memory
exchange and a LocalView per occupied node; one action per agent;
simultaneous movement and cleaning; recontamination spread; monitoring.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

from . import __version__
from .contamination import (
    ContaminationState,
    ViolationReport,
    apply_agent_actions,
    bits,
    spread,
    to_mask,
)
from .dynamics import AbsenceLedger, Adversary, DynamicityModel, ModelKind, validate_decision
from .graph import Footprint
from .strategies.base import Action, InsufficientAgents, Move, Strategy


class StrategyError(RuntimeError):
    """A strategy produced an action the model forbids."""


@dataclass
class Agent:
    id: int
    position: int
    memory: Any

    @property
    def role(self) -> str:
        return getattr(self.memory, "role", "")


@dataclass(frozen=True)
class PortView:
    port: int
    present: bool
    contaminated: bool | None  # None: status hidden (strict visibility, edge absent)


@dataclass(frozen=True)
class LocalView:
    round: int
    degree: int
    ports: tuple[PortView, ...]
    node_contaminated: bool
    agents: tuple[tuple[int, Any], ...]
    arrivals: dict = field(default_factory=dict)  # agent id -> entry port this round
    node_handle: str | None = None

    @property
    def agent_count(self) -> int:
        return len(self.agents)

    @property
    def missing_ports(self) -> frozenset[int]:
        return frozenset(p.port for p in self.ports if not p.present)

    @property
    def contaminated_ports(self) -> list[int]:
        """Ports whose edge is (or may be, if hidden) contaminated."""
        return [p.port for p in self.ports if p.contaminated is not False]

    def memory_of(self, agent_id: int) -> Any:
        for i, m in self.agents:
            if i == agent_id:
                return m
        raise KeyError(agent_id)


@dataclass
class Configuration:
    round: int
    present: frozenset[int]
    agents: list[Agent]
    contamination: ContaminationState
    ledger: AbsenceLedger
    arrivals: dict = field(default_factory=dict)  # node -> {agent id: entry port}

    @property
    def guarded_nodes(self) -> frozenset[int]:
        return frozenset(a.position for a in self.agents)


class OutcomeKind(str, Enum):
    FULL_SUCCESS = "FullSuccess"
    NODE_SUCCESS = "NodeSuccess"
    STALL = "Stall"
    MONOTONICITY_VIOLATION = "MonotonicityViolation"
    MODEL_VIOLATION = "ModelViolation"
    ROUND_LIMIT = "RoundLimit"


EXIT_CODES = {
    OutcomeKind.FULL_SUCCESS: 0,
    OutcomeKind.NODE_SUCCESS: 2,
    OutcomeKind.STALL: 3,
    OutcomeKind.MONOTONICITY_VIOLATION: 4,
    OutcomeKind.MODEL_VIOLATION: 5,
    OutcomeKind.ROUND_LIMIT: 6,
}


@dataclass
class Outcome:
    kind: OutcomeKind
    round: int
    detail: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]


@dataclass
class Trace:
    records: list[dict] = field(default_factory=list)

    def to_text(self) -> str:
        return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in self.records)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())


@dataclass
class RunSpec:
    footprint: Footprint
    model: DynamicityModel
    adversary: Adversary
    strategy: Strategy
    agent_count: int
    home: int = 0
    max_rounds: int | None = None
    stall_window: int | None = None
    node_oracle: bool | None = None
    strict_visibility: bool = False
    enforce_budget: bool = False
    shuffle_exchange: bool = False
    halt_on_completion: bool = True
    seed: int | None = None
    meta: dict = field(default_factory=dict)


def default_stall_window(n: int, model: DynamicityModel) -> int:
    if model.kind is ModelKind.FTEA:
        return 4 * n * (model.T + 1)
    return 4 * n * n


def default_max_rounds(n: int, model: DynamicityModel) -> int:
    return max(1000, 128 * n * n * model.bound)


def node_handle(v: int, salt: str = "") -> str:
    return hashlib.blake2b(f"{salt}:{v}".encode(), digest_size=6).hexdigest()


def local_view(
    config: Configuration,
    node: int,
    fp: Footprint,
    *,
    arrivals: dict | None = None,
    node_oracle: bool = False,
    strict_visibility: bool = False,
    salt: str = "",
    order: Sequence[Agent] | None = None,
) -> LocalView:
    here = list(order) if order is not None else sorted(
        (a for a in config.agents if a.position == node), key=lambda a: a.id
    )
    if not here:
        raise ValueError(f"node {node} is unoccupied")
    st = config.contamination
    ports = []
    for p, (_, e, _) in enumerate(fp.adj[node]):
        present = e in config.present
        dirty = not st.edge_clean(e)
        ports.append(PortView(p, present, dirty if (present or not strict_visibility) else None))
    if fp.adj[node] and not any(p.present for p in ports):
        raise AssertionError(f"node {node} has no present port; round is disconnected")
    return LocalView(
        round=config.round,
        degree=len(ports),
        ports=tuple(ports),
        node_contaminated=not st.node_clean(node),
        agents=tuple((a.id, a.memory) for a in here),
        arrivals=dict(arrivals or {}),
        node_handle=node_handle(node, salt) if node_oracle else None,
    )


def detect_stall(window: Sequence[tuple], length: int) -> bool:
    """True iff ``window`` holds ``length`` identical snapshots, all quiescent.

    A snapshot is ``(positions, node_dirty, edge_dirty, present, quiescent)``.
    """
    if len(window) < length or length < 1:
        return False
    tail = list(window)[-length:]
    first = tail[0][:4]
    return all(s[:4] == first and s[4] for s in tail)


def _bitstring(mask: int, width: int) -> str:
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(width))


def scenario_hash(meta: dict) -> str:
    blob = json.dumps(meta, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def run(spec: RunSpec, structural: tuple[int, int, int] | None = None) -> tuple[Trace, Outcome]:
    """Execute one scenario; deterministic given ``spec`` (and adversary seed).

    ``structural`` optionally supplies ``(n, d, k)`` for the budget check when
    ``spec.enforce_budget`` is set.
    """
    fp = spec.footprint
    if spec.agent_count < 1:
        raise ValueError("agent_count must be >= 1")
    if not 0 <= spec.home < fp.n:
        raise ValueError("home out of range")
    if spec.enforce_budget:
        from .graph import cyclomatic_number, diameter

        n, d, k = structural or (fp.n, diameter(fp), cyclomatic_number(fp))
        need = spec.strategy.required_agents(n, d, k)
        if spec.agent_count < need:
            raise InsufficientAgents(f"{spec.strategy.name} needs {need} agents, got {spec.agent_count}")

    max_rounds = spec.max_rounds or default_max_rounds(fp.n, spec.model)
    window = spec.stall_window or default_stall_window(fp.n, spec.model)
    oracle = spec.strategy.default_node_oracle if spec.node_oracle is None else spec.node_oracle
    salt = str(spec.seed or 0)
    shuffler = random.Random(spec.seed or 0) if spec.shuffle_exchange else None
    strategy = spec.strategy

    agents = [Agent(i, spec.home, strategy.initial_memory(i)) for i in range(1, spec.agent_count + 1)]
    state = ContaminationState.all_contaminated(fp)
    state = apply_agent_actions(state, fp, 0, (), [spec.home])
    config = Configuration(0, frozenset(range(fp.m)), agents, state, AbsenceLedger(fp.m))

    trace = Trace()
    header = {
        "type": "header",
        "format": "dyndecon-trace/1",
        "version": __version__,
        "scenario_hash": scenario_hash(spec.meta),
        "seed": spec.seed,
        "scenario": spec.meta,
        "strategy": strategy.name,
        "model": str(spec.model),
        "home": spec.home,
        "agents": [a.id for a in agents],
        "n": fp.n,
        "edges": [[e.u, e.v, e.pu, e.pv] for e in fp.edges],
    }
    trace.records.append(header)
    trace.records.append(_round_record(0, frozenset(range(fp.m)), fp, [(a.id, a.position, a.position, None) for a in agents], state, None))

    all_nodes = (1 << fp.n) - 1
    nodes_clean_round = 0 if state.node_dirty == 0 else None
    success_round = 0 if state.all_clean() else None
    quiet = 0
    prev_present = None
    outcome = None

    if success_round is not None and spec.halt_on_completion:
        outcome = Outcome(OutcomeKind.FULL_SUCCESS, 0, {})

    t = 0
    while outcome is None and t < max_rounds:
        t += 1
        present = frozenset(spec.adversary.step(config))
        violation = validate_decision(fp, spec.model, config.ledger, present)
        if violation is not None:
            outcome = Outcome(OutcomeKind.MODEL_VIOLATION, t, {"violation": violation.kind.value, "edge": violation.edge})
            trace.records.append(_round_record(t, present, fp, [], config.contamination, None))
            break
        config.ledger.update(present)
        config.present = present
        config.round = t
        pmask = to_mask(present)

        by_node: dict[int, list[Agent]] = {}
        for a in agents:
            by_node.setdefault(a.position, []).append(a)

        decisions: list[tuple[Agent, Action, Any]] = []
        for node in sorted(by_node):
            group = sorted(by_node[node], key=lambda a: a.id)
            order = list(group)
            if shuffler is not None:
                shuffler.shuffle(order)
            merged = strategy.exchange([a.memory for a in order])
            for a, m in zip(order, merged):
                a.memory = m
            if shuffler is None:
                order = group
            view = local_view(
                config, node, fp,
                arrivals=config.arrivals.get(node, {}),
                node_oracle=oracle, strict_visibility=spec.strict_visibility, salt=salt, order=order,
            )
            for a in group:
                action, mem = strategy.decide(view, a.id)
                if isinstance(action, Move):
                    if not 0 <= action.port < fp.degree(node):
                        raise StrategyError(f"agent {a.id}: port {action.port} does not exist at its node")
                    e = fp.adj[node][action.port][1]
                    if e not in present:
                        raise StrategyError(f"agent {a.id}: port {action.port} is absent in round {t}")
                decisions.append((a, action, mem))

        moved = False
        traversals = []
        arrivals: dict[int, dict[int, int]] = {}
        moves = []
        for a, action, mem in decisions:
            src = a.position
            a.memory = mem
            if isinstance(action, Move):
                w, _e, q = fp.adj[src][action.port]
                traversals.append(_e)
                a.position = w
                arrivals.setdefault(w, {})[a.id] = q
                moved = True
                moves.append((a.id, src, w, action.port))
            else:
                moves.append((a.id, src, src, None))
        config.arrivals = arrivals
        moves.sort()

        before = config.contamination
        state = apply_agent_actions(before, fp, pmask, traversals, (a.position for a in agents))
        guarded = to_mask(a.position for a in agents)
        state, report = spread(state, fp, pmask, guarded, t)
        config.contamination = state
        trace.records.append(_round_record(t, present, fp, moves, state, report))

        if report:
            outcome = Outcome(OutcomeKind.MONOTONICITY_VIOLATION, t, {
                "nodes": list(report.recontaminated_nodes), "edges": list(report.recontaminated_edges)})
            break
        if nodes_clean_round is None and state.node_dirty == 0:
            nodes_clean_round = t
        if success_round is None and state.all_clean():
            success_round = t
            if spec.halt_on_completion:
                outcome = Outcome(OutcomeKind.FULL_SUCCESS, t, {})
                break

        if not moved and state == before and present == prev_present and spec.adversary.quiescent():
            quiet += 1
        else:
            quiet = 0
        prev_present = present
        if quiet >= window and spec.halt_on_completion:
            kind = OutcomeKind.NODE_SUCCESS if state.node_dirty == 0 else OutcomeKind.STALL
            outcome = Outcome(kind, t, {"stalled_for": quiet})

    if outcome is None:
        st = config.contamination
        if success_round is not None:
            outcome = Outcome(OutcomeKind.FULL_SUCCESS, success_round, {})
        elif st.node_dirty == 0:
            outcome = Outcome(OutcomeKind.NODE_SUCCESS, t, {"round_limit": True})
        else:
            outcome = Outcome(OutcomeKind.ROUND_LIMIT, t, {})
    st = config.contamination
    outcome.detail.update({
        "nodes_clean_round": nodes_clean_round,
        "clean_nodes": fp.n - len(bits(st.node_dirty & all_nodes)),
        "clean_edges": fp.m - len(bits(st.edge_dirty)),
        "agents": spec.agent_count,
    })
    trace.records.append({"type": "outcome", "kind": outcome.kind.value, "round": outcome.round, "detail": outcome.detail})
    return trace, outcome


def _round_record(t, present, fp, moves, state, report: ViolationReport | None) -> dict:
    return {
        "type": "round",
        "round": t,
        "absent": sorted(set(range(fp.m)) - set(present)),
        "agents": [list(m) for m in moves],
        "node_dirty": _bitstring(state.node_dirty, fp.n),
        "edge_dirty": _bitstring(state.edge_dirty, fp.m),
        "violations": {
            "nodes": list(report.recontaminated_nodes) if report else [],
            "edges": list(report.recontaminated_edges) if report else [],
        },
    }
