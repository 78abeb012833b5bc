"""Edge dynamics: dynamicity models, legality checks and built-in adversaries.

Every adversary exposes ``step(observation) -> frozenset`` of present edge
indices for the coming round.  ``observation`` is the engine configuration
at the end of the previous round (full observability: positions and
memories).  ``quiescent`` tells the stall detector whether the adversary
would keep repeating itself while the agents stand still.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .graph import Footprint, from_adjacency, is_connected


class ModelKind(str, Enum):
    FTEA = "FTEA"
    IDED = "IDED"


@dataclass(frozen=True)
class DynamicityModel:
    kind: ModelKind
    T: int | None = None

    def __post_init__(self):
        if self.kind is ModelKind.FTEA and (self.T is None or self.T < 1):
            raise ValueError("FTEA needs a reappearance bound T >= 1")

    @classmethod
    def ftea(cls, T: int) -> "DynamicityModel":
        return cls(ModelKind.FTEA, T)

    @classmethod
    def ided(cls) -> "DynamicityModel":
        return cls(ModelKind.IDED, None)

    @property
    def bound(self) -> int:
        """T for FTEA, 1 otherwise (used in round budgets)."""
        return self.T if self.kind is ModelKind.FTEA else 1

    def __str__(self) -> str:
        return f"FTEA:{self.T}" if self.kind is ModelKind.FTEA else "IDED"

    @classmethod
    def parse(cls, text: str) -> "DynamicityModel":
        text = text.strip().upper()
        if text == "IDED":
            return cls.ided()
        if text.startswith("FTEA"):
            _, _, t = text.partition(":")
            return cls.ftea(int(t or 1))
        raise ValueError(f"unknown model {text!r}")


class AbsenceLedger:
    """Consecutive-absence counts per edge, ending at the previous round."""

    def __init__(self, m: int):
        self.counts = [0] * m

    def update(self, present: frozenset[int]) -> None:
        for i in range(len(self.counts)):
            self.counts[i] = 0 if i in present else self.counts[i] + 1

    def expired(self, T: int) -> set[int]:
        return {i for i, c in enumerate(self.counts) if c >= T}


class ViolationKind(str, Enum):
    DISCONNECTED_ROUND = "DisconnectedRound"
    T_BOUND_EXCEEDED = "TBoundExceeded"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    edge: int | None = None


def validate_decision(
    fp: Footprint, model: DynamicityModel, ledger: AbsenceLedger, present: frozenset[int]
) -> Violation | None:
    """None when the decision is legal, otherwise the first violation found."""
    if model.kind is ModelKind.FTEA:
        for i, c in enumerate(ledger.counts):
            if c >= model.T and i not in present:
                return Violation(ViolationKind.T_BOUND_EXCEEDED, i)
    if not is_connected(fp, present):
        return Violation(ViolationKind.DISCONNECTED_ROUND)
    return None


class Adversary:
    name = "adversary"

    def __init__(self, fp: Footprint):
        self.fp = fp
        self.all_edges = frozenset(range(fp.m))

    def step(self, observation) -> frozenset[int]:
        raise NotImplementedError

    def quiescent(self) -> bool:
        return True

    def params(self) -> dict:
        return {}


class StaticAdversary(Adversary):
    name = "static"

    def step(self, observation) -> frozenset[int]:
        return self.all_edges


class RandomFTEAAdversary(Adversary):
    """Seeded stress adversary that stays inside the FTEA rules.

    Each round every present edge is dropped with probability ``p``; edges
    that have been absent ``T`` rounds are forced back; absent edges are then
    restored in canonical order until the round is connected.  Other absent
    edges stay absent.
    """

    name = "random"

    def __init__(self, fp: Footprint, seed: int, T: int, p: float):
        super().__init__(fp)
        if T < 1 or not 0.0 <= p <= 1.0:
            raise ValueError("need T >= 1 and 0 <= p <= 1")
        self.seed, self.T, self.p = seed, T, p
        self.rng = random.Random(seed)
        self.ledger = AbsenceLedger(fp.m)
        self.present = self.all_edges

    def step(self, observation) -> frozenset[int]:
        nxt = set()
        for i in range(self.fp.m):
            if self.ledger.counts[i] >= self.T:
                nxt.add(i)
            elif i in self.present:
                # draw for every present edge so the stream does not depend on p
                if self.rng.random() >= self.p:
                    nxt.add(i)
        nxt = self._repair(nxt)
        self.present = frozenset(nxt)
        self.ledger.update(self.present)
        return self.present

    def _repair(self, chosen: set[int]) -> set[int]:
        parent = list(range(self.fp.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in chosen:
            e = self.fp.edges[i]
            parent[find(e.u)] = find(e.v)
        for i in range(self.fp.m):
            if i in chosen:
                continue
            e = self.fp.edges[i]
            a, b = find(e.u), find(e.v)
            if a != b:
                parent[a] = b
                chosen.add(i)
        return chosen

    def quiescent(self) -> bool:
        return self.p == 0.0

    def params(self) -> dict:
        return {"seed": self.seed, "T": self.T, "p": self.p}


def random_ftea_adversary(fp: Footprint, seed: int, T: int, removal_probability: float) -> RandomFTEAAdversary:
    return RandomFTEAAdversary(fp, seed, T, removal_probability)


class WheelRimAdversary(Adversary):
    """Hides the rim of a wheel until every rim node holds an agent.

    From the round after that happens the rim is present for good.  Hub is
    node 0, rim nodes are 1..n-1.
    """

    name = "wheel_rim"

    def __init__(self, fp: Footprint, hub: int = 0):
        super().__init__(fp)
        self.hub = hub
        self.spokes = frozenset(i for i, e in enumerate(fp.edges) if hub in (e.u, e.v))
        self.rim_nodes = frozenset(range(fp.n)) - {hub}
        self.released = False

    def step(self, observation) -> frozenset[int]:
        if not self.released and observation is not None:
            occupied = {a.position for a in observation.agents}
            if self.rim_nodes <= occupied:
                self.released = True
        return self.all_edges if self.released else self.spokes


class HideEdgeAdversary(Adversary):
    """Keeps one chosen edge absent forever (IDED only)."""

    name = "hide_edge"

    def __init__(self, fp: Footprint, edge: int):
        super().__init__(fp)
        self.edge = edge
        self.present = self.all_edges - {edge}
        if not is_connected(fp, self.present):
            raise ValueError(f"hiding edge {edge} disconnects the footprint")

    def step(self, observation) -> frozenset[int]:
        return self.present

    def params(self) -> dict:
        return {"edge": self.edge}


class ScheduleAdversary(Adversary):
    """Oblivious schedule: line ``t`` lists the absent edge indices of round ``t``.

    Rounds past the end of the schedule show every edge.
    """

    name = "schedule"

    def __init__(self, fp: Footprint, absent_by_round: list[frozenset[int]], model: DynamicityModel | None = None):
        super().__init__(fp)
        self.rounds = [self.all_edges - a for a in absent_by_round]
        self.t = 0
        ledger = AbsenceLedger(fp.m)
        for r, present in enumerate(self.rounds, start=1):
            bad = [i for i in self.all_edges - present if not 0 <= i < fp.m]
            if bad:
                raise ValueError(f"round {r}: edge index out of range {bad}")
            if model is not None:
                v = validate_decision(fp, model, ledger, present)
                if v is not None:
                    raise ValueError(f"round {r}: schedule illegal ({v.kind.value}, edge={v.edge})")
            elif not is_connected(fp, present):
                raise ValueError(f"round {r}: schedule disconnects the graph")
            ledger.update(present)

    @classmethod
    def load(cls, fp: Footprint, path: str | Path, model: DynamicityModel | None = None) -> "ScheduleAdversary":
        rows = []
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0]
            rows.append(frozenset(int(x) for x in line.split()))
        for i in rows:
            for e in i:
                if not 0 <= e < fp.m:
                    raise ValueError(f"edge index {e} out of range")
        return cls(fp, rows, model)

    def step(self, observation) -> frozenset[int]:
        self.t += 1
        if self.t <= len(self.rounds):
            return self.rounds[self.t - 1]
        return self.all_edges

    def quiescent(self) -> bool:
        return self.t >= len(self.rounds)


class BadScenario(ValueError):
    pass


@dataclass
class LowerBoundScenario:
    footprint: Footprint
    adversary: Adversary
    model: DynamicityModel
    home: int = 0
    meta: dict = field(default_factory=dict)


def complete_bipartite(half: int) -> Footprint:
    pairs = [(a, half + b) for a in range(half) for b in range(half)]
    return from_adjacency(2 * half, pairs)


def wheel(n: int) -> Footprint:
    rim = list(range(1, n))
    pairs = [(0, v) for v in rim]
    pairs += [(rim[i], rim[(i + 1) % len(rim)]) for i in range(len(rim))]
    return from_adjacency(n, pairs)


def complete_binary_tree(depth: int) -> Footprint:
    n = 2 ** (depth + 1) - 1
    return from_adjacency(n, [((v - 1) // 2, v) for v in range(1, n)])


def bipartite_scenario(n: int, T: int = 1) -> LowerBoundScenario:
    """K_{n/2,n/2}, Home on the first side, no edge ever removed."""
    if n % 2 or n <= 4:
        raise BadScenario(f"BadN: need even n > 4, got {n}")
    fp = complete_bipartite(n // 2)
    return LowerBoundScenario(fp, StaticAdversary(fp), DynamicityModel.ftea(T), home=0, meta={"family": "complete_bipartite", "n": n})


def wheel_scenario(n: int) -> LowerBoundScenario:
    """Wheel on n vertices, Home at the hub, rim hidden until fully occupied."""
    if n <= 4:
        raise BadScenario(f"BadN: need n > 4, got {n}")
    fp = wheel(n)
    return LowerBoundScenario(fp, WheelRimAdversary(fp), DynamicityModel.ided(), home=0, meta={"family": "wheel", "n": n})


def diameter_tree_scenario(depth: int, T: int = 1) -> LowerBoundScenario:
    if depth < 1:
        raise BadScenario(f"BadDepth: need depth >= 1, got {depth}")
    fp = complete_binary_tree(depth)
    return LowerBoundScenario(fp, StaticAdversary(fp), DynamicityModel.ftea(T), home=0, meta={"family": "tree", "depth": depth})
