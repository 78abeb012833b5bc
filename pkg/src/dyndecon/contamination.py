"""Clean/contaminated bookkeeping and the recontamination rule.

Statuses are held as integer bitmasks (bit ``v`` for node ``v``, bit ``i``
for edge index ``i``); a set bit means contaminated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph import Footprint


class EdgeAbsent(RuntimeError):
    """An agent traversal used an edge the adversary removed this round."""


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def to_mask(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class ContaminationState:
    node_dirty: int
    edge_dirty: int

    @classmethod
    def all_contaminated(cls, fp: Footprint) -> "ContaminationState":
        return cls((1 << fp.n) - 1, (1 << fp.m) - 1)

    def node_clean(self, v: int) -> bool:
        return not (self.node_dirty >> v) & 1

    def edge_clean(self, i: int) -> bool:
        return not (self.edge_dirty >> i) & 1

    def all_clean(self) -> bool:
        return self.node_dirty == 0 and self.edge_dirty == 0


@dataclass(frozen=True)
class ViolationReport:
    round: int
    recontaminated_nodes: tuple[int, ...] = ()
    recontaminated_edges: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.recontaminated_nodes or self.recontaminated_edges)


def apply_agent_actions(
    state: ContaminationState,
    fp: Footprint,
    present_edges: int,
    traversals: Iterable[int],
    occupied: Iterable[int],
) -> ContaminationState:
    """Clean every traversed edge (by index) and every occupied node."""
    edge_dirty = state.edge_dirty
    for e in traversals:
        if not (present_edges >> e) & 1:
            raise EdgeAbsent(f"traversal over absent edge {e}")
        edge_dirty &= ~(1 << e)
    node_dirty = state.node_dirty
    for v in occupied:
        node_dirty &= ~(1 << v)
    return ContaminationState(node_dirty, edge_dirty)


def spread(
    state: ContaminationState,
    fp: Footprint,
    present_edges: int,
    guarded_nodes: int,
    round: int = 0,
) -> tuple[ContaminationState, ViolationReport]:
    """Least fixpoint of recontamination through present edges.

    A clean unguarded node turns contaminated when a present incident edge or
    a present neighbour is contaminated.  A clean present edge turns
    contaminated when either endpoint is contaminated; guards do not shield
    edges.  Absent edges neither carry nor receive contamination.
    """
    nd, ed = state.node_dirty, state.edge_dirty
    live = [(i, e.u, e.v) for i, e in enumerate(fp.edges) if (present_edges >> i) & 1]
    changed = True
    while changed:
        changed = False
        for i, u, v in live:
            ebit = 1 << i
            ub, vb = 1 << u, 1 << v
            if ed & ebit or nd & vb:
                if not (nd & ub) and not (guarded_nodes & ub):
                    nd |= ub
                    changed = True
            if ed & ebit or nd & ub:
                if not (nd & vb) and not (guarded_nodes & vb):
                    nd |= vb
                    changed = True
            if not ed & ebit and (nd & (ub | vb)):
                ed |= ebit
                changed = True
    report = ViolationReport(
        round,
        tuple(bits(nd & ~state.node_dirty)),
        tuple(bits(ed & ~state.edge_dirty)),
    )
    return ContaminationState(nd, ed), report


def contamination_degree(state: ContaminationState, fp: Footprint, v: int) -> tuple[int, frozenset[int]]:
    """Contaminated ports at ``v``, absent edges included."""
    ports = frozenset(p for p, (_, e, _) in enumerate(fp.adj[v]) if (state.edge_dirty >> e) & 1)
    return len(ports), ports


def separator_set(state: ContaminationState, fp: Footprint) -> frozenset[int]:
    out = set()
    for e in bits(state.edge_dirty):
        out.add(fp.edges[e].u)
        out.add(fp.edges[e].v)
    return frozenset(out)


def is_fully_decontaminated(state: ContaminationState, fp: Footprint, v: int) -> bool:
    return state.node_clean(v) and all(state.edge_clean(e) for e in fp.incident(v))
