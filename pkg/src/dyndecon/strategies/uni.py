"""Uni-Decontamination: one agent per node, then a single cleaner walk.

Phase one disperses a group over the graph with a breadth-first expansion.
Each newly reached node gets a settler that never leaves and carries an
integer label; the group keeps a port map between labels, so nodes stay
recognisable without any identifiers from the environment.  Home keeps
label 0 and is guarded by the lowest id until the cleaner phase starts.

Phase two: as soon as every port at Home is clean, the Home settler turns
into the cleaner and performs a depth-first walk that traverses every edge,
using settler labels to recognise visited nodes.  When it reaches a node
with no settler through a contaminated edge it settles there instead.
Spare group members left over once the expansion is finished also turn
into cleaners.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

from .base import SETTLE, STAY, Action, Move, Strategy

GROUP, SETTLED, CLEANER, IDLE = "group", "settled", "cleaner", "idle"


@dataclass(frozen=True)
class UniMemory:
    id: int
    role: str = GROUP
    label: int | None = None
    links: frozenset = field(default=frozenset(), repr=False)  # (L, p, L2, q)
    # group expansion
    mode: str = "start"  # start | expand | probe | return | travel | done
    here: int | None = None
    queue: tuple = ()
    probe: int | None = None
    route: tuple = ()  # ((port, label), ...)
    next_label: int = 1
    queued: frozenset = frozenset()
    # cleaner walk
    stack: tuple = ()  # ((label, back_port), ...)
    visited: frozenset = frozenset()
    clean_seen: frozenset = frozenset()  # (label, port) known clean
    last: tuple | None = None  # (label, port, crossed_dirty)


def _adjacency(links: frozenset) -> dict:
    adj: dict = {}
    for a, p, b, _ in links:
        adj.setdefault(a, {})[p] = b
    return adj


def _route(links: frozenset, src: int, dst: int) -> tuple | None:
    adj = _adjacency(links)
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            hops = []
            while prev[x] is not None:
                px, p = prev[x]
                hops.append((p, x))
                x = px
            return tuple(reversed(hops))
        for p in sorted(adj.get(x, {})):
            y = adj[x][p]
            if y not in prev:
                prev[y] = (x, p)
                queue.append(y)
    return None


class UniDecontamination(Strategy):
    name = "uni"

    def __init__(self):
        self._cache: tuple | None = None

    def initial_memory(self, agent_id: int) -> UniMemory:
        return UniMemory(agent_id)

    def exchange(self, memories: list) -> list:
        if len(memories) < 2:
            return memories
        links = frozenset().union(*(m.links for m in memories))
        return [replace(m, links=links) for m in memories]

    def required_agents(self, n: int, d: int, k: int) -> int:
        return n

    def decide(self, view, agent_id: int) -> tuple[Action, UniMemory]:
        if self._cache is None or self._cache[0] is not view:
            self._cache = (view, self._plan(view))
        return self._cache[1][agent_id]

    # -- node plan --------------------------------------------------------

    def _plan(self, view) -> dict[int, tuple[Action, UniMemory]]:
        mems = dict(view.agents)
        ids = sorted(mems)
        out: dict[int, tuple[Action, UniMemory]] = {}
        present = {p.port for p in view.ports if p.present}

        settlers = [i for i in ids if mems[i].role == SETTLED]
        group = [i for i in ids if mems[i].role == GROUP]
        cleaners = [i for i in ids if mems[i].role == CLEANER]
        label = mems[settlers[0]].label if settlers else None

        # the group settles first so a cleaner arriving together sees the label
        if group:
            label = self._group_step(view, group, mems, label, present, out)

        for i in cleaners:
            out[i] = self._cleaner_step(view, mems[i], label, present)
            if out[i][1].role == SETTLED:
                label = out[i][1].label

        for i in settlers:
            m = mems[i]
            seen = m.clean_seen | {(m.label, p.port) for p in view.ports if p.contaminated is False}
            m = replace(m, clean_seen=seen)
            if m.label == 0 and not cleaners and self._home_clean(view, m) and not group:
                m = replace(m, role=CLEANER, stack=((0, None),), visited=frozenset({0}), last=None)
                out[i] = self._cleaner_step(view, m, 0, present, fresh=True)
            else:
                out[i] = (STAY, m)
        for i in ids:
            if i not in out:
                out[i] = (STAY, mems[i])
        return out

    @staticmethod
    def _home_clean(view, m: UniMemory) -> bool:
        return all(p.contaminated is False or (0, p.port) in m.clean_seen for p in view.ports)

    # -- group expansion --------------------------------------------------

    def _group_step(self, view, group, mems, label, present, out) -> int | None:
        g = mems[group[0]]
        links = g.links
        members = list(group)

        def emit(action, tmpl, who):
            for i in who:
                out[i] = (action, replace(tmpl, id=i))

        arrived = group[0] in view.arrivals
        mode = g.mode
        if mode == "start":
            if label is None:
                first = members.pop(0)
                out[first] = (SETTLE, replace(g, id=first, role=SETTLED, label=0, mode="done"))
                label = 0
            g = replace(g, mode="expand", here=label, queued=frozenset({label}))
        elif mode == "probe" and arrived:
            q = view.arrivals[group[0]]
            src, port = g.here, g.probe
            if label is None:
                label = g.next_label
                first = members.pop(0)
                links = links | {(src, port, label, q), (label, q, src, port)}
                out[first] = (SETTLE, replace(g, id=first, role=SETTLED, label=label, links=links, mode="done"))
                g = replace(g, next_label=label + 1)
            links = links | {(src, port, label, q), (label, q, src, port)}
            if label not in g.queued:
                # fresh settler, or one placed by a cleaner: its ports still need mapping
                g = replace(g, queue=g.queue + (label,), queued=g.queued | {label})
            g = replace(g, links=links, mode="return", probe=q)
        elif mode == "return" and arrived:
            g = replace(g, mode="expand")
        elif mode == "travel" and arrived:
            _, lab = g.route[0]
            g = replace(g, here=lab, route=g.route[1:])
            if not g.route:
                g = replace(g, mode="expand")

        if not members:
            return label

        # decide the move for the rest of the group
        if g.mode == "return":
            back = g.probe
            if back in present:
                emit(Move(back), g, members)
            else:
                emit(STAY, g, members)
            return label
        if g.mode == "travel":
            port, _ = g.route[0]
            emit(Move(port) if port in present else STAY, g, members)
            return label
        if g.mode == "expand":
            known = {p for a, p, _, _ in g.links if a == g.here}
            unknown = [p for p in range(view.degree) if p not in known]
            if unknown:
                p = unknown[0]
                if p in present:
                    emit(Move(p), replace(g, mode="probe", probe=p), members)
                else:
                    emit(STAY, g, members)
                return label
            while g.queue and g.queue[0] == g.here:
                g = replace(g, queue=g.queue[1:])
            if g.queue:
                target = g.queue[0]
                route = _route(g.links, g.here, target)
                g = replace(g, queue=g.queue[1:], route=route or (), mode="travel" if route else "expand")
                if route:
                    port, _ = route[0]
                    emit(Move(port) if port in present else STAY, g, members)
                else:
                    emit(STAY, g, members)
                return label
            # expansion finished: spares become cleaners
            first, rest = members[0], members[1:]
            c = replace(g, id=first, role=CLEANER, mode="done", stack=((label, None),),
                        visited=frozenset({label}), last=None)
            out[first] = self._cleaner_step(view, c, label, present, fresh=True)
            for i in rest:
                out[i] = (STAY, replace(g, id=i, role=IDLE, mode="done"))
        return label

    # -- cleaner walk -----------------------------------------------------

    def _cleaner_step(self, view, m: UniMemory, label, present, fresh: bool = False):
        if not fresh and m.last is not None:
            src, port, crossed_dirty = m.last
            q = view.arrivals.get(m.id)
            lab = label
            if lab is None:
                known = _adjacency(m.links).get(src, {})
                if port in known:
                    lab = known[port]
                elif crossed_dirty:
                    lab = -m.id
                    links = m.links | {(src, port, lab, q), (lab, q, src, port)}
                    return SETTLE, replace(m, role=SETTLED, label=lab, links=links, last=None, stack=(), visited=frozenset())
                else:
                    lab = 0  # the only settler-free node reachable over a clean edge
            links = m.links | {(src, port, lab, q), (lab, q, src, port)}
            seen = m.clean_seen | {(src, port), (lab, q)}
            m = replace(m, links=links, clean_seen=seen, last=None)
            if lab in m.visited and (not m.stack or m.stack[-1][0] != lab):
                # already on the walk: bounce straight back
                if q in present:
                    return Move(q), replace(m, last=(lab, q, False), here=lab)
                return STAY, replace(m, here=lab)
            if not m.stack or m.stack[-1][0] != lab:
                m = replace(m, stack=m.stack + ((lab, q),), visited=m.visited | {lab})
            m = replace(m, here=lab)
        elif label is not None:
            m = replace(m, here=label)

        lab = m.here
        if m.stack and m.stack[-1][0] != lab:
            # waiting mid-bounce at a node that is not the walk's top
            back = self._bounce_port(m, lab)
            if back is not None and back in present:
                return Move(back), replace(m, last=(lab, back, False))
            return STAY, m
        adj = _adjacency(m.links).get(lab, {})
        seen = {p for (l, p) in m.clean_seen if l == lab}
        for pv in view.ports:
            p = pv.port
            dirty = pv.contaminated is True or (pv.contaminated is None and p not in seen)
            if dirty or p not in adj or adj[p] not in m.visited:
                if pv.present:
                    return Move(p), replace(m, last=(lab, p, pv.contaminated is not False and p not in seen))
                return STAY, m
        if len(m.stack) <= 1:
            return STAY, replace(m, role=IDLE)
        back = m.stack[-1][1]
        if back in present:
            return Move(back), replace(m, stack=m.stack[:-1], last=(lab, back, False))
        return STAY, m

    @staticmethod
    def _bounce_port(m: UniMemory, lab) -> int | None:
        target = m.stack[-1][0]
        for a, p, b, _ in m.links:
            if a == lab and b == target:
                return p
        return None
