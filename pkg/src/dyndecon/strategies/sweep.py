"""Guarded depth-first sweeps: Modified-Decontamination and Infinite-Decontamination.

One mobile group of explorers walks a DFS over contaminated ports.  Whoever
is left behind at a node stays there until the group comes back:

* a separator guard when the node still has contaminated ports;
* (infinite only) one watcher per absent contaminated port, which crosses
  its edge when it reappears as long as the node stays covered.

Safety rule shared by every plan: an agent leaves a node only if, after
this round's moves, either the node has no contaminated incident edge left
(absent ones included) or another agent remains there.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Union

from .base import STAY, Action, Move, Strategy

log = logging.getLogger(__name__)

EXPLORER, GUARD, WATCHER, IDLE = "explorer", "guard", "watcher", "idle"


class _Signal(str):
    pass


BACKTRACK = _Signal("backtrack")
EXHAUSTED = _Signal("exhausted")


@dataclass(frozen=True)
class SweepMemory:
    id: int
    role: str = EXPLORER
    bound: int | None = None
    # DFS walk from Home: (node handle, port here leading back to the previous entry)
    stack: tuple = ((None, None),)
    # last move, finalized on arrival: (kind, from handle, port)
    last: tuple | None = None
    route: tuple = ()  # remaining ports of a detour around an absent back edge
    route_depth: int | None = None  # stack depth to restore on arrival; None restarts the walk
    known: frozenset = field(default=frozenset(), repr=False)  # (h, p, h2, q)
    # latest sighting per node: (h, round, contaminated ports, watched ports)
    seen: frozenset = field(default=frozenset(), repr=False)
    degrees: frozenset = field(default=frozenset(), repr=False)  # (h, degree) of visited nodes


def _latest(sightings) -> dict:
    best: dict = {}
    for h, t, dirty, watched in sightings:
        if h not in best or best[h][0] < t:
            best[h] = (t, dirty, watched)
    return best


def dfs_next(mem: SweepMemory, view) -> Union[int, _Signal]:
    """Lowest contaminated port, else BACKTRACK, else EXHAUSTED at the bottom."""
    dirty = view.contaminated_ports
    if dirty:
        return min(dirty)
    return BACKTRACK if len(mem.stack) > 1 else EXHAUSTED


class SweepStrategy(Strategy):
    default_node_oracle = True
    watch_missing = False

    def __init__(self):
        self._cache: tuple | None = None

    def initial_memory(self, agent_id: int) -> SweepMemory:
        return SweepMemory(agent_id)

    def exchange(self, memories: list) -> list:
        if len(memories) < 2:
            return memories
        known = frozenset().union(*(m.known for m in memories))
        pooled = frozenset().union(*(m.seen for m in memories))
        degrees = frozenset().union(*(m.degrees for m in memories))
        if all(m.known == known and m.seen == pooled and m.degrees == degrees for m in memories):
            return memories
        latest = _latest(pooled)
        seen = frozenset((h, t, d, w) for h, (t, d, w) in latest.items())
        return [replace(m, known=known, seen=seen, degrees=degrees) for m in memories]

    def decide(self, view, agent_id: int) -> tuple[Action, SweepMemory]:
        if self._cache is None or self._cache[0] is not view:
            self._cache = (view, self._plan(view))
        return self._cache[1][agent_id]

    # -- planning ---------------------------------------------------------

    def _arrive(self, view, m: SweepMemory) -> SweepMemory:
        h = view.node_handle
        stack = m.stack
        if stack[0][0] is None and len(stack) == 1:
            stack = ((h, None),)
        if m.last is None:
            return m if stack is m.stack else replace(m, stack=stack)
        kind, src, port = m.last
        q = view.arrivals.get(m.id)
        known = m.known
        if q is not None and h is not None and src is not None:
            known = known | {(src, port, h, q), (h, q, src, port)}
        route, depth = m.route, m.route_depth
        if kind == "fwd":
            stack = stack + ((h, q),)
        elif kind == "route" and not route:
            stack = stack[:depth] if depth is not None else ((h, None),)
            depth = None
        return replace(m, stack=stack, last=None, known=known, route=route, route_depth=depth)

    def _plan(self, view) -> dict[int, tuple[Action, SweepMemory]]:
        h = view.node_handle
        mems = {i: self._arrive(view, m) for i, m in view.agents}
        ids = sorted(mems)
        ports = view.ports
        dirty = set(view.contaminated_ports)
        present = {p.port for p in ports if p.present}
        out: dict[int, tuple[Action, SweepMemory]] = {}

        explorers = [i for i in ids if mems[i].role == EXPLORER]
        watchers = sorted((i for i in ids if mems[i].role == WATCHER), key=lambda i: (mems[i].bound, i))
        others = [i for i in ids if mems[i].role in (GUARD, IDLE)]

        crossers = []
        for i in watchers:
            p = mems[i].bound
            if p not in dirty:
                # edge cleaned from the other side: rejoin the exploration
                mems[i] = replace(mems[i], role=EXPLORER, bound=None)
                explorers.append(i)
            elif p in present:
                crossers.append(i)
            else:
                out[i] = (STAY, mems[i])
        explorers.sort()
        others.sort()
        cross_ports = {mems[i].bound for i in crossers}

        travellers = [i for i in explorers if mems[i].route]
        explorers = [i for i in explorers if not mems[i].route]
        if travellers:
            # a detour in progress only passes through this node
            act, tmpl = self._follow_route(view, mems[travellers[0]])
            for i in travellers:
                out[i] = (act, replace(tmpl, id=i))
        if explorers:
            lead = mems[explorers[0]]
            pool = sorted(explorers + others)
            self._group_plan(view, lead, pool, dirty - cross_ports, present, mems, out)
        else:
            for i in others:
                out[i] = (STAY, replace(mems[i], role=mems[i].role if mems[i].role == GUARD else IDLE, bound=None))

        for i in crossers:
            m = mems[i]
            # the crosser explores onward from the far end
            out[i] = (Move(m.bound), replace(m, role=EXPLORER, bound=None, route=(), route_depth=None,
                                             last=("fwd", h, m.bound)))

        # safety: never leave a node with contamination behind unattended
        while True:
            stayers = [i for i, (a, _) in out.items() if not isinstance(a, Move)]
            leaving = {a.port for a, _ in out.values() if isinstance(a, Move)}
            if stayers or not (dirty - leaving):
                break
            movers = [i for i in crossers if isinstance(out[i][0], Move)]
            if not movers:
                log.warning("no agent can stay at a contaminated node; holding the lowest id")
                i = min(out)
                out[i] = (STAY, replace(mems[i], role=GUARD, last=None, route=(), route_depth=None))
                break
            i = movers[-1]
            out[i] = (STAY, mems[i])
        if h is not None and self.watch_missing:
            watched = frozenset(m.bound for a, m in out.values() if m.role == WATCHER and not isinstance(a, Move))
            left = frozenset(dirty - {a.port for a, _ in out.values() if isinstance(a, Move)})
            mark = (h, view.round, left, watched)
            deg = (h, view.degree)
            out = {i: (a, replace(m, seen=frozenset(x for x in m.seen if x[0] != h) | {mark}, degrees=m.degrees | {deg}))
                   for i, (a, m) in out.items()}
        return out

    def _group_plan(self, view, lead, pool, dirty, present, mems, out):
        h = view.node_handle
        stack = lead.stack
        base = replace(lead, role=EXPLORER, bound=None)

        def go(port, kind="fwd", new_stack=None):
            tmpl = replace(base, stack=stack if new_stack is None else new_stack, last=(kind, h, port))
            for i in pool:
                out[i] = (Move(port), replace(tmpl, id=i))

        def wait():
            for i in pool:
                out[i] = (STAY, replace(base, id=i))

        def keep(i, role, bound=None):
            out[i] = (STAY, replace(base, id=i, role=role, bound=bound))

        if self.watch_missing:
            bound_here = {mems[i].bound for i in mems if mems[i].role == WATCHER}
            missing = sorted(p for p in dirty if p not in present and p not in bound_here)
            for p in missing:
                if not pool:
                    break
                keep(pool.pop(0), WATCHER, p)
            visible = sorted(p for p in dirty if p in present)
            if not pool:
                return
            if len(visible) > 1:
                keep(pool.pop(0), GUARD)
                if pool:
                    go(visible[0])
            elif len(visible) == 1:
                go(visible[0])
            else:
                self._retreat(view, base, pool, present, out)
            return

        target = min(dirty) if dirty else None
        if target is None:
            self._retreat(view, base, pool, present, out)
        elif len(dirty) > 1:
            keep(pool.pop(0), GUARD)
            if pool:
                if target in present:
                    go(target)
                else:
                    wait()
        elif target in present:
            go(target)
        else:
            wait()

    def _retreat(self, view, base, pool, present, out):
        h = view.node_handle
        stack = base.stack
        if len(stack) <= 1:
            route = (self._seek(view, base) or self._explore(view, base)) if self.watch_missing else None
            if route:
                first, rest = route
                tmpl = replace(base, route=rest, route_depth=None, last=("route", h, first))
                for i in pool:
                    out[i] = (Move(first), replace(tmpl, id=i))
                return
            for i in pool:
                out[i] = (STAY, replace(base, id=i))
            return
        back = stack[-1][1]
        if back in present:
            tmpl = replace(base, stack=stack[:-1], last=("back", h, back))
            for i in pool:
                out[i] = (Move(back), replace(tmpl, id=i))
            return
        route = self._reroute(view, base) if self.watch_missing else None
        if route:
            first, rest, depth = route
            tmpl = replace(base, route=rest, route_depth=depth, last=("route", h, first))
            for i in pool:
                out[i] = (Move(first), replace(tmpl, id=i))
            return
        for i in pool:
            out[i] = (STAY, replace(base, id=i))

    def _reroute(self, view, m: SweepMemory):
        """Known-map path to the nearest earlier stack node avoiding absent ports here."""
        h = view.node_handle
        if h is None:
            return None
        absent = view.missing_ports
        targets = {}
        for depth, (sh, _) in enumerate(m.stack[:-1], start=1):
            if sh != h:
                targets[sh] = depth
        path = self._path(m.known, h, set(targets), absent)
        if not path:
            return None
        ports, end = path
        return ports[0], tuple(ports[1:]), targets[end]

    def _seek(self, view, m: SweepMemory):
        """Route to the nearest known node that still shows unwatched contamination."""
        h = view.node_handle
        if h is None:
            return None
        targets = {x for x, (_, dirty, watched) in _latest(m.seen).items() if x != h and dirty - watched}
        if not targets:
            return None
        path = self._path(m.known, h, targets, view.missing_ports)
        if not path or not path[0]:
            return None
        ports, _ = path
        return ports[0], tuple(ports[1:])

    def _explore(self, view, m: SweepMemory):
        """Nothing left in sight: walk to the nearest node with an unmapped port and take it.

        The clean region is connected to every stranded guard, so mapping it
        eventually brings the group face to face with their sightings.
        """
        h = view.node_handle
        if h is None:
            return None
        mapped = {(a, p) for a, p, _, _ in m.known}
        here = [pv.port for pv in view.ports if pv.present and (h, pv.port) not in mapped]
        if here:
            return here[0], ()
        targets = {x for x, deg in m.degrees if x != h and any((x, p) not in mapped for p in range(deg))}
        if not targets:
            return None
        path = self._path(m.known, h, targets, view.missing_ports)
        if not path or not path[0]:
            return None
        ports, _ = path
        return ports[0], tuple(ports[1:])

    @staticmethod
    def _path(known, src, targets, blocked_here):
        adj: dict = {}
        for a, p, b, _ in known:
            adj.setdefault(a, {})[p] = b
        prev = {src: None}
        queue = deque([src])
        while queue:
            x = queue.popleft()
            if x in targets:
                end, ports = x, []
                while prev[x] is not None:
                    x, pp = prev[x]
                    ports.append(pp)
                return ports[::-1], end
            for p in sorted(adj.get(x, {})):
                if x == src and p in blocked_here:
                    continue
                y = adj[x][p]
                if y not in prev:
                    prev[y] = (x, p)
                    queue.append(y)
        return None

    def _follow_route(self, view, m: SweepMemory):
        h = view.node_handle
        present = {p.port for p in view.ports if p.present}
        port = m.route[0]
        if port in present:
            return Move(port), replace(m, route=m.route[1:], last=("route", h, port))
        # recompute around the new gap
        if m.route_depth is not None:
            goal = {m.stack[m.route_depth - 1][0]}
        else:
            goal = {x for x, (_, d, w) in _latest(m.seen).items() if x != h and d - w}
        path = self._path(m.known, h, goal, view.missing_ports)
        if path and path[0]:
            ports, _ = path
            return Move(ports[0]), replace(m, route=tuple(ports[1:]), last=("route", h, ports[0]))
        if m.route_depth is None:
            # give up the detour and plan afresh from here next round
            return STAY, replace(m, route=(), stack=((h, None),))
        return STAY, m


class ModifiedDecontamination(SweepStrategy):
    """DFS with one separator guard per node holding two or more contaminated edges."""

    name = "modified"

    def required_agents(self, n: int, d: int, k: int) -> int:
        # trees (k = 0) are sized at d + 1; pass an explicit count to try d
        return d + max(k, 1)


class InfiniteDecontamination(SweepStrategy):
    """Modified sweep plus watchers on absent contaminated edges."""

    name = "infinite"
    watch_missing = True

    def required_agents(self, n: int, d: int, k: int) -> int:
        return max(1, d + 2 * k)
