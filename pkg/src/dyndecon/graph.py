"""Static footprint graphs with port labels.

A footprint is the undirected simple graph that contains every edge the
adversary may ever show.  Nodes carry integer ids for bookkeeping; agents
never see them (see ``engine.LocalView``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class FootprintError(ValueError):
    pass


class DuplicateEdge(FootprintError):
    pass


class PortClash(FootprintError):
    pass


class Disconnected(FootprintError):
    pass


class SelfLoop(FootprintError):
    pass


@dataclass(frozen=True)
class Edge:
    """Undirected edge stored with ``u < v`` and the port used at each end."""

    u: int
    v: int
    pu: int
    pv: int

    def other(self, node: int) -> int:
        return self.v if node == self.u else self.u

    def port_at(self, node: int) -> int:
        return self.pu if node == self.u else self.pv


@dataclass(frozen=True)
class Footprint:
    n: int
    edges: tuple[Edge, ...]
    # adj[v][p] = (neighbor, edge index, port at neighbor)
    adj: tuple[tuple[tuple[int, int, int], ...], ...] = field(repr=False)
    _index: dict = field(repr=False, compare=False, hash=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def edge_index(self, u: int, v: int) -> int:
        return self._index[(min(u, v), max(u, v))]

    def follow(self, v: int, port: int) -> tuple[int, int]:
        """Return ``(neighbor, port at neighbor)`` reached through ``port``."""
        w, _, q = self.adj[v][port]
        return w, q

    def incident(self, v: int) -> list[int]:
        """Edge indices at ``v`` ordered by port."""
        return [e for _, e, _ in self.adj[v]]

    def neighbors(self, v: int) -> list[int]:
        return [w for w, _, _ in self.adj[v]]


def build_footprint(edge_list: Iterable[Sequence[int]], n: int | None = None) -> Footprint:
    """Validate ``(u, v, port_at_u, port_at_v)`` tuples into a Footprint.

    ``n`` defaults to one more than the largest endpoint; pass it explicitly
    for the single-node graph.
    """
    raw = [tuple(int(x) for x in e) for e in edge_list]
    if n is None:
        n = 1 + max((max(e[0], e[1]) for e in raw), default=0)
    if n < 1:
        raise FootprintError("footprint needs at least one node")

    by_pair: dict[tuple[int, int], Edge] = {}
    ports: list[dict[int, int]] = [dict() for _ in range(n)]
    for item in raw:
        if len(item) != 4:
            raise FootprintError(f"edge needs (u, v, pu, pv), got {item}")
        u, v, pu, pv = item
        if not (0 <= u < n and 0 <= v < n):
            raise FootprintError(f"endpoint out of range in {item}")
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        if u > v:
            u, v, pu, pv = v, u, pv, pu
        if (u, v) in by_pair:
            raise DuplicateEdge(f"edge ({u}, {v}) listed twice")
        for node, port in ((u, pu), (v, pv)):
            if port in ports[node]:
                raise PortClash(f"port {port} used twice at node {node}")
            ports[node][port] = -1
        by_pair[(u, v)] = Edge(u, v, pu, pv)

    edges = tuple(by_pair[k] for k in sorted(by_pair))
    index = {(e.u, e.v): i for i, e in enumerate(edges)}
    slots: list[dict[int, tuple[int, int, int]]] = [dict() for _ in range(n)]
    for i, e in enumerate(edges):
        slots[e.u][e.pu] = (e.v, i, e.pv)
        slots[e.v][e.pv] = (e.u, i, e.pu)
    adj = []
    for v in range(n):
        if sorted(slots[v]) != list(range(len(slots[v]))):
            raise PortClash(f"ports at node {v} are not 0..{len(slots[v]) - 1}: {sorted(slots[v])}")
        adj.append(tuple(slots[v][p] for p in range(len(slots[v]))))

    fp = Footprint(n=n, edges=edges, adj=tuple(adj), _index=index)
    if not is_connected(fp, range(fp.m)):
        raise Disconnected("footprint is not connected")
    return fp


def from_adjacency(n: int, pairs: Iterable[tuple[int, int]]) -> Footprint:
    """Footprint with ports assigned in ascending neighbor order."""
    nbrs: list[list[int]] = [[] for _ in range(n)]
    seen = set()
    for u, v in pairs:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed twice")
        seen.add(key)
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        nbrs[u].append(v)
        nbrs[v].append(u)
    for lst in nbrs:
        lst.sort()
    port = [{w: i for i, w in enumerate(lst)} for lst in nbrs]
    return build_footprint(((u, v, port[u][v], port[v][u]) for u, v in sorted(seen)), n=n)


def is_connected(fp: Footprint, active_edges: Iterable[int]) -> bool:
    """True iff ``(V, active_edges)`` is connected; edges given by index."""
    parent = list(range(fp.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = fp.n
    for i in active_edges:
        e = fp.edges[i]
        a, b = find(e.u), find(e.v)
        if a != b:
            parent[a] = b
            comps -= 1
    return comps == 1


def cyclomatic_number(fp: Footprint) -> int:
    return fp.m - fp.n + 1


def bfs_distances(fp: Footprint, src: int) -> list[int]:
    dist = [-1] * fp.n
    dist[src] = 0
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w, _, _ in fp.adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def eccentricity(fp: Footprint, v: int) -> int:
    return max(bfs_distances(fp, v))


def diameter(fp: Footprint) -> int:
    return max(eccentricity(fp, v) for v in range(fp.n))


@dataclass(frozen=True)
class SpanningDecomposition:
    root: int
    tree_edges: frozenset[int]
    feedback_edges: frozenset[int]


def spanning_decomposition(fp: Footprint, root: int = 0) -> SpanningDecomposition:
    """BFS tree from ``root``; frontier nodes scan their ports in ascending order."""
    if not 0 <= root < fp.n:
        raise ValueError(f"root {root} out of range")
    seen = [False] * fp.n
    seen[root] = True
    tree = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w, e, _ in fp.adj[v]:
            if not seen[w]:
                seen[w] = True
                tree.add(e)
                queue.append(w)
    tree_edges = frozenset(tree)
    return SpanningDecomposition(root, tree_edges, frozenset(range(fp.m)) - tree_edges)


def dumps(fp: Footprint) -> str:
    lines = [f"n {fp.n}"]
    lines += [f"{e.u} {e.v} {e.pu} {e.pv}" for e in fp.edges]
    return "\n".join(lines) + "\n"


def loads(text: str) -> Footprint:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0][0] != "n" or len(lines[0]) != 2:
        raise FootprintError("footprint text must start with 'n <count>'")
    n = int(lines[0][1])
    edges = []
    for parts in lines[1:]:
        if len(parts) != 4:
            raise FootprintError(f"bad edge line: {' '.join(parts)}")
        edges.append(tuple(int(x) for x in parts))
    return build_footprint(edges, n=n)
