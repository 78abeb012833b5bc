"""Slow, independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools

import networkx as nx


def to_nx(fp) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(fp.n))
    g.add_edges_from((e.u, e.v) for e in fp.edges)
    return g


def closure_oracle(n, edges, present, dirty_nodes, dirty_edges, guarded):
    """Reachability formulation of recontamination.

    A clean unguarded node ends contaminated iff the subgraph of unguarded
    nodes and present edges connects it to a contamination source: a dirty
    node, a dirty present edge, or a present edge to a dirty guarded node.
    A clean present edge ends contaminated iff an endpoint does.
    """
    g = nx.Graph()
    free = [v for v in range(n) if v not in guarded]
    g.add_nodes_from(free)
    for i in present:
        u, v = edges[i]
        if u not in guarded and v not in guarded:
            g.add_edge(u, v)
    seeds = set(v for v in dirty_nodes if v not in guarded)
    for i in present:
        u, v = edges[i]
        if i in dirty_edges or u in dirty_nodes or v in dirty_nodes:
            seeds.update(x for x in (u, v) if x not in guarded)
    nodes = set(dirty_nodes)
    for comp in nx.connected_components(g):
        if comp & seeds:
            nodes |= comp
    links = set(dirty_edges)
    for i in present:
        u, v = edges[i]
        if u in nodes or v in nodes:
            links.add(i)
    return nodes, links


def connected_graph_counts() -> list[int]:
    """Connected unlabelled graphs on 1..8 nodes (known sequence)."""
    return [1, 1, 2, 6, 21, 112, 853, 11117]


def all_pairs_diameter(fp) -> int:
    return nx.diameter(to_nx(fp))


def brute_spanning_forest_ok(fp, tree_edges) -> bool:
    g = nx.Graph()
    g.add_nodes_from(range(fp.n))
    g.add_edges_from((fp.edges[i].u, fp.edges[i].v) for i in tree_edges)
    return nx.is_tree(g)


def subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def closure_components(n, edges, present, dirty_nodes, dirty_edges, guarded):
    """Same reachability formulation as ``closure_oracle`` with a plain
    union-find instead of networkx, for bulk sweeps."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seeds = [v for v in dirty_nodes if v not in guarded]
    for i in present:
        u, v = edges[i]
        if u not in guarded and v not in guarded:
            parent[find(u)] = find(v)
        if i in dirty_edges or u in dirty_nodes or v in dirty_nodes:
            seeds.extend(x for x in (u, v) if x not in guarded)
    roots = {find(v) for v in seeds}
    nodes = set(dirty_nodes) | {v for v in range(n) if v not in guarded and find(v) in roots}
    links = set(dirty_edges) | {i for i in present if edges[i][0] in nodes or edges[i][1] in nodes}
    return nodes, links
