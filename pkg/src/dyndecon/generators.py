"""Deterministic footprint families.

Every generator returns a canonical footprint whose ports follow ascending
neighbour order, so regenerating with the same parameters gives a
byte-identical serialisation.
"""

from __future__ import annotations

import random

from .dynamics import complete_binary_tree, complete_bipartite, wheel
from .graph import Footprint, from_adjacency


class BadParams(ValueError):
    pass


def path(n: int) -> Footprint:
    if n < 1:
        raise BadParams("path needs n >= 1")
    return from_adjacency(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Footprint:
    if n < 3:
        raise BadParams("cycle needs n >= 3")
    return from_adjacency(n, [(i, (i + 1) % n) for i in range(n)])


def tree(depth: int) -> Footprint:
    if depth < 0:
        raise BadParams("tree needs depth >= 0")
    return complete_binary_tree(depth)


def wheel_graph(n: int) -> Footprint:
    if n < 4:
        raise BadParams("wheel needs n >= 4")
    return wheel(n)


def bipartite(n: int) -> Footprint:
    if n < 2 or n % 2:
        raise BadParams("complete_bipartite needs an even n >= 2")
    return complete_bipartite(n // 2)


def figure4(d: int, k: int) -> Footprint:
    """Spine of d-1 nodes from Home, a pendant leaf on every spine node, and a
    hub at the spine's end joined to every vertex of a k-cycle.

    Diameter is d and the cyclomatic number is k (hub plus k-cycle is a wheel).
    Node ids put the wheel ahead of the leaves so an ascending-port sweep heads
    for the cycle first: spine 0..d-2 (hub = d-2), cycle, then leaves.
    """
    if d < 2 or k < 3:
        raise BadParams("figure4 needs d >= 2 and k >= 3")
    spine = list(range(d - 1))
    hub = spine[-1]
    ring = list(range(d - 1, d - 1 + k))
    leaves = list(range(d - 1 + k, d - 1 + k + len(spine)))
    pairs = [(spine[i], spine[i + 1]) for i in range(len(spine) - 1)]
    pairs += [(s, leaf) for s, leaf in zip(spine, leaves)]
    pairs += [(hub, v) for v in ring]
    pairs += [(ring[i], ring[(i + 1) % k]) for i in range(k)]
    return from_adjacency(d - 1 + k + len(spine), pairs)


def random_connected(n: int, k: int, seed: int) -> Footprint:
    """Uniform random labelled spanning tree (Pruefer code) plus k random extra edges."""
    if n < 1:
        raise BadParams("random_connected needs n >= 1")
    max_extra = n * (n - 1) // 2 - (n - 1)
    if not 0 <= k <= max_extra:
        raise BadParams(f"random_connected: k must be in [0, {max_extra}] for n={n}")
    rng = random.Random(seed)
    pairs = _pruefer_tree(n, rng)
    have = {tuple(sorted(p)) for p in pairs}
    missing = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in have]
    pairs += rng.sample(missing, k)
    return from_adjacency(n, pairs)


def _pruefer_tree(n: int, rng: random.Random) -> list[tuple[int, int]]:
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    code = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in code:
        degree[x] += 1
    pairs = []
    for x in code:
        leaf = min(v for v in range(n) if degree[v] == 1)
        pairs.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = (w for w in range(n) if degree[w] == 1)
    pairs.append((u, v))
    return pairs


FAMILIES = {
    "path": (path, ("n",)),
    "cycle": (cycle, ("n",)),
    "tree": (tree, ("depth",)),
    "wheel": (wheel_graph, ("n",)),
    "complete_bipartite": (bipartite, ("n",)),
    "figure4": (figure4, ("d", "k")),
    "random_connected": (random_connected, ("n", "k", "seed")),
}


def generate(family: str, params: dict, seed: int = 0) -> Footprint:
    try:
        fn, names = FAMILIES[family]
    except KeyError:
        raise BadParams(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    args = []
    for name in names:
        if name == "seed":
            args.append(int(params.get("seed", seed)))
        elif name not in params:
            raise BadParams(f"{family} needs parameter {name!r}")
        else:
            args.append(int(params[name]))
    return fn(*args)
