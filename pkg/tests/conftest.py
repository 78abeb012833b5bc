from __future__ import annotations

import random

from hypothesis import strategies as st

from dyndecon.generators import random_connected


@st.composite
def connected_footprints(draw, n_min: int = 1, n_max: int = 12):
    n = draw(st.integers(n_min, n_max))
    k_max = n * (n - 1) // 2 - (n - 1)
    k = draw(st.integers(0, min(k_max, n + 2)))
    seed = draw(st.integers(0, 10**6))
    return random_connected(n, k, seed)


def random_state(fp, rng: random.Random):
    """Random (node_dirty, edge_dirty, present, guarded) masks."""
    nd = rng.getrandbits(fp.n) if fp.n else 0
    ed = rng.getrandbits(fp.m) if fp.m else 0
    present = {i for i in range(fp.m) if rng.random() < 0.75}
    guarded = {v for v in range(fp.n) if rng.random() < 0.3}
    return nd, ed, present, guarded


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
