"""Batch experiments over families x budgets x models x seeds.

A matrix file uses the same INI style as scenarios::

    [matrix]
    corpus = random          # or: family = wheel  with  n = 5..12
    size = 100               # random corpus: number of footprints
    n_max = 20
    models = FTEA:1, FTEA:2, FTEA:3
    adversary = random       # static | random | wheel_rim
    p = 0.3
    strategies = modified
    budgets = d+k, d+k-1
    seeds = 0..4             # only used by non-random corpora
    workers = 4

The random corpus (n <= n_max, k drawn from 0..n, one footprint per corpus
seed) is a harness choice, not something prescribed by the model; the
summary says so.
"""

from __future__ import annotations

import configparser
import itertools
import json
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .dynamics import DynamicityModel, ModelKind
from .generators import generate
from .scenario import ConfigError, Scenario, run_scenario, structure

log = logging.getLogger(__name__)

CORPUS_NOTE = "random corpus parameters (n <= n_max, k in 0..n, one footprint per seed) are harness choices"


@dataclass(frozen=True)
class Cell:
    family: str
    params: tuple  # sorted (name, value) pairs
    model: str
    adversary: str
    adversary_params: tuple
    strategy: str
    budget: str
    seed: int

    @property
    def id(self) -> str:
        p = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.family}[{p}]/{self.model}/{self.adversary}/{self.strategy}/{self.budget}/s{self.seed}"

    def scenario(self) -> Scenario:
        fp = generate(self.family, dict(self.params), self.seed)
        return Scenario(
            footprint=fp,
            model=DynamicityModel.parse(self.model),
            adversary_name=self.adversary,
            adversary_params=dict(self.adversary_params),
            strategy=self.strategy,
            agents=self.budget,
            seed=self.seed,
            name=self.id,
            source={"family": self.family, **dict(self.params)},
        )


@dataclass(frozen=True)
class ResultRow:
    cell: str
    family: str
    model: str
    strategy: str
    budget: str
    n: int
    d: int
    k: int
    outcome: str
    rounds: int
    agents: int
    violations: int
    nodes_clean: int
    edges_clean: int
    error: str = ""

    @property
    def regime(self) -> str:
        return "k<n" if self.k < self.n else "k>=n"

    @property
    def success(self) -> bool:
        return self.outcome == "FullSuccess"

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))


def run_cell(cell: Cell) -> ResultRow:
    """Run one cell; failures become rows instead of exceptions."""
    n = d = k = -1
    try:
        sc = cell.scenario()
        n, d, k = structure(sc.footprint)
        _, row, _ = run_scenario(sc)
        return ResultRow(cell.id, cell.family, cell.model, cell.strategy, cell.budget, n, d, k,
                         row.outcome, row.rounds, row.agents, row.violations, row.nodes_clean, row.edges_clean)
    except Exception as exc:  # noqa: BLE001 - a cell never aborts the matrix
        log.warning("cell %s failed: %s", cell.id, exc)
        return ResultRow(cell.id, cell.family, cell.model, cell.strategy, cell.budget, n, d, k,
                         "Error", 0, 0, 0, 0, 0, f"{type(exc).__name__}: {exc}")


def run_matrix(cells: list[Cell], workers: int = 1) -> list[ResultRow]:
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_cell, cells, chunksize=4))
    else:
        rows = [run_cell(c) for c in cells]
    return rows  # single writer: order follows the cell list


def random_corpus(size: int, n_max: int = 20, seed: int = 0, n_min: int = 2) -> list[tuple[int, int, int]]:
    """(n, k, seed) triples; k is drawn from 0..n and capped by what n allows."""
    rng = random.Random(seed)
    out = []
    for i in range(size):
        n = rng.randint(n_min, n_max)
        k = min(rng.randint(0, n), n * (n - 1) // 2 - (n - 1))
        out.append((n, k, seed * 100_003 + i))
    return out


def _parse_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _parse_ints(text: str) -> list[int]:
    out = []
    for part in _parse_list(text):
        lo, sep, hi = part.partition("..")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


def cells_from_config(cp: configparser.ConfigParser) -> tuple[list[Cell], dict]:
    if not cp.has_section("matrix"):
        raise ConfigError("missing [matrix] section")
    mx = dict(cp["matrix"])
    models = _parse_list(mx.get("models", "FTEA:1"))
    strategies = _parse_list(mx.get("strategies", "modified"))
    budgets = _parse_list(mx.get("budgets", "n"))
    adversary = mx.get("adversary", "static")
    adv_params = tuple(sorted((("T" if k == "t" else k), float(v) if "." in v else int(v))
                              for k, v in mx.items() if k in ("p", "hub", "edge")))
    opts = {"workers": int(mx.get("workers", 1))}

    graphs: list[tuple[str, tuple, int]] = []
    if mx.get("corpus") == "random":
        for n, k, s in random_corpus(int(mx.get("size", 100)), int(mx.get("n_max", 20)), int(mx.get("corpus_seed", 0))):
            graphs.append(("random_connected", (("k", k), ("n", n)), s))
        opts["note"] = CORPUS_NOTE
    else:
        family = mx.get("family")
        if not family:
            raise ConfigError("[matrix] needs 'corpus = random' or a 'family'")
        names = [k for k in ("n", "k", "d", "depth") if k in mx]
        grids = [_parse_ints(mx[k]) for k in names]
        seeds = _parse_ints(mx.get("seeds", "0"))
        for combo in itertools.product(*grids):
            for s in seeds:
                graphs.append((family, tuple(sorted(zip(names, combo))), s))

    cells = []
    for (family, params, s), model, strat, budget in itertools.product(graphs, models, strategies, budgets):
        ap = adv_params
        if adversary == "random":
            T = DynamicityModel.parse(model).bound
            ap = tuple(sorted(dict(adv_params, T=T).items()))
        cells.append(Cell(family, params, model, adversary, ap, strat, budget, s))
    return cells, opts


def load_matrix(path: str | Path) -> tuple[list[Cell], dict]:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if not cp.read(path):
        raise ConfigError(f"cannot read {path}")
    return cells_from_config(cp)


def summary_table(rows: list[ResultRow], note: str | None = None) -> str:
    """Success counts per (model kind x regime) quadrant, strategy and budget."""
    groups: dict = {}
    for r in rows:
        kind = "IDED" if r.model.upper().startswith("IDED") else "FTEA"
        key = (kind, r.regime, r.strategy, r.budget)
        ok, total = groups.get(key, (0, 0))
        groups[key] = (ok + r.success, total + 1)
    lines = [f"{'model':<6} {'regime':<6} {'strategy':<10} {'budget':<10} {'success':>9} {'rate':>7}"]
    order = {ModelKind.FTEA.value: 0, ModelKind.IDED.value: 1}
    for key in sorted(groups, key=lambda x: (order[x[0]], x[1] != "k<n", x[2], x[3])):
        ok, total = groups[key]
        lines.append(f"{key[0]:<6} {key[1]:<6} {key[2]:<10} {key[3]:<10} {ok:>4}/{total:<4} {100.0 * ok / total:>6.1f}%")
    if note:
        lines.append(f"note: {note}")
    return "\n".join(lines)
