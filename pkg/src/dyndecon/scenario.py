"""Scenario configuration, agent-budget formulas and single-scenario runs.

A scenario file is INI-style with one section per concern::

    [graph]
    family = wheel          # or: edges = 0-1 1-2 2-0
    n = 9
    [model]
    kind = IDED             # or FTEA with T = 2
    [adversary]
    name = wheel_rim        # static | random | wheel_rim | hide_edge | schedule
    [strategy]
    name = infinite
    [run]
    agents = d+2k
    home = 0
    seed = 1
"""

from __future__ import annotations

import ast
import configparser
import json
import logging
import operator
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .dynamics import (
    Adversary,
    DynamicityModel,
    HideEdgeAdversary,
    RandomFTEAAdversary,
    ScheduleAdversary,
    StaticAdversary,
    WheelRimAdversary,
)
from .engine import Outcome, RunSpec, Trace, run
from .generators import BadParams, generate
from .graph import Footprint, cyclomatic_number, diameter, from_adjacency
from .strategies import get_strategy

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul}


def resolve_budget(formula: str | int, n: int, d: int, k: int) -> int:
    """Evaluate an agent-count formula such as ``d+2k`` or ``n-2``.

    Juxtaposition like ``2k`` means multiplication.  Only integers, the
    names n, d, k and ``+ - *`` (with parentheses) are accepted.
    """
    if isinstance(formula, int):
        return formula
    text = formula.replace(" ", "")
    for name in "ndk":
        for digit in "0123456789)":
            text = text.replace(f"{digit}{name}", f"{digit}*{name}")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad agent formula {formula!r}") from exc
    env = {"n": n, "d": d, "k": k}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name) and node.id in env:
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise ConfigError(f"unsupported token in agent formula {formula!r}")

    return ev(tree)


def structure(fp: Footprint) -> tuple[int, int, int]:
    return fp.n, diameter(fp), cyclomatic_number(fp)


@dataclass
class Scenario:
    footprint: Footprint
    model: DynamicityModel
    adversary_name: str = "static"
    adversary_params: dict = field(default_factory=dict)
    strategy: str = "modified"
    agents: str | int = "n"
    home: int = 0
    seed: int = 0
    max_rounds: int | None = None
    stall_window: int | None = None
    strict_visibility: bool = False
    node_oracle: bool | None = None
    name: str = "scenario"
    source: dict = field(default_factory=dict)
    base_dir: Path | None = None

    def agent_count(self) -> int:
        n, d, k = structure(self.footprint)
        count = resolve_budget(self.agents, n, d, k)
        log.info("agents %s resolved to %d (n=%d d=%d k=%d)", self.agents, count, n, d, k)
        return count

    def build_adversary(self) -> Adversary:
        fp, p = self.footprint, self.adversary_params
        name = self.adversary_name
        if name == "static":
            return StaticAdversary(fp)
        if name == "random":
            T = int(p.get("T", self.model.bound))
            return RandomFTEAAdversary(fp, int(p.get("seed", self.seed)), T, float(p.get("p", 0.3)))
        if name == "wheel_rim":
            return WheelRimAdversary(fp, int(p.get("hub", 0)))
        if name == "hide_edge":
            return HideEdgeAdversary(fp, int(p.get("edge", 0)))
        if name == "schedule":
            path = Path(p["file"])
            if not path.is_absolute() and self.base_dir is not None:
                path = self.base_dir / path
            return ScheduleAdversary.load(fp, path, self.model)
        raise ConfigError(f"unknown adversary {name!r}")

    def meta(self) -> dict:
        return {
            "name": self.name,
            "graph": self.source,
            "model": str(self.model),
            "adversary": {"name": self.adversary_name, **{k: self.adversary_params[k] for k in sorted(self.adversary_params)}},
            "strategy": self.strategy,
            "agents": str(self.agents),
            "home": self.home,
            "seed": self.seed,
        }

    def run_spec(self, agents: int | None = None) -> RunSpec:
        return RunSpec(
            footprint=self.footprint,
            model=self.model,
            adversary=self.build_adversary(),
            strategy=get_strategy(self.strategy),
            agent_count=self.agent_count() if agents is None else agents,
            home=self.home,
            max_rounds=self.max_rounds,
            stall_window=self.stall_window,
            node_oracle=self.node_oracle,
            strict_visibility=self.strict_visibility,
            seed=self.seed,
            meta=self.meta(),
        )


@dataclass(frozen=True)
class MetricsRow:
    scenario: str
    outcome: str
    rounds: int
    agents: int
    violations: int
    nodes_clean: int
    edges_clean: int
    exit_code: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))


def metrics_row(name: str, outcome: Outcome) -> MetricsRow:
    d = outcome.detail
    violations = len(d.get("nodes", ())) + len(d.get("edges", ())) if outcome.kind.value == "MonotonicityViolation" else 0
    return MetricsRow(name, outcome.kind.value, outcome.round, d.get("agents", 0), violations,
                      d.get("clean_nodes", 0), d.get("clean_edges", 0), outcome.exit_code)


def run_scenario(sc: Scenario, agents: int | None = None) -> tuple[Trace, MetricsRow, Outcome]:
    trace, outcome = run(sc.run_spec(agents))
    return trace, metrics_row(sc.name, outcome), outcome


# -- config files -------------------------------------------------------------

def parse_edges(text: str) -> list[tuple[int, int]]:
    out = []
    for tok in text.replace(",", " ").split():
        u, sep, v = tok.partition("-")
        if not sep:
            raise ConfigError(f"bad edge token {tok!r}; expected u-v")
        out.append((int(u), int(v)))
    return out


def _num(text: str):
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return text


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        if not cp.read(path):
            raise ConfigError(f"cannot read {path}")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    sc = scenario_from_config(cp, name=path.stem)
    sc.base_dir = path.parent
    return sc


def loads_scenario(text: str, name: str = "scenario") -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    return scenario_from_config(cp, name=name)


def scenario_from_config(cp: configparser.ConfigParser, name: str = "scenario") -> Scenario:
    for sec in ("graph", "model"):
        if not cp.has_section(sec):
            raise ConfigError(f"missing [{sec}] section")
    g = dict(cp["graph"])
    run_sec = dict(cp["run"]) if cp.has_section("run") else {}
    seed = int(run_sec.get("seed", 0))
    try:
        if "edges" in g:
            pairs = parse_edges(g["edges"])
            fp = _from_pairs(pairs, g)
            source = {"edges": g["edges"]}
        elif "family" in g:
            params = {k: v for k, v in g.items() if k != "family"}
            fp = generate(g["family"], params, seed)
            source = {"family": g["family"], **{k: _num(v) for k, v in sorted(params.items())}}
        else:
            raise ConfigError("[graph] needs 'family' or 'edges'")
    except (BadParams, ConfigError):
        raise
    except ValueError as exc:
        raise ConfigError(f"[graph]: {exc}") from exc

    m = dict(cp["model"])
    kind = m.get("kind", "FTEA").upper()
    try:
        model = DynamicityModel.ided() if kind == "IDED" else DynamicityModel.ftea(int(m.get("t", 1)))
    except ValueError as exc:
        raise ConfigError(f"[model]: {exc}") from exc

    adv = dict(cp["adversary"]) if cp.has_section("adversary") else {"name": "static"}
    adv_name = adv.pop("name", "static")
    adv_params = {("T" if k == "t" else k): _num(v) for k, v in adv.items()}
    strat = dict(cp["strategy"]) if cp.has_section("strategy") else {}

    def opt_int(key):
        return int(run_sec[key]) if key in run_sec else None

    agents = run_sec.get("agents", "n")
    return Scenario(
        footprint=fp,
        model=model,
        adversary_name=adv_name,
        adversary_params=adv_params,
        strategy=strat.get("name", "modified"),
        agents=int(agents) if agents.lstrip("-").isdigit() else agents,
        home=int(run_sec.get("home", 0)),
        seed=seed,
        max_rounds=opt_int("max_rounds"),
        stall_window=opt_int("stall_window"),
        strict_visibility=strat.get("strict_visibility", "false").lower() in ("1", "true", "yes"),
        node_oracle=None if "node_oracle" not in strat else strat["node_oracle"].lower() in ("1", "true", "yes"),
        name=name,
        source=source,
    )


def _from_pairs(pairs, g) -> Footprint:
    n = int(g["n"]) if "n" in g else 1 + max(max(p) for p in pairs)
    return from_adjacency(n, pairs)
