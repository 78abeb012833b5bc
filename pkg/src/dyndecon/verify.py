"""Independent trace checker.

Deliberately shares no code with the engine or the contamination module:
connectivity, the reappearance bound, move legality and recontamination are
all recomputed here from the raw trace records.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path


class CorruptTrace(ValueError):
    pass


@dataclass
class Divergence:
    round: int
    check: str
    message: str

    def __str__(self) -> str:
        return f"round {self.round}: {self.check}: {self.message}"


@dataclass
class VerifyReport:
    rounds: int = 0
    issues: list[Divergence] = field(default_factory=list)
    flips: int = 0  # clean -> contaminated transitions found by recomputation

    @property
    def ok(self) -> bool:
        return not self.issues

    @property
    def first(self) -> Divergence | None:
        return self.issues[0] if self.issues else None

    @property
    def monotone(self) -> bool:
        return self.flips == 0

    def checks_failed(self) -> set[str]:
        return {d.check for d in self.issues}


def _connected(n: int, edges: list[tuple[int, int]], present: set[int]) -> bool:
    if n <= 1:
        return True
    adj = [[] for _ in range(n)]
    for i in present:
        u, v = edges[i]
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    todo = deque([0])
    while todo:
        x = todo.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == n


def closure(n: int, edges: list[tuple[int, int]], present: set[int],
            dirty_nodes: set[int], dirty_edges: set[int], guarded: set[int]) -> tuple[set[int], set[int]]:
    """Worklist propagation over nodes and present edges."""
    nodes, links = set(dirty_nodes), set(dirty_edges)
    incident = [[] for _ in range(n)]
    for i in present:
        u, v = edges[i]
        incident[u].append(i)
        incident[v].append(i)
    todo = deque([("n", v) for v in nodes] + [("e", i) for i in links if i in present])
    while todo:
        kind, x = todo.popleft()
        if kind == "n":
            for i in incident[x]:
                if i not in links:
                    links.add(i)
                    todo.append(("e", i))
        else:
            for y in edges[x]:
                if y not in nodes and y not in guarded:
                    nodes.add(y)
                    todo.append(("n", y))
    return nodes, links


def _parse_bits(s: str) -> set[int]:
    return {i for i, c in enumerate(s) if c == "1"}


def load_records(path: str | Path) -> list[dict]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_records(text)


def parse_records(text: str) -> list[dict]:
    out = []
    for no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorruptTrace(f"line {no}: {exc}") from exc
    return out


def verify_records(records: list[dict]) -> VerifyReport:
    if not records or records[0].get("type") != "header":
        raise CorruptTrace("missing header record")
    head = records[0]
    try:
        n = int(head["n"])
        raw_edges = head["edges"]
        home = int(head["home"])
        ids = list(head["agents"])
        model = str(head["model"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptTrace(f"bad header: {exc}") from exc
    edges = [(int(e[0]), int(e[1])) for e in raw_edges]
    port_map = {}
    for i, (u, v, pu, pv) in enumerate(raw_edges):
        port_map[(u, pu)] = (v, i)
        port_map[(v, pv)] = (u, i)
    m = len(edges)
    T = int(model.split(":")[1]) if model.startswith("FTEA") else None

    rounds = [r for r in records[1:] if r.get("type") == "round"]
    outcomes = [r for r in records[1:] if r.get("type") == "outcome"]
    if not rounds or rounds[0].get("round") != 0:
        raise CorruptTrace("missing round-0 record")

    report = VerifyReport()
    flag = report.issues.append

    positions = {i: home for i in ids}
    dn = set(range(n)) - {home}
    de = set(range(m))
    absent_run = [0] * m
    first_full = 0 if not dn and not de else None
    flip_rounds: list[int] = []
    model_bad_round = None

    r0 = rounds[0]
    if _parse_bits(r0["node_dirty"]) != dn or _parse_bits(r0["edge_dirty"]) != de:
        flag(Divergence(0, "contamination", "initial state is not 'all contaminated except Home'"))

    expected = 1
    for rec in rounds[1:]:
        t = rec.get("round")
        if t != expected:
            raise CorruptTrace(f"round numbers jump from {expected - 1} to {t}")
        expected += 1
        try:
            absent = set(rec["absent"])
            moves = rec["agents"]
            rec_nodes = _parse_bits(rec["node_dirty"])
            rec_edges = _parse_bits(rec["edge_dirty"])
        except (KeyError, TypeError) as exc:
            raise CorruptTrace(f"round {t}: {exc}") from exc
        present = set(range(m)) - absent

        legal = True
        if T is not None:
            late = [i for i in range(m) if absent_run[i] >= T and i in absent]
            if late:
                legal = False
                flag(Divergence(t, "t-bound", f"edge {late[0]} absent more than {T} consecutive rounds"))
        if not _connected(n, edges, present):
            legal = False
            flag(Divergence(t, "connectivity", "present edges do not connect the graph"))
        for i in range(m):
            absent_run[i] = absent_run[i] + 1 if i in absent else 0

        if not legal:
            model_bad_round = t
            report.rounds = t
            break

        traversed = set()
        moved_ids = set()
        for entry in moves:
            aid, src, dst, port = entry
            moved_ids.add(aid)
            if positions.get(aid) != src:
                flag(Divergence(t, "move", f"agent {aid} starts at {src} but was at {positions.get(aid)}"))
            if port is None:
                if src != dst:
                    flag(Divergence(t, "move", f"agent {aid} changes node without a port"))
            else:
                link = port_map.get((src, port))
                if link is None:
                    flag(Divergence(t, "move", f"agent {aid}: node {src} has no port {port}"))
                else:
                    w, i = link
                    if w != dst:
                        flag(Divergence(t, "move", f"agent {aid}: port {port} of {src} leads to {w}, not {dst}"))
                    if i not in present:
                        flag(Divergence(t, "move", f"agent {aid} crosses absent edge {i}"))
                    traversed.add(i)
            positions[aid] = dst
        if moves and moved_ids != set(ids):
            flag(Divergence(t, "move", "round does not account for every agent"))

        guarded = set(positions.values())
        nodes = dn - guarded
        links = de - traversed
        nodes, links = closure(n, edges, present, nodes, links, guarded)
        flips_n = nodes - dn
        flips_e = links - de
        if flips_n or flips_e:
            report.flips += len(flips_n) + len(flips_e)
            flip_rounds.append(t)
            flag(Divergence(t, "monotonicity", f"recontaminated nodes {sorted(flips_n)} edges {sorted(flips_e)}"))
        if nodes != rec_nodes or links != rec_edges:
            flag(Divergence(t, "contamination", "recorded status differs from recomputed spread"))
        recorded_v = rec.get("violations", {})
        if sorted(recorded_v.get("nodes", [])) != sorted(flips_n) or sorted(recorded_v.get("edges", [])) != sorted(flips_e):
            flag(Divergence(t, "contamination", "recorded violations differ from recomputed ones"))
        dn, de = nodes, links
        if first_full is None and not dn and not de:
            first_full = t
        report.rounds = t

    if outcomes:
        _check_outcome(outcomes[-1], report, dn, de, first_full, flip_rounds, model_bad_round)
    else:
        flag(Divergence(report.rounds, "outcome", "trace has no outcome record"))
    return report


def _check_outcome(rec, report, dn, de, first_full, flip_rounds, model_bad_round) -> None:
    kind, t = rec.get("kind"), rec.get("round")
    bad = []
    if kind == "FullSuccess":
        if first_full is None or first_full != t:
            bad.append(f"FullSuccess at {t} but everything first clean at {first_full}")
    elif kind == "MonotonicityViolation":
        if not flip_rounds or flip_rounds[0] != t:
            bad.append(f"violation claimed at {t}, recomputed at {flip_rounds[:1]}")
    elif kind == "ModelViolation":
        if model_bad_round != t:
            bad.append(f"model violation claimed at {t}, found at {model_bad_round}")
    elif kind == "NodeSuccess":
        if dn:
            bad.append("NodeSuccess but some node is contaminated")
    elif kind in ("Stall", "RoundLimit"):
        if not dn and not de:
            bad.append(f"{kind} but everything is clean")
    else:
        bad.append(f"unknown outcome kind {kind!r}")
    if kind != "ModelViolation" and model_bad_round is not None:
        bad.append("illegal round in a trace not marked ModelViolation")
    for msg in bad:
        report.issues.append(Divergence(t if isinstance(t, int) else report.rounds, "outcome", msg))


def verify_trace(path: str | Path) -> VerifyReport:
    return verify_records(load_records(path))
