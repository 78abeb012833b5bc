from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union


class InsufficientAgents(ValueError):
    pass


@dataclass(frozen=True)
class Stay:
    def __str__(self) -> str:
        return "stay"


@dataclass(frozen=True)
class Settle:
    def __str__(self) -> str:
        return "settle"


@dataclass(frozen=True)
class Move:
    port: int

    def __str__(self) -> str:
        return f"move:{self.port}"


Action = Union[Stay, Settle, Move]
STAY = Stay()
SETTLE = Settle()


class Strategy:
    """Per-agent policy over a LocalView plus the agent's own memory.

    ``decide`` must be a pure function of the view and the agent id: the
    view already carries every co-located agent's memory (after
    ``exchange``).  Strategies that plan for the whole node compute the
    same plan for every co-located agent and return their own slice.
    """

    name = "strategy"
    default_node_oracle = False

    def initial_memory(self, agent_id: int) -> Any:
        raise NotImplementedError

    def exchange(self, memories: list) -> list:
        return memories

    def decide(self, view, agent_id: int) -> tuple[Action, Any]:
        raise NotImplementedError

    def required_agents(self, n: int, d: int, k: int) -> int:
        raise NotImplementedError
