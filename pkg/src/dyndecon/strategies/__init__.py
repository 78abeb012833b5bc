"""Decontamination strategies and a name registry."""

from __future__ import annotations

from .base import SETTLE, STAY, Action, InsufficientAgents, Move, Settle, Stay, Strategy
from .sweep import BACKTRACK, EXHAUSTED, InfiniteDecontamination, ModifiedDecontamination, dfs_next
from .uni import UniDecontamination

REGISTRY = {
    "uni": UniDecontamination,
    "modified": ModifiedDecontamination,
    "infinite": InfiniteDecontamination,
}


def get_strategy(name: str) -> Strategy:
    try:
        return REGISTRY[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown strategy {name!r}; choose from {sorted(REGISTRY)}") from None


__all__ = [
    "Action", "BACKTRACK", "EXHAUSTED", "InfiniteDecontamination", "InsufficientAgents",
    "ModifiedDecontamination", "Move", "REGISTRY", "SETTLE", "STAY", "Settle", "Stay",
    "Strategy", "UniDecontamination", "dfs_next", "get_strategy",
]
