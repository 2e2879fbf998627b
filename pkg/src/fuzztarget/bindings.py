"""Deterministic variable binding for a call sequence.

Each value slot is bound to an earlier call's result. Among all complete
assignments the solver keeps one that binds the largest number of distinct
earlier results; ties go to the depth-first order that tries the most
recently produced or mutated variable first. Maximising use means a sequence
whose calls *can* all feed later calls is planned that way, so its covered
producer edges are as large as the sequence allows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .api_model import CallChain
from .depgraph import DependencyGraph
from .ownership import binding_moves

DEFAULT_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class Binding:
    slot_index: int
    source: int  # statement index of the bound variable
    chain: CallChain
    moves: bool


Assignment = tuple[tuple[Binding, ...], ...]


class _Search:
    def __init__(self, graph: DependencyGraph, calls: Sequence[str], budget: int) -> None:
        self.graph = graph
        self.calls = list(calls)
        self.budget = budget
        self.nodes = 0
        n = len(self.calls)
        self.value_type = [graph.produced_type[f] for f in self.calls]
        self.slots = [graph.node(f).value_slots for f in self.calls]
        self.mutating = [graph.node(f).mutates_param_indices for f in self.calls]
        # feeds_later[k][i]: can statement k's value feed any statement j >= i?
        self.feeds_from = []
        for k in range(n):
            row = [False] * (n + 1)
            for i in range(n - 1, k, -1):
                row[i] = row[i + 1] or graph.can_feed(self.calls[k], self.calls[i])
            self.feeds_from.append(row)
        self.best: list[tuple[Binding, ...]] | None = None
        self.best_used = -1
        self.ceiling = sum(1 for k in range(n) if self.value_type[k] is not None
                           and self.feeds_from[k][k + 1])

    def bound(self, i: int, used: set[int], alive: set[int]) -> int:
        extra = 0
        for k in range(len(self.calls)):
            if k in used or self.value_type[k] is None:
                continue
            if k < i:
                if k in alive and self.feeds_from[k][i]:
                    extra += 1
            elif self.feeds_from[k][k + 1]:
                extra += 1
        return len(used) + extra

    def run(self) -> list[tuple[Binding, ...]] | None:
        self.step(0, [], set(), set(), {})
        return self.best

    def step(self, i: int, acc: list[tuple[Binding, ...]], used: set[int],
             alive: set[int], touched: dict[int, int]) -> bool:
        """Returns True to stop the whole search."""
        if i == len(self.calls):
            if len(used) > self.best_used:
                self.best = list(acc)
                self.best_used = len(used)
            return self.best_used >= self.ceiling
        self.nodes += 1
        if self.best is not None and (
                self.nodes > self.budget or self.bound(i, used, alive) <= self.best_used):
            return self.nodes > self.budget
        node_slots = self.slots[i]
        candidates = sorted(alive, key=lambda v: (touched[v], v), reverse=True)
        chosen: list[Binding] = []
        taken: set[int] = set()

        def assign(j: int) -> bool:
            if j == len(node_slots):
                moved = {b.source for b in chosen if b.moves}
                newly = {b.source for b in chosen} - used
                new_alive = alive - moved
                saved = {}
                for b in chosen:
                    if b.slot_index in self.mutating[i] and b.source in new_alive:
                        saved[b.source] = touched[b.source]
                        touched[b.source] = i
                if self.value_type[i] is not None:
                    new_alive = new_alive | {i}
                    touched[i] = i
                acc.append(tuple(chosen))
                stop = self.step(i + 1, acc, used | newly, new_alive, touched)
                acc.pop()
                touched.update(saved)
                if self.value_type[i] is not None:
                    del touched[i]
                return stop
            slot = node_slots[j]
            for v in candidates:
                if v in taken:
                    continue
                vt = self.graph.value_type(self.value_type[v])
                c = self.graph.chain(vt, slot.type)
                if c is None:
                    continue
                taken.add(v)
                chosen.append(Binding(slot.index, v, c, binding_moves(vt, c)))
                stop = assign(j + 1)
                chosen.pop()
                taken.discard(v)
                if stop:
                    return True
            return False

        return assign(0)


def solve_bindings(graph: DependencyGraph, calls: Sequence[str],
                   budget: int = DEFAULT_NODE_BUDGET) -> Assignment | None:
    """Bind every value slot of ``calls``; None if the sequence cannot be bound."""
    if not calls or any(graph.node(f).unreachable for f in calls):
        return None
    result = _Search(graph, calls, budget).run()
    return None if result is None else tuple(result)


def covered_edges(graph: DependencyGraph, calls: Sequence[str],
                  assignment: Assignment) -> frozenset[tuple[str, str]]:
    edges = set()
    for stmt in assignment:
        for b in stmt:
            edge = graph.producer_edge_of(calls[b.source])
            if edge is not None:
                edges.add(edge.key)
    return frozenset(edges)
