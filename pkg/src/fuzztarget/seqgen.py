"""Sequence generation: pruned BFS, backward search and set-cover refinement."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .bindings import covered_edges, solve_bindings
from .config import GenerationConfig
from .depgraph import DependencyGraph, State, validate_sequence
from .errors import FrontierExplosionError, InternalBindingError

log = logging.getLogger(__name__)

__all__ = [
    "ApiSequence", "CoverageStats", "GenerationConfig", "backward_search",
    "bfs_with_pruning", "coverage_report", "dump_sequences", "end_node_test",
    "generate", "make_sequence", "parse_sequence_dump", "redundancy_test", "refine",
]


@dataclass(frozen=True)
class ApiSequence:
    calls: tuple[str, ...]
    covered_edges: frozenset[tuple[str, str]]
    has_primitive_input: bool
    has_dynamic_primitive_input: bool

    @property
    def apis(self) -> frozenset[str]:
        return frozenset(self.calls)

    def __len__(self) -> int:
        return len(self.calls)

    def __str__(self) -> str:
        return " -> ".join(self.calls)


def make_sequence(graph: DependencyGraph, calls: Sequence[str]) -> ApiSequence:
    """Attach coverage metadata to a valid call list."""
    calls = tuple(calls)
    assignment = solve_bindings(graph, calls)
    if assignment is None:
        raise InternalBindingError(f"no binding for sequence {' -> '.join(calls)}")
    prim = [s for f in calls for s in graph.node(f).primitive_slots]
    return ApiSequence(
        calls=calls,
        covered_edges=covered_edges(graph, calls, assignment),
        has_primitive_input=bool(prim),
        has_dynamic_primitive_input=any(s.is_dynamic for s in prim),
    )


def _order_key(seq: ApiSequence | tuple[str, ...]) -> tuple:
    calls = seq.calls if isinstance(seq, ApiSequence) else seq
    return (len(calls), calls)


# ---------------------------------------------------------------------------
# Pruning predicates

def end_node_test(graph: DependencyGraph, seq: Sequence[str]) -> bool:
    """True when the last call neither returns nor mutates a non-primitive value."""
    return bool(seq) and graph.node(seq[-1]).is_end


def _is_live(graph: DependencyGraph, calls: Sequence[str], k: int) -> bool:
    later = calls[k + 1:]
    if any(graph.can_feed(calls[k], j) for j in later):
        return True
    node = graph.node(calls[k])
    mutated = {node.slots[i].base for i in node.mutates_param_indices}
    return any(s.base in mutated for j in later for s in graph.node(j).value_slots)


def redundancy_test(graph: DependencyGraph, seq: Sequence[str]) -> bool:
    """True (redundant) when a non-final call is a dead node.

    A call is dead when no later call can take its return value, and no later
    call consumes the type of any variable it mutates through ``&mut``.
    """
    return any(not _is_live(graph, seq, k) for k in range(len(seq) - 1))


# ---------------------------------------------------------------------------
# BFS with pruning

def bfs_with_pruning(graph: DependencyGraph, config: GenerationConfig | None = None) -> list[ApiSequence]:
    config = config or graph.config
    order = list(graph.api_nodes)
    last: list[tuple[tuple[str, ...], set[State]]] = [((), {()})]
    found: list[tuple[str, ...]] = []
    for level in range(1, config.max_len + 1):
        new: list[tuple[tuple[str, ...], set[State]]] = []
        for seq, states in last:
            if end_node_test(graph, seq):
                continue
            for fid in order:
                if not seq and not graph.node(fid).is_start:
                    continue
                nxt: set[State] = set()
                for s in states:
                    nxt |= graph.apply_call(s, fid)
                if nxt:
                    new.append((seq + (fid,), nxt))
            if len(new) > config.frontier_cap:
                raise FrontierExplosionError(level, len(new), config.frontier_cap)
        log.debug("bfs level %d: %d sequences", level, len(new))
        found.extend(seq for seq, _ in new)
        last = new
        if not new:
            break
    kept = sorted((s for s in found if not redundancy_test(graph, s)), key=_order_key)
    return [make_sequence(graph, s) for s in kept]


# ---------------------------------------------------------------------------
# Backward search

def backward_search(graph: DependencyGraph, covered: Iterable[ApiSequence],
                    config: GenerationConfig | None = None) -> list[ApiSequence]:
    """Cover APIs beyond the BFS depth by stitching existing sequences together.

    Every value slot of an uncovered API is fed by the last call of the
    shortest already-generated sequence able to produce it (ties broken on
    the call ids); the chosen provider sequences are concatenated and the
    API appended. Repeats until a pass adds nothing.
    """
    pool = sorted(covered, key=_order_key)
    covered_apis = {f for s in pool for f in s.calls}
    emitted: list[ApiSequence] = []
    # Each pass either covers something new or ends the loop.
    for _ in range(len(graph.api_nodes) + 1):
        progress = False
        for fid, node in graph.api_nodes.items():
            if fid in covered_apis or node.unreachable or node.is_start:
                continue
            providers = []
            for slot in node.value_slots:
                best = None
                for seq in pool:
                    last = seq.calls[-1]
                    tid = graph.produced_type[last]
                    if tid is None or graph.chain(graph.value_type(tid), slot.type) is None:
                        continue
                    best = seq
                    break  # pool is sorted by (length, ids)
                if best is None:
                    break
                providers.append(best)
            else:
                calls = tuple(f for p in providers for f in p.calls) + (fid,)
                if not validate_sequence(graph, calls):
                    log.warning("backward search built an invalid sequence %s", calls)
                    continue
                seq = make_sequence(graph, calls)
                emitted.append(seq)
                pool.append(seq)
                pool.sort(key=_order_key)
                covered_apis.add(fid)
                progress = True
        if not progress:
            break
    return emitted


# ---------------------------------------------------------------------------
# Refinement

def refine(candidates: Iterable[ApiSequence], graph: DependencyGraph | None = None,
           config: GenerationConfig | None = None) -> list[ApiSequence]:
    """Greedy set cover over API nodes and producer edges.

    Candidates without any primitive input are dropped first. At each step
    the candidate adding the most new APIs wins, then the most new edges,
    then the shortest, then one with a dynamic-length input; remaining ties
    are broken by a seeded random choice.
    """
    if config is None:
        config = graph.config if graph is not None else GenerationConfig()
    rng = random.Random(config.rng_seed)
    pool = sorted({s.calls: s for s in candidates if s.has_primitive_input}.values(),
                  key=_order_key)
    apis: set[str] = set()
    edges: set[tuple[str, str]] = set()
    selected: list[ApiSequence] = []
    while pool:
        best_key = None
        tied: list[ApiSequence] = []
        for s in pool:
            new_apis = len(s.apis - apis)
            new_edges = len(s.covered_edges - edges)
            key = (new_apis, new_edges, -len(s), s.has_dynamic_primitive_input)
            if best_key is None or key > best_key:
                best_key, tied = key, [s]
            elif key == best_key:
                tied.append(s)
        if best_key[0] == 0 and best_key[1] == 0:
            break
        pick = tied[0] if len(tied) == 1 else rng.choice(tied)
        selected.append(pick)
        apis |= pick.apis
        edges |= pick.covered_edges
        pool.remove(pick)
    return selected


# ---------------------------------------------------------------------------
# Reporting

@dataclass(frozen=True)
class CoverageStats:
    apis_total: int
    apis_covered: int
    producer_edges_total: int
    producer_edges_covered: int
    targets: int
    avg_visits_per_api: Fraction
    unfuzzable_apis: tuple[str, ...] = field(default=())

    @property
    def coverage_ratio(self) -> float:
        return self.apis_covered / self.apis_total if self.apis_total else 0.0

    def to_dict(self) -> dict:
        return {
            "apis_total": self.apis_total,
            "apis_covered": self.apis_covered,
            "producer_edges_total": self.producer_edges_total,
            "producer_edges_covered": self.producer_edges_covered,
            "targets": self.targets,
            "avg_visits_per_api": str(self.avg_visits_per_api),
            "unfuzzable_apis": list(self.unfuzzable_apis),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoverageStats":
        return cls(
            apis_total=int(data["apis_total"]),
            apis_covered=int(data["apis_covered"]),
            producer_edges_total=int(data["producer_edges_total"]),
            producer_edges_covered=int(data["producer_edges_covered"]),
            targets=int(data["targets"]),
            avg_visits_per_api=Fraction(data["avg_visits_per_api"]),
            unfuzzable_apis=tuple(data.get("unfuzzable_apis", ())),
        )

    def summary(self) -> str:
        return (f"coverage {self.coverage_ratio:.2f} ({self.apis_covered}/{self.apis_total}), "
                f"targets {self.targets}")


def coverage_report(selected: Sequence[ApiSequence], graph: DependencyGraph,
                    candidates: Iterable[ApiSequence] = ()) -> CoverageStats:
    """Aggregate coverage of a selection.

    APIs reachable only through primitive-free ``candidates`` are listed as
    unfuzzable rather than counted as covered.
    """
    apis = {f for s in selected for f in s.calls}
    edges = {e for s in selected for e in s.covered_edges}
    visits = sum(len(s) for s in selected)
    unfuzzable = sorted({f for s in candidates for f in s.calls} - apis)
    return CoverageStats(
        apis_total=len(graph.api_nodes),
        apis_covered=len(apis),
        producer_edges_total=len(graph.producer_edges),
        producer_edges_covered=len(edges),
        targets=len(selected),
        avg_visits_per_api=Fraction(visits, len(apis)) if apis else Fraction(0),
        unfuzzable_apis=tuple(unfuzzable),
    )


@dataclass
class GenerationResult:
    bfs: list[ApiSequence]
    backward: list[ApiSequence]
    selected: list[ApiSequence]
    stats: CoverageStats


def generate(graph: DependencyGraph, config: GenerationConfig | None = None) -> GenerationResult:
    """Run BFS, backward search and refinement end to end."""
    config = config or graph.config
    bfs = bfs_with_pruning(graph, config)
    back = backward_search(graph, bfs, config) if bfs else []
    merged = bfs + back
    selected = refine(merged, graph, config)
    return GenerationResult(bfs, back, selected, coverage_report(selected, graph, merged))


# ---------------------------------------------------------------------------
# Dump format

def dump_sequences(selected: Sequence[ApiSequence], stats: CoverageStats,
                   annotations: Sequence[str] | None = None) -> str:
    lines = []
    for k, seq in enumerate(selected, start=1):
        line = f"target_{k}: {seq}"
        if annotations is not None:
            line += f"  # {annotations[k - 1]}"
        lines.append(line)
    lines.append("")
    lines.append("# coverage")
    lines.append(f"apis: {stats.apis_covered}/{stats.apis_total}")
    lines.append(f"producer_edges: {stats.producer_edges_covered}/{stats.producer_edges_total}")
    lines.append(f"targets: {stats.targets}")
    lines.append(f"avg_visits_per_api: {stats.avg_visits_per_api}")
    if stats.unfuzzable_apis:
        lines.append(f"covered_unfuzzable: {', '.join(stats.unfuzzable_apis)}")
    return "\n".join(lines) + "\n"


def parse_sequence_dump(text: str) -> list[tuple[str, ...]]:
    """Call lists of the ``target_k:`` lines of a dump."""
    out = []
    for line in text.splitlines():
        if not line.startswith("target_"):
            continue
        body = line.split(":", 1)[1].split("#", 1)[0]
        out.append(tuple(p.strip() for p in body.split("->")))
    return out
