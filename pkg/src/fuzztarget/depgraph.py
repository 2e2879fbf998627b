"""API dependency graph: API nodes, parameter nodes, producer and consumer edges.

Parameter nodes are keyed by the base nominal path of a consumer slot (all
reference/pointer/Option/Result layers stripped); the exact adaptation from a
producer's return type to a particular slot lives on the producer edge chain.

Sequence validity is existential over binding choices. It is tracked as a set
of *availability states*: multisets of value types still owned by some
variable after a prefix has executed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain as iter_chain
from typing import Iterable, Sequence

from .api_model import (
    ApiFunction,
    ApiSpec,
    CallChain,
    ExclusiveRef,
    TypeClass,
    TypeExpr,
    base_nominal,
    classify_type,
    infer_call_chain,
)
from .config import GenerationConfig
from .ownership import binding_moves

State = tuple[int, ...]  # sorted multiset of value-type ids
EMPTY_STATE: State = ()


@dataclass(frozen=True)
class Slot:
    index: int
    type: TypeExpr
    type_class: TypeClass
    base: str | None

    @property
    def is_primitive(self) -> bool:
        return self.type_class in (TypeClass.PRIMITIVE_FIXED, TypeClass.PRIMITIVE_DYNAMIC)

    @property
    def is_dynamic(self) -> bool:
        return self.type_class is TypeClass.PRIMITIVE_DYNAMIC

    @property
    def needs_value(self) -> bool:
        return self.type_class is TypeClass.NON_PRIMITIVE

    @property
    def satisfiable(self) -> bool:
        # Non-primitive slots over a primitive base (Option<u8>, &mut u8, ...) have
        # no parameter node and so can never be fed.
        return self.type_class is not TypeClass.UNSUPPORTED and (
            self.is_primitive or self.base is not None)


@dataclass(frozen=True)
class ApiNode:
    function: ApiFunction
    slots: tuple[Slot, ...]
    is_start: bool
    is_end: bool
    mutates_param_indices: frozenset[int]
    unreachable: bool

    @property
    def id(self) -> str:
        return self.function.id

    @property
    def value_slots(self) -> tuple[Slot, ...]:
        return tuple(s for s in self.slots if s.needs_value)

    @property
    def primitive_slots(self) -> tuple[Slot, ...]:
        return tuple(s for s in self.slots if s.is_primitive)


@dataclass(frozen=True)
class ParamNode:
    base_path: str
    concrete_forms: frozenset[TypeExpr]


@dataclass(frozen=True)
class ProducerEdge:
    source: str  # function id
    target: str  # parameter node base path
    chain: CallChain

    @property
    def key(self) -> tuple[str, str]:
        return (self.source, self.target)


@dataclass(frozen=True)
class ConsumerEdge:
    source: str  # parameter node base path
    target: str  # function id
    weight: int
    slots: tuple[tuple[int, TypeExpr], ...]


def _classify_function(fn: ApiFunction) -> ApiNode:
    slots = tuple(
        Slot(i, t, classify_type(t), base_nominal(t)) for i, t in enumerate(fn.params)
    )
    mutates = frozenset(
        s.index for s in slots
        if isinstance(s.type, ExclusiveRef)
        and classify_type(s.type.inner) is TypeClass.NON_PRIMITIVE
    )
    is_start = not any(s.type_class is TypeClass.NON_PRIMITIVE for s in slots)
    ret_primitive = fn.ret is None or classify_type(fn.ret) in (
        TypeClass.PRIMITIVE_FIXED, TypeClass.PRIMITIVE_DYNAMIC)
    return ApiNode(
        function=fn,
        slots=slots,
        is_start=is_start,
        is_end=ret_primitive and not mutates,
        mutates_param_indices=mutates,
        unreachable=not all(s.satisfiable for s in slots),
    )


class DependencyGraph:
    """Immutable dependency graph built by :func:`build_graph`."""

    def __init__(self, spec: ApiSpec, config: GenerationConfig) -> None:
        self.spec = spec
        self.config = config
        self.api_nodes: dict[str, ApiNode] = {}
        for fn in spec.functions:
            self.api_nodes[fn.id] = _classify_function(fn)

        forms: dict[str, set[TypeExpr]] = {}
        for node in self.api_nodes.values():
            for s in node.value_slots:
                if s.base is not None:
                    forms.setdefault(s.base, set()).add(s.type)
        self.param_nodes: dict[str, ParamNode] = {
            base: ParamNode(base, frozenset(forms[base])) for base in sorted(forms)
        }

        self.producer_edges: dict[tuple[str, str], ProducerEdge] = {}
        for node in self.api_nodes.values():
            ret = node.function.ret
            if ret is None:
                continue
            base = base_nominal(ret)
            if base is None or base not in self.param_nodes:
                continue
            best: CallChain | None = None
            for form in sorted(self.param_nodes[base].concrete_forms, key=str):
                c = self.chain(ret, form)
                if c is not None and (best is None or (len(c), c) < (len(best), best)):
                    best = c
            if best is not None:
                self.producer_edges[(node.id, base)] = ProducerEdge(node.id, base, best)

        self.consumer_edges: dict[tuple[str, str], ConsumerEdge] = {}
        for node in self.api_nodes.values():
            per_base: dict[str, list[tuple[int, TypeExpr]]] = {}
            for s in node.value_slots:
                if s.base is not None:
                    per_base.setdefault(s.base, []).append((s.index, s.type))
            for base, slots in per_base.items():
                self.consumer_edges[(base, node.id)] = ConsumerEdge(
                    base, node.id, len(slots), tuple(slots))

        # Value types that can ever be bound, interned to small ints for states.
        self._value_type_ids: dict[TypeExpr, int] = {}
        self._value_types: list[TypeExpr] = []
        self.produced_type: dict[str, int | None] = {}
        for node in self.api_nodes.values():
            ret = node.function.ret
            if ret is not None and (node.id, base_nominal(ret)) in self.producer_edges:
                if ret not in self._value_type_ids:
                    self._value_type_ids[ret] = len(self._value_types)
                    self._value_types.append(ret)
                self.produced_type[node.id] = self._value_type_ids[ret]
            else:
                self.produced_type[node.id] = None

        # Per slot: compatible value-type ids and whether binding moves them.
        self._slot_options: dict[str, tuple[tuple[tuple[int, bool], ...], ...]] = {}
        for node in self.api_nodes.values():
            per_slot = []
            for s in node.value_slots:
                opts = []
                for tid, vt in enumerate(self._value_types):
                    c = self.chain(vt, s.type)
                    if c is not None:
                        opts.append((tid, binding_moves(vt, c)))
                per_slot.append(tuple(opts))
            self._slot_options[node.id] = tuple(per_slot)

    # -- queries ------------------------------------------------------------

    def chain(self, producer: TypeExpr, consumer: TypeExpr) -> CallChain | None:
        return infer_call_chain(producer, consumer, self.config.max_chain_depth,
                                self.config.allow_pointer_deref)

    def node(self, function_id: str) -> ApiNode:
        return self.api_nodes[function_id]

    def value_type(self, type_id: int) -> TypeExpr:
        return self._value_types[type_id]

    def produces(self, function_id: str) -> bool:
        return self.produced_type[function_id] is not None

    def producer_edge_of(self, function_id: str) -> ProducerEdge | None:
        ret = self.api_nodes[function_id].function.ret
        if ret is None:
            return None
        return self.producer_edges.get((function_id, base_nominal(ret)))

    def can_feed(self, producer_id: str, consumer_id: str) -> bool:
        """Type-level check: can some slot of ``consumer_id`` take ``producer_id``'s value?"""
        tid = self.produced_type[producer_id]
        if tid is None:
            return False
        return any(tid == opt for opts in self._slot_options[consumer_id] for opt, _ in opts)

    # -- availability states ----------------------------------------------

    def apply_call(self, state: State, function_id: str) -> set[State]:
        """All availability states reachable by executing one call from ``state``."""
        node = self.api_nodes[function_id]
        if node.unreachable:
            return set()
        options = self._slot_options[function_id]
        counts: dict[int, int] = {}
        for tid in state:
            counts[tid] = counts.get(tid, 0) + 1
        results: set[State] = set()
        used: dict[int, int] = {}
        moved: dict[int, int] = {}

        def assign(i: int) -> None:
            if i == len(options):
                remaining = []
                for tid, n in counts.items():
                    remaining.extend([tid] * (n - moved.get(tid, 0)))
                produced = self.produced_type[function_id]
                if produced is not None:
                    remaining.append(produced)
                results.add(tuple(sorted(remaining)))
                return
            for tid, moves in options[i]:
                # Every slot in one call binds a distinct variable.
                if used.get(tid, 0) >= counts.get(tid, 0):
                    continue
                used[tid] = used.get(tid, 0) + 1
                if moves:
                    moved[tid] = moved.get(tid, 0) + 1
                assign(i + 1)
                used[tid] -= 1
                if moves:
                    moved[tid] -= 1

        assign(0)
        return results

    def states_after(self, calls: Sequence[str]) -> set[State]:
        states = {EMPTY_STATE}
        for fid in calls:
            states = set(iter_chain.from_iterable(self.apply_call(s, fid) for s in states))
            if not states:
                break
        return states

    # -- export ---------------------------------------------------------------

    def to_dot(self) -> str:
        """Graphviz rendering with byte-stable ordering."""
        lines = ["digraph api_dependencies {"]
        for fid in sorted(self.api_nodes):
            node = self.api_nodes[fid]
            flags = [f for f, on in (("start", node.is_start), ("end", node.is_end)) if on]
            label = fid + (f" [{','.join(flags)}]" if flags else "")
            lines.append(f'  "fn:{fid}" [shape=box, label="{_dot_escape(label)}"];')
        for base in sorted(self.param_nodes):
            lines.append(f'  "par:{base}" [shape=ellipse, label="{_dot_escape(base)}"];')
        for key in sorted(self.producer_edges):
            e = self.producer_edges[key]
            steps = "+".join(s.name for s in e.chain)
            lines.append(f'  "fn:{e.source}" -> "par:{e.target}" [label="{steps}"];')
        for key in sorted(self.consumer_edges, key=lambda k: (k[1], k[0])):
            e = self.consumer_edges[key]
            lines.append(f'  "par:{e.source}" -> "fn:{e.target}" [label="{e.weight}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def build_graph(spec: ApiSpec, config: GenerationConfig | None = None) -> DependencyGraph:
    return DependencyGraph(spec, config or GenerationConfig())


def reachability_test(graph: DependencyGraph, prefix: Sequence[str], candidate: str) -> bool:
    """Can ``candidate`` be called after ``prefix`` with every value slot bound?"""
    node = graph.node(candidate)
    if node.unreachable:
        return False
    if node.is_start:
        return True
    return any(graph.apply_call(s, candidate) for s in graph.states_after(prefix))


def validate_sequence(graph: DependencyGraph, seq: Iterable[str]) -> bool:
    calls = list(seq)
    if not calls:
        return False
    first = graph.node(calls[0])
    if not first.is_start or first.unreachable:
        return False
    return bool(graph.states_after(calls))
