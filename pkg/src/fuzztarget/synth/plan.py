"""Program plans: statements with resolved argument bindings and ownership flags."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..api_model import ApiFunction, CallChain, CallStep, PrimitiveKind, TypeExpr, primitive_kind, replay_chain
from ..bindings import solve_bindings
from ..depgraph import DependencyGraph
from ..errors import InternalBindingError
from ..ownership import binding_is_exclusive, binding_moves
from ..seqgen import ApiSequence

UNWRAP_STEPS = (CallStep.UNWRAP_RESULT, CallStep.UNWRAP_OPTION)


@dataclass(frozen=True)
class VariableBinding:
    stmt_index: int
    chain: CallChain


@dataclass(frozen=True)
class PrimitiveSlot:
    slot_id: int
    kind: PrimitiveKind
    type: TypeExpr


ArgBinding = Union[VariableBinding, PrimitiveSlot]


@dataclass(frozen=True)
class ResultVar:
    name: str
    needs_mut: bool


@dataclass(frozen=True)
class UnwrapStep:
    """An ``Option``/``Result`` unwrap at argument ``slot_index`` that exits early on failure."""

    slot_index: int
    position: int  # index of the step within the binding chain
    step: CallStep


@dataclass(frozen=True)
class Statement:
    call: ApiFunction
    arg_bindings: tuple[ArgBinding, ...]
    result_var: ResultVar | None
    unwrap_steps: tuple[UnwrapStep, ...]


@dataclass(frozen=True)
class ProgramPlan:
    library: str
    version: str
    sequence: tuple[str, ...]
    statements: tuple[Statement, ...]

    def primitive_slots(self) -> list[PrimitiveSlot]:
        return [b for st in self.statements for b in st.arg_bindings
                if isinstance(b, PrimitiveSlot)]


def var_name(stmt_index: int) -> str:
    return f"_v{stmt_index}"


def plan_program(seq: ApiSequence | tuple[str, ...], graph: DependencyGraph) -> ProgramPlan:
    """Resolve every argument of every call in ``seq``.

    Value slots are bound by the deterministic policy of
    :func:`fuzztarget.bindings.solve_bindings`; primitive slots become
    numbered fuzzer-input slots in statement-then-argument order.
    """
    calls = tuple(seq.calls if isinstance(seq, ApiSequence) else seq)
    assignment = solve_bindings(graph, calls)
    if assignment is None:
        raise InternalBindingError(f"cannot bind sequence {' -> '.join(calls)}")

    exclusive_uses: set[int] = set()
    for stmt in assignment:
        for b in stmt:
            if binding_is_exclusive(b.chain):
                exclusive_uses.add(b.source)

    statements = []
    next_slot = 0
    for i, fid in enumerate(calls):
        node = graph.node(fid)
        by_slot = {b.slot_index: b for b in assignment[i]}
        args: list[ArgBinding] = []
        unwraps: list[UnwrapStep] = []
        for slot in node.slots:
            if slot.is_primitive:
                args.append(PrimitiveSlot(next_slot, primitive_kind(slot.type), slot.type))
                next_slot += 1
                continue
            b = by_slot.get(slot.index)
            if b is None:
                raise InternalBindingError(f"slot {slot.index} of {fid} left unbound")
            args.append(VariableBinding(b.source, b.chain))
            unwraps.extend(UnwrapStep(slot.index, pos, step)
                           for pos, step in enumerate(b.chain) if step in UNWRAP_STEPS)
        result = None
        if node.function.ret is not None:
            result = ResultVar(var_name(i), i in exclusive_uses)
        statements.append(Statement(node.function, tuple(args), result, tuple(unwraps)))
    return ProgramPlan(graph.spec.library_name, graph.spec.library_version, calls,
                       tuple(statements))


# ---------------------------------------------------------------------------
# Static checkers. They recompute ownership from the plan alone.

def check_use_after_move(plan: ProgramPlan) -> list[str]:
    """Bindings that read a moved, missing or not-yet-defined variable."""
    problems = []
    moved: set[int] = set()
    for i, st in enumerate(plan.statements):
        moved_here = set()
        for pos, b in enumerate(st.arg_bindings):
            if not isinstance(b, VariableBinding):
                continue
            where = f"statement {i} ({st.call.id}) argument {pos}"
            if b.stmt_index >= i:
                problems.append(f"{where}: binds variable of statement {b.stmt_index} before it exists")
                continue
            src = plan.statements[b.stmt_index]
            if src.result_var is None or src.call.ret is None:
                problems.append(f"{where}: statement {b.stmt_index} has no result variable")
                continue
            if b.stmt_index in moved:
                problems.append(f"{where}: uses {src.result_var.name} after it was moved")
            if replay_chain(b.chain, src.call.ret) != st.call.params[pos]:
                problems.append(f"{where}: chain does not produce the parameter type")
            if binding_moves(src.call.ret, b.chain):
                moved_here.add(b.stmt_index)
        moved |= moved_here
    return problems


def check_reference_exclusivity(plan: ProgramPlan) -> list[str]:
    """Statements that mix an exclusive borrow of a variable with any other use of it,
    and ``needs_mut`` flags that disagree with the exclusive borrows taken."""
    problems = []
    exclusive_targets: set[int] = set()
    for i, st in enumerate(plan.statements):
        uses: dict[int, list[CallChain]] = {}
        for b in st.arg_bindings:
            if isinstance(b, VariableBinding):
                uses.setdefault(b.stmt_index, []).append(b.chain)
        for src, chains in uses.items():
            if any(binding_is_exclusive(c) for c in chains):
                exclusive_targets.add(src)
                if len(chains) > 1:
                    problems.append(
                        f"statement {i} ({st.call.id}): variable of statement {src} borrowed "
                        "exclusively alongside another use")
    for i, st in enumerate(plan.statements):
        if st.result_var is not None and st.result_var.needs_mut != (i in exclusive_targets):
            problems.append(f"statement {i} ({st.call.id}): needs_mut flag is inconsistent")
    return problems
