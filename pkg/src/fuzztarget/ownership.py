"""Move/copy classification of a variable bound through a call chain.

The policy is deliberately conservative: a binding is treated as a copy only
for the combinations listed here, and as a move otherwise. Extend
``NON_MOVING_FIRST_STEPS`` or ``COPY_VARIABLE_TYPES`` to whitelist more cases.
"""

from __future__ import annotations

from .api_model import (
    CallChain,
    CallStep,
    ConstRawPointer,
    MutRawPointer,
    SharedRef,
    TypeClass,
    TypeExpr,
    classify_type,
)

# Chains starting by taking a reference or pointer leave the variable in place.
NON_MOVING_FIRST_STEPS = frozenset({
    CallStep.BORROWED_REF,
    CallStep.MUT_BORROWED_REF,
    CallStep.CONST_RAW_PTR,
    CallStep.MUT_RAW_PTR,
})

# Variable types that are copied when passed through a direct call.
COPY_VARIABLE_TYPES = (SharedRef, ConstRawPointer, MutRawPointer)

EXCLUSIVE_FIRST_STEPS = frozenset({CallStep.MUT_BORROWED_REF, CallStep.MUT_RAW_PTR})


def binding_moves(var_type: TypeExpr, chain: CallChain) -> bool:
    if chain[0] in NON_MOVING_FIRST_STEPS:
        return False
    if chain == (CallStep.DIRECT_CALL,):
        if isinstance(var_type, COPY_VARIABLE_TYPES):
            return False
        if classify_type(var_type) is TypeClass.PRIMITIVE_FIXED:
            return False
    return True


def binding_is_exclusive(chain: CallChain) -> bool:
    """True when the binding takes an exclusive borrow of the variable itself."""
    return chain[0] in EXCLUSIVE_FIRST_STEPS
