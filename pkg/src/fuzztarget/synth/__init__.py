"""Plan, lay out and render fuzz-target programs for selected sequences."""

from .layout import InputLayout, decode_buffer, plan_input_layout, split_remainder
from .plan import (
    PrimitiveSlot,
    ProgramPlan,
    Statement,
    VariableBinding,
    check_reference_exclusivity,
    check_use_after_move,
    plan_program,
)
from .render import RendererConfig, RustRenderer, render_target, target_file_name

__all__ = [
    "InputLayout", "PrimitiveSlot", "ProgramPlan", "RendererConfig", "RustRenderer",
    "Statement", "VariableBinding", "check_reference_exclusivity", "check_use_after_move",
    "decode_buffer", "plan_input_layout", "plan_program", "render_target",
    "split_remainder", "target_file_name",
]
