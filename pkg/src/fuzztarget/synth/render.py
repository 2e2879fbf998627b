"""Source rendering of planned fuzz targets.

Only a Rust renderer ships here. Other ecosystems plug in by implementing
:class:`TargetRenderer` over the same plan and layout objects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Protocol

from ..api_model import CallStep, PrimitiveKind, SharedRef
from ..errors import UnsupportedPrimitiveError
from .layout import InputLayout
from .plan import PrimitiveSlot, ProgramPlan, VariableBinding, var_name

_FIXED_INT_KINDS = {
    PrimitiveKind.U8: "u8", PrimitiveKind.U16: "u16", PrimitiveKind.U32: "u32",
    PrimitiveKind.U64: "u64", PrimitiveKind.USIZE: "usize",
    PrimitiveKind.I8: "i8", PrimitiveKind.I16: "i16", PrimitiveKind.I32: "i32",
    PrimitiveKind.I64: "i64", PrimitiveKind.ISIZE: "isize",
    PrimitiveKind.F32: "f32", PrimitiveKind.F64: "f64",
}


def _int_decoder(kind: PrimitiveKind) -> str:
    ty = _FIXED_INT_KINDS[kind]
    w = kind.width_bytes
    if kind is PrimitiveKind.USIZE or kind is PrimitiveKind.ISIZE:
        # Always 8 input bytes, independent of the target's pointer width.
        wide = "u64" if kind is PrimitiveKind.USIZE else "i64"
        return (
            f"fn _to_{ty}(data: &[u8], offset: usize) -> {ty} {{\n"
            f"    let mut b = [0u8; 8];\n"
            f"    b.copy_from_slice(&data[offset..offset + 8]);\n"
            f"    {wide}::from_le_bytes(b) as {ty}\n"
            f"}}\n"
        )
    return (
        f"fn _to_{ty}(data: &[u8], offset: usize) -> {ty} {{\n"
        f"    let mut b = [0u8; {w}];\n"
        f"    b.copy_from_slice(&data[offset..offset + {w}]);\n"
        f"    {ty}::from_le_bytes(b)\n"
        f"}}\n"
    )


_BOOL_DECODER = """\
fn _to_bool(data: &[u8], offset: usize) -> bool {
    data[offset] & 1 == 1
}
"""

_CHAR_DECODER = """\
fn _to_char(data: &[u8], offset: usize) -> char {
    let mut b = [0u8; 4];
    b.copy_from_slice(&data[offset..offset + 4]);
    let mut v = u32::from_le_bytes(b) % 0x10F800;
    if v >= 0xD800 {
        v += 0x800;
    }
    char::from_u32(v).unwrap()
}
"""

_SPAN_HELPER = """\
fn _dyn_span(len: usize, fixed: usize, count: usize, index: usize) -> (usize, usize) {
    let rest = len - fixed;
    let share = rest / count;
    let extra = rest % count;
    let start = fixed + index * share + index.min(extra);
    let size = share + if index < extra { 1 } else { 0 };
    (start, start + size)
}
"""

_STR_DECODER = """\
fn _to_str(data: &[u8], start: usize, end: usize) -> Option<&str> {
    std::str::from_utf8(&data[start..end]).ok()
}
"""

_BYTES_DECODER = """\
fn _to_slice(data: &[u8], start: usize, end: usize) -> &[u8] {
    &data[start..end]
}
"""

_MAIN = """\
fn main() {
    use std::io::Read;
    let mut data = Vec::new();
    match std::env::args().nth(1) {
        Some(path) => data = std::fs::read(path).expect("cannot read input file"),
        None => {
            std::io::stdin().read_to_end(&mut data).expect("cannot read stdin");
        }
    }
    fuzz_entry(&data);
}
"""


def decoder_template(kind: PrimitiveKind) -> str:
    if kind in _FIXED_INT_KINDS:
        return _int_decoder(kind)
    if kind is PrimitiveKind.BOOL:
        return _BOOL_DECODER
    if kind is PrimitiveKind.CHAR:
        return _CHAR_DECODER
    if kind is PrimitiveKind.UTF8_STRING:
        return _STR_DECODER
    if kind is PrimitiveKind.BYTE_SEQUENCE:
        return _BYTES_DECODER
    raise UnsupportedPrimitiveError(kind.label)


@dataclass(frozen=True)
class RendererConfig:
    crate_name: str | None = None  # defaults to the plan's library name
    supported_kinds: frozenset[PrimitiveKind] = field(default_factory=lambda: frozenset(PrimitiveKind))
    entry_name: str = "fuzz_entry"


class TargetRenderer(Protocol):
    extension: str

    def render(self, plan: ProgramPlan, layout: InputLayout) -> str: ...


def crate_ident(name: str) -> str:
    return re.sub(r"\W", "_", name.replace("-", "_"))


def _wrap(expr: str) -> str:
    if re.fullmatch(r"[\w:]+", expr) or (expr.startswith("(") and _balanced_outer(expr)):
        return expr
    return f"({expr})"


def _apply_step(expr: str, step: CallStep) -> str:
    if step is CallStep.DIRECT_CALL:
        return expr
    if step is CallStep.BORROWED_REF:
        return f"&{_wrap(expr)}"
    if step is CallStep.MUT_BORROWED_REF:
        return f"&mut {_wrap(expr)}"
    if step is CallStep.CONST_RAW_PTR:
        return f"(&{_wrap(expr)} as *const _)"
    if step is CallStep.MUT_RAW_PTR:
        return f"(&mut {_wrap(expr)} as *mut _)"
    if step is CallStep.DEREF_BORROWED_REF:
        return f"(*{_wrap(expr)})"
    if step is CallStep.DEREF_RAW_PTR:
        return f"(unsafe {{ *{_wrap(expr)} }})"
    if step is CallStep.UNWRAP_RESULT:
        return f"(match {expr} {{ Ok(v) => v, Err(_) => return }})"
    if step is CallStep.UNWRAP_OPTION:
        return f"(match {expr} {{ Some(v) => v, None => return }})"
    if step is CallStep.TO_OPTION:
        return f"Some({expr})"
    raise ValueError(step)


class RustRenderer:
    extension = "rs"

    def __init__(self, config: RendererConfig | None = None) -> None:
        self.config = config or RendererConfig()

    def render(self, plan: ProgramPlan, layout: InputLayout) -> str:
        cfg = self.config
        crate = crate_ident(cfg.crate_name or plan.library)
        kinds = [s.kind for s in layout.fixed_slots] + [s.kind for s in layout.dynamic_slots]
        for kind in kinds:
            if kind not in cfg.supported_kinds:
                raise UnsupportedPrimitiveError(kind.label)

        out = [
            f"// Fuzz target for {plan.library} {plan.version}: {' -> '.join(plan.sequence)}",
            "#![allow(unused_mut, unused_variables, unused_parens, unused_unsafe)]",
            "",
            f"extern crate {crate};",
            "",
        ]
        used = sorted(set(kinds), key=lambda k: list(PrimitiveKind).index(k))
        for kind in used:
            out.append(decoder_template(kind))
        if layout.dynamic_slots:
            out.append(_SPAN_HELPER)

        body = [f"    if data.len() < {layout.min_buffer_len} {{", "        return;", "    }"]
        for s in layout.fixed_slots:
            ty = "bool" if s.kind is PrimitiveKind.BOOL else (
                "char" if s.kind is PrimitiveKind.CHAR else _FIXED_INT_KINDS[s.kind])
            body.append(f"    let _p{s.slot_id} = _to_{ty}(data, {s.offset});")
        n_dyn = len(layout.dynamic_slots)
        for i, s in enumerate(layout.dynamic_slots):
            span = f"_dyn_span(data.len(), {layout.fixed_len}, {n_dyn}, {i})"
            body.append(f"    let (_s{s.slot_id}, _e{s.slot_id}) = {span};")
            if s.kind is PrimitiveKind.UTF8_STRING:
                body.append(f"    let _p{s.slot_id} = match _to_str(data, _s{s.slot_id}, _e{s.slot_id}) {{")
                body.append("        Some(v) => v,")
                body.append("        None => return,")
                body.append("    };")
            else:
                body.append(f"    let _p{s.slot_id} = _to_slice(data, _s{s.slot_id}, _e{s.slot_id});")

        for i, st in enumerate(plan.statements):
            args = []
            for b in st.arg_bindings:
                if isinstance(b, PrimitiveSlot):
                    args.append(self._primitive_arg(b))
                else:
                    args.append(self._variable_arg(b))
            call = f"{self._call_path(st.call.path, crate)}({', '.join(args)})"
            if st.result_var is None:
                body.append(f"    {call};")
            else:
                mut = "mut " if st.result_var.needs_mut else ""
                body.append(f"    let {mut}{st.result_var.name} = {call};")

        out.append(f"fn {cfg.entry_name}(data: &[u8]) {{")
        out.extend(body)
        out.append("}")
        out.append("")
        out.append(_MAIN.replace("fuzz_entry", cfg.entry_name))
        return "\n".join(out)

    @staticmethod
    def _call_path(path: str, crate: str) -> str:
        head, sep, rest = path.partition("::")
        if sep and crate_ident(head) == crate:
            return f"{crate}::{rest}"
        return path

    @staticmethod
    def _primitive_arg(b: PrimitiveSlot) -> str:
        name = f"_p{b.slot_id}"
        borrowed = isinstance(b.type, SharedRef)
        if b.kind is PrimitiveKind.UTF8_STRING:
            return name if borrowed else f"{name}.to_string()"
        if b.kind is PrimitiveKind.BYTE_SEQUENCE:
            return name if borrowed else f"{name}.to_vec()"
        return name

    @staticmethod
    def _variable_arg(b: VariableBinding) -> str:
        expr = var_name(b.stmt_index)
        for step in b.chain:
            expr = _apply_step(expr, step)
        if expr.startswith("(") and expr.endswith(")") and _balanced_outer(expr):
            expr = expr[1:-1]
        return expr


def _balanced_outer(expr: str) -> bool:
    depth = 0
    for i, ch in enumerate(expr):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0 and i != len(expr) - 1:
                return False
    return True


def render_target(plan: ProgramPlan, layout: InputLayout,
                  renderer_config: RendererConfig | None = None) -> str:
    return RustRenderer(renderer_config).render(plan, layout)


def target_file_name(index: int, first_api_id: str, extension: str = "rs") -> str:
    return f"target_{index}_{re.sub(r'[^A-Za-z0-9_]', '_', first_api_id)}.{extension}"
