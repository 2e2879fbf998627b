"""Byte-buffer layout for primitive inputs, plus a Python reference decoder.

Fixed-width slots are packed from offset 0 in plan order. Whatever is left
is split between the dynamic-length slots: with ``r`` remaining bytes and
``d`` slots each gets ``r // d`` bytes and the first ``r % d`` get one more.
The decoder mirrors the templates emitted by the Rust renderer byte for byte.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Any

from ..api_model import PrimitiveKind
from .plan import ProgramPlan

CHAR_SPACE = 0x110000 - 0x800  # Unicode scalar values
SURROGATE_START = 0xD800
SURROGATE_LEN = 0x800

_STRUCT_FORMATS = {
    PrimitiveKind.U8: "<B", PrimitiveKind.U16: "<H", PrimitiveKind.U32: "<I",
    PrimitiveKind.U64: "<Q", PrimitiveKind.USIZE: "<Q",
    PrimitiveKind.I8: "<b", PrimitiveKind.I16: "<h", PrimitiveKind.I32: "<i",
    PrimitiveKind.I64: "<q", PrimitiveKind.ISIZE: "<q",
    PrimitiveKind.F32: "<f", PrimitiveKind.F64: "<d",
}


@dataclass(frozen=True)
class FixedSlot:
    slot_id: int
    kind: PrimitiveKind
    offset: int
    width: int


@dataclass(frozen=True)
class DynamicSlot:
    slot_id: int
    kind: PrimitiveKind


@dataclass(frozen=True)
class InputLayout:
    fixed_slots: tuple[FixedSlot, ...]
    dynamic_slots: tuple[DynamicSlot, ...]
    min_buffer_len: int

    @property
    def fixed_len(self) -> int:
        return sum(s.width for s in self.fixed_slots)

    def spans(self, buffer_len: int) -> dict[int, tuple[int, int]]:
        """Byte span ``[start, end)`` of every slot for a buffer of ``buffer_len`` bytes."""
        if buffer_len < self.min_buffer_len:
            raise ValueError(f"buffer of {buffer_len} bytes is shorter than {self.min_buffer_len}")
        out = {s.slot_id: (s.offset, s.offset + s.width) for s in self.fixed_slots}
        pos = self.fixed_len
        for slot, size in zip(self.dynamic_slots,
                              split_remainder(buffer_len - pos, len(self.dynamic_slots))):
            out[slot.slot_id] = (pos, pos + size)
            pos += size
        return out


def split_remainder(remaining: int, count: int) -> list[int]:
    if count == 0:
        return []
    share, extra = divmod(remaining, count)
    return [share + (1 if i < extra else 0) for i in range(count)]


def plan_input_layout(plan: ProgramPlan) -> InputLayout:
    fixed = []
    dynamic = []
    offset = 0
    for slot in plan.primitive_slots():
        if slot.kind.is_dynamic:
            dynamic.append(DynamicSlot(slot.slot_id, slot.kind))
        else:
            fixed.append(FixedSlot(slot.slot_id, slot.kind, offset, slot.kind.width_bytes))
            offset += slot.kind.width_bytes
    return InputLayout(tuple(fixed), tuple(dynamic), offset + len(dynamic))


def decode_char(raw: bytes) -> str:
    v = int.from_bytes(raw, "little") % CHAR_SPACE
    if v >= SURROGATE_START:
        v += SURROGATE_LEN
    return chr(v)


def decode_value(kind: PrimitiveKind, raw: bytes) -> Any:
    """Decode one slot; raises UnicodeDecodeError for invalid UTF-8 strings."""
    if kind is PrimitiveKind.BOOL:
        return bool(raw[0] & 1)
    if kind is PrimitiveKind.CHAR:
        return decode_char(raw)
    if kind is PrimitiveKind.UTF8_STRING:
        return raw.decode("utf-8")
    if kind is PrimitiveKind.BYTE_SEQUENCE:
        return bytes(raw)
    return struct.unpack(_STRUCT_FORMATS[kind], raw)[0]


def decode_buffer(layout: InputLayout, data: bytes) -> dict[int, Any] | None:
    """Values per slot id, or None where the generated target would exit early."""
    if len(data) < layout.min_buffer_len:
        return None
    kinds = {s.slot_id: s.kind for s in layout.fixed_slots}
    kinds.update({s.slot_id: s.kind for s in layout.dynamic_slots})
    out = {}
    for slot_id, (start, end) in layout.spans(len(data)).items():
        try:
            out[slot_id] = decode_value(kinds[slot_id], data[start:end])
        except UnicodeDecodeError:
            return None
    return out
