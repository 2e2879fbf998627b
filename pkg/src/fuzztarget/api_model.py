"""Subject-language type grammar, API-spec ingestion and call-chain inference.

Types follow a small Rust-flavoured grammar: primitives, nominal paths,
shared/exclusive references, raw pointers, ``Option`` and ``Result``.
Anything outside the grammar is kept as :class:`Unsupported` so the API it
belongs to stays visible (and uncovered) instead of disappearing.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Union

from .errors import DuplicateIdError, ParseError


class PrimitiveKind(enum.Enum):
    BOOL = ("bool", 1)
    U8 = ("u8", 1)
    U16 = ("u16", 2)
    U32 = ("u32", 4)
    U64 = ("u64", 8)
    USIZE = ("usize", 8)
    I8 = ("i8", 1)
    I16 = ("i16", 2)
    I32 = ("i32", 4)
    I64 = ("i64", 8)
    ISIZE = ("isize", 8)
    F32 = ("f32", 4)
    F64 = ("f64", 8)
    CHAR = ("char", 4)
    UTF8_STRING = ("utf8-string", None)
    BYTE_SEQUENCE = ("byte-sequence", None)

    def __init__(self, label: str, width: int | None) -> None:
        self.label = label
        self.width_bytes = width

    @property
    def is_dynamic(self) -> bool:
        return self.width_bytes is None


# TypeString spelling of each primitive kind.
PRIMITIVE_TOKENS: dict[str, PrimitiveKind] = {
    k.label: k for k in PrimitiveKind if not k.is_dynamic
}
PRIMITIVE_TOKENS["str"] = PrimitiveKind.UTF8_STRING
PRIMITIVE_TOKENS["bytes"] = PrimitiveKind.BYTE_SEQUENCE
# Owned std spellings accepted on input.
PRIMITIVE_ALIASES = {
    "String": PrimitiveKind.UTF8_STRING,
    "std::string::String": PrimitiveKind.UTF8_STRING,
}
_TOKEN_OF_KIND = {
    PrimitiveKind.UTF8_STRING: "str",
    PrimitiveKind.BYTE_SEQUENCE: "bytes",
}


class UnsupportedTag(str, enum.Enum):
    GENERIC = "generic"
    TRAIT_OBJECT = "trait-object"
    CLOSURE = "closure"
    ASYNC = "async"
    STATIC_STRING = "static-string"
    FIXED_ARRAY = "fixed-array"
    OTHER = "other"


@dataclass(frozen=True)
class Primitive:
    kind: PrimitiveKind

    def __str__(self) -> str:
        return _TOKEN_OF_KIND.get(self.kind, self.kind.label)


@dataclass(frozen=True)
class Nominal:
    path: str

    def __str__(self) -> str:
        return self.path


@dataclass(frozen=True)
class SharedRef:
    inner: "TypeExpr"

    def __str__(self) -> str:
        return f"&{self.inner}"


@dataclass(frozen=True)
class ExclusiveRef:
    inner: "TypeExpr"

    def __str__(self) -> str:
        return f"&mut {self.inner}"


@dataclass(frozen=True)
class ConstRawPointer:
    inner: "TypeExpr"

    def __str__(self) -> str:
        return f"*const {self.inner}"


@dataclass(frozen=True)
class MutRawPointer:
    inner: "TypeExpr"

    def __str__(self) -> str:
        return f"*mut {self.inner}"


@dataclass(frozen=True)
class OptionOf:
    inner: "TypeExpr"

    def __str__(self) -> str:
        return f"Option<{self.inner}>"


@dataclass(frozen=True)
class ResultOf:
    ok: "TypeExpr"
    err: "TypeExpr"

    def __str__(self) -> str:
        return f"Result<{self.ok}, {self.err}>"


@dataclass(frozen=True)
class Unsupported:
    tag: UnsupportedTag
    raw: str

    def __str__(self) -> str:
        return self.raw


TypeExpr = Union[Primitive, Nominal, SharedRef, ExclusiveRef, ConstRawPointer,
                 MutRawPointer, OptionOf, ResultOf, Unsupported]

_WRAPPERS = (SharedRef, ExclusiveRef, ConstRawPointer, MutRawPointer, OptionOf)


def children(t: TypeExpr) -> tuple[TypeExpr, ...]:
    if isinstance(t, _WRAPPERS):
        return (t.inner,)
    if isinstance(t, ResultOf):
        return (t.ok, t.err)
    return ()


def _first_unsupported(t: TypeExpr) -> Unsupported | None:
    if isinstance(t, Unsupported):
        return t
    for c in children(t):
        found = _first_unsupported(c)
        if found is not None:
            return found
    return None


def normalize(t: TypeExpr) -> TypeExpr:
    """Lift any nested unsupported part to the top of the expression."""
    if isinstance(t, Unsupported):
        return t
    bad = _first_unsupported(t)
    if bad is None:
        return t
    return Unsupported(bad.tag, str(t))


# ---------------------------------------------------------------------------
# TypeString parsing

class _Unsupported(Exception):
    def __init__(self, tag: UnsupportedTag) -> None:
        self.tag = tag


_TOKEN_RE = re.compile(r"\s*(::|->|'[A-Za-z_]\w*|[A-Za-z_]\w*|\d+|[&*<>,\[\];()!?+=])")
_GENERIC_NAME_RE = re.compile(r"^[A-Z]$")
_CLOSURE_TRAITS = {"Fn", "FnMut", "FnOnce"}
_OPTION_PATHS = {"Option", "std::option::Option", "core::option::Option"}
_RESULT_PATHS = {"Result", "std::result::Result", "core::result::Result"}
_BYTE_VEC_PATHS = {"Vec", "std::vec::Vec", "alloc::vec::Vec"}


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _Unsupported(UnsupportedTag.OTHER)
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _TypeParser:
    def __init__(self, tokens: list[str], generics: frozenset[str]) -> None:
        self.tokens = tokens
        self.pos = 0
        self.generics = generics

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise _Unsupported(UnsupportedTag.OTHER)
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.take() != tok:
            raise _Unsupported(UnsupportedTag.OTHER)

    def parse(self) -> TypeExpr:
        tok = self.peek()
        if tok == "&":
            self.take()
            lifetime = None
            if self.peek() is not None and self.peek().startswith("'"):
                lifetime = self.take()
            if self.peek() == "mut":
                self.take()
                return ExclusiveRef(self.parse())
            inner = self.parse()
            if lifetime == "'static" and inner == Primitive(PrimitiveKind.UTF8_STRING):
                raise _Unsupported(UnsupportedTag.STATIC_STRING)
            return SharedRef(inner)
        if tok == "*":
            self.take()
            qual = self.take()
            if qual == "const":
                return ConstRawPointer(self.parse())
            if qual == "mut":
                return MutRawPointer(self.parse())
            raise _Unsupported(UnsupportedTag.OTHER)
        if tok == "[":
            self.take()
            inner = self.parse()
            if self.peek() == ";":
                raise _Unsupported(UnsupportedTag.FIXED_ARRAY)
            self.expect("]")
            if inner == Primitive(PrimitiveKind.U8):
                return Primitive(PrimitiveKind.BYTE_SEQUENCE)
            raise _Unsupported(UnsupportedTag.OTHER)
        if tok == "dyn":
            raise _Unsupported(UnsupportedTag.TRAIT_OBJECT)
        if tok == "async":
            raise _Unsupported(UnsupportedTag.ASYNC)
        if tok == "impl":
            rest = set(self.tokens[self.pos:])
            if rest & _CLOSURE_TRAITS:
                raise _Unsupported(UnsupportedTag.CLOSURE)
            if "Future" in rest:
                raise _Unsupported(UnsupportedTag.ASYNC)
            raise _Unsupported(UnsupportedTag.GENERIC)
        if tok == "fn":
            raise _Unsupported(UnsupportedTag.CLOSURE)
        if tok is None or not (tok[0].isalpha() or tok[0] == "_"):
            raise _Unsupported(UnsupportedTag.OTHER)
        return self.parse_path()

    def parse_path(self) -> TypeExpr:
        parts = [self.take()]
        while self.peek() == "::":
            self.take()
            nxt = self.take()
            if not (nxt[0].isalpha() or nxt[0] == "_"):
                raise _Unsupported(UnsupportedTag.OTHER)
            parts.append(nxt)
        path = "::".join(parts)
        args: list[TypeExpr] = []
        if self.peek() == "<":
            self.take()
            args.append(self.parse())
            while self.peek() == ",":
                self.take()
                args.append(self.parse())
            self.expect(">")
        if parts[-1] in _CLOSURE_TRAITS:
            raise _Unsupported(UnsupportedTag.CLOSURE)
        if parts[-1] == "Future":
            raise _Unsupported(UnsupportedTag.ASYNC)
        if len(parts) == 1 and (path in self.generics or _GENERIC_NAME_RE.match(path)):
            raise _Unsupported(UnsupportedTag.GENERIC)
        if path == "Self":
            raise _Unsupported(UnsupportedTag.OTHER)
        if path in _OPTION_PATHS:
            if len(args) != 1:
                raise _Unsupported(UnsupportedTag.OTHER)
            return OptionOf(args[0])
        if path in _RESULT_PATHS:
            if len(args) != 2:
                raise _Unsupported(UnsupportedTag.OTHER)
            return ResultOf(args[0], args[1])
        if not args:
            if path in PRIMITIVE_TOKENS:
                return Primitive(PRIMITIVE_TOKENS[path])
            if path in PRIMITIVE_ALIASES:
                return Primitive(PRIMITIVE_ALIASES[path])
            return Nominal(path)
        if path in _BYTE_VEC_PATHS and args == [Primitive(PrimitiveKind.U8)]:
            return Primitive(PrimitiveKind.BYTE_SEQUENCE)
        # A concrete instantiation such as Vec<Token> is its own nominal type.
        return Nominal(f"{path}<{', '.join(str(a) for a in args)}>")


def parse_type(text: str, generics: frozenset[str] = frozenset()) -> TypeExpr:
    """Parse a TypeString. Never raises; unmodelled input becomes Unsupported."""
    raw = text.strip()
    try:
        tokens = _tokenize(raw)
        parser = _TypeParser(tokens, generics)
        t = parser.parse()
        if parser.peek() is not None:
            raise _Unsupported(UnsupportedTag.OTHER)
    except _Unsupported as exc:
        return Unsupported(exc.tag, raw)
    except RecursionError:
        return Unsupported(UnsupportedTag.OTHER, raw)
    return normalize(t)


def _parse_return(text: str | None, generics: frozenset[str]) -> TypeExpr | None:
    if text is None:
        return None
    if text.strip() in ("", "()"):
        return None
    return parse_type(text, generics)


# ---------------------------------------------------------------------------
# API spec

@dataclass(frozen=True)
class ApiFunction:
    id: str
    path: str
    params: tuple[TypeExpr, ...]
    ret: TypeExpr | None = None
    is_method: bool = False

    def __post_init__(self) -> None:
        if self.is_method and not self.params:
            raise ValueError(f"method {self.id!r} has no receiver parameter")


@dataclass(frozen=True)
class ApiSpec:
    library_name: str
    library_version: str
    functions: tuple[ApiFunction, ...] = field(default=())

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for fn in self.functions:
            if fn.id in seen:
                raise DuplicateIdError(fn.id)
            seen.add(fn.id)

    def function(self, function_id: str) -> ApiFunction:
        for fn in self.functions:
            if fn.id == function_id:
                return fn
        raise KeyError(function_id)


def _require(obj: dict, key: str, kind: type | tuple[type, ...], where: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", field=f"{where}.{key}")
    value = obj[key]
    if not isinstance(value, kind):
        raise ParseError(f"field {key!r} has the wrong type", field=f"{where}.{key}")
    return value


def parse_api_spec(text: str) -> ApiSpec:
    """Read an API-spec JSON document.

    Document-level problems (bad JSON, missing or mistyped fields, duplicate
    ids) reject the whole spec. A type string that does not parse only turns
    that one type into :class:`Unsupported`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object", field="$")
    library = _require(doc, "library", str, "$")
    version = _require(doc, "version", str, "$")
    raw_functions = _require(doc, "functions", list, "$")
    functions = []
    for i, raw in enumerate(raw_functions):
        where = f"$.functions[{i}]"
        if not isinstance(raw, dict):
            raise ParseError("function entry must be an object", field=where)
        fid = _require(raw, "id", str, where)
        path = _require(raw, "path", str, where)
        is_method = _require(raw, "is_method", bool, where)
        params = _require(raw, "params", list, where)
        if "ret" not in raw:
            raise ParseError("missing field 'ret'", field=f"{where}.ret")
        ret = raw["ret"]
        if ret is not None and not isinstance(ret, str):
            raise ParseError("field 'ret' has the wrong type", field=f"{where}.ret")
        if not all(isinstance(p, str) for p in params):
            raise ParseError("params must be type strings", field=f"{where}.params")
        generics = frozenset(raw.get("generics", ()))
        if is_method and not params:
            raise ParseError("method without receiver parameter", field=f"{where}.params")
        functions.append(ApiFunction(
            id=fid,
            path=path,
            params=tuple(parse_type(p, generics) for p in params),
            ret=_parse_return(ret, generics),
            is_method=is_method,
        ))
    return ApiSpec(library, version, tuple(functions))


def dump_api_spec(spec: ApiSpec) -> str:
    """Serialize back to the JSON schema accepted by :func:`parse_api_spec`."""
    doc = {
        "library": spec.library_name,
        "version": spec.library_version,
        "functions": [
            {
                "id": fn.id,
                "path": fn.path,
                "is_method": fn.is_method,
                "params": [str(p) for p in fn.params],
                "ret": None if fn.ret is None else str(fn.ret),
            }
            for fn in spec.functions
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Classification

class TypeClass(str, enum.Enum):
    PRIMITIVE_FIXED = "primitive-fixed"
    PRIMITIVE_DYNAMIC = "primitive-dynamic"
    NON_PRIMITIVE = "non-primitive"
    UNSUPPORTED = "unsupported"


def classify_type(t: TypeExpr) -> TypeClass:
    if isinstance(t, Unsupported):
        return TypeClass.UNSUPPORTED
    if isinstance(t, Primitive):
        return TypeClass.PRIMITIVE_DYNAMIC if t.kind.is_dynamic else TypeClass.PRIMITIVE_FIXED
    if isinstance(t, SharedRef) and isinstance(t.inner, Primitive) and t.inner.kind.is_dynamic:
        return TypeClass.PRIMITIVE_DYNAMIC
    return TypeClass.NON_PRIMITIVE


def is_primitive(t: TypeExpr) -> bool:
    return classify_type(t) in (TypeClass.PRIMITIVE_FIXED, TypeClass.PRIMITIVE_DYNAMIC)


def primitive_kind(t: TypeExpr) -> PrimitiveKind:
    """Kind of a primitive-classified type (``&str`` reports utf8-string)."""
    if isinstance(t, SharedRef):
        t = t.inner
    if not isinstance(t, Primitive):
        raise TypeError(f"{t} is not a primitive type")
    return t.kind


def base_nominal(t: TypeExpr) -> str | None:
    """Nominal path left after stripping reference, pointer, Option and Result layers."""
    while True:
        if isinstance(t, Nominal):
            return t.path
        if isinstance(t, _WRAPPERS):
            t = t.inner
        elif isinstance(t, ResultOf):
            t = t.ok
        else:
            return None


# ---------------------------------------------------------------------------
# Call chains

class CallStep(enum.IntEnum):
    """Adaptation steps between a produced value and a consumer slot.

    The integer value is the fixed preference order used to break ties
    between equally short chains.
    """

    DIRECT_CALL = 1
    BORROWED_REF = 2
    MUT_BORROWED_REF = 3
    CONST_RAW_PTR = 4
    MUT_RAW_PTR = 5
    DEREF_BORROWED_REF = 6
    DEREF_RAW_PTR = 7
    UNWRAP_RESULT = 8
    UNWRAP_OPTION = 9
    TO_OPTION = 10


CallChain = tuple[CallStep, ...]

IDENTITY: CallChain = (CallStep.DIRECT_CALL,)


def apply_step(step: CallStep, t: TypeExpr) -> TypeExpr | None:
    """Type obtained by applying ``step`` to a value of type ``t`` (None if inapplicable)."""
    if isinstance(t, Unsupported):
        return None
    if step is CallStep.DIRECT_CALL:
        return t
    if step is CallStep.BORROWED_REF:
        return SharedRef(t)
    if step is CallStep.MUT_BORROWED_REF:
        return ExclusiveRef(t)
    if step is CallStep.CONST_RAW_PTR:
        return ConstRawPointer(t)
    if step is CallStep.MUT_RAW_PTR:
        return MutRawPointer(t)
    if step is CallStep.DEREF_BORROWED_REF:
        return t.inner if isinstance(t, (SharedRef, ExclusiveRef)) else None
    if step is CallStep.DEREF_RAW_PTR:
        return t.inner if isinstance(t, (ConstRawPointer, MutRawPointer)) else None
    if step is CallStep.UNWRAP_RESULT:
        return t.ok if isinstance(t, ResultOf) else None
    if step is CallStep.UNWRAP_OPTION:
        return t.inner if isinstance(t, OptionOf) else None
    if step is CallStep.TO_OPTION:
        return OptionOf(t)
    raise ValueError(step)


def replay_chain(chain: CallChain, t: TypeExpr) -> TypeExpr | None:
    for step in chain:
        t = apply_step(step, t)
        if t is None:
            return None
    return t


def allowed_steps(consumer: TypeExpr, allow_pointer_deref: bool = False) -> tuple[CallStep, ...]:
    """Steps the chain search may use when targeting ``consumer``.

    ``DirectCall`` only ever appears alone (identity); ``ToOption`` is only
    tried when the consumer is itself an ``Option``; raw-pointer dereference
    is opt-in.
    """
    steps = []
    for step in CallStep:
        if step is CallStep.DIRECT_CALL:
            continue
        if step is CallStep.TO_OPTION and not isinstance(consumer, OptionOf):
            continue
        if step is CallStep.DEREF_RAW_PTR and not allow_pointer_deref:
            continue
        steps.append(step)
    return tuple(steps)


def _depth(t: TypeExpr) -> int:
    return 1 + max((_depth(c) for c in children(t)), default=0)


@lru_cache(maxsize=65536)
def infer_call_chain(producer: TypeExpr, consumer: TypeExpr, max_depth: int = 2,
                     allow_pointer_deref: bool = False) -> CallChain | None:
    """Shortest chain of adaptation steps turning ``producer`` into ``consumer``.

    Ties on length go to the chain whose first differing step comes earlier
    in :class:`CallStep` order. Returns None when no chain of at most
    ``max_depth`` steps exists or either type is unsupported.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if isinstance(producer, Unsupported) or isinstance(consumer, Unsupported):
        return None
    if producer == consumer:
        return IDENTITY
    steps = allowed_steps(consumer, allow_pointer_deref)
    # Level-order expansion; parents are visited in lexicographic chain order,
    # so the first chain reaching a type at a given length is the preferred one.
    seen = {producer}
    frontier: list[tuple[TypeExpr, CallChain]] = [(producer, ())]
    size_limit = _depth(consumer) + max_depth
    for _ in range(max_depth):
        nxt = []
        for t, chain in frontier:
            for step in steps:
                out = apply_step(step, t)
                if out is None or out in seen:
                    continue
                if out == consumer:
                    return chain + (step,)
                if _depth(out) > size_limit:
                    continue
                seen.add(out)
                nxt.append((out, chain + (step,)))
        frontier = nxt
    return None


def iter_types(t: TypeExpr) -> Iterator[TypeExpr]:
    yield t
    for c in children(t):
        yield from iter_types(c)
