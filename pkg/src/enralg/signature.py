"""Enriched signatures, their underlying classical signatures, and theories."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .structure import Kind, VObject, indiscrete
from .term import App, Const, Var, variables


def terminal(kind: Kind) -> VObject:
    """One-point terminal object, the parameter of an ordinary operation."""
    return VObject(kind, ("*",), indiscrete(kind, ("*",)))


@dataclass(frozen=True)
class OperationSymbol:
    name: str
    inputs: tuple
    output: str
    parameter: VObject

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))

    @property
    def arity(self) -> int:
        return len(self.inputs)


@dataclass(frozen=True)
class ClassicalOpSymbol:
    """The point-indexed symbol ``op[point]`` of the underlying classical signature."""

    op: str
    point: object
    inputs: tuple
    output: str

    def __str__(self):
        return f"{self.op}[{self.point}]"


@dataclass(frozen=True)
class EnrichedSignature:
    kind: Kind
    sorts: tuple
    ops: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "_by_name", {o.name: o for o in self.ops})

    def has_op(self, name: str) -> bool:
        return name in self._by_name

    def op(self, name: str) -> OperationSymbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown operation {name!r}") from None

    def ops_into(self, sort: str) -> list:
        return [o for o in self.ops if o.output == sort]

    @property
    def ordinary(self) -> bool:
        return all(len(o.parameter.carrier) == 1 for o in self.ops)


def underlying_classical(sig: EnrichedSignature) -> list[ClassicalOpSymbol]:
    """One symbol per operation and parameter point, in operation then carrier order."""
    return [ClassicalOpSymbol(o.name, p, o.inputs, o.output)
            for o in sig.ops for p in o.parameter.carrier]


def resolve(sig: EnrichedSignature, symbol: ClassicalOpSymbol) -> tuple:
    """Recover ``(operation, point)`` from a classical symbol."""
    op = sig.op(symbol.op)
    if symbol.point not in op.parameter.carrier:
        raise KeyError(f"{symbol.point!r} is not a point of {op.name!r}")
    return op, symbol.point


@dataclass(frozen=True)
class SyntacticEquation:
    context: tuple
    sort: str
    lhs: object
    rhs: object

    def __post_init__(self):
        object.__setattr__(self, "context", tuple(tuple(c) for c in self.context))

    @property
    def var_sorts(self) -> dict:
        return dict(self.context)

    def __str__(self):
        ctx = ", ".join(f"{v}:{s}" for v, s in self.context)
        return f"[{ctx} ⊢ {self.lhs} = {self.rhs} : {self.sort}]"


@dataclass(frozen=True)
class Theory:
    signature: EnrichedSignature
    equations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))

    @property
    def kind(self) -> Kind:
        return self.signature.kind


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Issue:
    level: str  # "error" | "warning"
    path: str
    message: str

    def __str__(self):
        return f"{self.level}: {self.path}: {self.message}"


@dataclass
class Report:
    issues: list = field(default_factory=list)

    def error(self, path, message):
        self.issues.append(Issue("error", path, message))

    def warn(self, path, message):
        self.issues.append(Issue("warning", path, message))

    @property
    def errors(self) -> list:
        return [i for i in self.issues if i.level == "error"]

    @property
    def warnings(self) -> list:
        return [i for i in self.issues if i.level == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "\n".join(map(str, self.issues)) if self.issues else "valid"


def _check_term(t, sig, ctx, sort, path, report):
    if isinstance(t, Var):
        if t.name not in ctx:
            report.error(path, f"variable {t.name!r} not in context")
        elif ctx[t.name] != sort:
            report.error(path, f"variable {t.name!r} has sort {ctx[t.name]}, expected {sort}")
        return
    if isinstance(t, Const):
        report.error(path, f"constant {t.name!r} not allowed in a term in context")
        return
    if not isinstance(t, App):
        report.error(path, f"not a term: {t!r}")
        return
    if not sig.has_op(t.op):
        report.error(path, f"unknown operation {t.op!r}")
        return
    op = sig.op(t.op)
    if t.point not in op.parameter.carrier:
        report.error(path, f"{t.point!r} is not a point of the parameter of {t.op!r}")
    if op.output != sort:
        report.error(path, f"{t.op!r} has sort {op.output}, expected {sort}")
    if len(t.args) != len(op.inputs):
        report.error(path, f"{t.op!r} expects {len(op.inputs)} arguments, got {len(t.args)}")
        return
    for i, (a, s) in enumerate(zip(t.args, op.inputs)):
        _check_term(a, sig, ctx, s, f"{path}.args[{i}]", report)


def validate_signature(sig: EnrichedSignature, report: Report | None = None) -> Report:
    report = report if report is not None else Report()
    seen = set()
    for s in sig.sorts:
        if s in seen:
            report.error("sorts", f"duplicate sort {s!r}")
        seen.add(s)
    names = set()
    for i, o in enumerate(sig.ops):
        path = f"ops[{i}]"
        if o.name in names:
            report.error(path, f"duplicate operation name {o.name!r}")
        names.add(o.name)
        for s in (*o.inputs, o.output):
            if s not in seen:
                report.error(path, f"undeclared sort {s!r}")
        if o.parameter.kind is not sig.kind:
            report.error(path, f"parameter kind {o.parameter.kind} differs from instance {sig.kind}")
        if not o.parameter.carrier:
            report.warn(path, f"operation {o.name!r} has an empty parameter and contributes no symbols")
    return report


def validate_theory(t: Theory) -> Report:
    report = validate_signature(t.signature)
    sig = t.signature
    for i, e in enumerate(t.equations):
        path = f"equations[{i}]"
        vars_ = [v for v, _ in e.context]
        if len(set(vars_)) != len(vars_):
            report.error(path, "context variables are not pairwise distinct")
        for _, s in e.context:
            if s not in sig.sorts:
                report.error(path, f"undeclared sort {s!r} in context")
        if e.sort not in sig.sorts:
            report.error(path, f"undeclared sort {e.sort!r}")
        ctx = dict(e.context)
        _check_term(e.lhs, sig, ctx, e.sort, path + ".lhs", report)
        _check_term(e.rhs, sig, ctx, e.sort, path + ".rhs", report)
    return report


def equation_variables(e: SyntacticEquation) -> set:
    return variables(e.lhs) | variables(e.rhs)


def make_signature(kind: Kind, sorts: Sequence[str], ops: Sequence[tuple]) -> EnrichedSignature:
    """Shorthand: ops as ``(name, inputs, output)`` or ``(name, inputs, output, parameter)``."""
    out = []
    for spec in ops:
        name, inputs, output, *rest = spec
        param = rest[0] if rest else terminal(kind)
        out.append(OperationSymbol(name, tuple(inputs), output, param))
    return EnrichedSignature(kind, tuple(sorts), tuple(out))
