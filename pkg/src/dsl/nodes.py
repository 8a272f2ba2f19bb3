"""
AST for the template language.

Template nodes: TextNode, InterpNode, IfNode.
Expression nodes: Literal, Path, Call, BinaryOp.

Every node records the (line, column) where it starts. Positions are
excluded from equality so that structurally identical trees compare equal
regardless of where they were parsed from.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

Scalar = Union[str, int, bool]

COMPARISON_OPS = ("==", "!=", "<=", ">=", "<", ">")
LOGICAL_OPS = ("&&", "||")

# Binding strength used by the parser and by to_source
PREC_OR = 1
PREC_AND = 2
PREC_CMP = 3
PREC_ATOM = 4


@dataclass(frozen=True)
class Position:
    line: int = 1
    column: int = 1


def _pos() -> Position:
    return field(default=Position(), compare=False, repr=False)


@dataclass(frozen=True)
class Literal:
    value: Scalar
    pos: Position = _pos()

    @property
    def precedence(self) -> int:
        return PREC_ATOM


@dataclass(frozen=True)
class Path:
    segments: Tuple[str, ...]
    pos: Position = _pos()

    @property
    def dotted(self) -> str:
        return ".".join(self.segments)

    @property
    def precedence(self) -> int:
        return PREC_ATOM


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]
    pos: Position = _pos()

    @property
    def precedence(self) -> int:
        return PREC_ATOM


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Position = _pos()

    @property
    def precedence(self) -> int:
        if self.op == "||":
            return PREC_OR
        if self.op == "&&":
            return PREC_AND
        return PREC_CMP


Expr = Union[Literal, Path, Call, BinaryOp]


@dataclass(frozen=True)
class TextNode:
    text: str
    pos: Position = _pos()


@dataclass(frozen=True)
class InterpNode:
    expr: Expr
    pos: Position = _pos()


@dataclass(frozen=True)
class IfNode:
    branches: Tuple[Tuple[Expr, Tuple["Node", ...]], ...]
    else_body: Optional[Tuple["Node", ...]] = None
    pos: Position = _pos()


Node = Union[TextNode, InterpNode, IfNode]


@dataclass(frozen=True)
class TemplateProgram:
    """A parsed template: the root node list plus the name it was loaded under."""

    nodes: Tuple[Node, ...]
    source_name: str = field(default="<template>", compare=False)

    def to_source(self) -> str:
        return "".join(_node_source(node) for node in self.nodes)


def escape_text(text: str) -> str:
    return text.replace("{", "{{").replace("#", "##")


def _string_literal(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def expr_source(expr: Expr) -> str:
    if isinstance(expr, Literal):
        if isinstance(expr.value, bool):
            return "true" if expr.value else "false"
        if isinstance(expr.value, int):
            return str(expr.value)
        return _string_literal(expr.value)
    if isinstance(expr, Path):
        return expr.dotted
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(expr_source(a) for a in expr.args)})"

    prec = expr.precedence
    # Logical operators associate to the left; comparisons do not chain
    left_min = prec if prec != PREC_CMP else prec + 1
    left = _wrap(expr.left, left_min)
    right = _wrap(expr.right, prec + 1)
    return f"{left} {expr.op} {right}"


def _wrap(expr: Expr, min_precedence: int) -> str:
    text = expr_source(expr)
    return f"({text})" if expr.precedence < min_precedence else text


def _node_source(node: Node) -> str:
    if isinstance(node, TextNode):
        return escape_text(node.text)
    if isinstance(node, InterpNode):
        return "{" + expr_source(node.expr) + "}"
    parts = []
    for i, (cond, body) in enumerate(node.branches):
        keyword = "#if" if i == 0 else "#elif"
        parts.append(f"{keyword}({expr_source(cond)})")
        parts.extend(_node_source(child) for child in body)
    if node.else_body is not None:
        parts.append("#else")
        parts.extend(_node_source(child) for child in node.else_body)
    parts.append("#end")
    return "".join(parts)
