"""
Evaluation of parsed templates against a RenderContext.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping

from src.dsl.nodes import (
    BinaryOp,
    Call,
    Expr,
    IfNode,
    InterpNode,
    Literal,
    Path,
    Scalar,
    TemplateProgram,
    TextNode,
)
from src.utils.exceptions import TemplateRenderError


@dataclass(frozen=True)
class RenderContext:
    """Flat dotted-path bindings plus the seed of the template-selection stream."""

    bindings: Mapping[str, Scalar] = field(default_factory=dict)
    rng_seed: int = 0

    def lookup(self, path: Path) -> Scalar:
        key = path.dotted
        if key not in self.bindings:
            raise TemplateRenderError(f"unbound path '{key}'", path.pos.line, path.pos.column, path=key)
        return self.bindings[key]


def ordinal(n: int) -> str:
    """1 -> '1st', 2 -> '2nd', 3 -> '3rd', 11 -> '11th', 23 -> '23rd'."""
    if 10 <= abs(n) % 100 <= 13:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(abs(n) % 10, "th")
    return f"{n}{suffix}"


def minute(n: int) -> str:
    return str(n)


@dataclass(frozen=True)
class Builtin:
    function: Callable[[int], str]
    arity: int


BUILTINS: Dict[str, Builtin] = {
    "ordinal": Builtin(ordinal, 1),
    "minute": Builtin(minute, 1),
}


def _type_name(value: Scalar) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    return "text"


def format_value(value: Scalar) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def evaluate(expr: Expr, ctx: RenderContext) -> Scalar:
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Path):
        return ctx.lookup(expr)
    if isinstance(expr, Call):
        builtin = BUILTINS[expr.name]
        args = [evaluate(arg, ctx) for arg in expr.args]
        for arg in args:
            if _type_name(arg) != "integer":
                raise TemplateRenderError(
                    f"{expr.name}() expects an integer, got {_type_name(arg)}",
                    expr.pos.line, expr.pos.column,
                )
        return builtin.function(*args)
    return _evaluate_binary(expr, ctx)


def _as_condition(value: Scalar, expr: Expr) -> bool:
    if not isinstance(value, bool):
        raise TemplateRenderError(
            f"condition must be boolean, got {_type_name(value)}", expr.pos.line, expr.pos.column
        )
    return value


def _evaluate_binary(expr: BinaryOp, ctx: RenderContext) -> bool:
    if expr.op == "&&":
        return _as_condition(evaluate(expr.left, ctx), expr.left) and \
            _as_condition(evaluate(expr.right, ctx), expr.right)
    if expr.op == "||":
        return _as_condition(evaluate(expr.left, ctx), expr.left) or \
            _as_condition(evaluate(expr.right, ctx), expr.right)

    left = evaluate(expr.left, ctx)
    right = evaluate(expr.right, ctx)
    if _type_name(left) != _type_name(right):
        raise TemplateRenderError(
            f"cannot compare {_type_name(left)} with {_type_name(right)}",
            expr.pos.line, expr.pos.column,
        )
    if expr.op == "==":
        return left == right
    if expr.op == "!=":
        return left != right
    if isinstance(left, bool):
        raise TemplateRenderError(
            f"operator '{expr.op}' is not defined for booleans", expr.pos.line, expr.pos.column
        )
    if expr.op == "<":
        return left < right
    if expr.op == "<=":
        return left <= right
    if expr.op == ">":
        return left > right
    return left >= right


def _render_nodes(nodes, ctx: RenderContext, out: List[str]) -> None:
    for node in nodes:
        if isinstance(node, TextNode):
            out.append(node.text)
        elif isinstance(node, InterpNode):
            out.append(format_value(evaluate(node.expr, ctx)))
        elif isinstance(node, IfNode):
            for cond, body in node.branches:
                if _as_condition(evaluate(cond, ctx), cond):
                    _render_nodes(body, ctx, out)
                    break
            else:
                if node.else_body is not None:
                    _render_nodes(node.else_body, ctx, out)


def render(program: TemplateProgram, ctx: RenderContext) -> str:
    """
    Render a template program.

    Args:
        program: Parsed template
        ctx: Bindings for every path reachable during evaluation

    Returns:
        Rendered text; branches are tried top-down and the first true one wins
    """
    out: List[str] = []
    _render_nodes(program.nodes, ctx, out)
    return "".join(out)
