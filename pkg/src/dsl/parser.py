"""
Recursive-descent parser for the template language.

Grammar::

    template   := node*
    node       := text | '{' expr '}' | if
    text       := (any char | '{{' | '##')+          -- '{{' is '{', '##' is '#'
    if         := '#if(' expr ')' node* ('#elif(' expr ')' node*)* ('#else' node*)? '#end'
    expr       := and ('||' and)*
    and        := cmp ('&&' cmp)*
    cmp        := atom (('=='|'!='|'<'|'<='|'>'|'>=') atom)?
    atom       := INT | STRING | 'true' | 'false' | path | call | '(' expr ')'
    path       := IDENT ('.' IDENT)*
    call       := BUILTIN '(' (expr (',' expr)*)? ')'
"""
from typing import List, Optional, Tuple

from src.dsl.interpreter import BUILTINS
from src.dsl.lexer import Scanner, Token, unquote
from src.dsl.nodes import (
    COMPARISON_OPS,
    BinaryOp,
    Call,
    Expr,
    IfNode,
    InterpNode,
    Literal,
    Node,
    Path,
    Position,
    TemplateProgram,
    TextNode,
)

# Checked in this order so that '#else' is never read as '#elif'
_DIRECTIVES = ("elif", "else", "end", "if")


class Parser:
    """
    The template parser class.

    Transforms template source into a TemplateProgram.
    """

    def __init__(self, source: str, source_name: str = "<template>"):
        self.scanner = Scanner(source, source_name)

    def parse(self) -> TemplateProgram:
        nodes, terminator = self._parse_nodes()
        if terminator is not None:
            keyword, pos = terminator
            raise self.scanner.error(f"'#{keyword}' without matching '#if'", pos)
        return TemplateProgram(tuple(nodes), self.scanner.source_name)

    def _parse_nodes(self) -> Tuple[List[Node], Optional[Tuple[str, Position]]]:
        """
        Parse nodes until end of input or a closing directive.

        Returns the node list and the (keyword, position) of the directive
        that stopped parsing, or None at end of input.
        """
        scanner = self.scanner
        nodes: List[Node] = []
        buffer: List[str] = []
        text_pos: Optional[Position] = None

        def flush():
            nonlocal text_pos
            if buffer:
                nodes.append(TextNode("".join(buffer), text_pos))
                buffer.clear()
            text_pos = None

        while not scanner.at_end:
            if scanner.startswith("{{") or scanner.startswith("##"):
                text_pos = text_pos or scanner.position()
                buffer.append(scanner.advance(2)[0])
            elif scanner.startswith("{"):
                flush()
                nodes.append(self._parse_interp())
            elif scanner.startswith("#"):
                flush()
                pos = scanner.position()
                keyword = self._read_directive()
                if keyword == "if":
                    nodes.append(self._parse_if(pos))
                else:
                    return nodes, (keyword, pos)
            else:
                text_pos = text_pos or scanner.position()
                buffer.append(scanner.advance())
        flush()
        return nodes, None

    def _read_directive(self) -> str:
        scanner = self.scanner
        pos = scanner.position()
        scanner.advance()  # '#'
        for keyword in _DIRECTIVES:
            if scanner.startswith(keyword):
                scanner.advance(len(keyword))
                return keyword
        raise scanner.error("unknown directive", pos)

    def _parse_interp(self) -> InterpNode:
        scanner = self.scanner
        pos = scanner.position()
        scanner.advance()  # '{'
        if scanner.at_end:
            raise scanner.error("unterminated '{'", pos)
        expr = self._parse_expr(open_pos=pos)
        token = scanner.next_token()
        if token.kind == "eof":
            raise scanner.error("unterminated '{'", pos)
        if token.text != "}":
            raise scanner.error(f"expected '}}', found {token.text!r}", token.pos)
        return InterpNode(expr, pos)

    def _parse_condition(self, directive: str) -> Expr:
        scanner = self.scanner
        if not scanner.startswith("("):
            raise scanner.error(f"'#{directive}' must be followed by '('")
        open_pos = scanner.position()
        scanner.advance()
        expr = self._parse_expr(open_pos=open_pos)
        token = scanner.next_token()
        if token.text != ")":
            raise scanner.error(f"expected ')' to close '#{directive}' condition", token.pos)
        return expr

    def _parse_if(self, pos: Position) -> IfNode:
        branches = []
        cond = self._parse_condition("if")
        while True:
            body, terminator = self._parse_nodes()
            if terminator is None:
                raise self.scanner.error("'#if' without matching '#end'", pos)
            keyword, term_pos = terminator
            if branches and branches[-1][0] is None:
                # Already inside the #else body
                if keyword != "end":
                    raise self.scanner.error(f"'#{keyword}' after '#else'", term_pos)
                return IfNode(tuple((c, b) for c, b in branches[:-1]), tuple(body), pos)
            branches.append((cond, tuple(body)))
            if keyword == "end":
                return IfNode(tuple(branches), None, pos)
            if keyword == "elif":
                cond = self._parse_condition("elif")
            else:  # else
                branches.append((None, ()))

    # Expressions

    def _expect_token(self, open_pos: Position) -> Token:
        token = self.scanner.next_token()
        if token.kind == "eof":
            raise self.scanner.error("unterminated expression", open_pos)
        return token

    def _parse_expr(self, open_pos: Position) -> Expr:
        left = self._parse_and(open_pos)
        while self.scanner.peek_token().text == "||":
            token = self.scanner.next_token()
            left = BinaryOp("||", left, self._parse_and(open_pos), token.pos)
        return left

    def _parse_and(self, open_pos: Position) -> Expr:
        left = self._parse_cmp(open_pos)
        while self.scanner.peek_token().text == "&&":
            token = self.scanner.next_token()
            left = BinaryOp("&&", left, self._parse_cmp(open_pos), token.pos)
        return left

    def _parse_cmp(self, open_pos: Position) -> Expr:
        left = self._parse_atom(open_pos)
        peeked = self.scanner.peek_token()
        if peeked.kind == "op" and peeked.text in COMPARISON_OPS:
            token = self.scanner.next_token()
            right = self._parse_atom(open_pos)
            return BinaryOp(token.text, left, right, token.pos)
        return left

    def _parse_atom(self, open_pos: Position) -> Expr:
        scanner = self.scanner
        token = self._expect_token(open_pos)
        if token.kind == "int":
            return Literal(int(token.text), token.pos)
        if token.kind == "str":
            return Literal(unquote(token.text), token.pos)
        if token.text == "(":
            expr = self._parse_expr(open_pos)
            closing = self._expect_token(open_pos)
            if closing.text != ")":
                raise scanner.error(f"expected ')', found {closing.text!r}", closing.pos)
            return expr
        if token.kind != "id":
            raise scanner.error(f"unexpected {token.text!r} in expression", token.pos)
        if token.text in ("true", "false"):
            return Literal(token.text == "true", token.pos)

        if scanner.peek_token().text == "(":
            return self._parse_call(token, open_pos)

        segments = [token.text]
        while scanner.peek_token().text == ".":
            scanner.next_token()
            part = self._expect_token(open_pos)
            if part.kind != "id":
                raise scanner.error("expected identifier after '.'", part.pos)
            segments.append(part.text)
        return Path(tuple(segments), token.pos)

    def _parse_call(self, name: Token, open_pos: Position) -> Call:
        scanner = self.scanner
        if name.text not in BUILTINS:
            raise scanner.error(f"unknown function {name.text!r}", name.pos)
        scanner.next_token()  # '('
        args: List[Expr] = []
        if scanner.peek_token().text == ")":
            scanner.next_token()
        else:
            while True:
                args.append(self._parse_expr(open_pos))
                token = self._expect_token(open_pos)
                if token.text == ")":
                    break
                if token.text != ",":
                    raise scanner.error(f"expected ',' or ')', found {token.text!r}", token.pos)
        arity = BUILTINS[name.text].arity
        if len(args) != arity:
            raise scanner.error(f"{name.text}() takes {arity} argument(s), got {len(args)}", name.pos)
        return Call(name.text, tuple(args), name.pos)


def parse_template(source: str, name: str = "<template>") -> TemplateProgram:
    """
    Parse template source into a TemplateProgram.

    Args:
        source: Template text
        name: Name used in error messages

    Returns:
        The parsed program
    """
    return Parser(source, name).parse()
