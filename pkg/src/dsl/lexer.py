"""
Character scanner and expression tokenizer for the template language.
"""
import re
from dataclasses import dataclass
from typing import Optional

from src.dsl.nodes import Position
from src.utils.exceptions import TemplateSyntaxError

_EXPR_RULES = [
    (re.compile(r"\s+"), "ws"),
    (re.compile(r"\d+"), "int"),
    (re.compile(r'"(?:[^"\\]|\\.)*"', re.S), "str"),
    (re.compile(r"[A-Za-z_][A-Za-z0-9_]*"), "id"),
    (re.compile(r"==|!=|<=|>=|&&|\|\||<|>"), "op"),
    (re.compile(r"[(),.}]"), "punct"),
]

_STRING_ESCAPE = re.compile(r"\\(.)", re.S)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: Position

    def __str__(self):
        return f"{self.kind}({self.text}):{self.pos.line}:{self.pos.column}"


class Scanner:
    """Cursor over template source that tracks line and column."""

    def __init__(self, source: str, source_name: str = "<template>"):
        self.source = source
        self.source_name = source_name
        self.offset = 0
        self.line = 1
        self.column = 1

    @property
    def at_end(self) -> bool:
        return self.offset >= len(self.source)

    def position(self) -> Position:
        return Position(self.line, self.column)

    def startswith(self, text: str) -> bool:
        return self.source.startswith(text, self.offset)

    def peek_char(self) -> str:
        return self.source[self.offset] if not self.at_end else ""

    def advance(self, count: int = 1) -> str:
        chunk = self.source[self.offset:self.offset + count]
        for ch in chunk:
            if ch == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
        self.offset += len(chunk)
        return chunk

    def error(self, message: str, pos: Optional[Position] = None) -> TemplateSyntaxError:
        pos = pos or self.position()
        return TemplateSyntaxError(message, pos.line, pos.column, self.source_name)

    def next_token(self) -> Token:
        """Read the next expression token, skipping whitespace."""
        while True:
            if self.at_end:
                return Token("eof", "", self.position())
            for regex, kind in _EXPR_RULES:
                match = regex.match(self.source, self.offset)
                if not match:
                    continue
                pos = self.position()
                self.advance(match.end() - match.start())
                if kind == "ws":
                    break
                return Token(kind, match.group(), pos)
            else:
                raise self.error(f"unexpected character {self.peek_char()!r} in expression")

    def peek_token(self) -> Token:
        saved = (self.offset, self.line, self.column)
        try:
            return self.next_token()
        finally:
            self.offset, self.line, self.column = saved


def unquote(token_text: str) -> str:
    return _STRING_ESCAPE.sub(lambda m: m.group(1), token_text[1:-1])
