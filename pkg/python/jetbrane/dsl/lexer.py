"""
Tokenizer for theory files.
"""
import re
from typing import NamedTuple

from jetbrane.exceptions import DSLSyntaxError

TOKEN_SPEC = [
    ("COMMENT", r"#[^\n]*"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("NUMBER", r"\d+(?:/\d+)?"),
    ("SUFFIX", r"_\[[A-Za-z0-9]*\]"),
    ("IDENT", r"[A-Za-z][A-Za-z0-9]*"),
    ("LBRACK", r"\["),
    ("RBRACK", r"\]"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("LBRACE", r"\{"),
    ("RBRACE", r"\}"),
    ("EQUALS", r"="),
    ("COMMA", r","),
    ("PLUS", r"\+"),
    ("MINUS", r"-"),
    ("STAR", r"\*"),
    ("CARET", r"\^"),
    ("SLASH", r"/"),
    ("MISMATCH", r"."),
]
TOKEN_RE = re.compile("|".join(f"(?P<{k}>{p})" for k, p in TOKEN_SPEC))

OPENING = {"LPAREN": "RPAREN", "LBRACE": "RBRACE", "LBRACK": "RBRACK"}


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        if self.kind == "NEWLINE":
            return "end of line"
        return f"`{self.text}`"


def tokenize(text: str) -> list[Token]:
    """
    Split ``text`` into tokens. Newlines are significant only outside
    brackets, where they end a statement.

    Example:
        >>> [t.kind for t in tokenize("q_[t]^2")]
        ['IDENT', 'SUFFIX', 'CARET', 'NUMBER', 'EOF']
    """
    tokens: list[Token] = []
    stack: list[Token] = []
    line, line_start = 1, 0
    for match in TOKEN_RE.finditer(text):
        kind = match.lastgroup
        assert kind is not None
        value = match.group()
        column = match.start() - line_start + 1
        token = Token(kind, value, line, column)
        if kind == "NEWLINE":
            if not stack or stack[-1].kind == "LBRACE":
                tokens.append(token)
            line += 1
            line_start = match.end()
            continue
        if kind in ("SKIP", "COMMENT"):
            continue
        if kind == "MISMATCH":
            raise DSLSyntaxError(
                f"unexpected character `{value}`", line, column
            )
        if kind in OPENING:
            stack.append(token)
        elif kind in OPENING.values():
            if not stack or OPENING[stack[-1].kind] != kind:
                raise DSLSyntaxError(
                    f"unbalanced `{value}`", line, column
                )
            stack.pop()
        tokens.append(token)
    if stack:
        opened = stack[-1]
        raise DSLSyntaxError(
            f"`{opened.text}` is never closed",
            opened.line,
            opened.column,
            frozenset({OPENING[opened.kind]}),
        )
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens
