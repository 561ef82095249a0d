from jetbrane.dsl.lexer import Token, tokenize  # noqa: F401
from jetbrane.dsl.parser import (  # noqa: F401
    Parser,
    TheoryDocument,
    parse_auxiliary,
    parse_expr,
    parse_theory,
)
from jetbrane.dsl.render import render_document  # noqa: F401
