"""
Recursive-descent parser for theory files and their auxiliary inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from loguru import logger

from jetbrane.algebroid import GaugeParameter, Theory
from jetbrane.diffops import BiDiffOp
from jetbrane.dsl.lexer import Token, tokenize
from jetbrane.exceptions import (
    ConfigurationError,
    DSLSemanticError,
    DSLSyntaxError,
    InhomogeneityError,
    SchemaError,
)
from jetbrane.jet import EvolutionaryField
from jetbrane.kernel import (
    Expr,
    Kind,
    MultiIndex,
    SpaceSpec,
    antifield,
    basis_form,
    coordinate,
    field_jet,
    ghost,
    ghost_antifield,
    grading_of,
)

KEYWORDS = (
    "space",
    "field",
    "param",
    "lagrangian",
    "generator",
    "structure",
    "solution",
    "symmetry",
    "gauge",
    "current",
)
AUX_KEYWORDS = ("solution", "symmetry", "gauge", "current")
RESERVED = {*KEYWORDS, "ghost", "anti", "dx", "abelian", "dim", "coords"}
DIVISION = (
    "division is not supported; write rational literals such as `1/2 * q`"
)


@dataclass(eq=False)
class TheoryDocument:
    theory: Theory
    symmetries: dict[str, EvolutionaryField] = field(default_factory=dict)
    gauges: dict[str, GaugeParameter] = field(default_factory=dict)
    currents: dict[str, dict[int, Expr]] = field(default_factory=dict)
    text: str = ""

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TheoryDocument):
            return NotImplemented
        return (
            _theory_key(self.theory) == _theory_key(other.theory)
            and self.symmetries == other.symmetries
            and self.gauges == other.gauges
            and self.currents == other.currents
        )


def _theory_key(T: Theory) -> tuple:
    structure = None if T.structure is None else T.structure.coeffs
    return (
        T.space,
        T.fields,
        T.gauge_params,
        T.lagrangian,
        T.generators,
        structure,
        {k: dict(v) for k, v in T.named_solutions.items()},
    )


class Parser:
    """
    Statements are keyword led and end at a newline; blocks in braces
    may span lines.
    """

    def __init__(self, text: str, base: Theory | None = None) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.space: SpaceSpec | None = base.space if base else None
        self.fields: list[str] = list(base.fields) if base else []
        self.params: list[str] = list(base.gauge_params) if base else []
        self.lagrangian: Expr | None = None
        self.generators: dict[tuple[str, str, MultiIndex], Expr] = {}
        self.structure: dict[tuple, Expr] = {}
        self.abelian = False
        self.structure_token: Token | None = None
        self.solutions: dict[str, dict[str, Expr]] = {}
        self.symmetries: dict[str, EvolutionaryField] = {}
        self.gauges: dict[str, GaugeParameter] = {}
        self.currents: dict[str, dict[int, Expr]] = {}

    # ==========================================================
    # token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, kind: str, text: str | None = None) -> bool:
        token = self.current
        return token.kind == kind and (text is None or token.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.peek(kind, text):
            token = self.current
            self.pos += 1
            return token
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        token = self.accept(kind, text)
        if token is None:
            wanted = text if text is not None else kind.lower()
            raise self.syntax_error(frozenset({wanted}))
        return token

    def syntax_error(self, expected: frozenset[str]) -> DSLSyntaxError:
        token = self.current
        if token.kind == "SLASH":
            return DSLSyntaxError(DIVISION, token.line, token.column)
        return DSLSyntaxError(
            f"unexpected {token.describe()}",
            token.line,
            token.column,
            expected,
        )

    def skip_newlines(self) -> None:
        while self.accept("NEWLINE"):
            pass

    def end_of_statement(self) -> None:
        if not self.accept("NEWLINE") and not self.peek("EOF"):
            raise self.syntax_error(frozenset({"end of line"}))

    def semantic_error(self, msg: str, token: Token) -> DSLSemanticError:
        return DSLSemanticError(msg, token.line, token.column)

    # ==========================================================
    # documents

    # <DOCUMENT> -> <SPACE> { <STATEMENT> }*
    def parse_theory(self, name: str = "theory") -> TheoryDocument:
        self.skip_newlines()
        if not self.peek("IDENT", "space"):
            token = self.current
            raise DSLSyntaxError(
                "missing space declaration",
                token.line,
                token.column,
                frozenset({"space"}),
            )
        self.statements(KEYWORDS)
        assert self.space is not None
        structure = None
        if self.structure_token is not None:
            if self.structure and self.abelian:
                raise self.semantic_error(
                    "`structure abelian` conflicts with structure entries",
                    self.structure_token,
                )
            try:
                structure = BiDiffOp.from_entries(self.structure)
            except ConfigurationError as e:
                raise self.semantic_error(e.msg, self.structure_token)
        theory = Theory(
            space=self.space,
            fields=tuple(self.fields),
            lagrangian=self.lagrangian or Expr(),
            gauge_params=tuple(self.params),
            generators=self.generators,
            structure=structure,
            named_solutions=self.solutions,
            name=name,
        )
        logger.debug(
            f"parsed theory `{name}`: {len(self.fields)} fields, "
            f"{len(self.params)} gauge parameters"
        )
        return TheoryDocument(
            theory,
            self.symmetries,
            self.gauges,
            self.currents,
            self.text,
        )

    # <AUXILIARY> -> { <BLOCK> }*
    def parse_auxiliary(self, base: Theory) -> TheoryDocument:
        self.statements(AUX_KEYWORDS)
        solutions = dict(base.named_solutions)
        solutions.update(self.solutions)
        theory = Theory(
            space=base.space,
            fields=base.fields,
            lagrangian=base.lagrangian,
            gauge_params=base.gauge_params,
            generators=base.generators,
            structure=base.structure,
            named_solutions=solutions,
            name=base.name,
        )
        return TheoryDocument(
            theory, self.symmetries, self.gauges, self.currents, self.text
        )

    def statements(self, allowed: tuple[str, ...]) -> None:
        handlers: dict[str, Callable[[Token], None]] = {
            "space": self.space_statement,
            "field": self.field_statement,
            "param": self.param_statement,
            "lagrangian": self.lagrangian_statement,
            "generator": self.generator_statement,
            "structure": self.structure_statement,
            "solution": self.solution_block,
            "symmetry": self.symmetry_block,
            "gauge": self.gauge_block,
            "current": self.current_block,
        }
        while True:
            self.skip_newlines()
            if self.peek("EOF"):
                return
            token = self.current
            if token.kind != "IDENT" or token.text not in allowed:
                raise self.syntax_error(frozenset(allowed))
            self.pos += 1
            if token.text != "space" and self.space is None:
                raise self.semantic_error("missing space declaration", token)
            handlers[token.text](token)
            if token.text not in AUX_KEYWORDS:
                self.end_of_statement()

    # ==========================================================
    # declarations

    # <SPACE> -> 'space' 'dim' '=' NUMBER 'coords' '=' IDENT { ',' IDENT }*
    def space_statement(self, keyword: Token) -> None:
        if self.space is not None:
            raise self.semantic_error("space declared twice", keyword)
        self.expect("IDENT", "dim")
        self.expect("EQUALS")
        dim_token = self.expect("NUMBER")
        self.expect("IDENT", "coords")
        self.expect("EQUALS")
        names = [self.expect("IDENT").text]
        while self.accept("COMMA"):
            names.append(self.expect("IDENT").text)
        if "/" in dim_token.text:
            raise self.semantic_error(
                "dimension must be an integer", dim_token
            )
        for name in names:
            if name in RESERVED:
                raise self.semantic_error(
                    f"`{name}` is reserved", keyword
                )
        try:
            self.space = SpaceSpec(int(dim_token.text), tuple(names))
        except SchemaError as e:
            raise self.semantic_error(e.msg, dim_token)

    def declare(self, target: list[str], keyword: Token) -> None:
        token = self.expect("IDENT")
        while token is not None:
            name = token.text
            assert self.space is not None
            if name in RESERVED:
                raise self.semantic_error(f"`{name}` is reserved", token)
            if (
                name in self.fields
                or name in self.params
                or name in self.space.coord_names
            ):
                raise self.semantic_error(
                    f"`{name}` is already declared", token
                )
            target.append(name)
            token = self.accept("IDENT")

    # <FIELD> -> 'field' IDENT { IDENT }*
    def field_statement(self, keyword: Token) -> None:
        self.declare(self.fields, keyword)

    # <PARAM> -> 'param' IDENT { IDENT }*
    def param_statement(self, keyword: Token) -> None:
        self.declare(self.params, keyword)

    # <LAGRANGIAN> -> 'lagrangian' <EXPRESSION>
    def lagrangian_statement(self, keyword: Token) -> None:
        if self.lagrangian is not None:
            raise self.semantic_error("lagrangian declared twice", keyword)
        start = self.current
        value = self.expression()
        self.check_local(value, start, "lagrangian")
        self.lagrangian = value

    # <GENERATOR> -> 'generator' IDENT IDENT <INDEX> '=' <EXPRESSION>
    def generator_statement(self, keyword: Token) -> None:
        i = self.known(self.expect("IDENT"), self.fields, "field")
        alpha = self.known(self.expect("IDENT"), self.params, "parameter")
        mu = self.index()
        self.expect("EQUALS")
        start = self.current
        value = self.expression()
        self.check_local(value, start, "generator coefficient")
        key = (i, alpha, mu)
        self.generators[key] = self.generators.get(key, Expr()) + value

    # <STRUCTURE> -> 'structure' 'abelian'
    #              | 'structure' IDENT IDENT IDENT <INDEX> <INDEX> '='
    #                <EXPRESSION>
    def structure_statement(self, keyword: Token) -> None:
        self.structure_token = self.structure_token or keyword
        if self.accept("IDENT", "abelian"):
            self.abelian = True
            return
        labels = [
            self.known(self.expect("IDENT"), self.params, "parameter")
            for _ in range(3)
        ]
        mu = self.index()
        nu = self.index()
        self.expect("EQUALS")
        start = self.current
        value = self.expression()
        self.check_local(value, start, "structure coefficient")
        key = (*labels, mu, nu)
        self.structure[key] = self.structure.get(key, Expr()) + value

    # ==========================================================
    # blocks

    # <BLOCK> -> IDENT '{' { IDENT '=' <EXPRESSION> [ ',' ] }* '}'
    def block(self, keyword: Token) -> tuple[str, dict[str, Expr]]:
        name = self.expect("IDENT")
        self.expect("LBRACE")
        entries: dict[str, Expr] = {}
        while True:
            while self.accept("NEWLINE") or self.accept("COMMA"):
                pass
            if self.accept("RBRACE"):
                break
            if not self.peek("IDENT"):
                raise self.syntax_error(frozenset({"ident", "}"}))
            label = self.expect("IDENT")
            self.expect("EQUALS")
            if label.text in entries:
                raise self.semantic_error(
                    f"`{label.text}` assigned twice", label
                )
            start = self.current
            value = self.expression()
            self.check_local(value, start, f"`{label.text}`")
            entries[label.text] = value
        self.end_of_statement()
        return name.text, entries

    # <SOLUTION> -> 'solution' <BLOCK>
    def solution_block(self, keyword: Token) -> None:
        name, entries = self.block(keyword)
        for label, value in entries.items():
            self.check_label(label, self.fields, "field", keyword)
            for g in value.generators():
                if g.kind != Kind.COORDINATE:
                    raise self.semantic_error(
                        f"solution `{name}` may only depend on coordinates",
                        keyword,
                    )
        self.unique(name, self.solutions, keyword)
        self.solutions[name] = {i: entries.get(i, Expr()) for i in self.fields}

    # <SYMMETRY> -> 'symmetry' <BLOCK>
    def symmetry_block(self, keyword: Token) -> None:
        name, entries = self.block(keyword)
        for label in entries:
            self.check_label(label, self.fields, "field", keyword)
        self.unique(name, self.symmetries, keyword)
        self.symmetries[name] = EvolutionaryField(entries)

    # <GAUGE> -> 'gauge' <BLOCK>
    def gauge_block(self, keyword: Token) -> None:
        name, entries = self.block(keyword)
        for label in entries:
            self.check_label(label, self.params, "parameter", keyword)
        self.unique(name, self.gauges, keyword)
        self.gauges[name] = GaugeParameter(entries)

    # <CURRENT> -> 'current' <BLOCK>
    def current_block(self, keyword: Token) -> None:
        name, entries = self.block(keyword)
        assert self.space is not None
        current = {}
        for label, value in entries.items():
            if label not in self.space.coord_names:
                raise self.semantic_error(
                    f"`{label}` is not a coordinate", keyword
                )
            current[self.space.index_of(label)] = value
        self.unique(name, self.currents, keyword)
        self.currents[name] = dict(sorted(current.items()))

    def unique(self, name: str, seen: Mapping, keyword: Token) -> None:
        if name in seen:
            raise self.semantic_error(
                f"{keyword.text} `{name}` declared twice", keyword
            )

    # ==========================================================
    # expressions

    # <EXPRESSION> -> <TERM> { ( '+' | '-' ) <TERM> }*
    def expression(self) -> Expr:
        value = self.term()
        while self.peek("PLUS") or self.peek("MINUS"):
            if self.accept("PLUS"):
                value = value + self.term()
            else:
                self.expect("MINUS")
                value = value - self.term()
        if self.peek("SLASH"):
            raise self.syntax_error(frozenset())
        return value

    # <TERM> -> <FACTOR> { '*' <FACTOR> }*
    def term(self) -> Expr:
        value = self.factor()
        while self.accept("STAR"):
            value = value * self.factor()
        return value

    # <FACTOR> -> ( '-' | '+' ) <FACTOR> | <POWER>
    def factor(self) -> Expr:
        if self.accept("MINUS"):
            return -self.factor()
        if self.accept("PLUS"):
            return self.factor()
        return self.power()

    # <POWER> -> <ATOM> [ '^' NUMBER ]
    def power(self) -> Expr:
        value = self.atom()
        if self.accept("CARET"):
            token = self.expect("NUMBER")
            if "/" in token.text:
                # `q^2/2` lexes the exponent as a rational
                raise DSLSyntaxError(
                    DIVISION,
                    token.line,
                    token.column + token.text.index("/"),
                )
            value = value ** int(token.text)
        return value

    # <ATOM> -> NUMBER | '(' <EXPRESSION> ')' | <VARIABLE>
    def atom(self) -> Expr:
        token = self.accept("NUMBER")
        if token is not None:
            try:
                return Expr.constant(Fraction(token.text))
            except ZeroDivisionError:
                raise self.semantic_error("zero denominator", token)
        if self.accept("LPAREN"):
            value = self.expression()
            self.expect("RPAREN")
            return value
        if self.peek("IDENT"):
            return self.variable()
        raise self.syntax_error(frozenset({"number", "ident", "("}))

    # <VARIABLE> -> 'ghost' '(' IDENT ')' [ SUFFIX ]
    #             | 'anti' '(' ( IDENT | 'ghost' '(' IDENT ')' ) ')'
    #               [ SUFFIX ]
    #             | 'dx' '(' IDENT ')'
    #             | IDENT [ SUFFIX ]
    def variable(self) -> Expr:
        token = self.expect("IDENT")
        assert self.space is not None
        if token.text == "dx" and self.accept("LPAREN"):
            mu = self.coordinate(self.expect("IDENT"))
            self.expect("RPAREN")
            return Expr.of(basis_form(mu))
        if token.text == "ghost" and self.accept("LPAREN"):
            name = self.known(self.expect("IDENT"), self.params, "parameter")
            self.expect("RPAREN")
            return Expr.of(ghost(name, self.suffix()))
        if token.text == "anti" and self.accept("LPAREN"):
            if self.accept("IDENT", "ghost"):
                self.expect("LPAREN")
                name = self.known(
                    self.expect("IDENT"), self.params, "parameter"
                )
                self.expect("RPAREN")
                self.expect("RPAREN")
                return Expr.of(ghost_antifield(name, self.suffix()))
            name = self.known(self.expect("IDENT"), self.fields, "field")
            self.expect("RPAREN")
            return Expr.of(antifield(name, self.suffix()))
        if token.text in self.space.coord_names:
            if self.peek("SUFFIX"):
                raise self.semantic_error(
                    f"coordinate `{token.text}` cannot carry a jet", token
                )
            return Expr.of(coordinate(self.space.index_of(token.text)))
        name = self.known(token, self.fields, "field")
        return Expr.of(field_jet(name, self.suffix()))

    def suffix(self) -> MultiIndex:
        token = self.accept("SUFFIX")
        if token is None:
            return MultiIndex()
        return self.multi_index(token.text[2:-1], token)

    # <INDEX> -> '[' [ IDENT | NUMBER ] ']'
    def index(self) -> MultiIndex:
        self.expect("LBRACK")
        token = self.accept("IDENT") or self.accept("NUMBER")
        self.expect("RBRACK")
        if token is None:
            return MultiIndex()
        return self.multi_index(token.text, token)

    def multi_index(self, text: str, token: Token) -> MultiIndex:
        assert self.space is not None
        entries = []
        for ch in text:
            if ch.isdigit():
                mu = int(ch)
                if mu >= self.space.dim:
                    raise self.semantic_error(
                        f"index {mu} out of range [0, {self.space.dim})",
                        token,
                    )
            elif ch in self.space.coord_names:
                mu = self.space.index_of(ch)
            else:
                raise self.semantic_error(
                    f"`{ch}` is not a coordinate index", token
                )
            entries.append(mu)
        return MultiIndex(entries)

    def coordinate(self, token: Token) -> int:
        assert self.space is not None
        if token.text not in self.space.coord_names:
            raise self.semantic_error(
                f"unknown coordinate `{token.text}`", token
            )
        return self.space.index_of(token.text)

    # ==========================================================
    # checks

    def known(self, token: Token, names: list[str], what: str) -> str:
        if token.text not in names:
            raise self.semantic_error(
                f"unknown {what} `{token.text}`", token
            )
        return token.text

    def check_label(
        self, label: str, names: list[str], what: str, keyword: Token
    ) -> None:
        if label not in names:
            raise self.semantic_error(f"unknown {what} `{label}`", keyword)

    def check_local(self, value: Expr, start: Token, what: str) -> None:
        for g in value.generators():
            if g.kind not in (Kind.COORDINATE, Kind.FIELD):
                raise self.semantic_error(
                    f"{what} may only contain coordinates and fields", start
                )
        self.check_even(value, start, what)

    def check_even(self, value: Expr, start: Token, what: str) -> None:
        try:
            grading = grading_of(value)
        except InhomogeneityError as e:
            raise self.semantic_error(f"{what}: {e.msg}", start)
        if grading.odd or grading.ghost_number != 0:
            raise self.semantic_error(
                f"{what} must be even with ghost number 0", start
            )


def parse_theory(text: str, name: str = "theory") -> TheoryDocument:
    """
    Parse a theory file.

    Example:
        >>> doc = parse_theory("space dim=1 coords=t\\nfield q\\n"
        ...                    "lagrangian 1/2 * q_[t]^2\\n")
        >>> str(doc.theory.equations["q"])
        '-q_[00]'
    """
    return Parser(text).parse_theory(name)


def parse_auxiliary(text: str, base: Theory) -> TheoryDocument:
    """
    Parse ``solution``, ``symmetry``, ``gauge`` and ``current`` blocks in
    the scope of an already loaded theory.
    """
    return Parser(text, base).parse_auxiliary(base)


def parse_expr(text: str, theory: Theory) -> Expr:
    """
    Parse a single expression over the generators of ``theory``, its
    ghosts and antifields included.
    """
    parser = Parser(text, theory)
    value = parser.expression()
    parser.skip_newlines()
    if not parser.peek("EOF"):
        raise parser.syntax_error(frozenset({"end of input"}))
    return value
