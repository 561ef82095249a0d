import pytest
from jetbrane.dsl import parse_auxiliary, parse_expr, parse_theory
from jetbrane.exceptions import DSLSemanticError, DSLSyntaxError
from jetbrane.jet import EvolutionaryField
from jetbrane.kernel import (
    Expr,
    MultiIndex,
    basis_form,
    coordinate,
    field_jet,
    ghost,
    ghost_antifield,
)
from jetbrane.theories import read_text

HEADER = "space dim=1 coords=t\nfield q\n"
GAUGE_HEADER = "space dim=2 coords=x,y\nfield q\nparam a b c\n"

q_t = Expr.of(field_jet("q", [0]))


def syntax_error(text):
    with pytest.raises(DSLSyntaxError) as e:
        parse_theory(text)
    return e.value


def semantic_error(text):
    with pytest.raises(DSLSemanticError) as e:
        parse_theory(text)
    return e.value


def test_parse_mechanics():
    doc = parse_theory(read_text("mechanics"), "mechanics")
    T = doc.theory
    assert T.name == "mechanics"
    assert T.fields == ("q",)
    assert T.space.coord_names == ("t",)
    assert T.lagrangian == q_t * q_t / 2
    assert set(T.named_solutions) == {"rest", "linear"}
    assert T.named_solutions["linear"]["q"] == Expr.of(coordinate(0))
    assert doc.text.startswith("# free particle")


def test_parse_gauge_theory():
    T = parse_theory(read_text("em2d")).theory
    assert T.gauge_params == ("eps",)
    assert T.generators == {
        ("A0", "eps", MultiIndex([0])): Expr.constant(1),
        ("A1", "eps", MultiIndex([1])): Expr.constant(1),
    }
    assert T.structure is not None
    assert T.structure.is_zero()
    assert T.named_solutions["vacuum"] == {"A0": Expr(), "A1": Expr()}


def test_numeric_indices():
    T = parse_theory(HEADER + "lagrangian q_[0]^2\n").theory
    assert T.lagrangian == q_t * q_t


def test_missing_space():
    e = syntax_error("field q\n")
    assert (e.line, e.column) == (1, 1)
    assert e.expected == {"space"}


def test_statement_must_end_the_line():
    e = syntax_error("space dim=1 coords=t field q\n")
    assert (e.line, e.column) == (1, 22)


def test_unknown_keyword():
    e = syntax_error(HEADER + "potential q^2\n")
    assert e.line == 3
    assert "lagrangian" in e.expected


def test_division_is_rejected():
    e = syntax_error(HEADER + "lagrangian q / 2\n")
    assert "division" in e.msg
    assert (e.line, e.column) == (3, 14)

    e = syntax_error(HEADER + "lagrangian q^2/2\n")
    assert "division" in e.msg
    assert (e.line, e.column) == (3, 15)


def test_reserved_and_duplicate_names():
    e = semantic_error("space dim=1 coords=t\nfield ghost\n")
    assert (e.line, e.column) == (2, 7)
    e = semantic_error("space dim=1 coords=t\nfield q q\n")
    assert "already declared" in e.msg
    e = semantic_error("space dim=1 coords=t\nfield t\n")
    assert "already declared" in e.msg
    e = semantic_error("space dim=1 coords=dim\n")
    assert "reserved" in e.msg


def test_unknown_names():
    e = semantic_error(HEADER + "lagrangian p^2\n")
    assert (e.line, e.column) == (3, 12)
    assert "unknown field" in e.msg
    e = semantic_error(HEADER + "lagrangian q_[1]^2\n")
    assert "out of range" in e.msg
    e = semantic_error(HEADER + "lagrangian t_[t] * q\n")
    assert "cannot carry a jet" in e.msg


def test_lagrangian_restrictions():
    e = semantic_error(HEADER + "lagrangian q\nlagrangian q\n")
    assert e.line == 4
    e = semantic_error(
        "space dim=1 coords=t\nfield q\nparam a\n"
        "lagrangian ghost(a) * q\n"
    )
    assert "only contain coordinates and fields" in e.msg


def test_structure_entries():
    T = parse_theory(GAUGE_HEADER + "structure c a b [] [] = 1\n").theory
    one = Expr.constant(1)
    assert T.structure.apply({"a": one}, {"b": one}) == {"c": one}
    assert T.structure.apply({"b": one}, {"a": one}) == {"c": -one}

    T = parse_theory(GAUGE_HEADER + "structure c a b [x] [] = q\n").theory
    assert T.structure.depends_on_fields()


def test_structure_conflicts():
    e = semantic_error(
        GAUGE_HEADER
        + "structure abelian\nstructure c a b [] [] = 1\n"
    )
    assert "conflicts" in e.msg
    assert e.line == 4
    e = semantic_error(
        GAUGE_HEADER
        + "structure c a b [] [] = 1\nstructure c b a [] [] = 1\n"
    )
    assert "skew" in e.msg


def test_solutions_are_functions_of_coordinates():
    e = semantic_error(HEADER + "lagrangian q\nsolution s { q = q_[t] }\n")
    assert "only depend on coordinates" in e.msg
    e = semantic_error(HEADER + "solution s { p = t }\n")
    assert "unknown field" in e.msg


def test_blocks_span_lines():
    text = HEADER + "solution s {\n  q = t,\n}\nsolution r { q = 1 }\n"
    T = parse_theory(text).theory
    assert set(T.named_solutions) == {"s", "r"}
    e = semantic_error(HEADER + "solution s { q = t, q = 1 }\n")
    assert "assigned twice" in e.msg
    e = semantic_error(HEADER + "solution s { }\nsolution s { }\n")
    assert "declared twice" in e.msg


def test_auxiliary(em2d, mechanics):
    doc = parse_auxiliary(read_text("em2d.sym"), em2d)
    assert set(doc.symmetries) == {"translation", "shift"}
    assert doc.symmetries["shift"] == EvolutionaryField(
        {"A0": Expr.constant(1)}
    )
    assert doc.theory.fields == em2d.fields

    doc = parse_auxiliary(read_text("mechanics.cur"), mechanics)
    assert doc.currents["energy"] == {0: q_t * q_t / 2}
    assert doc.symmetries["momentum"] == EvolutionaryField(
        {"q": Expr.constant(1)}
    )

    doc = parse_auxiliary("solution extra { q = 2 }\n", mechanics)
    assert set(doc.theory.named_solutions) == {"rest", "linear", "extra"}


def test_auxiliary_errors(mechanics):
    with pytest.raises(DSLSyntaxError):
        parse_auxiliary("field p\n", mechanics)
    with pytest.raises(DSLSemanticError):
        parse_auxiliary("symmetry s { p = 1 }\n", mechanics)
    with pytest.raises(DSLSemanticError):
        parse_auxiliary("gauge g { eps = 1 }\n", mechanics)
    with pytest.raises(DSLSemanticError):
        parse_auxiliary("current j { x = q }\n", mechanics)


def test_parse_expr(em2d):
    assert parse_expr("anti(ghost(eps))_[x]", em2d) == Expr.of(
        ghost_antifield("eps", [0])
    )
    assert parse_expr("ghost(eps)_[xy]", em2d) == Expr.of(
        ghost("eps", [0, 1])
    )
    assert parse_expr("dx(y)", em2d) == Expr.of(basis_form(1))
    assert parse_expr("-(A0 + 1)^2", em2d) == -(
        (Expr.of(field_jet("A0")) + Expr.constant(1)) ** 2
    )
    with pytest.raises(DSLSyntaxError):
        parse_expr("A0 A1", em2d)
    with pytest.raises(DSLSemanticError):
        parse_expr("ghost(A0)", em2d)
