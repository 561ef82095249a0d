import pytest
from jetbrane.diffops import (
    BiDiffOp,
    TotalDiffOp,
    adjoint,
    apply,
    compose,
    frechet,
    frechet_of_operator,
    helmholtz_check,
    is_noether,
    module_action,
    rho,
)
from jetbrane.exceptions import ConfigurationError, IndexMismatchError
from jetbrane.jet import (
    EvolutionaryField,
    euler_lagrange,
    functionals_equal,
    total_derivative,
)
from jetbrane.kernel import Expr, MultiIndex, coordinate, field_jet

q = Expr.of(field_jet("q"))
q_x = Expr.of(field_jet("q", [0]))
q_y = Expr.of(field_jet("q", [1]))
q_xx = Expr.of(field_jet("q", [0, 0]))
p = Expr.of(field_jet("p"))
x = Expr.of(coordinate(0))


@pytest.fixture
def operator() -> TotalDiffOp:
    return TotalDiffOp(
        ["a"],
        ["q", "p"],
        {
            ("a", "q", MultiIndex([0])): q * x,
            ("a", "q", MultiIndex([0, 1])): p,
            ("a", "p", MultiIndex()): q_x,
        },
    )


def test_label_ranges_are_checked():
    with pytest.raises(IndexMismatchError):
        TotalDiffOp(["a"], ["q"], {("b", "q", MultiIndex()): q})
    with pytest.raises(IndexMismatchError):
        TotalDiffOp.identity(["q"]) + TotalDiffOp.identity(["p"])


def test_apply_and_compose():
    dx = TotalDiffOp.partial(0, ["q"])
    dy = TotalDiffOp.partial(1, ["q"])
    assert compose(dx, dy) == TotalDiffOp.partial([0, 1], ["q"])
    assert apply(dx, {"q": q * q})["q"] == total_derivative(q * q, 0)
    assert compose(dx, TotalDiffOp.identity(["q"])) == dx
    with pytest.raises(IndexMismatchError):
        compose(dx, TotalDiffOp.identity(["p"]))


def test_compose_uses_leibniz_rule():
    dx = TotalDiffOp.partial(0, ["q"])
    mult = TotalDiffOp.identity(["q"]).left_multiply(x)
    composed = compose(dx, mult)
    assert composed.coefficient("q", "q") == 1
    assert composed.coefficient("q", "q", [0]) == x


def test_adjoint(operator):
    dx = TotalDiffOp.partial(0, ["q"])
    assert adjoint(dx) == -dx
    assert adjoint(adjoint(operator)) == operator
    assert adjoint(operator).out_labels == ("q", "p")


def test_adjoint_integrates_by_parts(operator):
    f = {"a": x * q_y}
    g = {"q": q * q, "p": q_x}
    lhs = f["a"] * apply(operator, g)["a"]
    dual = apply(adjoint(operator), f)
    rhs = dual["q"] * g["q"] + dual["p"] * g["p"]
    assert functionals_equal(lhs, rhs)


def test_frechet():
    D = frechet({"a": q * q_x}, ["q"])
    assert D.coefficient("a", "q") == q_x
    assert D.coefficient("a", "q", [0]) == q
    assert D.order == 1


def test_helmholtz():
    L = q_x * q_x / 2 + q * q * q_y
    E = {"q": euler_lagrange(L, "q")}
    assert helmholtz_check(E)
    assert not helmholtz_check({"q": q_x})


def test_is_noether():
    E = {"q": -q_xx}
    assert is_noether(TotalDiffOp.zero(["a"], ["q"]), E)
    assert not is_noether(TotalDiffOp.identity(["q"]), E)
    with pytest.raises(IndexMismatchError):
        is_noether(TotalDiffOp.identity(["p"]), E)


def test_rho():
    N = TotalDiffOp(["a"], ["q"], {("a", "q", MultiIndex([0])): q_x})
    assert rho(N) == EvolutionaryField({"q": -q_xx})
    with pytest.raises(IndexMismatchError):
        rho(TotalDiffOp.identity(["q", "p"]))


def test_frechet_of_operator():
    N = TotalDiffOp(["a"], ["q"], {("a", "q", MultiIndex([0])): q * q})
    D = frechet_of_operator(N, ["q"])
    assert D.coefficient("q", "q", [0]) == q.scale(2)


def test_module_action_of_translation():
    N = TotalDiffOp.partial(0, ["q"])
    Q = EvolutionaryField({"q": q_x})
    assert module_action(Q, N) == TotalDiffOp.partial([0, 0], ["q"])


def test_bi_diff_op_completion():
    one = Expr.constant(1)
    C = BiDiffOp.from_entries({("g", "a", "b", (), ()): one})
    assert C.coeffs[("g", "b", "a", MultiIndex(), MultiIndex())] == -1
    assert not C.depends_on_fields()
    result = C.apply({"a": x, "b": one}, {"a": x, "b": one})
    assert result["g"].is_zero()
    result = C.apply({"a": x}, {"b": q})
    assert result["g"] == x * q
    with pytest.raises(ConfigurationError):
        BiDiffOp({("g", "a", "b", (), ()): one})
    with pytest.raises(ConfigurationError):
        BiDiffOp.from_entries(
            {
                ("g", "a", "b", (), ()): one,
                ("g", "b", "a", (), ()): one,
            }
        )


def test_bi_diff_op_field_dependence():
    C = BiDiffOp.from_entries({("g", "a", "b", (0,), ()): q})
    assert C.depends_on_fields()
