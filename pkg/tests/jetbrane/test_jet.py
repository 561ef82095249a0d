import pytest
from hypothesis import given
from hypothesis import strategies as st
from jetbrane.exceptions import InhomogeneityError, PreconditionError
from jetbrane.jet import (
    EvolutionaryField,
    GeneralizedField,
    divergence_normal_form,
    euler_lagrange,
    evaluate_on_solution,
    functionals_equal,
    horizontal_differential,
    multi_total_derivative,
    prolong_evolutionary,
    prolong_generalized,
    solve_divergence,
    solve_superpotential,
    total_derivative,
)
from jetbrane.kernel import (
    Expr,
    MultiIndex,
    SpaceSpec,
    antifield,
    basis_form,
    coordinate,
    field_jet,
    ghost,
)
from jetbrane.sampling import ExprSampler

SPACE = SpaceSpec(2, ("x", "y"))
q = Expr.of(field_jet("q"))
q_x = Expr.of(field_jet("q", [0]))
q_y = Expr.of(field_jet("q", [1]))
q_xx = Expr.of(field_jet("q", [0, 0]))
q_yy = Expr.of(field_jet("q", [1, 1]))
x = Expr.of(coordinate(0))


def test_total_derivative():
    assert total_derivative(q * q, 0) == (q * q_x).scale(2)
    assert total_derivative(x * q, 0) == q + x * q_x
    assert total_derivative(x, 1).is_zero()
    assert multi_total_derivative(q, MultiIndex([0, 1])) == Expr.of(
        field_jet("q", [0, 1])
    )


def test_total_derivatives_commute():
    e = x * q * q_y + q_x * q_x
    assert total_derivative(total_derivative(e, 0), 1) == total_derivative(
        total_derivative(e, 1), 0
    )


def test_horizontal_differential_squares_to_zero():
    e = x * q * q_y
    d = horizontal_differential
    assert d(d(e, SPACE), SPACE).is_zero()
    assert d(e, SPACE) == Expr.of(basis_form(0)) * total_derivative(
        e, 0
    ) + Expr.of(basis_form(1)) * total_derivative(e, 1)


def test_euler_lagrange_of_laplace_lagrangian():
    L = (q_x * q_x + q_y * q_y) / 2
    assert euler_lagrange(L, "q") == -q_xx - q_yy


def test_euler_lagrange_rejects_forms():
    with pytest.raises(PreconditionError):
        euler_lagrange(q * Expr.of(basis_form(0)), "q")


def test_euler_lagrange_rejects_mixed_ghost_numbers():
    c = Expr.of(ghost("a"))
    mixed = q * q + q * c
    with pytest.raises(InhomogeneityError) as e:
        euler_lagrange(mixed, "q")
    assert e.value.first == q * q
    assert e.value.second == q * c

    assert functionals_equal(mixed + total_derivative(q * c, 0), mixed)
    assert not functionals_equal(mixed, q * q)


def test_euler_lagrange_of_antifield_sides():
    star = Expr.of(antifield("q"))
    c = Expr.of(ghost("a"))
    e = c * star
    assert euler_lagrange(e, antifield("q"), "left") == -c
    assert euler_lagrange(e, antifield("q"), "right") == c


@given(st.integers(0, 1000), st.integers(0, 1))
def test_euler_lagrange_kills_total_derivatives(seed, nu):
    sampler = ExprSampler(SPACE, seed=seed)
    f = sampler.expr([field_jet("q"), field_jet("p")])
    for name in ("q", "p"):
        assert euler_lagrange(total_derivative(f, nu), name).is_zero()


@given(st.integers(0, 1000))
def test_divergence_normal_form_reconstructs(seed):
    sampler = ExprSampler(SPACE, seed=seed)
    f = sampler.expr([field_jet("q")])
    nf = divergence_normal_form(f, SPACE)
    assert nf.reconstruct() == f


def test_total_derivative_is_exact():
    f = total_derivative(q * q_y, 0)
    nf = divergence_normal_form(f, SPACE)
    assert nf.is_exact()
    assert nf.witness == {1: q * q_x}
    assert nf.reconstruct() == f


def test_divergence_normal_form_keeps_lagrangians():
    L = q_x * q_x / 2
    nf = divergence_normal_form(L, SPACE)
    assert not nf.is_exact()
    assert functionals_equal(nf.core, L)


def test_solve_divergence():
    witness = solve_divergence(q_x * q_y * q, SPACE)
    assert witness is None
    assert solve_divergence(q, SPACE) is None
    f = x * q_x + q
    witness = solve_divergence(f, SPACE)
    assert witness is not None
    reconstructed = sum(
        (total_derivative(k, mu) for mu, k in witness.items()), Expr()
    )
    assert reconstructed == f
    assert solve_divergence(Expr(), SPACE) == {}


def test_solve_superpotential():
    s = x * q * q_x
    j = {0: total_derivative(s, 1), 1: -total_derivative(s, 0)}
    S = solve_superpotential(j, SPACE)
    assert S is not None and set(S) == {(0, 1)}
    assert total_derivative(S[(0, 1)], 1) == j[0]
    assert -total_derivative(S[(0, 1)], 0) == j[1]
    assert solve_superpotential({0: q}, SPACE) is None
    assert solve_superpotential({0: q_x}, SpaceSpec(1, ("t",))) is None
    assert solve_superpotential({1: Expr()}, SPACE) == {}


def test_functionals_equal():
    assert functionals_equal(q * q_xx, -q_x * q_x)
    assert not functionals_equal(q * q_xx, q_x * q_x)


def test_prolong_evolutionary():
    Q = EvolutionaryField({"q": q_x})
    assert prolong_evolutionary(Q, q_y) == Expr.of(field_jet("q", [0, 1]))
    assert prolong_evolutionary(Q, x * q * q) == (x * q * q_x).scale(2)
    assert prolong_evolutionary(EvolutionaryField(), q).is_zero()


def test_evolutionary_field_arithmetic():
    Q1 = EvolutionaryField({"q": q_x})
    Q2 = EvolutionaryField({"q": -q_x, "p": q})
    assert (Q1 + Q2) == EvolutionaryField({"p": q})
    assert (Q1 - Q1).is_zero()
    assert Q1.scale(2).characteristics["q"] == q_x.scale(2)
    assert not Q1.odd
    C = EvolutionaryField.from_components(
        {field_jet("q"): Expr.of(ghost("a"))}
    )
    assert C.odd
    assert C.component(field_jet("q", [0])) == Expr.of(ghost("a"))


def test_evolutionary_field_parity():
    c = Expr.of(ghost("a"))
    assert EvolutionaryField({"q": c, "p": q * c}).odd
    with pytest.raises(InhomogeneityError) as e:
        EvolutionaryField({"q": q_x, "p": c})
    assert {str(e.value.first), str(e.value.second)} == {"ghost(a)", "q_[0]"}


def test_prolong_generalized_translation():
    e = x * q
    X = GeneralizedField(P={0: Expr.constant(1)})
    assert prolong_generalized(X, e, SPACE) == q
    X = GeneralizedField(P={0: Expr.constant(1)}, R={"q": q_x})
    assert prolong_generalized(X, e, SPACE) == total_derivative(e, 0)


def test_prolong_generalized_vertical_part():
    X = GeneralizedField(R={"q": Expr.constant(1)})
    assert prolong_generalized(X, q * q_x, SPACE) == q_x


def test_evaluate_on_solution():
    solution = {"q": x * x}
    assert evaluate_on_solution(q_xx, solution) == 2
    assert evaluate_on_solution(q_y, solution).is_zero()
    assert evaluate_on_solution(q * q_x, solution) == (x * x * x).scale(2)
