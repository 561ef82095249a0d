import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from jetbrane.bv import (
    LocalFunctional,
    Residual,
    Zero,
    anticommutator_residuals,
    antibracket,
    brst,
    brst_decomposition,
    brst_operator,
    build_master_action,
    check_master,
    derived_bracket,
    extend,
    functional_vf,
    ghost_number,
    koszul_tate,
    longitudinal,
    master_action_candidate,
    square_residuals,
)
from jetbrane.exceptions import NeedsHigherOrder, PreconditionError
from jetbrane.jet import prolong_evolutionary, total_derivative
from jetbrane.kernel import (
    Expr,
    antifield,
    coordinate,
    field_jet,
    ghost,
    ghost_antifield,
)
from jetbrane.sampling import ExprSampler

q_tt = Expr.of(field_jet("q", [0, 0]))


@pytest.fixture(scope="module")
def em2d_bv(em2d):
    XT = extend(em2d)
    return XT, master_action_candidate(XT)


def test_extended_generators(mechanics):
    XT = extend(mechanics)
    assert len(XT.roots()) == 2
    assert len(XT.generators(1)) == 4
    assert XT.pairs == [(field_jet("q"), antifield("q"))]


def test_ghost_number(em2d_bv):
    _, S = em2d_bv
    assert ghost_number(S) == 0
    assert ghost_number(Expr.of(ghost("eps"))) == 1
    assert ghost_number(Expr.of(antifield("A0"))) == -1
    assert ghost_number(Expr.of(ghost_antifield("eps"))) == -2
    with pytest.raises(PreconditionError):
        ghost_number(Expr.of(ghost("eps")) + Expr.of(antifield("A0")))


def test_koszul_tate(mechanics, em2d):
    XT = extend(mechanics)
    assert koszul_tate(Expr.of(antifield("q")), XT) == -q_tt
    assert koszul_tate(Expr.of(field_jet("q")), XT) == 0

    XT = extend(em2d)
    a0 = Expr.of(antifield("A0"))
    a1 = Expr.of(antifield("A1"))
    expected = -total_derivative(a0, 0) - total_derivative(a1, 1)
    assert koszul_tate(Expr.of(ghost_antifield("eps")), XT) == expected


def test_longitudinal(em2d, ym):
    XT = extend(em2d)
    c_x = Expr.of(ghost("eps", [0]))
    assert longitudinal(Expr.of(field_jet("A0")), XT) == c_x
    assert longitudinal(Expr.of(ghost("eps")), XT) == 0
    assert longitudinal(Expr.of(antifield("A0")), XT) == 0

    XT = extend(ym)
    c1, c2 = Expr.of(ghost("e1")), Expr.of(ghost("e2"))
    assert longitudinal(Expr.of(ghost("e3")), XT) == -(c1 * c2)


@pytest.mark.parametrize(
    "name", ["mechanics", "em2d", "cs-ab3d", "ym-su2-2d"]
)
def test_nilpotency(name, load):
    XT = extend(load(name))
    assert square_residuals(lambda e: koszul_tate(e, XT), XT) == {}
    assert square_residuals(lambda e: longitudinal(e, XT), XT) == {}


def test_anticommutator(em2d):
    XT = extend(em2d)

    def delta(e):
        return koszul_tate(e, XT)

    def gamma(e):
        return longitudinal(e, XT, extended=True)

    assert anticommutator_residuals(delta, gamma, XT) == {}


def test_master_equation(em2d, ym, mechanics):
    for theory in (mechanics, em2d, ym):
        XT = extend(theory)
        S = build_master_action(XT)
        assert isinstance(check_master(S, XT), Zero)


def test_master_action_on_broken_algebra(load):
    XT = extend(load("ym-su2-broken"))
    with pytest.raises(NeedsHigherOrder):
        build_master_action(XT)
    S = master_action_candidate(XT)
    result = check_master(S, XT)
    assert isinstance(result, Residual)
    assert not result.functional.is_zero()


def test_check_master_ghost_number(em2d_bv):
    XT, _ = em2d_bv
    with pytest.raises(PreconditionError):
        check_master(LocalFunctional(Expr.of(ghost("eps"))), XT)


def test_brst(em2d_bv):
    XT, S = em2d_bv
    c_star = Expr.of(ghost_antifield("eps"))
    assert brst(S, c_star, XT) == koszul_tate(c_star, XT)
    A0 = Expr.of(field_jet("A0"))
    assert brst(S, A0, XT) == Expr.of(ghost("eps", [0]))

    parts = brst_decomposition(brst_operator(S, XT), ghost_antifield("eps"))
    assert parts == {-1: koszul_tate(c_star, XT)}


def test_brst_needs_master_action(em2d_bv):
    XT, S = em2d_bv
    with pytest.raises(PreconditionError):
        brst_operator(S + LocalFunctional(Expr.of(antifield("A0"))), XT)


def test_antibracket_matches_functional_field(em2d_bv):
    XT, S = em2d_bv
    Q = functional_vf(S, XT)
    for g in (field_jet("A1"), antifield("A0"), ghost_antifield("eps")):
        b = Expr.of(g)
        expected = LocalFunctional(prolong_evolutionary(Q, b))
        assert antibracket(S, LocalFunctional(b), XT) == expected


def test_functionals_modulo_divergence(em2d_bv):
    XT, _ = em2d_bv
    A0 = Expr.of(field_jet("A0"))
    assert LocalFunctional(total_derivative(A0 * A0, 1)).is_zero()
    assert LocalFunctional(A0) != LocalFunctional(A0 * A0)


def test_derived_bracket(em2d_bv):
    XT, S = em2d_bv
    A0 = LocalFunctional(Expr.of(field_jet("A0")))
    with pytest.raises(PreconditionError):
        derived_bracket(A0, A0, LocalFunctional(Expr.of(antifield("A0"))), XT)
    ghost_density = LocalFunctional(Expr.of(ghost("eps")))
    assert derived_bracket(A0, A0, ghost_density, XT).is_zero()


def test_antibracket_raises_ghost_number(em2d_bv):
    XT, S = em2d_bv
    x = Expr.of(coordinate(0))
    for g in (field_jet("A0"), ghost_antifield("eps")):
        b = LocalFunctional(x * Expr.of(g))
        bracket = antibracket(S, b, XT)
        assert not bracket.is_zero()
        assert ghost_number(bracket) == ghost_number(b) + 1


def small_functionals(XT, seed, count):
    sampler = ExprSampler(
        XT.space, seed=seed, max_order=1, max_degree=2, max_terms=1
    )
    roots = XT.roots()
    return [LocalFunctional(sampler.monomial(roots)) for _ in range(count)]


def parity(A):
    return ghost_number(A) % 2


@settings(deadline=None, max_examples=50)
@given(st.integers(0, 10**6))
def test_antibracket_graded_jacobi(em2d_bv, seed):
    XT, _ = em2d_bv
    A, B, C = small_functionals(XT, seed, 3)

    def term(X, Y, Z):
        sign = -1 if (parity(X) + 1) * (parity(Z) + 1) % 2 else 1
        return antibracket(X, antibracket(Y, Z, XT), XT).scale(sign)

    cyclic = term(A, B, C) + term(B, C, A) + term(C, A, B)
    assert cyclic.is_zero()


@settings(deadline=None, max_examples=50)
@given(st.integers(0, 10**6))
def test_antibracket_ghost_number_is_additive(em2d_bv, seed):
    XT, _ = em2d_bv
    A, B = small_functionals(XT, seed, 2)
    bracket = antibracket(A, B, XT)
    if not bracket.integrand.is_zero():
        assert ghost_number(bracket) == ghost_number(A) + ghost_number(B) + 1
    assert antibracket(B, A, XT) == antibracket(A, B, XT).scale(
        (-1) ** ((parity(A) + 1) * (parity(B) + 1) + 1)
    )
