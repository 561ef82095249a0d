"""
Randomized identities of the jet calculus, operators and brackets. Each
example draws a seed for the package sampler.
"""
from hypothesis import given, settings
from hypothesis import strategies as st
from jetbrane.algebroid import ev_bracket
from jetbrane.diffops import (
    TotalDiffOp,
    adjoint,
    apply,
    characteristic_frechet,
    compose,
    module_action,
    prolong_operator,
)
from jetbrane.jet import (
    EvolutionaryField,
    GeneralizedField,
    euler_lagrange,
    horizontal_differential,
    prolong_evolutionary,
    prolong_generalized,
    total_derivative,
)
from jetbrane.kernel import (
    Expr,
    SpaceSpec,
    basis_form,
    commutator,
    field_jet,
)
from jetbrane.sampling import ExprSampler

SPACE = SpaceSpec(2, ("x", "y"))
FIELDS = ("q", "p")
ROOTS = [field_jet(i) for i in FIELDS]

seeds = st.integers(0, 10**6)
spaces = st.sampled_from([SpaceSpec(1, ("t",)), SPACE])


def random_operator(sampler, labels=FIELDS):
    coeffs = {}
    for a in labels:
        for b in labels:
            if sampler.rng.random() < 0.6:
                mu = sampler.rng.choice(sampler.jets)
                coeffs[(a, b, mu)] = sampler.expr(ROOTS)
    return TotalDiffOp(labels, labels, coeffs)


def prolongation(Q):
    return lambda e: prolong_evolutionary(Q, e)


@settings(deadline=None)
@given(seeds)
def test_prolongation_commutes_with_total_derivatives(seed):
    sampler = ExprSampler(SPACE, seed=seed)
    Q = sampler.even_field(FIELDS, ROOTS)
    f = sampler.expr(ROOTS)
    for nu in range(SPACE.dim):
        assert prolong_evolutionary(
            Q, total_derivative(f, nu)
        ) == total_derivative(prolong_evolutionary(Q, f), nu)

    def d_h(e):
        return horizontal_differential(e, SPACE)

    assert commutator(prolongation(Q), d_h, f, False, True).is_zero()


@settings(deadline=None)
@given(seeds)
def test_adjoint_is_an_involutive_antihomomorphism(seed):
    sampler = ExprSampler(SPACE, seed=seed, max_terms=2)
    O1 = random_operator(sampler)
    O2 = random_operator(sampler)
    assert adjoint(adjoint(O1)) == O1
    assert adjoint(compose(O1, O2)) == compose(adjoint(O2), adjoint(O1))


@settings(deadline=None)
@given(seeds)
def test_adjoint_pairing_is_a_divergence(seed):
    sampler = ExprSampler(SPACE, seed=seed, max_terms=2)
    O = random_operator(sampler, ("q",))
    f = sampler.expr(ROOTS)
    g = sampler.expr(ROOTS)
    lhs = g * apply(O, {"q": f})["q"]
    rhs = f * apply(adjoint(O), {"q": g})["q"]
    assert euler_lagrange(lhs - rhs, "q").is_zero()
    assert euler_lagrange(lhs - rhs, "p").is_zero()


@settings(deadline=None)
@given(seeds)
def test_euler_lagrange_commutes_with_symmetries(seed):
    sampler = ExprSampler(SPACE, seed=seed)
    Q = sampler.even_field(FIELDS, ROOTS)
    f = sampler.expr(ROOTS)
    el = {i: euler_lagrange(f, i) for i in FIELDS}
    correction = apply(adjoint(characteristic_frechet(Q, FIELDS)), el)
    moved = prolong_evolutionary(Q, f)
    for j in FIELDS:
        lhs = prolong_evolutionary(Q, el[j]) + correction[j]
        assert lhs == euler_lagrange(moved, j)


@settings(deadline=None)
@given(seeds)
def test_bracket_is_the_commutator(seed):
    sampler = ExprSampler(SPACE, seed=seed)
    Q1 = sampler.even_field(FIELDS, ROOTS)
    Q2 = sampler.even_field(FIELDS, ROOTS)
    f = sampler.expr(ROOTS)
    assert prolong_evolutionary(ev_bracket(Q1, Q2), f) == commutator(
        prolongation(Q1), prolongation(Q2), f
    )
    assert ev_bracket(Q1, Q2) == -ev_bracket(Q2, Q1)


@settings(deadline=None, max_examples=50)
@given(seeds)
def test_bracket_jacobi(seed):
    sampler = ExprSampler(SPACE, seed=seed, max_degree=1, max_terms=2)
    Q1, Q2, Q3 = (sampler.even_field(FIELDS, ROOTS) for _ in range(3))
    cyclic = (
        ev_bracket(Q1, ev_bracket(Q2, Q3))
        + ev_bracket(Q2, ev_bracket(Q3, Q1))
        + ev_bracket(Q3, ev_bracket(Q1, Q2))
    )
    assert cyclic.is_zero()


@settings(deadline=None, max_examples=100)
@given(seeds, spaces)
def test_generalized_prolongation_commutes_with_horizontal_differential(
    seed, space
):
    sampler = ExprSampler(space, seed=seed, max_order=1, max_terms=2)
    X = GeneralizedField(
        {mu: sampler.expr(ROOTS) for mu in range(space.dim)},
        {i: sampler.expr(ROOTS) for i in FIELDS},
    )
    mu = sampler.rng.randrange(space.dim)
    omega = sampler.expr(ROOTS) + sampler.expr(ROOTS) * Expr.of(
        basis_form(mu)
    )

    def pr(e):
        return prolong_generalized(X, e, space)

    def d_h(e):
        return horizontal_differential(e, space)

    assert commutator(pr, d_h, omega, False, True).is_zero()


@settings(deadline=None, max_examples=50)
@given(seeds)
def test_symmetry_acts_on_frechet_adjoint_by_chain_rule(seed):
    sampler = ExprSampler(SPACE, seed=seed, max_order=1, max_terms=2)
    Q1 = sampler.even_field(FIELDS, ROOTS)
    Q2 = sampler.even_field(FIELDS, ROOTS)
    D1 = characteristic_frechet(Q1, FIELDS)
    D2 = characteristic_frechet(Q2, FIELDS)
    moved = EvolutionaryField(
        {i: prolong_evolutionary(Q1, v) for i, v in Q2.characteristics.items()}
    )
    D_moved = characteristic_frechet(moved, FIELDS)
    assert prolong_operator(Q1, D2) == D_moved - compose(D2, D1)
    assert prolong_operator(Q1, adjoint(D2)) == adjoint(D_moved) - adjoint(
        compose(D2, D1)
    )


@settings(deadline=None, max_examples=50)
@given(seeds)
def test_module_action_is_a_derivation_of_composition(seed):
    sampler = ExprSampler(SPACE, seed=seed, max_order=1, max_terms=2)
    Q = sampler.even_field(FIELDS, ROOTS)
    O = random_operator(sampler)
    N = random_operator(sampler)
    assert module_action(Q, compose(O, N)) == compose(
        prolong_operator(Q, O), N
    ) + compose(O, module_action(Q, N))
