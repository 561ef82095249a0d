"""
Gauge theories, symmetry predicates and the gauge algebroid.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from loguru import logger

from jetbrane.consts import thread_count
from jetbrane.diffops import (
    BiDiffOp,
    TotalDiffOp,
    adjoint,
    apply,
    characteristic_frechet,
    helmholtz_check,
    is_noether,
    rho,
)
from jetbrane.exceptions import (
    ConfigurationError,
    InternalConsistencyError,
    PreconditionError,
    SchemaError,
    TheoryValidationError,
)
from jetbrane.jet import (
    EvolutionaryField,
    divergence_normal_form,
    euler_lagrange,
    prolong_evolutionary,
    solve_superpotential,
    total_derivative,
)
from jetbrane.kernel import (
    Expr,
    Kind,
    MultiIndex,
    SpaceSpec,
    coordinate,
    field_jet,
    grading_of,
    multi_indices,
    render_expr,
)
from jetbrane.weak import (
    AnsatzConfig,
    Certified,
    NotCertified,
    certify_all,
    refute_on_solutions,
    solves_equations,
)

GeneratorKey = tuple[str, str, MultiIndex]


@dataclass(frozen=True, eq=False)
class Theory:
    """
    A Lagrangian field theory with a generating set of gauge symmetries.

    ``generators`` holds the coefficients R^{i(mu)}_alpha of the gauge
    generators, keyed by (field, gauge parameter, multi-index), and
    ``structure`` the bi-differential operator C^g_{ab} of the gauge
    algebra when one is known.
    """

    space: SpaceSpec
    fields: tuple[str, ...]
    lagrangian: Expr
    gauge_params: tuple[str, ...] = ()
    generators: Mapping[GeneratorKey, Expr] = field(default_factory=dict)
    structure: BiDiffOp | None = None
    named_solutions: Mapping[str, Mapping[str, Expr]] = field(
        default_factory=dict
    )
    name: str = "theory"

    def __post_init__(self) -> None:
        object.__setattr__(self, "fields", tuple(self.fields))
        object.__setattr__(self, "gauge_params", tuple(self.gauge_params))
        labels = self.fields + self.gauge_params
        if len(set(labels)) != len(labels):
            raise SchemaError("field and parameter names must be distinct")
        for g in self.lagrangian.generators():
            self.space.check_generator(g)
            if g.kind not in (Kind.COORDINATE, Kind.FIELD):
                raise SchemaError(
                    "the Lagrangian may only contain coordinates and fields",
                    g.base,
                )
            if g.kind == Kind.FIELD and g.base not in self.fields:
                raise SchemaError(f"unknown field `{g.base}`", g.base)
        generators = {}
        for (i, alpha, mu), coeff in self.generators.items():
            if i not in self.fields:
                raise SchemaError(f"unknown field `{i}`", i)
            if alpha not in self.gauge_params:
                raise SchemaError(f"unknown gauge parameter `{alpha}`", alpha)
            mu = MultiIndex(mu)
            for nu in mu:
                self.space.check_index(nu)
            generators[(i, alpha, mu)] = coeff
        object.__setattr__(self, "generators", generators)
        if self.structure is not None:
            for key, _ in self.structure.items():
                for label in key[:3]:
                    if label not in self.gauge_params:
                        raise SchemaError(
                            f"unknown gauge parameter `{label}`", label
                        )

    @cached_property
    def equations(self) -> dict[str, Expr]:
        return {
            i: euler_lagrange(self.lagrangian, i, known=set(self.fields))
            for i in self.fields
        }

    @cached_property
    def generator_operator(self) -> TotalDiffOp:
        """R as an operator from gauge parameters to fields."""
        return TotalDiffOp(self.fields, self.gauge_params, self.generators)

    @cached_property
    def noether_operators(self) -> TotalDiffOp:
        """The generating set R^dagger, from fields to gauge parameters."""
        return adjoint(self.generator_operator)

    def noether_identity_residuals(self) -> dict[str, Expr]:
        return apply(self.noether_operators, self.equations)

    def unsolved_solutions(self) -> list[str]:
        return [
            name
            for name, solution in sorted(self.named_solutions.items())
            if not solves_equations(solution, self.equations)
        ]

    def validate(self) -> None:
        """
        Raise TheoryValidationError unless the equations are variational,
        every generator satisfies its Noether identity and every named
        solution solves the equations.
        """
        if grading_of(self.lagrangian).form_degree != 0:
            raise TheoryValidationError(
                "the Lagrangian must have form degree 0", "grading"
            )
        if not helmholtz_check(self.equations):
            raise TheoryValidationError(
                "equations of motion fail the Helmholtz conditions",
                "helmholtz",
            )
        failing = [
            alpha
            for alpha, value in self.noether_identity_residuals().items()
            if not value.is_zero()
        ]
        if failing:
            raise TheoryValidationError(
                "Noether identity fails for " + ", ".join(failing),
                "noether",
            )
        unsolved = self.unsolved_solutions()
        if unsolved:
            raise TheoryValidationError(
                "named solutions do not solve the equations: "
                + ", ".join(unsolved),
                "solutions",
            )
        logger.debug(f"theory `{self.name}` validated")


@dataclass(frozen=True, eq=False)
class GaugeParameter:
    components: Mapping[str, Expr] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for value in self.components.values():
            grading_of(value)
        object.__setattr__(
            self,
            "components",
            {
                k: v
                for k, v in sorted(self.components.items())
                if not v.is_zero()
            },
        )

    def component(self, alpha: str) -> Expr:
        return self.components.get(alpha, Expr())

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GaugeParameter):
            return NotImplemented
        return self.components == other.components

    def __add__(self, other: GaugeParameter) -> GaugeParameter:
        result = dict(self.components)
        for k, v in other.components.items():
            result[k] = result.get(k, Expr()) + v
        return GaugeParameter(result)

    def __neg__(self) -> GaugeParameter:
        return GaugeParameter({k: -v for k, v in self.components.items()})

    def __sub__(self, other: GaugeParameter) -> GaugeParameter:
        return self + (-other)

    def render(self, space: SpaceSpec | None = None) -> str:
        if not self.components:
            return "0"
        return ", ".join(
            f"{k}={render_expr(v, space)}" for k, v in self.components.items()
        )

    def __repr__(self) -> str:
        return f"GaugeParameter({self.render()})"


@dataclass(frozen=True)
class Witness:
    """delta_Q L = d_mu k^mu exactly."""

    k: Mapping[int, Expr]


@dataclass(frozen=True)
class No:
    """delta_Q L has nonvanishing Euler-Lagrange derivatives."""

    euler_lagrange: Mapping[str, Expr]


@dataclass(frozen=True)
class NotDivergence:
    """Euler-Lagrange derivatives vanish but no divergence was found."""

    core: Expr


SymmetryResult = Witness | No | NotDivergence


@dataclass(frozen=True)
class Superpotential:
    """j^mu = d_nu S^{mu nu} exactly, S antisymmetric, keyed by mu < nu."""

    S: Mapping[tuple[int, int], Expr]

    def current(self) -> dict[int, Expr]:
        j: dict[int, Expr] = {}
        for (mu, nu), s in self.S.items():
            j[mu] = j.get(mu, Expr()) + total_derivative(s, nu)
            j[nu] = j.get(nu, Expr()) - total_derivative(s, mu)
        return {mu: v for mu, v in sorted(j.items()) if not v.is_zero()}


def equations_of_motion(T: Theory) -> dict[str, Expr]:
    """
    Example:
        >>> {i: str(e) for i, e in equations_of_motion(mechanics).items()}
        {'q': '-q_[00]'}
    """
    return dict(T.equations)


def _check_over_fields(Q: EvolutionaryField, T: Theory) -> None:
    for i in Q.characteristics:
        if i not in T.fields:
            raise SchemaError(f"unknown field `{i}`", i)
    if Q.extended:
        raise SchemaError(
            "symmetry has components outside the field sector",
            tuple(Q.extended),
        )


def is_variational_symmetry(
    Q: EvolutionaryField, T: Theory
) -> SymmetryResult:
    """
    Decide whether delta_Q L is a total divergence.

    The Euler-Lagrange derivatives of delta_Q L are compared with the
    independent route delta_Q E_j + (D_Q^i_j)^dagger E_i; the two must
    agree.
    """
    _check_over_fields(Q, T)
    dL = prolong_evolutionary(Q, T.lagrangian)
    el = {i: euler_lagrange(dL, i) for i in T.fields}
    vanishes = all(v.is_zero() for v in el.values())

    E = T.equations
    correction = apply(
        adjoint(characteristic_frechet(Q, T.fields)), E
    )
    identity = {
        j: prolong_evolutionary(Q, E[j]) + correction[j] for j in T.fields
    }
    if vanishes != all(v.is_zero() for v in identity.values()):
        raise InternalConsistencyError(
            "variational symmetry test disagrees with the Euler-Lagrange "
            "identity for the characteristic"
        )
    if not vanishes:
        return No({i: v for i, v in el.items() if not v.is_zero()})
    nf = divergence_normal_form(dL, T.space)
    if nf.is_exact():
        return Witness(dict(nf.witness))
    return NotDivergence(nf.core)


def _certify_or_refute(
    components: Mapping[str, Expr], T: Theory, cfg: AnsatzConfig | None
) -> Certified | NotCertified:
    result = certify_all(components, T.equations, T.space, cfg)
    if isinstance(result, Certified) or not T.named_solutions:
        return result
    for name in result.failing:
        refuted = refute_on_solutions(
            components[name], T.named_solutions, T.equations
        )
        if refuted is not None:
            return NotCertified(
                f"`{name}` does not vanish on solution `{refuted}`",
                result.failing,
                refuted,
            )
    return result


def is_eom_symmetry(
    Q: EvolutionaryField, T: Theory, cfg: AnsatzConfig | None = None
) -> Certified | NotCertified:
    _check_over_fields(Q, T)
    return _certify_or_refute(
        {i: prolong_evolutionary(Q, e) for i, e in T.equations.items()},
        T,
        cfg,
    )


def ev_bracket(
    Q1: EvolutionaryField, Q2: EvolutionaryField
) -> EvolutionaryField:
    """
    Characteristic of the graded commutator [delta_Q1, delta_Q2].

    Example:
        >>> str(ev_bracket(Q1, Q2).characteristics["q"])  # Q1=1, Q2=q
        '1'
    """
    sign = -1 if (Q1.odd and Q2.odd) else 1
    c1, c2 = Q1.components(), Q2.components()
    result = {}
    for g in set(c1) | set(c2):
        value = prolong_evolutionary(Q1, c2.get(g, Expr()))
        value = value - prolong_evolutionary(Q2, c1.get(g, Expr())).scale(
            sign
        )
        result[g] = value
    return EvolutionaryField.from_components(result)


def _check_params(f: GaugeParameter, T: Theory) -> None:
    for alpha in f.components:
        if alpha not in T.gauge_params:
            raise SchemaError(f"unknown gauge parameter `{alpha}`", alpha)


def anchor(f: GaugeParameter, T: Theory) -> EvolutionaryField:
    """The gauge symmetry R_f^i = R^i_alpha(f^alpha)."""
    _check_params(f, T)
    return EvolutionaryField(apply(T.generator_operator, f.components))


gauge_symmetry = anchor


def algebroid_bracket(
    f1: GaugeParameter, f2: GaugeParameter, T: Theory
) -> GaugeParameter:
    """
    [f1, f2]^g = C^g_{ab}(f1^a, f2^b) + delta_f1 f2^g - delta_f2 f1^g
    """
    if T.structure is None:
        raise ConfigurationError(
            f"theory `{T.name}` declares no structure operators"
        )
    _check_params(f1, T)
    _check_params(f2, T)
    Q1, Q2 = anchor(f1, T), anchor(f2, T)
    c = T.structure.apply(f1.components, f2.components)
    result = {}
    for g in T.gauge_params:
        result[g] = (
            c.get(g, Expr())
            + prolong_evolutionary(Q1, f2.component(g))
            - prolong_evolutionary(Q2, f1.component(g))
        )
    return GaugeParameter(result)


# ==========================================================
# closure of the gauge algebra


@dataclass(frozen=True)
class HomomorphismRecord:
    f1: GaugeParameter
    f2: GaugeParameter
    residual: Mapping[str, Expr]
    outcome: Certified | NotCertified

    @property
    def identically_zero(self) -> bool:
        return all(v.is_zero() for v in self.residual.values())

    @property
    def ok(self) -> bool:
        return isinstance(self.outcome, Certified)


@dataclass(frozen=True)
class ClosureReport:
    records: tuple[HomomorphismRecord, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    @property
    def identically_zero(self) -> bool:
        return all(r.identically_zero for r in self.records)

    def failures(self) -> list[HomomorphismRecord]:
        return [r for r in self.records if not r.ok]


def anchor_homomorphism_check(
    T: Theory,
    f1: GaugeParameter,
    f2: GaugeParameter,
    cfg: AnsatzConfig | None = None,
) -> HomomorphismRecord:
    """
    Test [R_f1, R_f2] ~ R([f1, f2]_A), certifying the residual weakly
    zero when it does not vanish identically.
    """
    lhs = ev_bracket(anchor(f1, T), anchor(f2, T))
    rhs = anchor(algebroid_bracket(f1, f2, T), T)
    residual = {
        i: lhs.characteristics.get(i, Expr())
        - rhs.characteristics.get(i, Expr())
        for i in T.fields
    }
    if all(v.is_zero() for v in residual.values()):
        return HomomorphismRecord(f1, f2, residual, Certified({}))
    logger.debug(
        f"closure residual for ({f1.render(T.space)}; "
        f"{f2.render(T.space)}) is not identically zero"
    )
    outcome = certify_all(residual, T.equations, T.space, cfg)
    return HomomorphismRecord(f1, f2, residual, outcome)


def closure_test_parameters(
    T: Theory, cfg: AnsatzConfig | None = None
) -> list[GaugeParameter]:
    """
    Test parameters b e_alpha, b running over 1, x^mu, x^mu x^nu and, when
    ``closure_jet_order`` is set, the field jets up to that order.
    """
    cfg = cfg or AnsatzConfig()
    basis = [
        Expr.constant(1),
        *(Expr.of(coordinate(mu)) for mu in range(T.space.dim)),
        *(
            Expr.of(coordinate(mu)) * Expr.of(coordinate(nu))
            for mu in range(T.space.dim)
            for nu in range(mu, T.space.dim)
        ),
    ]
    if cfg.closure_jet_order is not None:
        for i in T.fields:
            for mu in multi_indices(T.space.dim, cfg.closure_jet_order):
                basis.append(Expr.of(field_jet(i, mu)))
    return [
        GaugeParameter({alpha: b})
        for alpha in T.gauge_params
        for b in basis
    ]


def closure_check(
    T: Theory, cfg: AnsatzConfig | None = None
) -> ClosureReport:
    """
    Check that the gauge algebra closes with the declared structure
    operators on every pair of test parameters.
    """
    if T.structure is None and T.gauge_params:
        raise ConfigurationError(
            f"theory `{T.name}` declares no structure operators"
        )
    params = closure_test_parameters(T, cfg)
    pairs = list(itertools.combinations(params, 2))
    logger.info(
        f"closure check on {len(pairs)} parameter pairs "
        f"({len(params)} test parameters)"
    )
    with ThreadPoolExecutor(max_workers=thread_count()) as executor:
        records = list(
            executor.map(
                lambda pair: anchor_homomorphism_check(T, *pair, cfg), pairs
            )
        )
    return ClosureReport(tuple(records))


@dataclass(frozen=True)
class JacobiReport:
    cyclic_sum: GaugeParameter
    anchor_image: EvolutionaryField
    outcome: Certified | NotCertified

    @property
    def ok(self) -> bool:
        return isinstance(self.outcome, Certified)


def jacobi_check_A(
    T: Theory,
    f1: GaugeParameter,
    f2: GaugeParameter,
    f3: GaugeParameter,
    cfg: AnsatzConfig | None = None,
) -> JacobiReport:
    """
    Cyclic sum of nested algebroid brackets; its image under the anchor
    has to be weakly zero.
    """

    def bracket(a: GaugeParameter, b: GaugeParameter) -> GaugeParameter:
        return algebroid_bracket(a, b, T)

    cyclic = (
        bracket(f1, bracket(f2, f3))
        + bracket(f2, bracket(f3, f1))
        + bracket(f3, bracket(f1, f2))
    )
    image = anchor(cyclic, T)
    if image.is_zero():
        return JacobiReport(cyclic, image, Certified({}))
    outcome = certify_all(image.characteristics, T.equations, T.space, cfg)
    return JacobiReport(cyclic, image, outcome)


# ==========================================================
# reducibility, trivial symmetries and conserved currents


def reducibility_check(
    f: GaugeParameter, T: Theory, cfg: AnsatzConfig | None = None
) -> Certified | NotCertified:
    """Whether f lies in the kernel of the anchor up to weak equality."""
    Q = anchor(f, T)
    return _certify_or_refute(
        {i: Q.characteristics.get(i, Expr()) for i in T.fields}, T, cfg
    )


def trivial_symmetry_check(
    Q: EvolutionaryField, T: Theory, cfg: AnsatzConfig | None = None
) -> Certified | NotCertified:
    _check_over_fields(Q, T)
    return _certify_or_refute(
        {i: Q.characteristics.get(i, Expr()) for i in T.fields}, T, cfg
    )


def _current_divergence(j: Mapping[int, Expr], T: Theory) -> Expr:
    result = Expr()
    for mu, value in j.items():
        result = result + total_derivative(value, mu, T.space)
    return result


def conserved_current_check(
    j: Mapping[int, Expr], T: Theory, cfg: AnsatzConfig | None = None
) -> Certified | NotCertified:
    """
    Example:
        >>> energy = {0: q_t * q_t / 2}
        >>> result = conserved_current_check(energy, mechanics)
        >>> str(result.certificates["divergence"].k[("q", ())])
        '-q_[0]'
    """
    return _certify_or_refute(
        {"divergence": _current_divergence(j, T)}, T, cfg
    )


def current_bracket(
    j1: Mapping[int, Expr],
    Q1: EvolutionaryField,
    j2: Mapping[int, Expr],
    T: Theory,
) -> dict[int, Expr]:
    """
    Bracket of conserved currents, -delta_Q1 j2, where Q1 is the
    variational symmetry attached to j1.
    """
    if not isinstance(is_variational_symmetry(Q1, T), Witness):
        raise PreconditionError(
            "current bracket needs a variational symmetry for the first "
            "current"
        )
    if isinstance(conserved_current_check(j1, T), NotCertified):
        raise PreconditionError("first current is not conserved")
    result = {
        mu: -prolong_evolutionary(Q1, value) for mu, value in j2.items()
    }
    return {mu: v for mu, v in sorted(result.items()) if not v.is_zero()}


def current_class_trivial(
    j: Mapping[int, Expr], T: Theory, cfg: AnsatzConfig | None = None
) -> Certified | Superpotential | NotCertified:
    """
    Sufficient test for a trivial current: every component weakly zero,
    or j the exact divergence of an antisymmetric superpotential found
    within the divergence ansatz bounds.
    """
    cfg = cfg or AnsatzConfig()
    result = certify_all(
        {T.space.coord_names[mu]: value for mu, value in j.items()},
        T.equations,
        T.space,
        cfg,
    )
    if isinstance(result, Certified):
        return result
    S = solve_superpotential(j, T.space, cfg.max_unknowns)
    if S is None:
        return NotCertified(
            f"{result.reason}; no superpotential within bounds",
            result.failing,
        )
    found = Superpotential(S)
    expected = {mu: v for mu, v in sorted(j.items()) if not v.is_zero()}
    if found.current() != expected:
        raise InternalConsistencyError(
            "superpotential does not reconstruct the current"
        )
    logger.debug(f"current is the divergence of superpotential {S}")
    return found


def variational_symmetry_from_noether(
    N: TotalDiffOp, T: Theory
) -> tuple[EvolutionaryField, SymmetryResult]:
    """The symmetry rho(N) of a Noether operator, with its verdict."""
    if not is_noether(N, T.equations):
        raise PreconditionError("operator does not annihilate the equations")
    Q = rho(N)
    return Q, is_variational_symmetry(Q, T)

