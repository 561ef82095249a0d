"""
The antifield layer over a gauge theory: Koszul-Tate and longitudinal
differentials, the antibracket on local functionals and the master
equation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable

from loguru import logger

from jetbrane.algebroid import Theory, closure_check
from jetbrane.diffops import apply
from jetbrane.exceptions import (
    ConfigurationError,
    NeedsHigherOrder,
    PreconditionError,
)
from jetbrane.jet import (
    EvolutionaryField,
    divergence_normal_form,
    euler_lagrange,
    functionals_equal,
    multi_total_derivative,
    prolong_evolutionary,
)
from jetbrane.kernel import (
    Expr,
    Generator,
    Kind,
    SpaceSpec,
    antifield,
    derivation,
    field_jet,
    ghost,
    ghost_antifield,
    homogeneous_parts,
)
from jetbrane.kernel.render import render_generator
from jetbrane.weak import AnsatzConfig

HALF = Fraction(1, 2)


class ExtendedTheory:
    """
    A theory with one ghost C^a per gauge parameter and the antifields
    phi*_i and C*_a.
    """

    def __init__(self, base: Theory) -> None:
        self.base = base
        self.ghost_ids = tuple(ghost(a) for a in base.gauge_params)
        self.antifield_ids = tuple(antifield(i) for i in base.fields) + tuple(
            ghost_antifield(a) for a in base.gauge_params
        )

    @property
    def space(self) -> SpaceSpec:
        return self.base.space

    @property
    def field_ids(self) -> tuple[Generator, ...]:
        return tuple(field_jet(i) for i in self.base.fields)

    @property
    def pairs(self) -> list[tuple[Generator, Generator]]:
        """(z, z*) for every field and ghost."""
        fields = [(field_jet(i), antifield(i)) for i in self.base.fields]
        ghosts = [
            (ghost(a), ghost_antifield(a)) for a in self.base.gauge_params
        ]
        return fields + ghosts

    def roots(self) -> list[Generator]:
        return [*self.field_ids, *self.ghost_ids, *self.antifield_ids]

    def generators(self, max_order: int = 1) -> list[Generator]:
        """Undifferentiated generators and their jets up to ``max_order``."""
        result = []
        for root in self.roots():
            result.append(root)
            frontier = [root]
            for _ in range(max_order):
                frontier = sorted(
                    {
                        g.prolong(nu)
                        for g in frontier
                        for nu in range(self.space.dim)
                    }
                )
                result.extend(frontier)
        return result

    def render(self, g: Generator) -> str:
        return render_generator(g, self.space)

    @cached_property
    def ghost_images(self) -> dict[str, Expr]:
        """R^i_a(C^a) for every field i."""
        return apply(
            self.base.generator_operator,
            {a: Expr.of(ghost(a)) for a in self.base.gauge_params},
        )

    @cached_property
    def antifield_images(self) -> dict[str, Expr]:
        """R^dagger_a[phi*] for every gauge parameter a."""
        return apply(
            self.base.noether_operators,
            {i: Expr.of(antifield(i)) for i in self.base.fields},
        )

    @cached_property
    def structure_images(self) -> dict[str, Expr]:
        """C^g_{ab}(C^a, C^b) for every gauge parameter g."""
        if self.base.structure is None:
            if self.base.gauge_params:
                raise ConfigurationError(
                    f"theory `{self.base.name}` declares no structure "
                    "operators"
                )
            return {}
        ghosts = {a: Expr.of(ghost(a)) for a in self.base.gauge_params}
        return self.base.structure.apply(ghosts, ghosts)


def extend(T: Theory) -> ExtendedTheory:
    return ExtendedTheory(T)


@dataclass(frozen=True, eq=False)
class LocalFunctional:
    """
    Class of an integrand modulo total divergences; ``==`` compares
    classes.
    """

    integrand: Expr

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return functionals_equal(self.integrand, other.integrand)

    def __add__(self, other: LocalFunctional) -> LocalFunctional:
        return LocalFunctional(self.integrand + other.integrand)

    def __neg__(self) -> LocalFunctional:
        return LocalFunctional(-self.integrand)

    def __sub__(self, other: LocalFunctional) -> LocalFunctional:
        return LocalFunctional(self.integrand - other.integrand)

    def scale(self, value: int | Fraction) -> LocalFunctional:
        return LocalFunctional(self.integrand.scale(value))

    def is_zero(self) -> bool:
        return functionals_equal(self.integrand, Expr())

    def reduced(self, XT: ExtendedTheory) -> LocalFunctional:
        """Representative with total divergences integrated away."""
        return LocalFunctional(
            divergence_normal_form(self.integrand, XT.space).core
        )

    def __repr__(self) -> str:
        return f"LocalFunctional({self.integrand})"


def ghost_number(A: LocalFunctional | Expr) -> int:
    """Total ghost number of a functional homogeneous in it."""
    e = A.integrand if isinstance(A, LocalFunctional) else A
    numbers = set(homogeneous_parts(e, lambda g: g.ghost_number))
    if len(numbers) > 1:
        raise PreconditionError(
            f"integrand mixes ghost numbers {sorted(numbers)}"
        )
    return numbers.pop() if numbers else 0


# ==========================================================
# Koszul-Tate and longitudinal differentials


def koszul_tate(e: Expr, XT: ExtendedTheory) -> Expr:
    """
    delta: phi*_i -> E_i, C*_a -> R^dagger_a[phi*], extended to jets and
    as an odd derivation.
    """
    E = XT.base.equations
    images = XT.antifield_images

    def image(g: Generator) -> Expr | None:
        if g.kind == Kind.FIELD_ANTIFIELD:
            return multi_total_derivative(E[str(g.base)], g.jet)
        if g.kind == Kind.GHOST_ANTIFIELD:
            return multi_total_derivative(images[str(g.base)], g.jet)
        return None

    return derivation(e, image, odd=True)


def _resolution_part(e: Expr, resolution: int) -> Expr:
    return homogeneous_parts(e, lambda g: g.resolution).get(
        resolution, Expr()
    )


def longitudinal(
    e: Expr, XT: ExtendedTheory, extended: bool = False
) -> Expr:
    """
    gamma: phi^i -> R^i_a(C^a), C^g -> -1/2 C^g_{ab}(C^a, C^b).

    Antifields are sent to zero unless ``extended`` is set, in which case
    they are sent to the resolution preserving part of the BRST
    differential of the quadratic master action.
    """
    ghost_images = XT.ghost_images
    structure = XT.structure_images
    antifield_images: dict[Generator, Expr] = {}
    if extended:
        Q = functional_vf(master_action_candidate(XT), XT)
        for root in XT.antifield_ids:
            antifield_images[root] = _resolution_part(
                Q.component(root), root.grading.resolution
            )

    def image(g: Generator) -> Expr | None:
        if g.kind == Kind.FIELD:
            return multi_total_derivative(ghost_images[str(g.base)], g.jet)
        if g.kind == Kind.GHOST:
            value = structure.get(str(g.base))
            if value is None:
                return None
            return multi_total_derivative(value.scale(-HALF), g.jet)
        if g.kind in (Kind.FIELD_ANTIFIELD, Kind.GHOST_ANTIFIELD):
            value = antifield_images.get(g.root())
            if value is None:
                return None
            return multi_total_derivative(value, g.jet)
        return None

    return derivation(e, image, odd=True)


# ==========================================================
# antibracket


def _ghost_parts(e: Expr) -> list[Expr]:
    return list(homogeneous_parts(e, lambda g: g.ghost_number).values())


def antibracket(
    A: LocalFunctional, B: LocalFunctional, XT: ExtendedTheory
) -> LocalFunctional:
    """
    (A, B) = dR a / d z . dL b / d z* - dR a / d z* . dL b / d z, summed
    over fields and ghosts and extended bilinearly over the ghost number
    parts of a and b.
    """
    result = Expr()
    for a in _ghost_parts(A.integrand):
        for b in _ghost_parts(B.integrand):
            for z, z_star in XT.pairs:
                result = result + euler_lagrange(
                    a, z, "right"
                ) * euler_lagrange(b, z_star, "left")
                result = result - euler_lagrange(
                    a, z_star, "right"
                ) * euler_lagrange(b, z, "left")
    return LocalFunctional(result)


def functional_vf(A: LocalFunctional, XT: ExtendedTheory) -> EvolutionaryField:
    """
    Evolutionary field of a functional, Q^{z*} = dR a / d z and
    Q^z = -dR a / d z*; applied to b it reproduces (A, b) up to a total
    divergence.
    """
    components: dict[Generator, Expr] = {}
    for a in _ghost_parts(A.integrand):
        for z, z_star in XT.pairs:
            components[z_star] = components.get(
                z_star, Expr()
            ) + euler_lagrange(a, z, "right")
            components[z] = components.get(z, Expr()) - euler_lagrange(
                a, z_star, "right"
            )
    return EvolutionaryField.from_components(components)


# ==========================================================
# master action


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Residual:
    functional: LocalFunctional


MasterResult = Zero | Residual


def master_action_candidate(XT: ExtendedTheory) -> LocalFunctional:
    """
    L + phi*_i R^i_a(C^a) + 1/2 C*_g C^g_{ab}(C^a, C^b), without checking
    the master equation.
    """
    T = XT.base
    S = T.lagrangian
    for i, value in XT.ghost_images.items():
        S = S + Expr.of(antifield(i)) * value
    for g, value in XT.structure_images.items():
        S = S + (Expr.of(ghost_antifield(g)) * value).scale(HALF)
    return LocalFunctional(S)


def check_master(S: LocalFunctional, XT: ExtendedTheory) -> MasterResult:
    """1/2 (S, S) as a class: Zero or the reduced residual."""
    if ghost_number(S) != 0:
        raise PreconditionError("master action must have ghost number 0")
    half = antibracket(S, S, XT).scale(HALF)
    if half.is_zero():
        return Zero()
    residual = half.reduced(XT)
    logger.info(f"master equation residual: {residual.integrand}")
    return Residual(residual)


def build_master_action(
    XT: ExtendedTheory, cfg: AnsatzConfig | None = None
) -> LocalFunctional:
    """
    Master action of a gauge algebra that closes off-shell with
    field-independent structure operators.
    """
    T = XT.base
    if T.gauge_params:
        if T.structure is None:
            raise ConfigurationError(
                f"theory `{T.name}` declares no structure operators"
            )
        if T.structure.depends_on_fields():
            raise NeedsHigherOrder(
                "structure operators depend on the fields", None
            )
        report = closure_check(T, cfg)
        if not report.identically_zero:
            raise NeedsHigherOrder(
                "gauge algebra does not close off-shell", report
            )
    S = master_action_candidate(XT)
    result = check_master(S, XT)
    if isinstance(result, Residual):
        raise NeedsHigherOrder(
            "quadratic master action does not solve the master equation",
            result.functional,
        )
    return S


# ==========================================================
# BRST differential


def brst_operator(
    S: LocalFunctional, XT: ExtendedTheory
) -> Callable[[Expr], Expr]:
    """s = (S, .) as an operator on local functions, for a verified S."""
    if isinstance(check_master(S, XT), Residual):
        raise PreconditionError(
            "S does not satisfy the master equation; see check_master"
        )
    Q = functional_vf(S, XT)
    return lambda e: prolong_evolutionary(Q, e)


def brst(S: LocalFunctional, e: Expr, XT: ExtendedTheory) -> Expr:
    """
    Example:
        >>> s_C_star = brst(S, Expr.of(ghost_antifield("eps")), em2d)
        >>> str(s_C_star)
        '-anti(A0)_[0] - anti(A1)_[1]'
    """
    return brst_operator(S, XT)(e)


def brst_decomposition(
    s: Callable[[Expr], Expr], g: Generator
) -> dict[int, Expr]:
    """s(g) split by the change of resolution degree."""
    own = g.grading.resolution
    return homogeneous_parts(s(Expr.of(g)), lambda gr: gr.resolution - own)


def derived_bracket(
    A: LocalFunctional,
    B: LocalFunctional,
    S1: LocalFunctional,
    XT: ExtendedTheory,
    S: LocalFunctional | None = None,
) -> LocalFunctional:
    """[(A, (S1, B))], after checking that S1 is BRST closed."""
    if S is None:
        S = master_action_candidate(XT)
    if not antibracket(S, S1, XT).is_zero():
        raise PreconditionError("(S, S1) does not vanish")
    return antibracket(A, antibracket(S1, B, XT), XT)


# ==========================================================
# nilpotency


def square_residuals(
    d: Callable[[Expr], Expr], XT: ExtendedTheory, max_order: int = 1
) -> dict[str, Expr]:
    """Nonvanishing values of d(d(g)) on the generators."""
    return _residuals(lambda e: d(d(e)), XT.generators(max_order), XT)


def anticommutator_residuals(
    d1: Callable[[Expr], Expr],
    d2: Callable[[Expr], Expr],
    XT: ExtendedTheory,
    max_order: int = 1,
) -> dict[str, Expr]:
    return _residuals(
        lambda e: d1(d2(e)) + d2(d1(e)), XT.generators(max_order), XT
    )


def _residuals(
    check: Callable[[Expr], Expr],
    generators: Iterable[Generator],
    XT: ExtendedTheory,
) -> dict[str, Expr]:
    result = {}
    for g in generators:
        value = check(Expr.of(g))
        if not value.is_zero():
            result[XT.render(g)] = value
    return result
