"""
Seeded random local functions for the sampled checks of the pipelines.
"""
import random
from fractions import Fraction
from typing import Sequence

from jetbrane.jet import EvolutionaryField
from jetbrane.kernel import (
    Expr,
    Generator,
    SpaceSpec,
    coordinate,
    multi_indices,
)


class ExprSampler:
    """
    Example:
        >>> sampler = ExprSampler(SpaceSpec(1, ("t",)), seed=0)
        >>> e = sampler.expr([field_jet("q")])
    """

    def __init__(
        self,
        space: SpaceSpec,
        seed: int | str = 0,
        max_order: int = 2,
        max_degree: int = 2,
        max_terms: int = 3,
        max_coeff: int = 3,
    ) -> None:
        self.space = space
        self.rng = random.Random(seed)
        self.max_order = max_order
        self.max_degree = max_degree
        self.max_terms = max_terms
        self.max_coeff = max_coeff
        self.jets = multi_indices(space.dim, max_order)

    def coefficient(self) -> Fraction:
        value = self.rng.randint(1, self.max_coeff)
        return Fraction(-value if self.rng.random() < 0.5 else value)

    def jet(self, roots: Sequence[Generator]) -> Generator:
        root = self.rng.choice(roots)
        return root.with_jet(self.rng.choice(self.jets))

    def monomial(self, roots: Sequence[Generator]) -> Expr:
        term = Expr.constant(self.coefficient())
        if self.rng.random() < 0.3:
            mu = self.rng.randrange(self.space.dim)
            term = term * Expr.of(coordinate(mu))
        for _ in range(self.rng.randint(1, self.max_degree)):
            term = term * Expr.of(self.jet(roots))
        return term

    def expr(self, roots: Sequence[Generator]) -> Expr:
        result = Expr()
        for _ in range(self.rng.randint(1, self.max_terms)):
            result = result + self.monomial(roots)
        return result

    def even_field(
        self, fields: Sequence[str], roots: Sequence[Generator]
    ) -> EvolutionaryField:
        """An evolutionary field with polynomial even characteristics."""
        chars = {}
        for i in fields:
            if self.rng.random() < 0.7:
                chars[i] = self.expr(roots)
        return EvolutionaryField(chars)
