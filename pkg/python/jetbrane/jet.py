"""
Derivative operators of the variational bicomplex: total derivatives,
prolongations, the horizontal differential, Euler-Lagrange derivatives and
divergence normal forms of integrands.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from loguru import logger

from jetbrane.consts import DEFAULT_MAX_UNKNOWNS
from jetbrane.exceptions import (
    InhomogeneityError,
    PreconditionError,
    SchemaError,
)
from jetbrane.kernel import (
    Expr,
    Generator,
    Grading,
    Kind,
    MultiIndex,
    SpaceSpec,
    basis_form,
    coordinate,
    derivation,
    field_jet,
    homogeneous_parts,
    parity_of,
    partial_derivative,
    substitute,
)
from jetbrane.kernel.expr import Factors, _merge
from jetbrane.linalg import solve_sparse

ONE = Expr.constant(1)


@dataclass(frozen=True, eq=False)
class EvolutionaryField:
    """
    Evolutionary vector field delta_Q.

    ``characteristics`` maps field names to Q^i. ``extended`` carries
    components on ghosts and antifields, keyed by their undifferentiated
    generator.
    """

    characteristics: Mapping[str, Expr] = field(default_factory=dict)
    extended: Mapping[Generator, Expr] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "characteristics",
            {
                k: v
                for k, v in sorted(self.characteristics.items())
                if not v.is_zero()
            },
        )
        object.__setattr__(
            self,
            "extended",
            {
                k: v
                for k, v in sorted(
                    self.extended.items(), key=lambda kv: kv[0].key
                )
                if not v.is_zero()
            },
        )
        self._check_parity()

    def _check_parity(self) -> None:
        first: tuple[bool, Expr] | None = None
        for g, q in self.components().items():
            odd = parity_of(q) != g.odd
            if first is None:
                first = (odd, q)
            elif odd != first[0]:
                raise InhomogeneityError(
                    "evolutionary field mixes even and odd components",
                    first[1],
                    q,
                )

    @classmethod
    def from_components(
        cls, components: Mapping[Generator, Expr]
    ) -> EvolutionaryField:
        chars = {}
        extended = {}
        for g, q in components.items():
            if g.kind == Kind.FIELD:
                chars[str(g.base)] = q
            else:
                extended[g.root()] = q
        return cls(chars, extended)

    def components(self) -> dict[Generator, Expr]:
        result = {
            field_jet(name): q for name, q in self.characteristics.items()
        }
        result.update(self.extended)
        return result

    def component(self, g: Generator) -> Expr:
        return self.components().get(g.root(), Expr())

    def is_zero(self) -> bool:
        return not self.characteristics and not self.extended

    @property
    def odd(self) -> bool:
        """Parity of delta_Q as a derivation."""
        for g, q in self.components().items():
            return parity_of(q) != g.odd
        return False

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvolutionaryField):
            return NotImplemented
        return self.components() == other.components()

    def __add__(self, other: EvolutionaryField) -> EvolutionaryField:
        result = dict(self.components())
        for g, q in other.components().items():
            result[g] = result.get(g, Expr()) + q
        return EvolutionaryField.from_components(result)

    def __neg__(self) -> EvolutionaryField:
        return self.scale(-1)

    def __sub__(self, other: EvolutionaryField) -> EvolutionaryField:
        return self + (-other)

    def scale(self, value: int | Fraction) -> EvolutionaryField:
        return EvolutionaryField.from_components(
            {g: q.scale(value) for g, q in self.components().items()}
        )

    def __repr__(self) -> str:
        body = ", ".join(
            f"{k}: {v}" for k, v in self.characteristics.items()
        )
        return f"EvolutionaryField({{{body}}})"


@dataclass(frozen=True)
class GeneralizedField:
    """
    Generalized vector field P^mu d/dx^mu + R^i d/dphi^i with components
    that are local functions.
    """

    P: Mapping[int, Expr] = field(default_factory=dict)
    R: Mapping[str, Expr] = field(default_factory=dict)


@dataclass(frozen=True)
class DivergenceNormalForm:
    core: Expr
    witness: Mapping[int, Expr]
    space: SpaceSpec

    def reconstruct(self) -> Expr:
        result = self.core
        for mu, k in self.witness.items():
            result = result + total_derivative(k, mu, self.space)
        return result

    def is_exact(self) -> bool:
        """Whether the integrand was shown to be a total divergence."""
        return self.core.is_zero()


# ==========================================================
# total derivatives


@lru_cache(maxsize=1 << 16)
def _total_derivative(e: Expr, nu: int) -> Expr:
    def image(g: Generator) -> Expr | None:
        if g.is_jet:
            return Expr.of(g.prolong(nu))
        if g.kind == Kind.COORDINATE and g.base == nu:
            return ONE
        return None

    return derivation(e, image, odd=False)


def total_derivative(e: Expr, nu: int, space: SpaceSpec | None = None) -> Expr:
    """
    Total derivative d_nu, acting on coordinates and on the jets of every
    field, ghost and antifield.

    Example:
        >>> q = Expr.of(field_jet("q"))
        >>> str(total_derivative(q * q, 0))
        '2 * q * q_[0]'
    """
    if space is not None:
        space.check_index(nu)
    elif nu < 0:
        raise SchemaError(f"negative coordinate index {nu}", nu)
    return _total_derivative(e, nu)


def multi_total_derivative(
    e: Expr, mu: MultiIndex, space: SpaceSpec | None = None
) -> Expr:
    for nu in mu:
        e = total_derivative(e, nu, space)
    return e


def horizontal_differential(omega: Expr, space: SpaceSpec) -> Expr:
    result = Expr()
    for mu in range(space.dim):
        result = result + Expr.of(basis_form(mu)) * total_derivative(
            omega, mu
        )
    return result


# ==========================================================
# prolongations


def prolong_evolutionary(Q: EvolutionaryField, e: Expr) -> Expr:
    """
    delta_Q e: d_(mu) Q^z on every jet z_(mu); coordinates and basis forms
    are left fixed.
    """
    comps = Q.components()
    if not comps:
        return Expr()

    def image(g: Generator) -> Expr | None:
        if not g.is_jet:
            return None
        q = comps.get(g.root())
        if q is None:
            return None
        return multi_total_derivative(q, g.jet)

    return derivation(e, image, Q.odd)


def prolong_generalized(
    X: GeneralizedField, omega: Expr, space: SpaceSpec
) -> Expr:
    P = {mu: X.P.get(mu, Expr()) for mu in range(space.dim)}
    characteristics: dict[Generator, Expr] = {}

    def characteristic(root: Generator) -> Expr:
        if root not in characteristics:
            r = X.R.get(str(root.base), Expr())
            if root.kind != Kind.FIELD:
                r = Expr()
            for nu, p in P.items():
                if not p.is_zero():
                    r = r - p * Expr.of(root.prolong(nu))
            characteristics[root] = r
        return characteristics[root]

    def image(g: Generator) -> Expr | None:
        if g.is_jet:
            result = multi_total_derivative(characteristic(g.root()), g.jet)
            for nu, p in P.items():
                if not p.is_zero():
                    result = result + p * Expr.of(g.prolong(nu))
            return result
        assert isinstance(g.base, int)
        if g.kind == Kind.COORDINATE:
            return P[g.base]
        return horizontal_differential(P[g.base], space)

    return derivation(omega, image, odd=False)


# ==========================================================
# variational derivatives


def _form_degree(grading: Grading) -> int:
    return grading.form_degree


def _ghost_number(grading: Grading) -> int:
    return grading.ghost_number


def _first_term(e: Expr) -> Expr:
    factors, coeff = e.items()[0]
    return Expr({factors: coeff})


def _check_ghost_homogeneous(f: Expr) -> None:
    parts = homogeneous_parts(f, _ghost_number)
    if len(parts) < 2:
        return
    (g1, p1), (g2, p2) = sorted(parts.items())[:2]
    first, second = _first_term(p1), _first_term(p2)
    raise InhomogeneityError(
        f"Euler-Lagrange derivative of an integrand mixing ghost numbers: "
        f"`{first}` has {g1}, `{second}` has {g2}",
        first,
        second,
    )


def _root_of(var: str | Generator) -> Generator:
    if isinstance(var, str):
        return field_jet(var)
    return var.root()


def euler_lagrange(
    f: Expr,
    var: str | Generator,
    side: str = "left",
    known: set[str] | None = None,
) -> Expr:
    """
    Euler-Lagrange derivative (-d)_(mu) d f / d z_(mu) with the graded
    partial of the requested side.

    ``var`` is a field name or any generator of the extended fiber. The
    integrand must be homogeneous in ghost number.
    """
    root = _root_of(var)
    if known is not None and root.base not in known:
        raise SchemaError(f"unknown identifier `{root.base}`", root.base)
    if set(homogeneous_parts(f, _form_degree)) - {0}:
        raise PreconditionError(
            "Euler-Lagrange derivative needs a form degree 0 integrand"
        )
    _check_ghost_homogeneous(f)
    result = Expr()
    for g in sorted(f.jet_generators()):
        if g.root() != root:
            continue
        term = multi_total_derivative(partial_derivative(f, g, side), g.jet)
        result = result - term if g.order % 2 else result + term
    return result


def euler_lagrange_vanishes(f: Expr) -> bool:
    return all(
        euler_lagrange(part, root).is_zero()
        for part in homogeneous_parts(f, _ghost_number).values()
        for root in sorted(part.roots())
    )


def functionals_equal(l1: Expr, l2: Expr) -> bool:
    """
    Whether two integrands define the same local functional, i.e. differ
    by a total divergence.
    """
    return euler_lagrange_vanishes(l1 - l2)


# ==========================================================
# divergence normal form


def _peelable(core: Expr) -> tuple[Expr, Generator] | None:
    for factors, coeff in reversed(core.items()):
        jets = [(g, k) for g, k in factors if g.is_jet]
        if not jets:
            continue
        top, exponent = max(jets, key=lambda gk: (gk[0].order, gk[0].key))
        if exponent != 1 or top.order == 0:
            continue
        if all(g.order + 2 <= top.order for g, _ in jets if g != top):
            return Expr({factors: coeff}), top
    return None


def _divergence_candidates(
    t: Factors, dim: int, max_order: int, max_x: int
) -> list[tuple[int, Factors]]:
    """
    Monomials m and directions nu for which d_nu m can contain t.
    """
    found = []
    for pos, (g, k) in enumerate(t):
        if not g.is_jet:
            continue
        for nu in sorted(set(g.jet)):
            lowered = g.with_jet(g.jet.remove(nu))
            rest = t[:pos] + (((g, k - 1),) if k > 1 else ()) + t[pos + 1 :]
            sign, m = _merge(rest, ((lowered, 1),))
            if sign:
                found.append((nu, m))
    x_deg = sum(k for g, k in t if g.kind == Kind.COORDINATE)
    if x_deg < max_x:
        for nu in range(dim):
            _, m = _merge(t, ((coordinate(nu), 1),))
            found.append((nu, m))
    return [
        (nu, m)
        for nu, m in found
        if all(g.order <= max_order for g, _ in m if g.is_jet)
    ]


def solve_divergence(
    e: Expr, space: SpaceSpec, max_unknowns: int = DEFAULT_MAX_UNKNOWNS
) -> dict[int, Expr] | None:
    """
    Find k^mu with e == d_mu k^mu exactly, searching polynomial k whose
    jets do not exceed the order of e and whose x-degree exceeds that of
    e by at most one. Returns None when no such k exists.
    """
    if e.is_zero():
        return {}
    max_order = max(e.max_order(), 0)
    max_x = e.x_degree() + 1
    columns: dict[tuple[int, Factors], dict[Factors, Fraction]] = {}
    seen_rows: set[Factors] = set()
    pending = [f for f, _ in e.items()]
    while pending:
        t = pending.pop()
        if t in seen_rows:
            continue
        seen_rows.add(t)
        for nu, m in _divergence_candidates(t, space.dim, max_order, max_x):
            if (nu, m) in columns:
                continue
            image = total_derivative(Expr({m: Fraction(1)}), nu)
            columns[(nu, m)] = dict(image.raw_items())
            pending.extend(f for f, _ in image.raw_items())
            if len(columns) > max_unknowns:
                logger.warning(
                    f"divergence ansatz exceeds {max_unknowns} unknowns"
                )
                return None
    keys = sorted(columns, key=lambda c: (c[0], _factors_sort_key(c[1])))
    solution = solve_sparse(
        [columns[c] for c in keys], dict(e.raw_items())
    )
    if solution is None:
        return None
    witness: dict[int, Expr] = defaultdict(Expr)
    for (nu, m), value in zip(keys, solution):
        if value:
            witness[nu] = witness[nu] + Expr({m: value})
    return dict(witness)


def solve_superpotential(
    j: Mapping[int, Expr],
    space: SpaceSpec,
    max_unknowns: int = DEFAULT_MAX_UNKNOWNS,
) -> dict[tuple[int, int], Expr] | None:
    """
    Find an antisymmetric S with j^mu == d_nu S^{mu nu} exactly, within
    the bounds of solve_divergence. Keys of the result are pairs
    mu < nu. Returns None when no such S exists.
    """
    j = {mu: v for mu, v in j.items() if not v.is_zero()}
    if not j:
        return {}
    max_order = max(max(v.max_order(), 0) for v in j.values())
    max_x = max(v.x_degree() for v in j.values()) + 1
    Row = tuple[int, Factors]
    columns: dict[tuple[tuple[int, int], Factors], dict[Row, Fraction]] = {}
    seen_rows: set[Row] = set()
    pending = [(mu, f) for mu, v in j.items() for f, _ in v.items()]
    while pending:
        row = pending.pop()
        if row in seen_rows:
            continue
        seen_rows.add(row)
        mu, t = row
        for nu, m in _divergence_candidates(t, space.dim, max_order, max_x):
            if nu == mu:
                continue
            a, b = sorted((mu, nu))
            if ((a, b), m) in columns:
                continue
            unit = Expr({m: Fraction(1)})
            column: dict[Row, Fraction] = {}
            for f, c in total_derivative(unit, b).raw_items():
                column[(a, f)] = c
            for f, c in total_derivative(unit, a).raw_items():
                column[(b, f)] = -c
            columns[((a, b), m)] = column
            pending.extend(column)
            if len(columns) > max_unknowns:
                logger.warning(
                    f"superpotential ansatz exceeds {max_unknowns} unknowns"
                )
                return None
    keys = sorted(columns, key=lambda c: (c[0], _factors_sort_key(c[1])))
    target = {(mu, f): c for mu, v in j.items() for f, c in v.items()}
    solution = solve_sparse([columns[c] for c in keys], target)
    if solution is None:
        return None
    S: dict[tuple[int, int], Expr] = defaultdict(Expr)
    for (pair, m), value in zip(keys, solution):
        if value:
            S[pair] = S[pair] + Expr({m: value})
    return dict(S)


def _factors_sort_key(factors: Factors) -> tuple:
    return tuple((g.key, k) for g, k in factors)


def divergence_normal_form(
    L: Expr, space: SpaceSpec, max_steps: int = 10000
) -> DivergenceNormalForm:
    """
    Split an integrand into a residue and a total divergence.

    Linear top-order jets are integrated by parts first. If what remains
    has vanishing Euler-Lagrange derivatives it is solved for exactly, so
    the residue is zero precisely when a witness was produced.

    Example:
        >>> nf = divergence_normal_form(total_derivative(q * q, 0), space)
        >>> nf.core.is_zero(), str(nf.witness[0])
        (True, 'q^2')
    """
    if set(homogeneous_parts(L, _form_degree)) - {0}:
        raise PreconditionError("integrand must have form degree 0")
    core = L
    witness: dict[int, Expr] = defaultdict(Expr)
    for _ in range(max_steps):
        step = _peelable(core)
        if step is None:
            break
        m, top = step
        nu = top.jet[-1]
        b = partial_derivative(m, top, "right")
        lower = Expr.of(top.with_jet(top.jet.remove(nu)))
        witness[nu] = witness[nu] + b * lower
        core = core - m - total_derivative(b, nu) * lower
    else:
        logger.warning("integration by parts did not terminate")

    if not core.is_zero() and euler_lagrange_vanishes(core):
        extra = solve_divergence(core, space)
        if extra is not None:
            for nu, k in extra.items():
                witness[nu] = witness[nu] + k
            core = Expr()
        else:
            logger.debug(f"divergence not resolved within ansatz: {core}")

    return DivergenceNormalForm(
        core,
        {mu: k for mu, k in sorted(witness.items()) if not k.is_zero()},
        space,
    )


# ==========================================================
# explicit solutions


def evaluate_on_solution(f: Expr, solution: Mapping[str, Expr]) -> Expr:
    """
    Substitute an explicit solution phi^i = s^i(x) together with all its
    derivatives.
    """
    sigma = {
        g: multi_total_derivative(solution[str(g.base)], g.jet)
        for g in f.jet_generators()
        if g.kind == Kind.FIELD and g.base in solution
    }
    return substitute(f, sigma)
