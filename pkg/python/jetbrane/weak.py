"""
Weak (on-shell) equality: membership in the differential ideal generated by
the equations of motion, certified by explicit coefficients.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from loguru import logger

from jetbrane.consts import (
    DEFAULT_CLOSURE_JET_ORDER,
    DEFAULT_MAX_COEFF_DEGREE,
    DEFAULT_MAX_COEFF_JET_ORDER,
    DEFAULT_MAX_JET_ORDER,
    DEFAULT_MAX_UNKNOWNS,
)
from jetbrane.diffops import TotalDiffOp, compose
from jetbrane.exceptions import InternalConsistencyError
from jetbrane.jet import evaluate_on_solution, multi_total_derivative
from jetbrane.kernel import Expr, Kind, MultiIndex, SpaceSpec, multi_indices
from jetbrane.kernel.expr import Factors, _merge
from jetbrane.linalg import solve_sparse

CertKey = tuple[str, MultiIndex]


@dataclass(frozen=True)
class AnsatzConfig:
    """
    Search bounds for certificates.

    ``max_jet_order`` bounds the derivatives of the equations used,
    ``max_coeff_degree`` and ``max_coeff_jet_order`` bound the polynomial
    degree and jet order of the certificate coefficients.
    """

    max_jet_order: int = DEFAULT_MAX_JET_ORDER
    max_coeff_degree: int = DEFAULT_MAX_COEFF_DEGREE
    max_coeff_jet_order: int = DEFAULT_MAX_COEFF_JET_ORDER
    closure_jet_order: int | None = DEFAULT_CLOSURE_JET_ORDER
    max_unknowns: int = DEFAULT_MAX_UNKNOWNS

    def __post_init__(self) -> None:
        for name in (
            "max_jet_order",
            "max_coeff_degree",
            "max_coeff_jet_order",
            "closure_jet_order",
            "max_unknowns",
        ):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class WeakCertificate:
    """
    Coefficients k^{a(mu)} with f = k^{a(mu)} d_(mu) E_a.
    """

    k: Mapping[CertKey, Expr] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "k",
            {
                (a, MultiIndex(mu)): v
                for (a, mu), v in sorted(self.k.items())
                if not v.is_zero()
            },
        )

    def is_trivial(self) -> bool:
        """True when the expression vanished identically."""
        return not self.k

    def reconstruct(self, E: Mapping[str, Expr]) -> Expr:
        result = Expr()
        for (a, mu), coeff in self.k.items():
            result = result + coeff * multi_total_derivative(E[a], mu)
        return result

    def __add__(self, other: WeakCertificate) -> WeakCertificate:
        acc = dict(self.k)
        for key, v in other.k.items():
            acc[key] = acc.get(key, Expr()) + v
        return WeakCertificate(acc)

    def __neg__(self) -> WeakCertificate:
        return self.scale(Expr.constant(-1))

    def scale(self, h: Expr) -> WeakCertificate:
        """Certificate for h * f given one for f."""
        return WeakCertificate({key: h * v for key, v in self.k.items()})

    def render(self) -> dict[str, str]:
        return {
            f"{a}[{''.join(map(str, mu))}]": str(v)
            for (a, mu), v in self.k.items()
        }


@dataclass(frozen=True)
class NotFound:
    reason: str


WeakResult = WeakCertificate | NotFound


@dataclass(frozen=True)
class Certified:
    certificates: Mapping[str, WeakCertificate]

    def is_trivial(self) -> bool:
        return all(c.is_trivial() for c in self.certificates.values())


@dataclass(frozen=True)
class NotCertified:
    reason: str
    failing: tuple[str, ...] = ()
    refuted_on: str | None = None


def _within_bounds(m: Factors, cfg: AnsatzConfig, max_x: int) -> bool:
    degree = 0
    x_degree = 0
    for g, k in m:
        if g.is_jet:
            degree += k
            if g.order > cfg.max_coeff_jet_order:
                return False
        elif g.kind == Kind.COORDINATE:
            x_degree += k
    return degree <= cfg.max_coeff_degree and x_degree <= max_x


def _quotient(t: Factors, e: Factors) -> Factors | None:
    exps = dict(t)
    for g, k in e:
        if exps.get(g, 0) < k:
            return None
        exps[g] -= k
    return tuple((g, exps[g]) for g, _ in t if exps[g] > 0)


def weakly_zero(
    f: Expr,
    E: Mapping[str, Expr],
    space: SpaceSpec,
    cfg: AnsatzConfig | None = None,
) -> WeakResult:
    """
    Search for k^{a(mu)} with f = k^{a(mu)} d_(mu) E_a within the bounds
    of ``cfg``.

    Multipliers are generated by dividing the monomials still to be
    matched by monomials of the derived equations, repeated until no new
    monomial appears, and the resulting linear system is solved exactly.
    A returned certificate has been checked to reconstruct ``f``;
    NotFound only means no certificate exists within the bounds.
    """
    cfg = cfg or AnsatzConfig()
    if f.is_zero():
        return WeakCertificate()

    derived: list[tuple[CertKey, Expr]] = []
    for a in sorted(E):
        if E[a].is_zero():
            continue
        for mu in multi_indices(space.dim, cfg.max_jet_order):
            derived.append(((a, mu), multi_total_derivative(E[a], mu)))
    if not derived:
        return NotFound("equations of motion vanish identically")

    max_x = f.x_degree()
    columns: dict[tuple[CertKey, Factors], dict[Factors, Fraction]] = {}
    seen: set[Factors] = set()
    pending = [t for t, _ in f.items()]
    while pending:
        t = pending.pop()
        if t in seen:
            continue
        seen.add(t)
        for key, eq in derived:
            for e, _ in eq.raw_items():
                m = _quotient(t, e)
                if m is None or (key, m) in columns:
                    continue
                if not _within_bounds(m, cfg, max_x):
                    continue
                product: dict[Factors, Fraction] = defaultdict(Fraction)
                for fe, ce in eq.raw_items():
                    sign, pf = _merge(m, fe)
                    if sign:
                        product[pf] += sign * ce
                column = {k: v for k, v in product.items() if v}
                columns[(key, m)] = column
                pending.extend(k for k in column if k not in seen)
                if len(columns) > cfg.max_unknowns:
                    logger.warning(
                        f"weak-equality ansatz exceeds {cfg.max_unknowns} "
                        "unknowns; giving up"
                    )
                    return NotFound(
                        f"ansatz exceeds {cfg.max_unknowns} unknowns"
                    )

    if not columns:
        return NotFound("no multiplier within bounds")
    keys = sorted(
        columns,
        key=lambda c: (c[0], tuple((g.key, k) for g, k in c[1])),
    )
    logger.debug(
        f"weak-equality ansatz: {len(keys)} unknowns, {len(seen)} monomials"
    )
    solution = solve_sparse([columns[c] for c in keys], dict(f.raw_items()))
    if solution is None:
        return NotFound("no certificate within bounds")

    k: dict[CertKey, Expr] = defaultdict(Expr)
    for (key, m), value in zip(keys, solution):
        if value:
            k[key] = k[key] + Expr({m: value})
    certificate = WeakCertificate(k)
    if certificate.reconstruct(E) != f:
        raise InternalConsistencyError(
            "weak certificate does not reconstruct its input"
        )
    return certificate


def weakly_equal(
    f: Expr,
    g: Expr,
    E: Mapping[str, Expr],
    space: SpaceSpec,
    cfg: AnsatzConfig | None = None,
) -> WeakResult:
    return weakly_zero(f - g, E, space, cfg)


def certify_all(
    components: Mapping[str, Expr],
    E: Mapping[str, Expr],
    space: SpaceSpec,
    cfg: AnsatzConfig | None = None,
) -> Certified | NotCertified:
    """Weak vanishing of every component, with per-component certificates."""
    certificates = {}
    failing = []
    for name, value in sorted(components.items()):
        result = weakly_zero(value, E, space, cfg)
        if isinstance(result, NotFound):
            failing.append(name)
        else:
            certificates[name] = result
    if failing:
        return NotCertified(
            "not weakly zero within bounds: " + ", ".join(failing),
            tuple(failing),
        )
    return Certified(certificates)


@dataclass(frozen=True)
class OperatorCertificate:
    """
    Certificates for every coefficient of Z o R^dagger; ``conclusion``
    holds certificates for the coefficients of Z itself when they exist.
    """

    composed: Mapping[tuple, WeakCertificate]
    conclusion: Mapping[tuple, WeakCertificate] | None


def weakly_zero_operator(
    Z: TotalDiffOp,
    generating_set: TotalDiffOp,
    E: Mapping[str, Expr],
    space: SpaceSpec,
    cfg: AnsatzConfig | None = None,
) -> OperatorCertificate | NotFound:
    """
    Coefficientwise weak vanishing of Z o R^dagger, where the generating
    set R^dagger maps fields to gauge parameter labels.
    """
    composed = compose(Z, generating_set)
    certificates = {}
    for key, value in composed.items():
        result = weakly_zero(value, E, space, cfg)
        if isinstance(result, NotFound):
            return NotFound(f"coefficient {key} of Z o R^dagger: {result}")
        certificates[key] = result
    conclusion: dict[tuple, WeakCertificate] | None = {}
    for key, value in Z.items():
        result = weakly_zero(value, E, space, cfg)
        if isinstance(result, NotFound):
            logger.info(f"coefficient {key} of Z is not certified weakly zero")
            conclusion = None
            break
        assert conclusion is not None
        conclusion[key] = result
    return OperatorCertificate(certificates, conclusion)


def combine(
    terms: list[tuple[Expr, WeakCertificate]]
) -> WeakCertificate:
    """Certificate for sum(h_i * f_i) from certificates for the f_i."""
    result = WeakCertificate()
    for h, certificate in terms:
        result = result + certificate.scale(h)
    return result


def solves_equations(
    solution: Mapping[str, Expr], E: Mapping[str, Expr]
) -> bool:
    return all(
        evaluate_on_solution(e, solution).is_zero() for e in E.values()
    )


def refute_on_solutions(
    f: Expr,
    solutions: Mapping[str, Mapping[str, Expr]],
    E: Mapping[str, Expr],
) -> str | None:
    """
    Name of the first explicit solution on which f does not vanish, which
    proves f is not weakly zero. Solutions that do not solve E are
    skipped.
    """
    for name, solution in sorted(solutions.items()):
        if not solves_equations(solution, E):
            logger.warning(f"solution `{name}` does not solve the equations")
            continue
        if not evaluate_on_solution(f, solution).is_zero():
            return name
    return None
