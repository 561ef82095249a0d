"""
Total differential operators O^a_b = O^{a(mu)}_b d_(mu) and
bi-differential operators C^g_{ab}.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from jetbrane.exceptions import ConfigurationError, IndexMismatchError
from jetbrane.jet import (
    EvolutionaryField,
    multi_total_derivative,
    prolong_evolutionary,
)
from jetbrane.kernel import Expr, Kind, MultiIndex, partial_derivative

OpKey = tuple[str, str, MultiIndex]
BiKey = tuple[str, str, str, MultiIndex, MultiIndex]


def _normalize(
    coeffs: Mapping[tuple, Expr], n_labels: int
) -> dict[tuple, Expr]:
    acc: dict[tuple, Expr] = {}
    for key, value in coeffs.items():
        key = tuple(key[:n_labels]) + tuple(
            MultiIndex(mi) for mi in key[n_labels:]
        )
        acc[key] = acc.get(key, Expr()) + value
    return {k: v for k, v in sorted(acc.items()) if not v.is_zero()}


class TotalDiffOp:
    """
    Matrix of total differential operators with explicit label ranges.

    Example:
        >>> dt = TotalDiffOp.partial(0, ["q"])
        >>> apply(dt, {"q": q})["q"] == total_derivative(q, 0)
        True
    """

    def __init__(
        self,
        out_labels: Iterable[str],
        in_labels: Iterable[str],
        coeffs: Mapping[OpKey, Expr] | None = None,
    ) -> None:
        self.out_labels = tuple(out_labels)
        self.in_labels = tuple(in_labels)
        self.coeffs: dict[OpKey, Expr] = _normalize(coeffs or {}, 2)
        for a, b, _ in self.coeffs:
            if a not in self.out_labels or b not in self.in_labels:
                raise IndexMismatchError(
                    f"coefficient ({a}, {b}) outside the label ranges",
                    self.out_labels,
                    self.in_labels,
                )

    @classmethod
    def zero(
        cls, out_labels: Iterable[str], in_labels: Iterable[str]
    ) -> TotalDiffOp:
        return cls(out_labels, in_labels)

    @classmethod
    def identity(cls, labels: Sequence[str]) -> TotalDiffOp:
        return cls(
            labels,
            labels,
            {(a, a, MultiIndex()): Expr.constant(1) for a in labels},
        )

    @classmethod
    def partial(cls, mu: Iterable[int] | int, labels: Sequence[str]):
        mi = MultiIndex([mu] if isinstance(mu, int) else mu)
        return cls(
            labels, labels, {(a, a, mi): Expr.constant(1) for a in labels}
        )

    @property
    def order(self) -> int:
        return max((len(mi) for _, _, mi in self.coeffs), default=0)

    def items(self) -> list[tuple[OpKey, Expr]]:
        return list(self.coeffs.items())

    def coefficient(self, a: str, b: str, mu: Iterable[int] = ()) -> Expr:
        return self.coeffs.get((a, b, MultiIndex(mu)), Expr())

    def is_zero(self) -> bool:
        return not self.coeffs

    def row(self, a: str) -> TotalDiffOp:
        return TotalDiffOp(
            [a],
            self.in_labels,
            {k: v for k, v in self.coeffs.items() if k[0] == a},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TotalDiffOp):
            return NotImplemented
        return (
            set(self.out_labels) == set(other.out_labels)
            and set(self.in_labels) == set(other.in_labels)
            and self.coeffs == other.coeffs
        )

    def _check_same_shape(self, other: TotalDiffOp) -> None:
        if set(self.out_labels) != set(other.out_labels) or set(
            self.in_labels
        ) != set(other.in_labels):
            raise IndexMismatchError(
                "operators have different label ranges",
                (self.out_labels, self.in_labels),
                (other.out_labels, other.in_labels),
            )

    def __add__(self, other: TotalDiffOp) -> TotalDiffOp:
        self._check_same_shape(other)
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = acc.get(k, Expr()) + v
        return TotalDiffOp(self.out_labels, self.in_labels, acc)

    def __neg__(self) -> TotalDiffOp:
        return self.scale(-1)

    def __sub__(self, other: TotalDiffOp) -> TotalDiffOp:
        return self + (-other)

    def scale(self, value: int | Fraction) -> TotalDiffOp:
        return TotalDiffOp(
            self.out_labels,
            self.in_labels,
            {k: v.scale(value) for k, v in self.coeffs.items()},
        )

    def left_multiply(self, e: Expr) -> TotalDiffOp:
        return TotalDiffOp(
            self.out_labels,
            self.in_labels,
            {k: e * v for k, v in self.coeffs.items()},
        )

    def __repr__(self) -> str:
        body = ", ".join(
            f"({a},{b},{''.join(map(str, mi))}): {c}"
            for (a, b, mi), c in self.coeffs.items()
        )
        return (
            f"TotalDiffOp({list(self.out_labels)} <- "
            f"{list(self.in_labels)}, {{{body}}})"
        )


def apply(O: TotalDiffOp, f: Mapping[str, Expr]) -> dict[str, Expr]:
    result = {a: Expr() for a in O.out_labels}
    for (a, b, mu), c in O.coeffs.items():
        fb = f.get(b)
        if fb is None or fb.is_zero():
            continue
        result[a] = result[a] + c * multi_total_derivative(fb, mu)
    return result


def compose(O1: TotalDiffOp, O2: TotalDiffOp) -> TotalDiffOp:
    """O1 after O2, expanded with the Leibniz rule."""
    if set(O1.in_labels) != set(O2.out_labels):
        raise IndexMismatchError(
            "cannot compose: input labels of the outer operator do not "
            "match output labels of the inner one",
            O1.in_labels,
            O2.out_labels,
        )
    by_out: dict[str, list[tuple[str, MultiIndex, Expr]]] = defaultdict(list)
    for (b, c, nu), value in O2.coeffs.items():
        by_out[b].append((c, nu, value))
    acc: dict[OpKey, Expr] = defaultdict(Expr)
    for (a, b, mu), c1 in O1.coeffs.items():
        for c, nu, c2 in by_out.get(b, []):
            for beta in mu.sub_indices():
                derived = multi_total_derivative(c2, beta)
                if derived.is_zero():
                    continue
                key = (a, c, mu.difference(beta).union(nu))
                acc[key] = acc[key] + (c1 * derived).scale(
                    mu.binomial(beta)
                )
    return TotalDiffOp(O1.out_labels, O2.in_labels, acc)


def adjoint(O: TotalDiffOp) -> TotalDiffOp:
    """
    Formal adjoint: O^dagger(g) = (-d)_(mu)(O^(mu) g), with the label
    ranges transposed.
    """
    acc: dict[OpKey, Expr] = defaultdict(Expr)
    for (a, b, mu), c in O.coeffs.items():
        sign = -1 if len(mu) % 2 else 1
        for beta in mu.sub_indices():
            derived = multi_total_derivative(c, mu.difference(beta))
            if derived.is_zero():
                continue
            acc[(b, a, beta)] = acc[(b, a, beta)] + derived.scale(
                sign * mu.binomial(beta)
            )
    return TotalDiffOp(O.in_labels, O.out_labels, acc)


def frechet(P: Mapping[str, Expr], fields: Sequence[str]) -> TotalDiffOp:
    """
    Frechet derivative (D_P)^a_j = d P^a / d phi^j_(nu) d_(nu).
    """
    acc: dict[OpKey, Expr] = defaultdict(Expr)
    for a, p in P.items():
        for g in p.jet_generators():
            if g.kind == Kind.FIELD and g.base in fields:
                key = (a, str(g.base), g.jet)
                acc[key] = acc[key] + partial_derivative(p, g, "right")
    return TotalDiffOp(P.keys(), fields, acc)


def collection_label(O: TotalDiffOp, a: str, b: str) -> str:
    if len(O.out_labels) == 1:
        return b
    if len(O.in_labels) == 1:
        return a
    return f"{a}/{b}"


def frechet_of_operator(
    O: TotalDiffOp, fields: Sequence[str]
) -> TotalDiffOp:
    """
    D_O = D_{O^(mu)} o d_(mu), the coefficient family O^(mu) being indexed
    by the label of O that is not trivial.
    """
    labels = sorted(
        {collection_label(O, a, b) for a in O.out_labels for b in O.in_labels}
    )
    acc: dict[OpKey, Expr] = defaultdict(Expr)
    for (a, b, mu), c in O.coeffs.items():
        label = collection_label(O, a, b)
        for g in c.jet_generators():
            if g.kind == Kind.FIELD and g.base in fields:
                key = (label, str(g.base), g.jet.union(mu))
                acc[key] = acc[key] + partial_derivative(c, g, "right")
    return TotalDiffOp(labels, fields, acc)


def helmholtz_check(E: Mapping[str, Expr]) -> bool:
    """Whether E is the Euler-Lagrange expression of some Lagrangian."""
    D = frechet(E, list(E))
    return D == adjoint(D)


def is_noether(N: TotalDiffOp, E: Mapping[str, Expr]) -> bool:
    if set(N.in_labels) - set(E):
        raise IndexMismatchError(
            "Noether operator acts on labels missing from the equations",
            N.in_labels,
            tuple(E),
        )
    return all(v.is_zero() for v in apply(N, E).values())


def prolong_operator(Q: EvolutionaryField, O: TotalDiffOp) -> TotalDiffOp:
    """delta_Q acting on every coefficient of O."""
    return TotalDiffOp(
        O.out_labels,
        O.in_labels,
        {k: prolong_evolutionary(Q, v) for k, v in O.coeffs.items()},
    )


def characteristic_frechet(
    Q: EvolutionaryField, fields: Sequence[str]
) -> TotalDiffOp:
    return frechet(
        {i: Q.characteristics.get(i, Expr()) for i in fields}, fields
    )


def module_action(Q: EvolutionaryField, N: TotalDiffOp) -> TotalDiffOp:
    """
    Action of a symmetry on a Noether operator:
    (Q.N)^i = delta_Q N^i - N^j o (D_Q^i_j)^dagger.
    """
    fields = list(N.in_labels)
    correction = compose(N, adjoint(characteristic_frechet(Q, fields)))
    return prolong_operator(Q, N) - correction


def rho(N: TotalDiffOp) -> EvolutionaryField:
    """
    Characteristic rho(N)^i = N^dagger i (1) of the variational symmetry
    attached to a Noether operator.
    """
    if len(N.out_labels) != 1:
        raise IndexMismatchError(
            "rho needs an operator with a single output label",
            N.out_labels,
            N.in_labels,
        )
    values = apply(adjoint(N), {N.out_labels[0]: Expr.constant(1)})
    return EvolutionaryField(values)


class BiDiffOp:
    """
    Bi-differential operator C^g_{ab}(f1, f2) =
    C^{g(mu)(nu)}_{ab} d_(mu) f1^a d_(nu) f2^b, skew under exchanging
    (a, mu) with (b, nu).
    """

    def __init__(self, coeffs: Mapping[BiKey, Expr] | None = None) -> None:
        self.coeffs: dict[BiKey, Expr] = _normalize(coeffs or {}, 3)
        for (g, a, b, mu, nu), value in self.coeffs.items():
            swapped = self.coeffs.get((g, b, a, nu, mu), Expr())
            if swapped != -value:
                raise ConfigurationError(
                    f"structure operator is not skew in ({a}, {b})"
                )

    @classmethod
    def from_entries(cls, entries: Mapping[BiKey, Expr]) -> BiDiffOp:
        """
        Build from user entries, completing omitted skew partners; an
        entry contradicting its partner is a configuration error.
        """
        given = _normalize(entries, 3)
        completed = dict(given)
        for (g, a, b, mu, nu), value in given.items():
            partner = (g, b, a, nu, mu)
            if partner in given:
                if given[partner] != -value:
                    raise ConfigurationError(
                        f"structure entries for ({g}; {a}, {b}) and "
                        f"({g}; {b}, {a}) are not skew"
                    )
            else:
                completed[partner] = -value
        return cls(completed)

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self) -> list[tuple[BiKey, Expr]]:
        return list(self.coeffs.items())

    def depends_on_fields(self) -> bool:
        return any(
            g.kind == Kind.FIELD
            for value in self.coeffs.values()
            for g in value.generators()
        )

    def apply(
        self, f1: Mapping[str, Expr], f2: Mapping[str, Expr]
    ) -> dict[str, Expr]:
        result: dict[str, Expr] = defaultdict(Expr)
        for (g, a, b, mu, nu), c in self.coeffs.items():
            if a not in f1 or b not in f2:
                continue
            term = (
                c
                * multi_total_derivative(f1[a], mu)
                * multi_total_derivative(f2[b], nu)
            )
            result[g] = result[g] + term
        return dict(result)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiDiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"BiDiffOp({len(self.coeffs)} entries)"
