"""
Canonical graded differential polynomials.

An :class:`Expr` is a finite sum of monomials with exact rational
coefficients. Factors of a monomial are kept sorted by the generator
order; the sign picked up by moving odd generators past each other is
absorbed into the coefficient, and a repeated odd generator kills the
monomial.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Collection, Iterable, Iterator, Mapping, Union

from jetbrane.exceptions import (
    InhomogeneityError,
    SchemaError,
    SubstitutionError,
)
from jetbrane.kernel.generators import (
    JET_KINDS,
    ODD_KINDS,
    Generator,
    Grading,
    Kind,
    SpaceSpec,
)
from jetbrane.kernel.render import render_expr

Factors = tuple[tuple[Generator, int], ...]
Scalar = Union[int, Fraction]

ONE_FACTORS: Factors = ()


def _merge(left: Factors, right: Factors) -> tuple[int, Factors]:
    """
    Graded product of two sorted factor tuples.

    Returns ``(sign, factors)``; ``sign`` is 0 when an odd generator
    would be repeated.
    """
    if not left:
        return 1, right
    if not right:
        return 1, left
    out = []
    sign = 1
    odd_left = sum(1 for g, _ in left if g.kind in ODD_KINDS)
    i = j = 0
    n_left, n_right = len(left), len(right)
    while i < n_left and j < n_right:
        gl, el = left[i]
        gr, er = right[j]
        if gl.key < gr.key:
            out.append(left[i])
            if gl.kind in ODD_KINDS:
                odd_left -= 1
            i += 1
        elif gr.key < gl.key:
            if odd_left % 2 and gr.kind in ODD_KINDS:
                sign = -sign
            out.append(right[j])
            j += 1
        else:
            if gl.kind in ODD_KINDS:
                return 0, ()
            out.append((gl, el + er))
            i += 1
            j += 1
    out.extend(left[i:])
    out.extend(right[j:])
    return sign, tuple(out)


def _factors_key(factors: Factors) -> tuple:
    return tuple((g.key, e) for g, e in factors)


def _factors_grading(factors: Factors) -> Grading:
    grading = Grading()
    for g, e in factors:
        grading = grading + g.grading.scaled(e)
    return grading


@dataclass(frozen=True)
class Monomial:
    coeff: Fraction
    factors: Factors

    @property
    def grading(self) -> Grading:
        return _factors_grading(self.factors)

    def expr(self) -> Expr:
        return Expr({self.factors: self.coeff})


class Expr:
    """
    Immutable canonical graded polynomial.

    Example:
        >>> q_t = Expr.of(field_jet("q", [0]))
        >>> (3 * q_t + 2 * q_t) == 5 * q_t
        True
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Factors, Fraction] | None = None):
        self._terms: dict[Factors, Fraction] = {
            f: Fraction(c) for f, c in (terms or {}).items() if c != 0
        }
        self._hash: int | None = None

    # ==========================================================
    # construction

    @classmethod
    def zero(cls) -> Expr:
        return cls()

    @classmethod
    def constant(cls, value: Scalar) -> Expr:
        return cls({ONE_FACTORS: Fraction(value)})

    @classmethod
    def of(cls, g: Generator, exponent: int = 1) -> Expr:
        if exponent == 0:
            return cls.constant(1)
        if g.odd and exponent > 1:
            return cls()
        return cls({((g, exponent),): Fraction(1)})

    # ==========================================================
    # inspection

    @property
    def terms(self) -> list[Monomial]:
        return [Monomial(c, f) for f, c in self.items()]

    def items(self) -> list[tuple[Factors, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: _factors_key(t[0]))

    def raw_items(self) -> Iterable[tuple[Factors, Fraction]]:
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not f for f in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(ONE_FACTORS, Fraction(0))

    def coefficient(self, factors: Factors) -> Fraction:
        return self._terms.get(factors, Fraction(0))

    def generators(self) -> frozenset[Generator]:
        return frozenset(g for f in self._terms for g, _ in f)

    def jet_generators(self) -> frozenset[Generator]:
        return frozenset(g for g in self.generators() if g.is_jet)

    def roots(self, kinds: Collection[Kind] = JET_KINDS) -> set[Generator]:
        return {g.root() for g in self.generators() if g.kind in kinds}

    def max_order(self, kinds: Collection[Kind] = JET_KINDS) -> int:
        """Highest jet order among generators of the given kinds, or -1."""
        orders = [g.order for g in self.generators() if g.kind in kinds]
        return max(orders, default=-1)

    def jet_degree(self) -> int:
        return max(
            (sum(e for g, e in f if g.is_jet) for f in self._terms),
            default=0,
        )

    def x_degree(self) -> int:
        return max(
            (
                sum(e for g, e in f if g.kind == Kind.COORDINATE)
                for f in self._terms
            ),
            default=0,
        )

    def grading(self) -> Grading:
        return grading_of(self)

    @property
    def odd(self) -> bool:
        return parity_of(self)

    # ==========================================================
    # arithmetic

    @staticmethod
    def _coerce(other: object) -> Expr | None:
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, Fraction)):
            return Expr.constant(other)
        return None

    def __add__(self, other: object) -> Expr:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        acc = dict(self._terms)
        for f, c in rhs._terms.items():
            acc[f] = acc.get(f, 0) + c
        return Expr(acc)

    __radd__ = __add__

    def __neg__(self) -> Expr:
        return Expr({f: -c for f, c in self._terms.items()})

    def __sub__(self, other: object) -> Expr:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> Expr:
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: object) -> Expr:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Expr):
            return NotImplemented
        acc: dict[Factors, Fraction] = defaultdict(Fraction)
        for fa, ca in self._terms.items():
            for fb, cb in other._terms.items():
                sign, f = _merge(fa, fb)
                if sign:
                    acc[f] += sign * ca * cb
        return Expr(acc)

    def __rmul__(self, other: object) -> Expr:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other: object) -> Expr:
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        return NotImplemented

    def __pow__(self, exponent: int) -> Expr:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"invalid exponent {exponent!r}")
        result = Expr.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, value: Scalar) -> Expr:
        value = Fraction(value)
        return Expr({f: c * value for f, c in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._terms == rhs._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Expr({render_expr(self)!r})"

    def __str__(self) -> str:
        return render_expr(self)


def canonicalize(
    raw: Iterable[
        Monomial
        | tuple[Scalar, Iterable[Generator | tuple[Generator, int]]]
    ],
    space: SpaceSpec | None = None,
    known: Collection[str] | None = None,
) -> Expr:
    """
    Canonical form of an unsorted list of terms.

    Each raw term is a coefficient with a list of factors, in the order
    they were written; a factor is a generator or a
    ``(generator, exponent)`` pair. When ``space`` or ``known`` is given,
    every generator is validated against it.

    Example:
        >>> c1, c2 = ghost("a"), ghost("b")
        >>> canonicalize([(1, [c1, c2]), (1, [c2, c1])]).is_zero()
        True
    """
    acc: dict[Factors, Fraction] = defaultdict(Fraction)
    for term in raw:
        if isinstance(term, Monomial):
            coeff, factors = term.coeff, list(term.factors)
        else:
            coeff, factors = term
        sign = 1
        current: Factors = ONE_FACTORS
        for item in factors:
            g, e = item if isinstance(item, tuple) else (item, 1)
            if space is not None:
                space.check_generator(g)
            if known is not None and g.is_jet and g.base not in known:
                raise SchemaError(f"unknown identifier `{g.base}`", g.base)
            if e == 0:
                continue
            if g.odd and e > 1:
                sign = 0
                break
            s, current = _merge(current, ((g, e),))
            sign *= s
            if not sign:
                break
        if sign:
            acc[current] += sign * Fraction(coeff)
    return Expr(acc)


def graded_product(a: Expr, b: Expr) -> Expr:
    return a * b


def parity_of(e: Expr) -> bool:
    """Parity of a parity-homogeneous expression; True means odd."""
    parity = None
    first = None
    for f, c in e.raw_items():
        odd = sum(k for g, k in f if g.odd) % 2 == 1
        if parity is None:
            parity, first = odd, Monomial(c, f)
        elif parity != odd:
            raise InhomogeneityError(
                "expression mixes even and odd terms",
                first.expr() if first else None,
                Expr({f: c}),
            )
    return bool(parity)


def grading_of(e: Expr) -> Grading:
    """
    Common grading of all terms of ``e``; the zero expression has the
    trivial grading.
    """
    grading = None
    first: Monomial | None = None
    for f, c in e.items():
        current = _factors_grading(f)
        if grading is None:
            grading, first = current, Monomial(c, f)
        elif current != grading:
            assert first is not None
            raise InhomogeneityError(
                f"inhomogeneous expression: `{first.expr()}` has "
                f"{grading}, `{Expr({f: c})}` has {current}",
                first.expr(),
                Expr({f: c}),
            )
    return grading if grading is not None else Grading()


def homogeneous_parts(
    e: Expr, key: Callable[[Grading], object]
) -> dict[object, Expr]:
    """
    Split ``e`` by a function of the monomial grading, e.g. by
    resolution degree.
    """
    parts: dict[object, dict[Factors, Fraction]] = defaultdict(dict)
    for f, c in e.raw_items():
        parts[key(_factors_grading(f))][f] = c
    return {k: Expr(v) for k, v in parts.items()}


def partial_derivative(e: Expr, g: Generator, side: str = "left") -> Expr:
    """
    Graded partial derivative with respect to the single generator ``g``.

    The left derivative brings ``g`` to the front of each monomial
    before stripping it, the right derivative brings it to the end.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be `left` or `right`, got {side!r}")
    acc: dict[Factors, Fraction] = defaultdict(Fraction)
    for f, c in e.raw_items():
        for pos, (h, k) in enumerate(f):
            if h != g:
                continue
            if g.odd:
                if side == "left":
                    passed = sum(1 for x, _ in f[:pos] if x.odd)
                else:
                    passed = sum(1 for x, _ in f[pos + 1 :] if x.odd)
                sign = -1 if passed % 2 else 1
                acc[f[:pos] + f[pos + 1 :]] += sign * c
            else:
                lowered = ((g, k - 1),) if k > 1 else ()
                acc[f[:pos] + lowered + f[pos + 1 :]] += k * c
            break
    return Expr(acc)


def _sandwich(
    prefix: Factors, middle: Expr, suffix: Factors, coeff: Fraction
) -> dict[Factors, Fraction]:
    out: dict[Factors, Fraction] = defaultdict(Fraction)
    for fm, cm in middle.raw_items():
        s1, f1 = _merge(prefix, fm)
        if not s1:
            continue
        s2, f2 = _merge(f1, suffix)
        if s2:
            out[f2] += s1 * s2 * cm * coeff
    return out


def derivation(
    e: Expr,
    image: Callable[[Generator], Expr | None],
    odd: bool,
    cache: dict[Generator, Expr | None] | None = None,
) -> Expr:
    """
    Apply the graded left derivation determined by its values on
    generators.

    ``image(g)`` returns the value on ``g`` (``None`` for zero); ``odd``
    is the parity of the derivation. A derivation of parity p picks up
    (-1)^(p * parity of the factors it passes).
    """
    if cache is None:
        cache = {}
    acc: dict[Factors, Fraction] = defaultdict(Fraction)
    for f, c in e.raw_items():
        prefix_odd = False
        for pos, (g, k) in enumerate(f):
            if g in cache:
                img = cache[g]
            else:
                img = image(g)
                cache[g] = img
            if img is not None and not img.is_zero():
                sign = -1 if (odd and prefix_odd) else 1
                if g.odd:
                    prefix = f[:pos]
                    coeff = sign * c
                else:
                    prefix = f[:pos] + (((g, k - 1),) if k > 1 else ())
                    coeff = sign * k * c
                for fr, cr in _sandwich(
                    prefix, img, f[pos + 1 :], coeff
                ).items():
                    acc[fr] += cr
            if g.odd:
                prefix_odd = not prefix_odd
    return Expr(acc)


def substitute(e: Expr, sigma: Mapping[Generator, Expr]) -> Expr:
    """
    Simultaneous graded substitution of generators.

    Example:
        >>> q, q_t = field_jet("q"), field_jet("q", [0])
        >>> substitute(Expr.of(q_t, 2), {q_t: Expr.of(q)}) == Expr.of(q, 2)
        True
    """
    for g, img in sigma.items():
        if not img.is_zero() and parity_of(img) != g.odd:
            raise SubstitutionError(
                f"image of `{Expr.of(g)}` has the wrong parity", g
            )
    result = Expr()
    for f, c in e.raw_items():
        term = Expr.constant(c)
        for g, k in f:
            if g in sigma:
                term = term * sigma[g] ** k
            else:
                term = term * Expr.of(g, k)
            if term.is_zero():
                break
        result = result + term
    return result


def commutator(
    d1: Callable[[Expr], Expr],
    d2: Callable[[Expr], Expr],
    e: Expr,
    odd1: bool = False,
    odd2: bool = False,
) -> Expr:
    """Graded commutator [d1, d2] applied to ``e``."""
    sign = -1 if (odd1 and odd2) else 1
    return d1(d2(e)) - sign * d2(d1(e))

