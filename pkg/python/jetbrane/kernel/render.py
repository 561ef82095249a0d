"""
Deterministic text form of expressions, readable back by the theory
parser.
"""
from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING, Iterable

from jetbrane.kernel.generators import Generator, Kind, SpaceSpec

if TYPE_CHECKING:
    from jetbrane.kernel.expr import Expr


def coord_name(mu: int, space: SpaceSpec | None) -> str:
    if space is None:
        return f"x{mu}"
    return space.coord_names[mu]


def render_multi_index(jet: Iterable[int], space: SpaceSpec | None) -> str:
    if space is not None and space.single_char_coords:
        return "".join(space.coord_names[mu] for mu in jet)
    return "".join(str(mu) for mu in jet)


def render_generator(g: Generator, space: SpaceSpec | None = None) -> str:
    if g.kind == Kind.COORDINATE:
        assert isinstance(g.base, int)
        return coord_name(g.base, space)
    if g.kind == Kind.BASIS_FORM:
        assert isinstance(g.base, int)
        return f"dx({coord_name(g.base, space)})"
    head = {
        Kind.FIELD: "{}",
        Kind.GHOST: "ghost({})",
        Kind.FIELD_ANTIFIELD: "anti({})",
        Kind.GHOST_ANTIFIELD: "anti(ghost({}))",
    }[g.kind].format(g.base)
    if not g.jet:
        return head
    return f"{head}_[{render_multi_index(g.jet, space)}]"


def render_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_expr(e: Expr, space: SpaceSpec | None = None) -> str:
    """
    Example:
        >>> q_t = Expr.of(field_jet("q", [0]))
        >>> render_expr(-q_t * q_t / 2, SpaceSpec(1, ("t",)))
        '-1/2 * q_[t]^2'
    """
    parts: list[str] = []
    for factors, coeff in e.items():
        body = " * ".join(
            render_generator(g, space) + (f"^{k}" if k > 1 else "")
            for g, k in factors
        )
        magnitude = abs(coeff)
        if not body:
            text = render_rational(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{render_rational(magnitude)} * {body}"
        if not parts:
            parts.append(f"-{text}" if coeff < 0 else text)
        else:
            parts.append(f"- {text}" if coeff < 0 else f"+ {text}")
    return " ".join(parts) if parts else "0"
