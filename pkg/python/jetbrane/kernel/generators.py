from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator

from jetbrane.consts import MAX_DIM
from jetbrane.exceptions import SchemaError


class Kind(IntEnum):
    """
    Generator kinds, in the canonical factor order.
    """

    COORDINATE = 0
    FIELD = 1
    GHOST = 2
    FIELD_ANTIFIELD = 3
    GHOST_ANTIFIELD = 4
    BASIS_FORM = 5


JET_KINDS = frozenset(
    [Kind.FIELD, Kind.GHOST, Kind.FIELD_ANTIFIELD, Kind.GHOST_ANTIFIELD]
)
ODD_KINDS = frozenset([Kind.GHOST, Kind.FIELD_ANTIFIELD, Kind.BASIS_FORM])


class MultiIndex(tuple):
    """
    Symmetric multi-index (mu), stored as a nondecreasing tuple of
    coordinate indices.

    Example:
        >>> MultiIndex([1, 0, 1])
        MultiIndex(0, 1, 1)
        >>> len(MultiIndex())
        0
    """

    def __new__(cls, entries: Iterable[int] = ()) -> MultiIndex:
        return super().__new__(cls, sorted(entries))

    def __repr__(self) -> str:
        return f"MultiIndex({', '.join(str(i) for i in self)})"

    def add(self, nu: int) -> MultiIndex:
        return MultiIndex((*self, nu))

    def union(self, other: Iterable[int]) -> MultiIndex:
        return MultiIndex((*self, *other))

    def remove(self, nu: int) -> MultiIndex:
        entries = list(self)
        entries.remove(nu)
        return MultiIndex(entries)

    def difference(self, other: MultiIndex) -> MultiIndex:
        counts = Counter(self)
        counts.subtract(other)
        if any(v < 0 for v in counts.values()):
            raise ValueError(f"{other!r} is not contained in {self!r}")
        return MultiIndex(counts.elements())

    def contains(self, other: MultiIndex) -> bool:
        counts = Counter(self)
        counts.subtract(other)
        return all(v >= 0 for v in counts.values())

    def sub_indices(self) -> Iterator[MultiIndex]:
        """
        Every sub-multiset beta of this multi-index, each exactly once.
        """
        counts = sorted(Counter(self).items())
        ranges = [range(c + 1) for _, c in counts]
        for picks in itertools.product(*ranges):
            yield MultiIndex(
                itertools.chain.from_iterable(
                    [idx] * k for (idx, _), k in zip(counts, picks)
                )
            )

    def binomial(self, sub: MultiIndex) -> int:
        """
        Multinomial coefficient C(mu, beta), the number of ways the
        Leibniz rule distributes beta out of mu.
        """
        total = Counter(self)
        part = Counter(sub)
        return math.prod(math.comb(total[i], part[i]) for i in total)


def multi_indices(dim: int, max_order: int) -> list[MultiIndex]:
    """
    All multi-indices of length <= max_order over dim coordinates, by
    length then lexicographically.
    """
    result = []
    for order in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(
            range(dim), order
        ):
            result.append(MultiIndex(combo))
    return result


@dataclass(frozen=True)
class Grading:
    """
    Multi-grading of a homogeneous expression.

    ``ghost`` is the pure ghost number, ``resolution`` the antifield
    degree; the total ghost number is their difference.
    """

    ghost: int = 0
    resolution: int = 0
    form_degree: int = 0
    odd: bool = False

    @property
    def ghost_number(self) -> int:
        return self.ghost - self.resolution

    def __add__(self, other: Grading) -> Grading:
        return Grading(
            self.ghost + other.ghost,
            self.resolution + other.resolution,
            self.form_degree + other.form_degree,
            self.odd != other.odd,
        )

    def __sub__(self, other: Grading) -> Grading:
        return Grading(
            self.ghost - other.ghost,
            self.resolution - other.resolution,
            self.form_degree - other.form_degree,
            self.odd != other.odd,
        )

    def scaled(self, k: int) -> Grading:
        return Grading(
            self.ghost * k,
            self.resolution * k,
            self.form_degree * k,
            self.odd and k % 2 == 1,
        )


_KIND_GRADING = {
    Kind.COORDINATE: Grading(),
    Kind.FIELD: Grading(),
    Kind.GHOST: Grading(ghost=1, odd=True),
    Kind.FIELD_ANTIFIELD: Grading(resolution=1, odd=True),
    Kind.GHOST_ANTIFIELD: Grading(resolution=2),
    Kind.BASIS_FORM: Grading(form_degree=1, odd=True),
}


@dataclass(frozen=True)
class Generator:
    """
    A single generator of the graded algebra: a coordinate x^mu, a jet
    variable z_(mu) of a field, ghost or antifield, or a basis one-form
    dx^mu.

    Coordinates and basis forms carry an integer base (the coordinate
    index); jet variables carry the name of the field or gauge
    parameter they belong to.
    """

    kind: Kind
    base: str | int
    jet: MultiIndex = field(default_factory=MultiIndex)
    key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.jet, MultiIndex):
            object.__setattr__(self, "jet", MultiIndex(self.jet))
        if self.kind not in JET_KINDS and self.jet:
            raise SchemaError(
                f"{self.kind.name.lower()} generator cannot carry a jet",
                self.base,
            )
        object.__setattr__(
            self,
            "key",
            (int(self.kind), self.base, len(self.jet), tuple(self.jet)),
        )
        object.__setattr__(self, "_hash", hash(self.key))

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: Generator) -> bool:
        return self.key < other.key

    @property
    def odd(self) -> bool:
        return self.kind in ODD_KINDS

    @property
    def is_jet(self) -> bool:
        return self.kind in JET_KINDS

    @property
    def order(self) -> int:
        return len(self.jet)

    @property
    def grading(self) -> Grading:
        return _KIND_GRADING[self.kind]

    def prolong(self, nu: int) -> Generator:
        return Generator(self.kind, self.base, self.jet.add(nu))

    def with_jet(self, jet: Iterable[int]) -> Generator:
        return Generator(self.kind, self.base, MultiIndex(jet))

    def root(self) -> Generator:
        """The underlying undifferentiated generator."""
        if not self.jet:
            return self
        return Generator(self.kind, self.base)


def coordinate(mu: int) -> Generator:
    return Generator(Kind.COORDINATE, mu)


def basis_form(mu: int) -> Generator:
    return Generator(Kind.BASIS_FORM, mu)


def field_jet(name: str, jet: Iterable[int] = ()) -> Generator:
    return Generator(Kind.FIELD, name, MultiIndex(jet))


def ghost(name: str, jet: Iterable[int] = ()) -> Generator:
    return Generator(Kind.GHOST, name, MultiIndex(jet))


def antifield(name: str, jet: Iterable[int] = ()) -> Generator:
    return Generator(Kind.FIELD_ANTIFIELD, name, MultiIndex(jet))


def ghost_antifield(name: str, jet: Iterable[int] = ()) -> Generator:
    return Generator(Kind.GHOST_ANTIFIELD, name, MultiIndex(jet))


@dataclass(frozen=True)
class SpaceSpec:
    dim: int
    coord_names: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coord_names", tuple(self.coord_names))
        if not 1 <= self.dim <= MAX_DIM:
            raise SchemaError(
                f"dimension {self.dim} is out of range [1, {MAX_DIM}]",
                self.dim,
            )
        if len(self.coord_names) != self.dim:
            raise SchemaError(
                f"expected {self.dim} coordinate names, "
                f"got {len(self.coord_names)}",
                self.coord_names,
            )
        if len(set(self.coord_names)) != self.dim:
            raise SchemaError(
                "coordinate names must be distinct", self.coord_names
            )

    @classmethod
    def default(cls, dim: int) -> SpaceSpec:
        return cls(dim, tuple(f"x{i}" for i in range(dim)))

    @property
    def single_char_coords(self) -> bool:
        return all(len(name) == 1 for name in self.coord_names)

    def index_of(self, name: str) -> int:
        try:
            return self.coord_names.index(name)
        except ValueError:
            raise SchemaError(f"unknown coordinate `{name}`", name)

    def check_index(self, nu: int) -> None:
        if not 0 <= nu < self.dim:
            raise SchemaError(
                f"coordinate index {nu} is out of range [0, {self.dim})", nu
            )

    def check_generator(self, g: Generator) -> None:
        if g.kind in (Kind.COORDINATE, Kind.BASIS_FORM):
            assert isinstance(g.base, int)
            self.check_index(g.base)
        for nu in g.jet:
            self.check_index(nu)
