"""Finite abelian groups, their characters, and the class-function algebra."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

GroupElement = tuple[int, ...]
CharacterIndex = tuple[int, ...]


@dataclass(frozen=True)
class AbelianGroup:
    """Z/n1 x ... x Z/nk with elements and characters as exponent vectors."""

    factor_orders: tuple[int, ...]
    order: int = field(init=False)

    def __post_init__(self) -> None:
        if not self.factor_orders:
            raise ValueError("factor_orders must be nonempty")
        if any(n < 2 for n in self.factor_orders):
            raise ValueError("every factor order must be >= 2")
        object.__setattr__(self, "factor_orders", tuple(int(n) for n in self.factor_orders))
        order = 1
        for n in self.factor_orders:
            order *= n
        object.__setattr__(self, "order", order)
        # one root-of-unity table per factor; avoids transcendental calls in hot loops
        import cmath

        table = tuple(
            tuple(cmath.exp(2j * cmath.pi * k / n) for k in range(n)) for n in self.factor_orders
        )
        object.__setattr__(self, "_roots", table)

    @property
    def identity(self) -> GroupElement:
        return (0,) * len(self.factor_orders)

    def elements(self) -> Iterator[GroupElement]:
        """All elements in lexicographic order on exponent vectors."""
        return itertools.product(*(range(n) for n in self.factor_orders))

    def characters(self) -> Iterator[CharacterIndex]:
        """All character indices, same lexicographic order."""
        return itertools.product(*(range(n) for n in self.factor_orders))

    def nontrivial_characters(self) -> Iterator[CharacterIndex]:
        return (chi for chi in self.characters() if any(chi))

    def reduce(self, exponents: tuple[int, ...]) -> GroupElement:
        self._check_shape(exponents)
        return tuple(x % n for x, n in zip(exponents, self.factor_orders))

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._check_shape(a)
        self._check_shape(b)
        return tuple((x + y) % n for x, y, n in zip(a, b, self.factor_orders))

    def inv(self, a: GroupElement) -> GroupElement:
        self._check_shape(a)
        return tuple((-x) % n for x, n in zip(a, self.factor_orders))

    def _check_shape(self, v: tuple[int, ...]) -> None:
        if len(v) != len(self.factor_orders):
            raise ValueError(f"exponent vector {v!r} does not match factors {self.factor_orders}")


def make_group(factor_orders) -> AbelianGroup:
    """Build Z/n1 x ... x Z/nk; rejects empty sequences and factors < 2."""
    return AbelianGroup(tuple(factor_orders))


def character_value(G: AbelianGroup, chi: CharacterIndex, g: GroupElement) -> complex:
    """chi(g) = exp(2*pi*i * sum_j chi_j g_j / n_j), from the precomputed root tables."""
    G._check_shape(chi)
    G._check_shape(g)
    value = 1 + 0j
    for j, (c, x) in enumerate(zip(chi, g)):
        n = G.factor_orders[j]
        value *= G._roots[j][(c * x) % n]
    return value


ClassFunction = dict  # GroupElement -> complex (integer-valued race functions stay exact)


def inner_product(G: AbelianGroup, f: ClassFunction, h: ClassFunction) -> complex:
    """(1/|G|) sum_x f(x) * conj(h(x)); both functions must cover all of G."""
    total = 0j
    for x in G.elements():
        if x not in f or x not in h:
            raise ValueError(f"class function not defined at {x!r}")
        hx = h[x]
        total += f[x] * (hx.conjugate() if isinstance(hx, complex) else hx)
    return total / G.order


def character_function(G: AbelianGroup, chi: CharacterIndex) -> ClassFunction:
    return {g: character_value(G, chi, g) for g in G.elements()}


def square_root_counts(G: AbelianGroup) -> dict[GroupElement, int]:
    """r_G(g) = #{x : x^2 = g}; the identity's count is r(G)."""
    counts = {g: 0 for g in G.elements()}
    for x in G.elements():
        counts[G.mul(x, x)] += 1
    return counts


def race_class_function(G: AbelianGroup, a: GroupElement, b: GroupElement) -> ClassFunction:
    """t_{a,b} = |G|*(1_a - 1_b); integer-valued and orthogonal to the trivial character."""
    a = G.reduce(a)
    b = G.reduce(b)
    if a == b:
        raise ValueError("race classes must be distinct")
    t = {g: 0 for g in G.elements()}
    t[a] = G.order
    t[b] = -G.order
    return t


def format_element(g: GroupElement) -> str:
    return "e:(" + ",".join(str(x) for x in g) + ")"


def format_character(chi: CharacterIndex) -> str:
    return "c:(" + ",".join(str(x) for x in chi) + ")"


def _parse_vector(text: str, prefix: str) -> tuple[int, ...]:
    text = text.strip()
    if not text.startswith(prefix + ":(") or not text.endswith(")"):
        raise ValueError(f"expected '{prefix}:(x1,...,xk)', got {text!r}")
    body = text[len(prefix) + 2 : -1]
    if not body:
        raise ValueError(f"empty exponent vector in {text!r}")
    try:
        return tuple(int(part) for part in body.split(","))
    except ValueError as exc:
        raise ValueError(f"non-integer exponent in {text!r}") from exc


def parse_element(text: str, G: AbelianGroup | None = None) -> GroupElement:
    """Parse 'e:(x1,...,xk)'; reduced mod the factor orders when a group is given."""
    v = _parse_vector(text, "e")
    return G.reduce(v) if G is not None else v


def parse_character(text: str, G: AbelianGroup | None = None) -> CharacterIndex:
    """Parse 'c:(x1,...,xk)'."""
    v = _parse_vector(text, "c")
    return G.reduce(v) if G is not None else v
