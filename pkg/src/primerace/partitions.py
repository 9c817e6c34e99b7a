"""Set-partition combinatorics and the Lambda operator.

Lambda_K(h)(s) = sum over partitions alpha of K of
mu_alpha * prod_{J in alpha} h(psi_J(s)), with mu_alpha =
(-1)^{|alpha|-1} (|alpha|-1)! and psi_J zeroing every coordinate outside J.
In dimension 2 this is h(s1,s2) - h(s1,0) h(0,s2). The operator is the
combinatorial core of the multidimensional Berry-Esseen inequality; its key
property is that Lambda(h) vanishes wherever a coordinate of s is zero,
provided h(0) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_INDEX_SET = 12


@dataclass(frozen=True)
class SetPartition:
    """Disjoint nonempty blocks covering an index set."""

    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        seen = set()
        for block in self.blocks:
            if not block:
                raise ValueError("empty block")
            if seen & block:
                raise ValueError("blocks are not disjoint")
            seen |= block
        if not seen:
            raise ValueError("partition of the empty set")

    @property
    def support(self) -> frozenset:
        return frozenset().union(*self.blocks)

    @property
    def moebius(self) -> int:
        """(-1)^{blocks-1} (blocks-1)!; equals 1 for the one-block partition."""
        k = len(self.blocks)
        return (-1) ** (k - 1) * math.factorial(k - 1)


def bell_number(n: int) -> int:
    """Number of partitions of an n-element set, via the Bell triangle."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def _restricted_growth_strings(k: int):
    """All length-k restricted growth strings, lexicographically."""

    def rec(prefix: list, top: int):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for v in range(top + 2):
            prefix.append(v)
            yield from rec(prefix, max(top, v))
            prefix.pop()

    yield from rec([0], 0)


@lru_cache(maxsize=None)
def _partitions_by_size(k: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Block index lists for partitions of {0..k-1}, in growth-string order."""
    out = []
    for rgs in _restricted_growth_strings(k):
        blocks = [[] for _ in range(max(rgs) + 1)]
        for pos, label in enumerate(rgs):
            blocks[label].append(pos)
        out.append(tuple(tuple(b) for b in blocks))
    return tuple(out)


def set_partitions(indices: Iterable[int]) -> list[SetPartition]:
    """All partitions of the given index set, Bell(|K|) of them, in a fixed order."""
    elems = sorted(set(indices))
    if not elems:
        raise ValueError("index set is empty")
    if len(elems) > MAX_INDEX_SET:
        raise ValueError(f"index set larger than {MAX_INDEX_SET} elements")
    if any(not isinstance(e, (int, np.integer)) or e < 0 for e in elems):
        raise ValueError("indices must be nonnegative integers")
    return [
        SetPartition(tuple(frozenset(elems[p] for p in block) for block in shape))
        for shape in _partitions_by_size(len(elems))
    ]


def lambda_operator(
    h: Callable[[np.ndarray], complex], indices: Iterable[int], s: Sequence[float]
) -> complex:
    """Evaluate Lambda_K(h) at s, zeroing coordinates outside each block."""
    s = np.asarray(s, dtype=float)
    elems = sorted(set(indices))
    if elems and elems[-1] >= len(s):
        raise ValueError("index exceeds the vector length")
    total = 0.0 + 0.0j
    for part in set_partitions(elems):
        term = complex(part.moebius)
        for block in part.blocks:
            proj = np.zeros_like(s)
            cols = list(block)
            proj[cols] = s[cols]
            term *= h(proj)
        total += term
    return total
