"""Exact counting, enumeration and triple censuses of proper dice."""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass
from math import comb
from typing import Iterator

import numpy as np

from .dice import DieLike, ProperDie, Relation, check_sides, margin_matrix, relation
from .errors import InvalidArgument, ResourceLimitError

DEFAULT_ENUMERATION_LIMIT = 10**8
DEFAULT_CENSUS_MAX_DICE = 5_000


class CountTable:
    """Counts of nonincreasing face sequences, built lazily and shared read-only.

    ``cell(p, s, m)`` is the number of ways to choose ``p`` faces, each in
    ``[1, m]``, listed largest first, that sum to ``s``.  ``cell(n, n(n+1)/2, n)``
    is the number of proper n-sided dice.

    For a fixed ``(p, s)`` the values over ``m`` are cumulative sums of
    ``cell(p-1, s-v, v)`` over the largest face ``v``, so one row per
    ``(p, s)`` serves both counting and unranking.
    """

    def __init__(self, n: int):
        self.n = check_sides(n)
        self.target = n * (n + 1) // 2
        self._rows: dict[tuple[int, int], tuple[int, list[int]]] = {}

    def _row(self, p: int, s: int) -> tuple[int, list[int]]:
        """Return ``(lo, cum)`` with ``cum[i] = cell(p, s, lo + i)``."""
        key = (p, s)
        row = self._rows.get(key)
        if row is not None:
            return row
        # largest face is at least the mean and leaves room for p-1 ones
        lo = max(1, -(-s // p))
        hi = min(self.n, s - (p - 1))
        cum: list[int] = []
        total = 0
        for v in range(lo, hi + 1):
            total += self.cell(p - 1, s - v, v)
            cum.append(total)
        row = (lo, cum)
        self._rows[key] = row
        return row

    def cell(self, p: int, s: int, m: int) -> int:
        if p == 0:
            return 1 if s == 0 else 0
        if s < p or s > p * m:
            return 0
        lo, cum = self._row(p, s)
        if not cum or m < lo:
            return 0
        return cum[min(m - lo, len(cum) - 1)]

    @property
    def total(self) -> int:
        return self.cell(self.n, self.target, self.n)

    def unrank(self, r: int) -> tuple[int, ...]:
        """The ``r``-th proper die in largest-face-first order, as a sorted tuple."""
        if not 0 <= r < self.total:
            raise InvalidArgument(f"rank {r} outside [0, {self.total})")
        faces = []
        p, s, m = self.n, self.target, self.n
        while p:
            lo, cum = self._row(p, s)
            top = min(m - lo, len(cum) - 1)
            i = bisect_right(cum, r, 0, top + 1)
            if i:
                r -= cum[i - 1]
            v = lo + i
            faces.append(v)
            p, s, m = p - 1, s - v, v
        faces.reverse()
        return tuple(faces)

    def __len__(self) -> int:
        return len(self._rows)


_TABLES: dict[int, CountTable] = {}


def count_table(n: int) -> CountTable:
    table = _TABLES.get(n)
    if table is None:
        table = _TABLES[n] = CountTable(n)
    return table


def count_proper(n: int) -> int:
    """Number of proper n-sided dice, counted as multisets.

    >>> [count_proper(n) for n in range(1, 8)]
    [1, 1, 2, 5, 12, 32, 94]
    """
    return count_table(n).total


def iter_proper_faces(n: int) -> Iterator[tuple[int, ...]]:
    """Depth-first lexicographic walk; independent of :class:`CountTable`."""
    check_sides(n)
    target = n * (n + 1) // 2
    faces = [0] * n

    def walk(i: int, prev: int, remaining: int):
        left = n - i
        if left == 0:
            if remaining == 0:
                yield tuple(faces)
            return
        # every remaining face is in [prev, n]
        for v in range(prev, n + 1):
            if v * left > remaining:
                break
            if remaining - v > (left - 1) * n:
                continue
            faces[i] = v
            yield from walk(i + 1, v, remaining - v)

    yield from walk(0, 1, target)


def enumerate_proper(n: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> Iterator[ProperDie]:
    """Yield every proper n-sided die once, in lexicographic order."""
    total = count_proper(n)
    if total > limit:
        raise ResourceLimitError(f"Pr({n}) = {total} exceeds the enumeration limit {limit}")
    for faces in iter_proper_faces(n):
        yield ProperDie(faces)


class TripleClass(enum.Enum):
    INTRANSITIVE = "Intransitive"
    TRANSITIVE = "Transitive"
    HAS_TIE = "HasTie"


def classify_relations(ab: Relation, bc: Relation, ca: Relation) -> TripleClass:
    if Relation.TIE in (ab, bc, ca):
        return TripleClass.HAS_TIE
    if ab is bc is ca:
        return TripleClass.INTRANSITIVE
    return TripleClass.TRANSITIVE


def classify_triple(a: DieLike, b: DieLike, c: DieLike) -> TripleClass:
    return classify_relations(relation(a, b), relation(b, c), relation(c, a))


@dataclass(frozen=True)
class TripleCensus:
    n: int
    total: int
    intransitive: int
    transitive: int
    with_ties: int

    @property
    def intransitive_fraction(self) -> float:
        return self.intransitive / self.total if self.total else 0.0


def triangle_counts(margins: np.ndarray) -> tuple[int, int]:
    """Return ``(tie_free_triangles, cyclic_triangles)`` of a margin matrix.

    With ``E`` the strict-comparability indicator and ``W`` the beats
    indicator, tie-free triangles number ``tr(E^3)/6`` and directed 3-cycles
    ``tr(W^3)/3``.  Entries of the float32 products stay below 2**24, and the
    final traces are accumulated in int64.
    """
    size = margins.shape[0]
    if size >= 2**24:
        raise ResourceLimitError(f"{size} vertices is too many for exact float32 products")
    wins = (margins > 0).astype(np.float32)
    strict = (margins != 0).astype(np.float32)
    e2 = strict @ strict
    comparable = int(np.einsum("ij,ji->", e2.astype(np.int64), strict.astype(np.int64))) // 6
    del e2
    w2 = wins @ wins
    cyclic = int(np.einsum("ij,ji->", w2.astype(np.int64), wins.astype(np.int64))) // 3
    return comparable, cyclic


def triple_census(n: int, max_dice: int = DEFAULT_CENSUS_MAX_DICE) -> TripleCensus:
    """Exact counts over all unordered triples of distinct proper n-sided dice."""
    total_dice = count_proper(n)
    if total_dice > max_dice:
        raise ResourceLimitError(
            f"Pr({n}) = {total_dice} dice exceeds the census budget of {max_dice}"
        )
    total = comb(total_dice, 3)
    if total == 0:
        return TripleCensus(n, 0, 0, 0, 0)
    dice = list(iter_proper_faces(n))
    comparable, cyclic = triangle_counts(margin_matrix(dice, n))
    return TripleCensus(
        n=n,
        total=total,
        intransitive=cyclic,
        transitive=comparable - cyclic,
        with_ties=total - comparable,
    )


def triple_census_bruteforce(n: int) -> TripleCensus:
    """Reference census by classifying every triple with :func:`classify_triple`."""
    from itertools import combinations

    dice = list(iter_proper_faces(n))
    tally = {k: 0 for k in TripleClass}
    for a, b, c in combinations(dice, 3):
        tally[classify_triple(a, b, c)] += 1
    return TripleCensus(
        n=n,
        total=comb(len(dice), 3),
        intransitive=tally[TripleClass.INTRANSITIVE],
        transitive=tally[TripleClass.TRANSITIVE],
        with_ties=tally[TripleClass.HAS_TIE],
    )
