"""Dice, proper dice and the beats/ties relation.

A die is stored as its nondecreasing face tuple, so two dice with the same
multiset of faces are equal.  ``A`` beats ``B`` when, over all ``n*n`` face
pairs, ``A`` shows the larger face strictly more often than ``B`` does.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidArgument

#: Largest side count accepted anywhere in the library.  Keeps every pair
#: tally (at most n**2) inside a signed 64-bit integer for the numpy paths.
MAX_SIDES = 10_000
_INT64_MAX = 2**63 - 1


def check_sides(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidArgument(f"side count must be an integer, got {n!r}")
    if n < 1:
        raise InvalidArgument(f"side count must be positive, got {n}")
    if n > MAX_SIDES or n * n > _INT64_MAX:
        raise InvalidArgument(f"side count {n} exceeds the configured limit {MAX_SIDES}")
    return n


@dataclass(frozen=True, order=True)
class Die:
    """An n-sided die; faces are sorted on construction."""

    faces: tuple[int, ...]

    def __post_init__(self):
        faces = tuple(sorted(int(f) for f in self.faces))
        if not faces:
            raise InvalidArgument("a die needs at least one face")
        if faces[0] < 1:
            raise InvalidArgument(f"faces must be positive: {faces}")
        object.__setattr__(self, "faces", faces)

    @property
    def n(self) -> int:
        return len(self.faces)

    def __len__(self) -> int:
        return len(self.faces)

    def __iter__(self):
        return iter(self.faces)

    def __str__(self) -> str:
        return format_die(self.faces)

    @classmethod
    def parse(cls, text: str) -> "Die":
        return cls(parse_faces(text))

    def is_proper(self) -> bool:
        return validate_proper(self)


class ProperDie(Die):
    """A die whose faces lie in ``[1, n]`` and sum to ``n(n+1)/2``."""

    def __post_init__(self):
        super().__post_init__()
        if not validate_proper(self.faces):
            raise InvalidArgument(f"{format_die(self.faces)} is not a proper die")


DieLike = Union[Die, Sequence[int]]


def _faces(d: DieLike) -> tuple[int, ...]:
    return d.faces if isinstance(d, Die) else tuple(d)


def format_die(faces: Iterable[int]) -> str:
    return "(" + ",".join(str(f) for f in faces) + ")"


def parse_faces(text: str) -> tuple[int, ...]:
    """Parse the canonical ``(1,1,4,4)`` form; parentheses and spaces are optional."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    try:
        return tuple(int(tok) for tok in body.split(",") if tok.strip())
    except ValueError as exc:
        raise InvalidArgument(f"cannot parse die {text!r}") from exc


def standard_die(n: int) -> ProperDie:
    """The die ``(1, 2, ..., n)``."""
    check_sides(n)
    return ProperDie(tuple(range(1, n + 1)))


def validate_proper(d: DieLike) -> bool:
    faces = _faces(d)
    n = len(faces)
    if n == 0:
        return False
    if any(not 1 <= f <= n for f in faces):
        return False
    return sum(faces) == n * (n + 1) // 2


@dataclass(frozen=True)
class Comparison:
    """Face-pair tallies of one die against another."""

    wins_a: int
    wins_b: int
    ties: int

    @property
    def total(self) -> int:
        return self.wins_a + self.wins_b + self.ties

    def mirrored(self) -> "Comparison":
        return Comparison(self.wins_b, self.wins_a, self.ties)


class Relation(enum.Enum):
    A_WINS = "AWins"
    B_WINS = "BWins"
    TIE = "Tie"

    def mirror(self) -> "Relation":
        if self is Relation.A_WINS:
            return Relation.B_WINS
        if self is Relation.B_WINS:
            return Relation.A_WINS
        return Relation.TIE

    @classmethod
    def from_comparison(cls, c: Comparison) -> "Relation":
        if c.wins_a > c.wins_b:
            return cls.A_WINS
        if c.wins_b > c.wins_a:
            return cls.B_WINS
        return cls.TIE


def _pair(a: DieLike, b: DieLike) -> tuple[tuple[int, ...], tuple[int, ...]]:
    fa, fb = _faces(a), _faces(b)
    if len(fa) != len(fb):
        raise InvalidArgument(f"dice have different side counts: {len(fa)} vs {len(fb)}")
    return fa, fb


def compare_naive(a: DieLike, b: DieLike) -> Comparison:
    """Tabulate all n*n face pairs directly."""
    fa, fb = _pair(a, b)
    wins_a = wins_b = ties = 0
    for x in fa:
        for y in fb:
            if x > y:
                wins_a += 1
            elif y > x:
                wins_b += 1
            else:
                ties += 1
    return Comparison(wins_a, wins_b, ties)


def compare_sorted(fa: Sequence[int], fb: Sequence[int]) -> Comparison:
    """Linear merge over two sorted face sequences of equal length."""
    n = len(fa)
    lo = hi = 0
    wins_a = ties = 0
    for x in fa:
        while lo < n and fb[lo] < x:
            lo += 1
        if hi < lo:
            hi = lo
        while hi < n and fb[hi] <= x:
            hi += 1
        wins_a += lo
        ties += hi - lo
    return Comparison(wins_a, n * n - wins_a - ties, ties)


def compare(a: DieLike, b: DieLike) -> Comparison:
    """Count the face pairs won by ``a``, won by ``b``, and tied.

    Plain sequences are sorted first; :class:`Die` objects already are.

    >>> compare((1, 2, 4, 4, 4, 6), (2, 2, 3, 3, 5, 6))
    Comparison(wins_a=17, wins_b=16, ties=3)
    """
    fa, fb = _pair(a, b)
    if not isinstance(a, Die):
        fa = tuple(sorted(fa))
    if not isinstance(b, Die):
        fb = tuple(sorted(fb))
    return compare_sorted(fa, fb)


def relation(a: DieLike, b: DieLike) -> Relation:
    return Relation.from_comparison(compare(a, b))


def beats(a: DieLike, b: DieLike) -> bool:
    return relation(a, b) is Relation.A_WINS


def face_histograms(dice: Sequence[DieLike], n: int):
    """Rows of face-value counts, shape ``(len(dice), n)``; column ``v-1`` counts face ``v``."""
    hist = np.zeros((len(dice), n), dtype=np.float64)
    for row, d in enumerate(dice):
        faces = _faces(d)
        if len(faces) != n:
            raise InvalidArgument(f"expected {n}-sided dice, got {len(faces)} faces")
        for f in faces:
            if not 1 <= f <= n:
                raise InvalidArgument(f"face {f} outside [1, {n}]")
            hist[row, f - 1] += 1
    return hist


def margin_matrix(dice: Sequence[DieLike], n: int):
    """Matrix ``M[i, j] = wins_a - wins_b`` for ``compare(dice[i], dice[j])``.

    Computed as ``H @ sign(u - v) @ H.T`` over face histograms; every entry is
    bounded by ``n**2`` so float64 products are exact before the cast back.
    """
    check_sides(n)
    hist = face_histograms(dice, n)
    idx = np.arange(n)
    sign = np.sign(idx[:, None] - idx[None, :]).astype(np.float64)
    return np.rint(hist @ sign @ hist.T).astype(np.int64)
