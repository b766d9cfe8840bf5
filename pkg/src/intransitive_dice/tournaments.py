"""Outcome tournaments of k dice, their isomorphism classes, and equidistribution runs."""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .dice import DieLike, compare_sorted, _faces
from .errors import InvalidArgument, ResourceLimitError
from .sampling import Sampler, SamplerConfig, draw_distinct, make_rng

MAX_CENSUS_K = 6
DEFAULT_MAX_DRAWS = 10_000_000


def edge_pairs(k: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(k), 2))


@dataclass(frozen=True)
class Tournament:
    """Orientation of the complete graph on ``k`` vertices, ties allowed.

    ``edges[e]`` belongs to the ``e``-th pair ``(i, j)``, ``i < j``, in
    lexicographic order: ``+1`` for ``i -> j`` (i beats j), ``-1`` for
    ``j -> i`` and ``0`` for a tie.
    """

    k: int
    edges: tuple[int, ...]

    def __post_init__(self):
        if self.k < 2:
            raise InvalidArgument("a tournament needs k >= 2")
        if len(self.edges) != self.k * (self.k - 1) // 2:
            raise InvalidArgument("wrong number of edge slots")
        if any(e not in (-1, 0, 1) for e in self.edges):
            raise InvalidArgument("edge states must be -1, 0 or +1")

    def edge(self, i: int, j: int) -> int:
        """State seen from ``i``: +1 if i beats j, -1 if j beats i, 0 for a tie."""
        if i == j:
            raise InvalidArgument("no self edges")
        lo, hi = min(i, j), max(i, j)
        e = _pair_index(self.k)[lo, hi]
        return self.edges[e] if i < j else -self.edges[e]

    @property
    def has_ties(self) -> bool:
        return 0 in self.edges

    def out_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.k
        for (i, j), e in zip(edge_pairs(self.k), self.edges):
            if e > 0:
                deg[i] += 1
            elif e < 0:
                deg[j] += 1
        return tuple(deg)

    def score_sequence(self) -> tuple[int, ...]:
        return tuple(sorted(self.out_degrees(), reverse=True))

    def code(self) -> int:
        """Bit string of a tie-free orientation; first pair is the most significant bit."""
        if self.has_ties:
            raise InvalidArgument("tie edges have no orientation code")
        m = len(self.edges)
        return sum(1 << (m - 1 - e) for e, s in enumerate(self.edges) if s > 0)

    @classmethod
    def from_code(cls, k: int, code: int) -> "Tournament":
        m = k * (k - 1) // 2
        return cls(k, tuple(1 if (code >> (m - 1 - e)) & 1 else -1 for e in range(m)))

    def relabel(self, perm: Sequence[int]) -> "Tournament":
        """Vertex ``v`` becomes ``perm[v]``."""
        edges = [0] * len(self.edges)
        index = _pair_index(self.k)
        for (i, j), s in zip(edge_pairs(self.k), self.edges):
            a, b = perm[i], perm[j]
            if a < b:
                edges[index[a, b]] = s
            else:
                edges[index[b, a]] = -s
        return Tournament(self.k, tuple(edges))


@lru_cache(maxsize=None)
def _pair_index(k: int) -> dict:
    return {pair: e for e, pair in enumerate(edge_pairs(k))}


def outcome_graph(dice: Sequence[DieLike]) -> Tournament:
    k = len(dice)
    if k < 2:
        raise InvalidArgument("need at least two dice")
    faces = [tuple(sorted(_faces(d))) for d in dice]
    if len({len(f) for f in faces}) != 1:
        raise InvalidArgument("all dice must have the same number of sides")
    edges = []
    for i, j in edge_pairs(k):
        c = compare_sorted(faces[i], faces[j])
        edges.append((c.wins_a > c.wins_b) - (c.wins_a < c.wins_b))
    return Tournament(k, tuple(edges))


class Config3(enum.Enum):
    INTRANSITIVE = "Intransitive"
    TRANSITIVE = "Transitive"


class Config4(enum.Enum):
    SCORE3210 = (3, 2, 1, 0)
    SCORE3111 = (3, 1, 1, 1)
    SCORE2220 = (2, 2, 2, 0)
    SCORE2211 = (2, 2, 1, 1)

    @property
    def label(self) -> str:
        return "Score" + "".join(str(x) for x in self.value)


def _tie_free(t: Tournament, k: int) -> None:
    if t.k != k:
        raise InvalidArgument(f"expected a {k}-vertex tournament, got k={t.k}")
    if t.has_ties:
        raise InvalidArgument("tournament has a tie edge")


def classify3(t: Tournament) -> Config3:
    _tie_free(t, 3)
    return Config3.INTRANSITIVE if t.out_degrees() == (1, 1, 1) else Config3.TRANSITIVE


def classify4(t: Tournament) -> Config4:
    _tie_free(t, 4)
    return Config4(t.score_sequence())


def all_orientations(k: int) -> list[Tournament]:
    m = k * (k - 1) // 2
    return [Tournament.from_code(k, c) for c in range(2**m)]


def _check_census_k(k: int) -> None:
    if k < 2:
        raise InvalidArgument("k must be at least 2")
    if k > MAX_CENSUS_K:
        raise ResourceLimitError(f"orientation census is limited to k <= {MAX_CENSUS_K}")


@lru_cache(maxsize=None)
def canonical_codes(k: int) -> np.ndarray:
    """Canonical code of every tie-free orientation code ``0 .. 2**C(k,2) - 1``.

    The canonical form is the smallest code over all ``k!`` vertex relabelings.
    """
    _check_census_k(k)
    pairs = edge_pairs(k)
    m = len(pairs)
    codes = np.arange(2**m, dtype=np.int64)
    weights = 1 << (m - 1 - np.arange(m, dtype=np.int64))
    bits = ((codes[:, None] & weights[None, :]) != 0).astype(np.int64)
    index = _pair_index(k)
    best = codes.copy()
    for perm in itertools.permutations(range(k)):
        target = np.empty(m, dtype=np.int64)
        flip = np.empty(m, dtype=np.int64)
        for e, (i, j) in enumerate(pairs):
            a, b = perm[i], perm[j]
            target[e] = index[(min(a, b), max(a, b))]
            flip[e] = a > b
        relabeled = (bits ^ flip[None, :]) @ weights[target]
        np.minimum(best, relabeled, out=best)
    best.setflags(write=False)
    return best


def canonical_form(t: Tournament) -> int:
    _check_census_k(t.k)
    return int(canonical_codes(t.k)[t.code()])


@dataclass(frozen=True)
class OrientationClass:
    canonical: int
    score_sequence: tuple[int, ...]
    count: int


def orientation_census(k: int) -> list[OrientationClass]:
    """Isomorphism classes of tie-free k-tournaments with their labeled counts."""
    canon = canonical_codes(k)
    counts = Counter(canon.tolist())
    return [
        OrientationClass(c, Tournament.from_code(k, c).score_sequence(), n)
        for c, n in sorted(counts.items())
    ]


@dataclass
class EquidistributionReport:
    n: int
    k: int
    trials: int
    tie_trials: int
    redraws: int
    orientation_counts: list[int]
    chi_square: float
    p_value: float
    class_counts: dict

    @property
    def tie_free(self) -> int:
        return self.trials - self.tie_trials

    @property
    def tie_rate(self) -> float:
        return self.tie_trials / self.trials if self.trials else 0.0

    def class_frequency(self, score: tuple[int, ...]) -> float:
        hits = sum(v for key, v in self.class_counts.items() if key[1] == tuple(score))
        return hits / self.tie_free if self.tie_free else 0.0

    def intransitive_fraction(self, among_tie_free: bool = True) -> float:
        """Share of 3-cycles; ``among_tie_free=False`` keeps tie trials in the denominator."""
        if self.k != 3:
            raise InvalidArgument("intransitive fraction is defined for k=3")
        cyc = sum(v for key, v in self.class_counts.items() if key[1] == (1, 1, 1))
        denom = self.tie_free if among_tie_free else self.trials
        return cyc / denom if denom else 0.0

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "trials": self.trials,
            "tie_trials": self.tie_trials,
            "tie_rate": self.tie_rate,
            "redraws": self.redraws,
            "orientation_counts": self.orientation_counts,
            "chi_square": self.chi_square,
            "p_value": self.p_value,
            "classes": [
                {"canonical": c, "score_sequence": list(s), "labeled_orientations": lab,
                 "count": v, "frequency": v / self.tie_free if self.tie_free else 0.0,
                 "expected_frequency": lab / 2 ** (self.k * (self.k - 1) // 2)}
                for (c, s, lab), v in sorted(self.class_counts.items())
            ],
        }


def equidistribution_experiment(
    n: int,
    k: int,
    trials: int,
    sampler: Optional[SamplerConfig] = None,
    seed: int = 0,
    distinct: bool = True,
    max_draws: int = DEFAULT_MAX_DRAWS,
    rng: Optional[np.random.Generator] = None,
) -> EquidistributionReport:
    """Tally the outcome tournaments of ``trials`` random k-sets of n-sided dice."""
    _check_census_k(k)
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    if k * trials > max_draws:
        raise ResourceLimitError(f"{k}*{trials} dice draws exceed the budget of {max_draws}")
    config = sampler.with_n(n) if sampler is not None and sampler.n != n else sampler
    if config is None:
        config = SamplerConfig(n, seed=seed)
    rng = make_rng(seed, 3, k, n) if rng is None else rng
    draws = Sampler(config, rng)
    m = k * (k - 1) // 2
    tallies = np.zeros(2**m, dtype=np.int64)
    tie_trials = redraws = 0
    for _ in range(trials):
        group, extra = draw_distinct(draws, k, distinct)
        redraws += extra
        t = outcome_graph(group)
        if t.has_ties:
            tie_trials += 1
        else:
            tallies[t.code()] += 1
    return summarize_orientations(n, k, trials, tie_trials, redraws, tallies)


def summarize_orientations(n, k, trials, tie_trials, redraws, tallies) -> EquidistributionReport:
    tallies = np.asarray(tallies, dtype=np.int64)
    tie_free = int(tallies.sum())
    if tie_free:
        chi = stats.chisquare(tallies)
        chi_square, p_value = float(chi.statistic), float(chi.pvalue)
    else:
        chi_square, p_value = 0.0, 1.0
    canon = canonical_codes(k)
    labeled = Counter(canon.tolist())
    classes: Counter = Counter()
    for code, count in enumerate(tallies.tolist()):
        c = int(canon[code])
        key = (c, Tournament.from_code(k, c).score_sequence(), labeled[c])
        classes[key] += count
    return EquidistributionReport(
        n=n, k=k, trials=trials, tie_trials=tie_trials, redraws=redraws,
        orientation_counts=tallies.tolist(), chi_square=chi_square, p_value=p_value,
        class_counts=dict(classes),
    )
