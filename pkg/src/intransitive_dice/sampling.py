"""Random proper dice: an exact DP sampler and a swap-chain MCMC sampler.

Both samplers support two target laws:

``multiset``
    every distinct proper die (as a multiset of faces) is equally likely.
``tuple``
    every ordered face sequence with faces in ``[1, n]`` and the proper sum
    is equally likely, so a die is weighted by its number of orderings.  This
    is the law an unweighted swap chain settles into.

All randomness flows through :class:`numpy.random.Generator` backed by the
counter-based Philox bit generator, seeded from ``(seed, *stream_ids)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterator, Optional

import numba
import numpy as np

from .dice import ProperDie, check_sides
from .enumeration import count_table
from .errors import InvalidArgument, ResourceLimitError


class Method(enum.Enum):
    EXACT = "exact"
    MCMC = "mcmc"


class Weighting(enum.Enum):
    MULTISET = "multiset"
    TUPLE = "tuple"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for ``(seed, *stream)``; identical on every platform."""
    if seed < 0 or any(s < 0 for s in stream):
        raise InvalidArgument("seeds and stream ids must be nonnegative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in ``[0, bound)`` for arbitrarily large ``bound``."""
    if bound <= 0:
        raise InvalidArgument("bound must be positive")
    if bound == 1:
        return 0
    bits = (bound - 1).bit_length()
    nbytes = (bits + 7) // 8
    excess = nbytes * 8 - bits
    while True:
        r = int.from_bytes(rng.bytes(nbytes), "little") >> excess
        if r < bound:
            return r


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    method: Method = Method.EXACT
    seed: int = 0
    mcmc_burn_in: Optional[int] = None
    mcmc_thinning: Optional[int] = None
    weighting: Weighting = Weighting.MULTISET
    chains: int = 256

    def __post_init__(self):
        check_sides(self.n)
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "weighting", Weighting(self.weighting))
        if self.mcmc_burn_in is None:
            object.__setattr__(self, "mcmc_burn_in", 50 * self.n * self.n)
        if self.mcmc_thinning is None:
            object.__setattr__(self, "mcmc_thinning", self.n * self.n)
        if self.mcmc_burn_in < 0:
            raise InvalidArgument("mcmc_burn_in must be >= 0")
        if self.mcmc_thinning < 1:
            raise InvalidArgument("mcmc_thinning must be >= 1")
        if self.chains < 1:
            raise InvalidArgument("chains must be >= 1")

    def with_n(self, n: int) -> "SamplerConfig":
        return replace(self, n=n, mcmc_burn_in=None, mcmc_thinning=None)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "method": self.method.value,
            "seed": self.seed,
            "mcmc_burn_in": self.mcmc_burn_in,
            "mcmc_thinning": self.mcmc_thinning,
            "weighting": self.weighting.value,
            "chains": self.chains,
        }


# -- exact sampling -----------------------------------------------------------


class SequenceCountTable:
    """``count(p, s)``: ordered sequences of ``p`` faces in ``[1, n]`` summing to ``s``."""

    def __init__(self, n: int):
        self.n = check_sides(n)
        self.target = n * (n + 1) // 2
        rows = [[1]]
        for p in range(1, n + 1):
            prev = rows[-1]
            prefix = [0]
            for x in prev:
                prefix.append(prefix[-1] + x)
            row = []
            for s in range(p * n + 1):
                # sum of prev[s-v] for v in 1..n
                hi = min(s - 1, len(prev) - 1)
                lo = max(s - n, 0)
                row.append(prefix[hi + 1] - prefix[lo] if hi >= lo else 0)
            rows.append(row)
        self._rows = rows

    def count(self, p: int, s: int) -> int:
        row = self._rows[p]
        return row[s] if 0 <= s < len(row) else 0

    @property
    def total(self) -> int:
        return self.count(self.n, self.target)

    def unrank(self, r: int) -> tuple[int, ...]:
        faces = []
        s = self.target
        for p in range(self.n, 0, -1):
            for v in range(1, self.n + 1):
                c = self.count(p - 1, s - v)
                if r < c:
                    break
                r -= c
            faces.append(v)
            s -= v
        return tuple(sorted(faces))


_SEQ_TABLES: dict[int, SequenceCountTable] = {}


def sequence_table(n: int) -> SequenceCountTable:
    table = _SEQ_TABLES.get(n)
    if table is None:
        table = _SEQ_TABLES[n] = SequenceCountTable(n)
    return table


def sample_exact_faces(
    n: int, rng: np.random.Generator, weighting: Weighting = Weighting.MULTISET
) -> tuple[int, ...]:
    if Weighting(weighting) is Weighting.MULTISET:
        table = count_table(n)
    else:
        table = sequence_table(n)
    return table.unrank(randbelow(rng, table.total))


def sample_exact(
    n: int, rng: np.random.Generator, weighting: Weighting = Weighting.MULTISET
) -> ProperDie:
    """Draw one proper die exactly from the requested law.

    Under multiset weighting a single uniform rank in ``[0, Pr(n))`` is
    unranked through :class:`~intransitive_dice.enumeration.CountTable`,
    choosing faces largest first with probability proportional to the number
    of completions.
    """
    return ProperDie(sample_exact_faces(n, rng, weighting))


# -- swap-chain MCMC ----------------------------------------------------------

#: random numbers for the chains are drawn in blocks of this many steps
STEP_BLOCK = 512
_NO_ACCEPT = np.zeros((0, 0))


@numba.njit(cache=True)
def _swap_kernel(faces, counts, pick_up, pick_down, accept, multiset):
    chains, n = faces.shape
    accepted = 0
    for c in range(chains):
        for t in range(pick_up.shape[1]):
            i = pick_up[c, t]
            j = pick_down[c, t]
            if j >= i:
                j += 1
            u = faces[c, i]
            w = faces[c, j]
            if u >= n or w <= 1:
                continue
            if multiset:
                cu1 = counts[c, u + 1]
                cu = counts[c, u]
                cw = counts[c, w]
                cwm = counts[c, w - 1]
                if w == u:
                    cw -= 1
                elif w == u + 1:
                    cw += 1
                if w - 1 == u:
                    cwm -= 1
                elif w - 1 == u + 1:
                    cwm += 1
                # orderings(old) / orderings(new)
                if accept[c, t] * cu * cw >= (cu1 + 1) * (cwm + 1):
                    continue
            faces[c, i] = u + 1
            faces[c, j] = w - 1
            counts[c, u] -= 1
            counts[c, u + 1] += 1
            counts[c, w] -= 1
            counts[c, w - 1] += 1
            accepted += 1
    return accepted



class SwapChains:
    """A batch of independent sum-preserving swap chains advanced in lockstep.

    Each step picks an ordered pair of distinct positions, proposes raising
    the first face by one and lowering the second by one, and rejects moves
    that leave ``[1, n]``.  The proposal is symmetric on face sequences, so
    without correction the chain targets tuple weighting.  For multiset
    weighting a Metropolis factor ``orderings(old) / orderings(new)`` is
    applied, computed from face multiplicities.
    """

    def __init__(self, n: int, chains: int, rng: np.random.Generator,
                 weighting: Weighting = Weighting.MULTISET):
        self.n = check_sides(n)
        self.size = chains
        self.rng = rng
        self.weighting = Weighting(weighting)
        self.faces = np.tile(np.arange(1, n + 1, dtype=np.int64), (chains, 1))
        # counts[:, v] = multiplicity of face v; padded so v-1 and v+1 index safely
        self.counts = np.zeros((chains, n + 2), dtype=np.int64)
        self.counts[:, 1 : n + 1] = 1
        self._rows = np.arange(chains)
        self.proposed = 0
        self.accepted = 0

    def step(self, steps: int = 1) -> None:
        if self.n == 1:
            return
        multiset = self.weighting is Weighting.MULTISET
        while steps > 0:
            block = min(steps, STEP_BLOCK)
            i = self.rng.integers(0, self.n, size=(self.size, block))
            j = self.rng.integers(0, self.n - 1, size=(self.size, block))
            accept = self.rng.random((self.size, block)) if multiset else _NO_ACCEPT
            self.accepted += _swap_kernel(self.faces, self.counts, i, j, accept, multiset)
            self.proposed += self.size * block
            steps -= block

    def states(self) -> np.ndarray:
        return np.sort(self.faces, axis=1)


def sample_mcmc(n: int, config: SamplerConfig, rng: np.random.Generator) -> ProperDie:
    """One die: the state of a fresh chain after ``burn_in + thinning`` steps."""
    if config.method is not Method.MCMC:
        raise InvalidArgument("sample_mcmc needs a config with method=mcmc")
    chain = SwapChains(n, 1, rng, config.weighting)
    chain.step(config.mcmc_burn_in + config.mcmc_thinning)
    return ProperDie(tuple(int(x) for x in chain.states()[0]))


def mcmc_faces(config: SamplerConfig, rng: np.random.Generator, count: int) -> Iterator[tuple[int, ...]]:
    """``count`` draws from ``config.chains`` parallel chains.

    After burn-in every chain contributes one draw per thinning interval;
    draws are emitted round by round in chain order.
    """
    if count <= 0:
        return
    width = min(config.chains, count)
    chain = SwapChains(config.n, width, rng, config.weighting)
    chain.step(config.mcmc_burn_in)
    emitted = 0
    while emitted < count:
        chain.step(config.mcmc_thinning)
        for row in chain.states()[: count - emitted]:
            yield tuple(int(x) for x in row)
            emitted += 1


class Sampler:
    """Stream of dice for one configuration and one random stream.

    The MCMC variant keeps its chains alive between calls: burn-in happens
    once, then every refill advances all chains by one thinning interval.
    """

    def __init__(self, config: SamplerConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self._buffer: list[tuple[int, ...]] = []
        self._chains: Optional[SwapChains] = None

    def _refill(self) -> None:
        cfg = self.config
        if cfg.method is Method.EXACT:
            batch = [sample_exact_faces(cfg.n, self.rng, cfg.weighting) for _ in range(64)]
        else:
            if self._chains is None:
                self._chains = SwapChains(cfg.n, cfg.chains, self.rng, cfg.weighting)
                self._chains.step(cfg.mcmc_burn_in)
            self._chains.step(cfg.mcmc_thinning)
            batch = [tuple(int(x) for x in row) for row in self._chains.states()]
        batch.reverse()
        self._buffer = batch

    def draw(self) -> tuple[int, ...]:
        if not self._buffer:
            self._refill()
        return self._buffer.pop()

    def faces(self, count: int) -> list[tuple[int, ...]]:
        return [self.draw() for _ in range(count)]


MAX_TRIPLE_REDRAWS = 10_000


def sample_triple(n: int, config: SamplerConfig, rng: np.random.Generator,
                  distinct: bool = True) -> tuple[ProperDie, ProperDie, ProperDie]:
    """Three independent draws, redrawn as a whole until pairwise distinct."""
    if config.n != n:
        config = config.with_n(n)
    sampler = Sampler(config, rng)
    faces, _ = draw_distinct(sampler, 3, distinct)
    return tuple(ProperDie(f) for f in faces)


def draw_distinct(sampler: Sampler, k: int, distinct: bool = True) -> tuple[list, int]:
    """Draw ``k`` dice; returns ``(faces, redraws)``."""
    from .enumeration import count_proper

    n = sampler.config.n
    if distinct and k > 1 and n <= 12 and count_proper(n) < k:
        raise InvalidArgument(f"only {count_proper(n)} proper {n}-sided dice exist; cannot draw {k} distinct")
    redraws = 0
    while True:
        group = [sampler.draw() for _ in range(k)]
        if not distinct or len(set(group)) == k:
            return group, redraws
        redraws += 1
        if redraws >= MAX_TRIPLE_REDRAWS:
            raise ResourceLimitError(f"no distinct {k}-set after {redraws} redraws at n={n}")
