"""Seeded Monte Carlo experiments and their reports.

Trials are split into fixed-size blocks; block ``b`` of method ``m`` at side
count ``n`` draws from the stream ``(seed, m, n, b)``.  Results therefore do
not depend on how many workers run the blocks, and tallies merge by addition.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

from . import __version__
from .dice import compare_sorted
from .errors import InvalidArgument, ResourceLimitError
from .sampling import Method, Sampler, SamplerConfig, Weighting, draw_distinct, make_rng

SCHEMA_VERSION = 1
DEFAULT_MAX_DRAWS = 50_000_000

#: intransitive percentages reported for methods I and II
PUBLISHED_TABLE = {
    10: (15.7, 15.8),
    20: (21.3, 20.6),
    30: (22.0, 21.9),
    40: (22.9, 23.3),
    50: (23.7, 22.9),
}

TIE_HANDLING = ("count-as-neither", "exclude")


@dataclass(frozen=True)
class RunSpec:
    """Everything that determines a run; the report echoes it verbatim."""

    subcommand: str = "experiment"
    n_values: tuple[int, ...] = (10,)
    trials: int = 10_000
    k: int = 3
    methods: tuple[str, ...] = ("exact",)
    weighting: str = "multiset"
    mcmc_burn_in: Optional[int] = None
    mcmc_thinning: Optional[int] = None
    chains: int = 256
    seed: int = 0
    tie_handling: str = "count-as-neither"
    distinct: bool = True
    block_size: int = 10_000

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidArgument("trials must be positive")
        if self.block_size < 1:
            raise InvalidArgument("block size must be positive")
        if self.tie_handling not in TIE_HANDLING:
            raise InvalidArgument(f"tie handling must be one of {TIE_HANDLING}")
        if not self.n_values:
            raise InvalidArgument("no side counts given")
        for m in self.methods:
            Method(m)
        Weighting(self.weighting)

    def sampler(self, method: str, n: int) -> SamplerConfig:
        return SamplerConfig(
            n=n, method=Method(method), seed=self.seed, mcmc_burn_in=self.mcmc_burn_in,
            mcmc_thinning=self.mcmc_thinning, weighting=Weighting(self.weighting),
            chains=self.chains,
        )

    def as_dict(self) -> dict:
        d = asdict(self)
        d["n_values"] = list(self.n_values)
        d["methods"] = list(self.methods)
        return d


@dataclass
class Tally:
    trials: int = 0
    intransitive: int = 0
    transitive: int = 0
    tie_trials: int = 0
    redraws: int = 0

    def __add__(self, other: "Tally") -> "Tally":
        return Tally(*(a + b for a, b in zip(astuple(self), astuple(other))))


def astuple(t: Tally) -> tuple[int, ...]:
    return (t.trials, t.intransitive, t.transitive, t.tie_trials, t.redraws)


def _sign(a, b) -> int:
    c = compare_sorted(a, b)
    return (c.wins_a > c.wins_b) - (c.wins_a < c.wins_b)


def run_block(config: SamplerConfig, seed: int, stream: tuple[int, ...], trials: int,
              distinct: bool = True) -> Tally:
    """Classify ``trials`` random triples drawn from one derived stream."""
    sampler = Sampler(config, make_rng(seed, *stream))
    t = Tally(trials=trials)
    for _ in range(trials):
        (a, b, c), extra = draw_distinct(sampler, 3, distinct)
        t.redraws += extra
        r = (_sign(a, b), _sign(b, c), _sign(c, a))
        if 0 in r:
            t.tie_trials += 1
        elif r[0] == r[1] == r[2]:
            t.intransitive += 1
        else:
            t.transitive += 1
    return t


def _run_block_task(args):
    return run_block(*args)


@dataclass
class Row:
    n: int
    method: str
    tally: Tally
    tie_handling: str

    @property
    def denominator(self) -> int:
        if self.tie_handling == "exclude":
            return self.tally.trials - self.tally.tie_trials
        return self.tally.trials

    def fractions(self) -> tuple[float, float, float]:
        d = self.denominator
        if d == 0:
            return 0.0, 0.0, 0.0
        intrans = self.tally.intransitive / d
        trans = self.tally.transitive / d
        if self.tie_handling == "exclude":
            # reported alongside, outside the row's partition of the denominator
            return intrans, trans, self.tally.tie_trials / self.tally.trials
        return intrans, trans, self.tally.tie_trials / d

    def std_error(self) -> float:
        p = self.fractions()[0]
        d = self.denominator
        return math.sqrt(p * (1 - p) / d) if d else 0.0

    def as_dict(self) -> dict:
        intrans, trans, ties = self.fractions()
        return {
            "n": self.n,
            "method": self.method,
            "trials": self.tally.trials,
            "intransitive": self.tally.intransitive,
            "transitive": self.tally.transitive,
            "tie_trials": self.tally.tie_trials,
            "redraws": self.tally.redraws,
            "intransitive_fraction": intrans,
            "transitive_fraction": trans,
            "tie_trial_fraction": ties,
            "std_error": self.std_error(),
        }


@dataclass
class ExperimentReport:
    spec: RunSpec
    rows: list[Row]
    wall_clock: float = 0.0
    extra: dict = field(default_factory=dict)

    def row(self, n: int, method: str) -> Row:
        for r in self.rows:
            if r.n == n and r.method == method:
                return r
        raise KeyError((n, method))

    def as_dict(self, timing: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "library_version": __version__,
            "spec": self.spec.as_dict(),
            "rows": [r.as_dict() for r in self.rows],
        }
        out.update(self.extra)
        if timing:
            out["timing"] = {"wall_clock_seconds": self.wall_clock}
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.as_dict(timing), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        rows = [r.as_dict() for r in self.rows]
        buf = io.StringIO()
        header = "# " + json.dumps({"seed": self.spec.seed, "spec": self.spec.as_dict()}, sort_keys=True)
        buf.write(header + "\n")
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["n"], lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        return buf.getvalue()

    def published_table(self) -> str:
        """Plain-text table of intransitive percentages beside the published values."""
        methods = list(self.spec.methods)
        head = ["n"] + [f"%intrans {m}" for m in methods] + ["published I", "published II"]
        lines = ["  ".join(f"{h:>14}" for h in head)]
        for n in self.spec.n_values:
            cells = [str(n)]
            for m in methods:
                r = self.row(n, m)
                cells.append(f"{100 * r.fractions()[0]:.1f} ± {100 * r.std_error():.1f}")
            ref = PUBLISHED_TABLE.get(n)
            cells += [f"{ref[0]:.1f}", f"{ref[1]:.1f}"] if ref else ["-", "-"]
            lines.append("  ".join(f"{c:>14}" for c in cells))
        return "\n".join(lines) + "\n"


def _blocks(trials: int, block_size: int) -> list[int]:
    full, rest = divmod(trials, block_size)
    return [block_size] * full + ([rest] if rest else [])


def run_intransitive_table(spec: RunSpec, threads: int = 1,
                           max_draws: int = DEFAULT_MAX_DRAWS) -> ExperimentReport:
    """Estimate the intransitive-triple fraction for every ``(n, method)`` cell."""
    cells = [(n, m) for n in spec.n_values for m in spec.methods]
    if 3 * spec.trials * len(cells) > max_draws:
        raise ResourceLimitError(
            f"{3 * spec.trials * len(cells)} dice draws exceed the budget of {max_draws}"
        )
    tasks, owners = [], []
    for n, method in cells:
        config = spec.sampler(method, n)
        code = list(Method).index(Method(method))
        for b, size in enumerate(_blocks(spec.trials, spec.block_size)):
            tasks.append((config, spec.seed, (code, n, b), size, spec.distinct))
            owners.append((n, method))
    start = time.perf_counter()
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_block_task, tasks))
    else:
        results = [_run_block_task(t) for t in tasks]
    merged = {cell: Tally() for cell in cells}
    for owner, tally in zip(owners, results):
        merged[owner] = merged[owner] + tally
    rows = [Row(n, m, merged[(n, m)], spec.tie_handling) for n, m in cells]
    return ExperimentReport(spec, rows, wall_clock=time.perf_counter() - start)


def reproduction_spec(trials: int = 10_000, seed: int = 0,
                      n_values: Sequence[int] = tuple(PUBLISHED_TABLE)) -> RunSpec:
    """The configuration used to reproduce the published table.

    Dice are weighted by their number of face orderings, which is the law
    under which the published percentages are recovered (see README).
    """
    return RunSpec(
        subcommand="experiment", n_values=tuple(n_values), trials=trials,
        methods=("exact", "mcmc"), weighting="tuple", seed=seed, chains=1000,
    )


def with_trials(spec: RunSpec, trials: int) -> RunSpec:
    return replace(spec, trials=trials)
