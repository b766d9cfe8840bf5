"""One-step dice ``s(a, b)`` and the parametric classification of their triples.

``s(a, b)`` is the standard die with face ``a`` raised by one and face ``b``
lowered by one.  A pair of one-step dice where one strictly beats the other
always fits one of four index patterns ("beat forms"); the 64 parametric
cases in ``data/onestep_cases.json`` enumerate every mutually comparable
triple up to ``O(n^2)`` boundary effects.  Everything here is checked by
brute force against the pairwise relation matrix.
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from .dice import ProperDie, check_sides, margin_matrix
from .enumeration import triangle_counts
from .errors import ContractError, InvalidArgument, InvalidOneStep, ResourceLimitError

DEFAULT_CENSUS_MAX_N = 60
DEFAULT_COVERAGE_MAX_N = 16


@dataclass(frozen=True, order=True)
class OneStep:
    n: int
    up: int
    down: int

    def __post_init__(self):
        n, a, b = self.n, self.up, self.down
        if n < 3:
            raise InvalidOneStep(n, a, b, "one-step dice need n >= 3")
        if not 1 <= a <= n - 1:
            raise InvalidOneStep(n, a, b, "raised face must be in [1, n-1]")
        if not 1 <= b <= n:
            raise InvalidOneStep(n, a, b, "lowered face must be in [1, n]")
        if b == 1:
            raise InvalidOneStep(n, a, b, "face 1 cannot be lowered")
        if b == a:
            raise InvalidOneStep(n, a, b, "the raised face cannot be lowered")
        if b == a + 1:
            raise InvalidOneStep(n, a, b, "lowering the face after the raised one gives the standard die")

    @property
    def faces(self) -> tuple[int, ...]:
        faces = list(range(1, self.n + 1))
        faces[self.up - 1] += 1
        faces[self.down - 1] -= 1
        return tuple(sorted(faces))

    def realize(self) -> ProperDie:
        return ProperDie(self.faces)

    def __str__(self) -> str:
        return f"s({self.up},{self.down})"


def is_valid_onestep(n: int, a: int, b: int) -> bool:
    return n >= 3 and 1 <= a <= n - 1 and 1 <= b <= n and b not in (1, a, a + 1)


def make_onestep(n: int, a: int, b: int) -> tuple[OneStep, ProperDie]:
    """Build ``s(a, b)`` for n-sided dice.

    >>> make_onestep(10, 8, 5)[1].faces
    (1, 2, 3, 4, 4, 6, 7, 9, 9, 10)
    """
    s = OneStep(n, a, b)
    return s, s.realize()


def enumerate_onestep(n: int) -> list[OneStep]:
    """All ``(n-2)**2`` one-step dice ordered by ``(up, down)``."""
    check_sides(n)
    if n < 3:
        raise InvalidArgument(f"no one-step dice exist for n={n}")
    return [OneStep(n, a, b) for a in range(1, n) for b in range(2, n + 1) if b not in (a, a + 1)]


class BeatForm(enum.IntEnum):
    """Index patterns certifying that ``winner`` beats ``loser``."""

    FORM1 = 1  # s(x,y) > s(y,z)
    FORM2 = 2  # s(x,y) > s(z,x+2)
    FORM3 = 3  # s(x+1,y) > s(x,z)
    FORM4 = 4  # s(x,y+1) > s(z,y)


def match_forms(wa, wb, la, lb):
    """Form predicates on winner ``s(wa, wb)`` and loser ``s(la, lb)``; works on arrays."""
    return {
        BeatForm.FORM1: la == wb,
        BeatForm.FORM2: lb == wa + 2,
        BeatForm.FORM3: wa == la + 1,
        BeatForm.FORM4: wb == lb + 1,
    }


@lru_cache(maxsize=8)
def _universe(n: int) -> tuple[tuple[OneStep, ...], np.ndarray, np.ndarray]:
    """One-step dice, their margin matrix, and an ``(a, b) -> row`` lookup (-1 if invalid)."""
    dice = tuple(enumerate_onestep(n))
    margins = margin_matrix([d.faces for d in dice], n)
    margins.setflags(write=False)
    lookup = np.full((n + 6, n + 6), -1, dtype=np.int64)
    for row, d in enumerate(dice):
        lookup[d.up, d.down] = row
    lookup.setflags(write=False)
    return dice, margins, lookup


def classify_beat(w: OneStep, l: OneStep) -> set[BeatForm]:
    """Beat forms matched by a pair in which ``w`` strictly beats ``l``."""
    if w.n != l.n:
        raise InvalidArgument("one-step dice have different side counts")
    from .dice import compare

    c = compare(w.faces, l.faces)
    if c.wins_a <= c.wins_b:
        raise ContractError(f"{w} does not beat {l} (n={w.n})")
    return {form for form, hit in match_forms(w.up, w.down, l.up, l.down).items() if hit}


@dataclass
class Lemma1Report:
    n: int
    pairs_checked: int
    strict_pairs: int
    violations: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "pairs_checked": self.pairs_checked,
            "strict_pairs": self.strict_pairs,
            "violations": [[str(w), str(l)] for w, l in self.violations],
        }


def verify_lemma1(n: int) -> Lemma1Report:
    """Check every strict win among ordered pairs of distinct one-step dice."""
    dice, margins, _ = _universe(n)
    up = np.array([d.up for d in dice])
    down = np.array([d.down for d in dice])
    wa, wb = up[:, None], down[:, None]
    la, lb = up[None, :], down[None, :]
    covered = np.zeros(margins.shape, dtype=bool)
    for hit in match_forms(wa, wb, la, lb).values():
        covered |= hit
    wins = margins > 0
    bad = np.argwhere(wins & ~covered)
    size = len(dice)
    return Lemma1Report(
        n=n,
        pairs_checked=size * (size - 1),
        strict_pairs=int(wins.sum()),
        violations=[(dice[i], dice[j]) for i, j in bad],
    )


# -- parametric cases ---------------------------------------------------------

_TERM = re.compile(r"^(?:(\d)\+)?([XYZ])$")


@dataclass(frozen=True)
class Term:
    var: str
    offset: int

    def __call__(self, values):
        return values[self.var] + self.offset

    def __str__(self) -> str:
        return f"{self.offset}+{self.var}" if self.offset else self.var


def _parse_term(text: str) -> Term:
    m = _TERM.match(text.strip())
    if not m:
        raise InvalidArgument(f"bad case term {text!r}")
    return Term(m.group(2), int(m.group(1) or 0))


@dataclass(frozen=True)
class Descriptor:
    up: Term
    down: Term

    @classmethod
    def parse(cls, text: str) -> "Descriptor":
        m = re.fullmatch(r"s\(([^,]+),([^)]+)\)", text.replace(" ", ""))
        if not m:
            raise InvalidArgument(f"bad one-step descriptor {text!r}")
        return cls(_parse_term(m.group(1)), _parse_term(m.group(2)))

    def __str__(self) -> str:
        return f"s({self.up},{self.down})"


class Kind(enum.Enum):
    TRANSITIVE = "Transitive"
    INTRANSITIVE = "Intransitive"


_LETTERS = "ABC"


@dataclass(frozen=True)
class ParametricCase:
    index: int
    dice: tuple[Descriptor, Descriptor, Descriptor]
    kind: Kind
    reasons: tuple[BeatForm, BeatForm, BeatForm]
    order: str
    weight: Fraction

    def beats_pairs(self) -> list[tuple[int, int]]:
        """Declared ``(winner, loser)`` positions implied by kind and order word."""
        p = [_LETTERS.index(ch) for ch in self.order]
        if self.kind is Kind.TRANSITIVE:
            return [(p[0], p[1]), (p[1], p[2]), (p[0], p[2])]
        return [(p[0], p[1]), (p[1], p[2]), (p[2], p[0])]

    def declared(self) -> dict[tuple[int, int], tuple[int, BeatForm]]:
        """For the compared pairs A-B, B-C, C-A: the declared winner and reason."""
        winners = {frozenset(pair): pair[0] for pair in self.beats_pairs()}
        out = {}
        for reason, pair in zip(self.reasons, ((0, 1), (1, 2), (2, 0))):
            out[pair] = (winners[frozenset(pair)], reason)
        return out

    def __str__(self) -> str:
        return f"{self.index}: " + " ".join(str(d) for d in self.dice)


def _case_body(raw_cases: list) -> str:
    return json.dumps(raw_cases, sort_keys=True, separators=(",", ":"))


def load_case_table(path: Optional[str] = None, verify_checksum: bool = True) -> list[ParametricCase]:
    if path is None:
        text = resources.files(__package__).joinpath("data/onestep_cases.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    doc = json.loads(text)
    raw = doc["cases"]
    if verify_checksum:
        digest = hashlib.sha256(_case_body(raw).encode()).hexdigest()
        if digest != doc.get("sha256"):
            raise InvalidArgument(f"case table checksum mismatch: {digest} != {doc.get('sha256')}")
    return [
        ParametricCase(
            index=rec["index"],
            dice=tuple(Descriptor.parse(d) for d in rec["dice"]),
            kind=Kind(rec["kind"]),
            reasons=tuple(BeatForm(r) for r in rec["reasons"]),
            order=rec["order"],
            weight=Fraction(rec["weight"]),
        )
        for rec in raw
    ]


@lru_cache(maxsize=1)
def case_table() -> tuple[ParametricCase, ...]:
    return tuple(load_case_table())


def weighted_totals(cases: Sequence[ParametricCase]) -> tuple[Fraction, Fraction]:
    """``(all cases, intransitive cases)`` with automorphism weights applied."""
    total = sum((c.weight for c in cases), Fraction(0))
    intrans = sum((c.weight for c in cases if c.kind is Kind.INTRANSITIVE), Fraction(0))
    return total, intrans


def instantiate_case(case: ParametricCase, x: int, y: int, z: int, n: int
                     ) -> Optional[tuple[OneStep, OneStep, OneStep]]:
    """Substitute ``X, Y, Z``; ``None`` when a die is invalid or two dice coincide."""
    for v in (x, y, z):
        if not 1 <= v <= n:
            raise InvalidArgument(f"parameters must lie in [1, {n}]")
    values = {"X": x, "Y": y, "Z": z}
    out = []
    for d in case.dice:
        a, b = d.up(values), d.down(values)
        if not is_valid_onestep(n, a, b):
            return None
        out.append(OneStep(n, a, b))
    if len(set(out)) < 3:
        return None
    return tuple(out)


class _Grid:
    """All ``n**3`` parameter assignments of one case, vectorized."""

    def __init__(self, case: ParametricCase, n: int):
        dice, margins, lookup = _universe(n)
        axis = np.arange(1, n + 1)
        X, Y, Z = np.meshgrid(axis, axis, axis, indexing="ij")
        values = {"X": X.ravel(), "Y": Y.ravel(), "Z": Z.ravel()}
        self.values = values
        self.ups = [d.up(values) for d in case.dice]
        self.downs = [d.down(values) for d in case.dice]
        rows = []
        valid = np.ones(X.size, dtype=bool)
        for a, b in zip(self.ups, self.downs):
            inside = (a >= 1) & (a <= n) & (b >= 1) & (b <= n)
            row = np.full(X.size, -1, dtype=np.int64)
            row[inside] = lookup[a[inside], b[inside]]
            valid &= row >= 0
            rows.append(row)
        valid &= (rows[0] != rows[1]) & (rows[1] != rows[2]) & (rows[0] != rows[2])
        self.valid = valid
        self.rows = [r[valid] for r in rows]
        self.ups = [a[valid] for a in self.ups]
        self.downs = [b[valid] for b in self.downs]
        self.params = np.stack([values[k][valid] for k in "XYZ"], axis=1)
        self.margins = margins


@dataclass
class CaseReport:
    index: int
    n: int
    instantiations: int
    matching: int
    mismatching: int
    mismatch_examples: list = field(default_factory=list)

    @property
    def mismatch_density(self) -> float:
        return self.mismatching / self.n**3

    @property
    def passed(self) -> bool:
        return self.matching > self.mismatching

    def as_dict(self) -> dict:
        return {
            "case": self.index,
            "n": self.n,
            "instantiations": self.instantiations,
            "matching": self.matching,
            "mismatching": self.mismatching,
            "mismatch_per_n3": self.mismatch_density,
            "passed": self.passed,
            "mismatch_examples": self.mismatch_examples,
        }


def verify_case(case: ParametricCase, n: int, max_examples: int = 5) -> CaseReport:
    """Check every valid instantiation of ``case`` against brute-force relations.

    An instantiation matches when all three pairs are strict, each declared
    winner really wins, and each declared reason is among the forms matched
    by that (winner, loser) pair.
    """
    if n < 8:
        raise InvalidArgument("verify_case needs n >= 8")
    g = _Grid(case, n)
    ok = np.ones(len(g.rows[0]), dtype=bool)
    for (p, q), (winner, reason) in case.declared().items():
        loser = q if winner == p else p
        m = g.margins[g.rows[winner], g.rows[loser]]
        hit = match_forms(g.ups[winner], g.downs[winner], g.ups[loser], g.downs[loser])[reason]
        ok &= (m > 0) & hit
    bad = np.flatnonzero(~ok)
    examples = [dict(zip("XYZ", (int(v) for v in g.params[i]))) for i in bad[:max_examples]]
    return CaseReport(
        index=case.index,
        n=n,
        instantiations=int(ok.size),
        matching=int(ok.sum()),
        mismatching=int(bad.size),
        mismatch_examples=examples,
    )


@dataclass(frozen=True)
class OneStepCensus:
    n: int
    dice: int
    comparable_triples: int
    intransitive_triples: int

    @property
    def intransitive_ratio(self) -> float:
        return self.intransitive_triples / self.comparable_triples if self.comparable_triples else 0.0

    def as_dict(self) -> dict:
        n3 = self.n**3
        return {
            "n": self.n,
            "dice": self.dice,
            "comparable_triples": self.comparable_triples,
            "intransitive_triples": self.intransitive_triples,
            "comparable_per_n3": self.comparable_triples / n3,
            "intransitive_per_n3": self.intransitive_triples / n3,
            "intransitive_ratio": self.intransitive_ratio,
        }


def census_onestep_triples(n: int, max_n: int = DEFAULT_CENSUS_MAX_N) -> OneStepCensus:
    """Exact counts of tie-free and intransitive triples of distinct one-step dice."""
    if n > max_n:
        raise ResourceLimitError(f"one-step census at n={n} exceeds the budget n <= {max_n}")
    dice, margins, _ = _universe(n)
    comparable, cyclic = triangle_counts(margins)
    return OneStepCensus(n, len(dice), comparable, cyclic)


def comparable_triples(n: int) -> np.ndarray:
    """Row-index triples ``i < j < k`` of one-step dice with all three pairs strict."""
    _, margins, _ = _universe(n)
    strict = margins != 0
    out = []
    size = strict.shape[0]
    for i in range(size):
        js = np.flatnonzero(strict[i, i + 1 :]) + i + 1
        if js.size < 2:
            continue
        sub = strict[np.ix_(js, js)]
        a, b = np.nonzero(np.triu(sub, 1))
        if a.size:
            out.append(np.stack([np.full(a.size, i), js[a], js[b]], axis=1))
    if not out:
        return np.zeros((0, 3), dtype=np.int64)
    return np.concatenate(out)


@dataclass
class CoverageReport:
    n: int
    comparable_triples: int
    uncovered_triples: list

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "comparable_triples": self.comparable_triples,
            "uncovered": len(self.uncovered_triples),
            "uncovered_triples": [[str(d) for d in t] for t in self.uncovered_triples[:20]],
        }


def coverage_check(n: int, cases: Optional[Sequence[ParametricCase]] = None,
                   max_n: int = DEFAULT_COVERAGE_MAX_N) -> CoverageReport:
    """Match every tie-free one-step triple against some case instantiation."""
    if n > max_n:
        raise ResourceLimitError(f"coverage check at n={n} exceeds the budget n <= {max_n}")
    if n < 3:
        raise InvalidArgument("coverage needs n >= 3")
    cases = case_table() if cases is None else cases
    dice, _, _ = _universe(n)
    size = len(dice)
    found = comparable_triples(n)

    def keys(rows: np.ndarray) -> np.ndarray:
        rows = np.sort(rows, axis=1)
        return (rows[:, 0] * size + rows[:, 1]) * size + rows[:, 2]

    covered = []
    for case in cases:
        g = _Grid(case, n)
        if g.rows[0].size:
            covered.append(keys(np.stack(g.rows, axis=1)))
    covered_keys = np.unique(np.concatenate(covered)) if covered else np.zeros(0, dtype=np.int64)
    missing = ~np.isin(keys(found), covered_keys)
    uncovered = [tuple(dice[i] for i in row) for row in found[missing]]
    return CoverageReport(n, int(found.shape[0]), uncovered)
