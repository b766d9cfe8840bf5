"""The reproduction suite: every acceptance check, runnable from the CLI or pytest."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from scipy import stats

from .dice import Relation, compare, relation, standard_die
from .enumeration import CountTable, iter_proper_faces, triple_census
from .experiments import PUBLISHED_TABLE, RunSpec, reproduction_spec, run_intransitive_table
from .onestep import (
    Kind,
    case_table,
    census_onestep_triples,
    coverage_check,
    enumerate_onestep,
    load_case_table,
    verify_case,
    verify_lemma1,
    weighted_totals,
)
from .sampling import Method, Sampler, SamplerConfig, make_rng
from .tournaments import all_orientations, classify3, classify4, orientation_census

#: published Pr(n) for n = 1..23
PUBLISHED_PR = {
    1: 1, 2: 1, 3: 2, 4: 5, 5: 12, 6: 32, 7: 94, 8: 289, 9: 910, 10: 2934,
    11: 9686, 12: 32540, 13: 110780, 14: 381676, 15: 1328980, 16: 4669367,
    17: 16535154, 18: 58965214, 19: 211591218, 20: 763535450, 21: 2769176514,
    22: 10089240974, 23: 36912710568,
}

REFERENCE_INTRANSITIVE_CASES = frozenset(
    {2, 13, 15, 18, 20, 21, 22, 23, 24, 28, 34, 43, 46, 48, 49, 54, 55}
)

MC_TOLERANCE_PP = 2.0
DENSITY_BAND = 0.20
RATIO_BAND = 0.05


@dataclass
class CheckResult:
    name: str
    ok: bool
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.name} ({self.seconds:.2f}s) {self.detail}"


@dataclass
class Options:
    seed: int = 0
    quick: bool = False
    case_table_path: Optional[str] = None

    def cases(self):
        if self.case_table_path is None:
            return case_table()
        return load_case_table(self.case_table_path, verify_checksum=False)


def _timed(limit: Optional[float]):
    def wrap(fn):
        def run(opts: Options) -> tuple[bool, dict]:
            start = time.perf_counter()
            ok, detail = fn(opts)
            elapsed = time.perf_counter() - start
            if limit is not None and not opts.quick:
                detail["time_limit_s"] = limit
                if elapsed > limit:
                    ok = False
                    detail["timeout"] = True
            return ok, detail
        run.__name__ = fn.__name__
        return run
    return wrap


@_timed(1.0)
def check_pr_table(opts: Options):
    wrong = {n: CountTable(n).total for n, v in PUBLISHED_PR.items() if CountTable(n).total != v}
    return not wrong, {"rows": len(PUBLISHED_PR), "mismatches": wrong}


@_timed(60.0)
def check_dp_enumeration(opts: Options):
    top = 11 if opts.quick else 14
    bad = {}
    for n in range(1, top + 1):
        listed = sum(1 for _ in iter_proper_faces(n))
        if listed != CountTable(n).total:
            bad[n] = listed
    return not bad, {"n_max": top, "mismatches": bad}


@_timed(None)
def check_comparison_table(opts: Options):
    c = compare((1, 2, 4, 4, 4, 6), (2, 2, 3, 3, 5, 6))
    got = (c.wins_a, c.wins_b, c.ties)
    return got == (17, 16, 3), {"got": got}


@_timed(None)
def check_standard_die_ties(opts: Options):
    exceptions = []
    checked = 0
    for n in range(1, 9):
        p = standard_die(n)
        for faces in iter_proper_faces(n):
            checked += 1
            if relation(p, faces) is not Relation.TIE:
                exceptions.append(faces)
    return not exceptions, {"dice_checked": checked, "exceptions": exceptions}


@_timed(None)
def check_n4_census(opts: Options):
    c = triple_census(4)
    return (c.total, c.intransitive) == (10, 1), {"total": c.total, "intransitive": c.intransitive}


def _uniformity(method: Method, opts: Options) -> tuple[bool, dict]:
    draws = 100_000 if opts.quick else 1_000_000
    detail = {}
    ok = True
    for n in (3, 4, 5, 6):
        dice = list(iter_proper_faces(n))
        config = SamplerConfig(n, method=method, seed=opts.seed, chains=2000)
        counts = Counter(Sampler(config, make_rng(opts.seed, 10, n)).faces(draws))
        observed = [counts[d] for d in dice]
        chi = stats.chisquare(observed)
        critical = stats.chi2.ppf(0.999, len(dice) - 1)
        passed = sum(observed) == draws and chi.statistic < critical
        ok &= bool(passed)
        detail[n] = {"chi2": round(float(chi.statistic), 3), "critical_0.999": round(float(critical), 3)}
    return ok, detail


@_timed(120.0)
def check_uniformity_exact(opts: Options):
    return _uniformity(Method.EXACT, opts)


@_timed(120.0)
def check_uniformity_mcmc(opts: Options):
    return _uniformity(Method.MCMC, opts)


@_timed(300.0)
def check_mc_table(opts: Options):
    n_values = (10, 20) if opts.quick else tuple(PUBLISHED_TABLE)
    report = run_intransitive_table(reproduction_spec(10_000, opts.seed, n_values))
    detail, ok = {}, True
    for n in n_values:
        cells = {}
        for column, method in enumerate(("exact", "mcmc")):
            got = 100 * report.row(n, method).fractions()[0]
            ref = PUBLISHED_TABLE[n][column]
            cells[method] = f"{got:.2f} vs {ref}"
            ok &= abs(got - ref) <= MC_TOLERANCE_PP
        detail[n] = cells
    return ok, detail


@_timed(None)
def check_onestep_universe(opts: Options):
    bad = {}
    for n in range(3, 101):
        dice = enumerate_onestep(n)
        if len(dice) != (n - 2) ** 2 or len({d.faces for d in dice}) != len(dice):
            bad[n] = len(dice)
    return not bad, {"n_range": [3, 100], "mismatches": bad}


@_timed(120.0)
def check_beat_forms(opts: Options):
    bad = {}
    for n in range(3, 31):
        r = verify_lemma1(n)
        if r.violations:
            bad[n] = len(r.violations)
    return not bad, {"n_range": [3, 30], "violations": bad}


@_timed(None)
def check_case_table_data(opts: Options):
    cases = opts.cases()
    intrans = {c.index for c in cases if c.kind is Kind.INTRANSITIVE}
    total, weighted_intrans = weighted_totals(cases)
    detail = {
        "cases": len(cases),
        "intransitive": len(intrans),
        "weighted_total": str(total),
        "weighted_intransitive": str(weighted_intrans),
    }
    ok = (
        len(cases) == 64
        and intrans == REFERENCE_INTRANSITIVE_CASES
        and total == Fraction(188, 3)
        and weighted_intrans == Fraction(47, 3)
        and weighted_intrans / total == Fraction(1, 4)
    )
    return ok, detail


@_timed(600.0)
def check_case_table_verification(opts: Options):
    cases = opts.cases()
    small, large = (15, 20) if opts.quick else (15, 25)
    failed, not_shrinking = [], []
    for case in cases:
        a, b = verify_case(case, small), verify_case(case, large)
        if not (a.passed and b.passed):
            failed.append(case.index)
        # equal zero densities count as shrinking
        if b.mismatch_density > a.mismatch_density or (a.mismatching and b.mismatch_density == a.mismatch_density):
            not_shrinking.append(case.index)
    uncovered = {}
    for n in (8, 12):
        r = coverage_check(n, cases)
        if r.uncovered_triples:
            uncovered[n] = len(r.uncovered_triples)
    ok = not failed and not not_shrinking and not uncovered
    return ok, {"sizes": [small, large], "failed_cases": failed,
                "not_shrinking": not_shrinking, "uncovered": uncovered}


def _onestep_censuses(opts: Options):
    sizes = (12, 16, 20) if opts.quick else (20, 30, 40)
    return sizes, [census_onestep_triples(n) for n in sizes]


@_timed(600.0)
def check_onestep_density(opts: Options):
    sizes, census = _onestep_censuses(opts)
    target = 188 / 3
    density = census[-1].comparable_triples / sizes[-1] ** 3
    rel = abs(density - target) / target
    return rel <= DENSITY_BAND, {
        "n": sizes[-1], "comparable_per_n3": round(density, 4), "target": round(target, 4),
        "relative_error": round(rel, 4), "band": DENSITY_BAND,
    }


@_timed(600.0)
def check_onestep_ratio(opts: Options):
    sizes, census = _onestep_censuses(opts)
    ratios = [c.intransitive_ratio for c in census]
    gaps = [abs(r - 0.25) for r in ratios]
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    ok = gaps[-1] <= RATIO_BAND and monotone
    return ok, {"sizes": list(sizes), "ratios": [round(r, 5) for r in ratios], "monotone": monotone}


@_timed(10.0)
def check_tournament_censuses(opts: Options):
    c3 = Counter(classify3(t).value for t in all_orientations(3))
    c4 = Counter(classify4(t).label for t in all_orientations(4))
    k5 = sum(c.count for c in orientation_census(5))
    ok = (
        c3 == {"Transitive": 6, "Intransitive": 2}
        and c4 == {"Score3210": 24, "Score3111": 8, "Score2220": 8, "Score2211": 24}
        and k5 == 1024
    )
    return ok, {"k3": dict(c3), "k4": dict(c4), "k5_total": k5}


@_timed(None)
def check_reproducibility(opts: Options):
    spec = RunSpec(n_values=(10, 20), trials=500, methods=("exact", "mcmc"), seed=opts.seed,
                   block_size=200, chains=64)
    first = run_intransitive_table(spec).to_json(timing=False)
    second = run_intransitive_table(spec).to_json(timing=False)
    return first == second, {"bytes": len(first)}


CHECKS: dict[str, Callable[[Options], tuple[bool, dict]]] = {
    "pr_table": check_pr_table,
    "dp_enumeration_crosscheck": check_dp_enumeration,
    "comparison_table": check_comparison_table,
    "standard_die_ties": check_standard_die_ties,
    "n4_census": check_n4_census,
    "sampler_uniformity_exact": check_uniformity_exact,
    "sampler_uniformity_mcmc": check_uniformity_mcmc,
    "monte_carlo_table": check_mc_table,
    "onestep_universe": check_onestep_universe,
    "beat_forms_exhaustive": check_beat_forms,
    "case_table_data": check_case_table_data,
    "case_table_verification": check_case_table_verification,
    "onestep_density": check_onestep_density,
    "onestep_ratio": check_onestep_ratio,
    "tournament_censuses": check_tournament_censuses,
    "reproducibility": check_reproducibility,
}


def run_check(name: str, opts: Options) -> CheckResult:
    start = time.perf_counter()
    try:
        ok, detail = CHECKS[name](opts)
    except Exception as exc:  # a crashing check is a failed check
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CheckResult(name, bool(ok), time.perf_counter() - start, detail)


def run_reproduction_suite(opts: Optional[Options] = None, only=None, echo=print) -> list[CheckResult]:
    opts = opts or Options()
    results = []
    for name in CHECKS:
        if only and name not in only:
            continue
        result = run_check(name, opts)
        if echo:
            echo(result.line())
        results.append(result)
    return results
