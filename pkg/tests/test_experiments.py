import csv
import io
import json

import pytest

from intransitive_dice.errors import InvalidArgument, ResourceLimitError
from intransitive_dice.experiments import (
    RunSpec,
    reproduction_spec,
    run_intransitive_table,
)


def small_spec(**kw):
    base = dict(n_values=(6, 10), trials=600, methods=("exact", "mcmc"), seed=3, chains=32, block_size=250)
    base.update(kw)
    return RunSpec(**base)


def test_spec_validation():
    for bad in (dict(trials=0), dict(block_size=0), dict(tie_handling="drop"),
                dict(n_values=()), dict(methods=("gibbs",)), dict(weighting="bag")):
        with pytest.raises((InvalidArgument, ValueError)):
            RunSpec(**bad)


@pytest.mark.parametrize("ties", ["count-as-neither", "exclude"])
def test_fractions_partition_the_denominator(ties):
    report = run_intransitive_table(small_spec(tie_handling=ties))
    for row in report.rows:
        t = row.tally
        assert t.intransitive + t.transitive + t.tie_trials == t.trials
        intrans, trans, tie = row.fractions()
        if ties == "count-as-neither":
            assert intrans + trans + tie == pytest.approx(1.0)
        else:
            assert intrans + trans == pytest.approx(1.0)


def test_report_is_reproducible_and_worker_independent():
    base = run_intransitive_table(small_spec()).to_json(timing=False)
    assert run_intransitive_table(small_spec()).to_json(timing=False) == base
    assert run_intransitive_table(small_spec(), threads=2).to_json(timing=False) == base


def test_block_size_is_part_of_the_stream():
    a = run_intransitive_table(small_spec(block_size=600))
    b = run_intransitive_table(small_spec(block_size=600), threads=2)
    assert a.to_json(timing=False) == b.to_json(timing=False)


def test_seed_changes_results():
    a = run_intransitive_table(small_spec(seed=1)).to_json(timing=False)
    b = run_intransitive_table(small_spec(seed=2)).to_json(timing=False)
    assert a != b


def test_csv_and_json_carry_the_same_numbers():
    report = run_intransitive_table(small_spec())
    doc = json.loads(report.to_json())
    text = report.to_csv()
    header, body = text.split("\n", 1)
    assert header.startswith("# ") and json.loads(header[2:])["seed"] == 3
    rows = list(csv.DictReader(io.StringIO(body)))
    assert len(rows) == len(doc["rows"])
    for c, j in zip(rows, doc["rows"]):
        assert c.keys() == j.keys()
        for key, value in j.items():
            parsed = c[key] if isinstance(value, str) else type(value)(float(c[key]) if isinstance(value, float) else c[key])
            assert parsed == value


def test_report_schema():
    doc = run_intransitive_table(small_spec()).as_dict()
    assert doc["schema_version"] == 1
    assert doc["spec"]["seed"] == 3 and doc["spec"]["n_values"] == [6, 10]
    assert "wall_clock_seconds" in doc["timing"]
    assert "timing" not in run_intransitive_table(small_spec()).as_dict(timing=False)


def test_budget():
    with pytest.raises(ResourceLimitError):
        run_intransitive_table(small_spec(trials=10_000), max_draws=1000)


def test_with_replacement_allows_n3():
    report = run_intransitive_table(RunSpec(n_values=(3,), trials=200, distinct=False))
    assert report.rows[0].tally.trials == 200
    with pytest.raises(InvalidArgument):
        run_intransitive_table(RunSpec(n_values=(3,), trials=10))


def test_published_table_rendering():
    text = run_intransitive_table(reproduction_spec(200, 0, (10,))).published_table()
    assert "15.7" in text and "15.8" in text


@pytest.mark.slow
def test_n4_fraction_is_one_tenth():
    # exact census: one intransitive triple among C(5,3) = 10
    row = run_intransitive_table(RunSpec(n_values=(4,), trials=100_000, seed=7)).rows[0]
    p = 0.1
    sigma = (p * (1 - p) / row.tally.trials) ** 0.5
    assert abs(row.fractions()[0] - p) <= 3 * sigma
