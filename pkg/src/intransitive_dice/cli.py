"""``dice-lab``: command-line harness for counts, samples, censuses and experiments.

Usage:
    dice-lab count --n 10
    dice-lab enumerate --n 5 --format csv
    dice-lab census --n 6
    dice-lab --seed 7 sample --n 20 --method mcmc --count 5
    dice-lab --seed 1 experiment --n 10 --n 20 --trials 10000 --method exact --method mcmc
    dice-lab onestep verify --n 15 --case 46
    dice-lab tournament census --k 5
    dice-lab --quick reproduce

Exit codes: 0 success, 2 usage error, 3 resource limit, 4 failed check.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click

from . import __version__
from .dice import format_die
from .enumeration import count_proper, enumerate_proper, triple_census
from .errors import InvalidArgument, ResourceLimitError
from .experiments import SCHEMA_VERSION, RunSpec, reproduction_spec, run_intransitive_table
from .onestep import case_table, census_onestep_triples, coverage_check, verify_case, verify_lemma1
from .reproduce import CHECKS, Options, run_reproduction_suite
from .sampling import Method, SamplerConfig, Sampler, Weighting, make_rng
from .tournaments import equidistribution_experiment, orientation_census

EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_CHECK_FAILED = 4

FORMATS = ("json", "csv", "text")


def _load_config(ctx, param, value):
    if value is None:
        return None
    try:
        with open(value) as fh:
            ctx.default_map = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(f"cannot read config {value}: {exc}") from exc
    return value


def _emit(ctx, text: str) -> None:
    out = ctx.obj["out"]
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _report(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, "library_version": __version__}
    body.update(payload)
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def _flat_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="dice-lab")
@click.option("--config", type=click.Path(dir_okay=False), callback=_load_config, is_eager=True,
              expose_value=False, help="JSON file of option defaults; command-line flags win.")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None,
              help="Output format (each command has its own default).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write output here.")
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--quick", is_flag=True, help="Reduced sizes for long-running commands.")
@click.pass_context
def cli(ctx, seed, fmt, out, threads, quick):
    """Exact counts, samplers and experiments for intransitive proper dice."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, fmt=fmt, out=out, threads=threads, quick=quick)


@cli.command()
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.pass_context
def count(ctx, n):
    """Print Pr(n), the number of proper n-sided dice."""
    value = count_proper(n)
    if ctx.obj["fmt"] == "json":
        _emit(ctx, _report({"n": n, "count": value}))
    else:
        _emit(ctx, f"{value}\n")


@cli.command("enumerate")
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--limit", type=click.IntRange(min=1), default=10**8, show_default=True)
@click.pass_context
def enumerate_cmd(ctx, n, limit):
    """List every proper n-sided die in lexicographic order."""
    fmt = ctx.obj["fmt"] or "text"
    dice = enumerate_proper(n, limit=limit)
    if fmt == "json":
        _emit(ctx, _report({"n": n, "dice": [list(d.faces) for d in dice]}))
    elif fmt == "csv":
        _emit(ctx, "".join(",".join(map(str, d.faces)) + "\n" for d in dice))
    else:
        _emit(ctx, "".join(format_die(d.faces) + "\n" for d in dice))


@cli.command()
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--max-dice", type=click.IntRange(min=1), default=5000, show_default=True)
@click.pass_context
def census(ctx, n, max_dice):
    """Exact triple census of proper n-sided dice."""
    c = triple_census(n, max_dice=max_dice)
    _emit(ctx, _report({"n": c.n, "total": c.total, "intransitive": c.intransitive,
                        "transitive": c.transitive, "with_ties": c.with_ties}))


def _sampler_options(fn):
    fn = click.option("--weighting", type=click.Choice([w.value for w in Weighting]),
                      default="multiset", show_default=True)(fn)
    fn = click.option("--burn-in", type=click.IntRange(min=0), default=None,
                      help="MCMC burn-in steps [default: 50 n^2].")(fn)
    fn = click.option("--thinning", type=click.IntRange(min=1), default=None,
                      help="MCMC steps between draws [default: n^2].")(fn)
    fn = click.option("--chains", type=click.IntRange(min=1), default=256, show_default=True)(fn)
    return fn


@cli.command()
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--method", type=click.Choice([m.value for m in Method]), default="exact", show_default=True)
@click.option("--count", "how_many", type=click.IntRange(min=1), default=1, show_default=True)
@_sampler_options
@click.pass_context
def sample(ctx, n, method, how_many, weighting, burn_in, thinning, chains):
    """Draw random proper dice, one per line."""
    config = SamplerConfig(n, Method(method), ctx.obj["seed"], burn_in, thinning, Weighting(weighting), chains)
    dice = Sampler(config, make_rng(ctx.obj["seed"])).faces(how_many)
    if ctx.obj["fmt"] == "json":
        _emit(ctx, _report({"sampler": config.as_dict(), "dice": [list(d) for d in dice]}))
    elif ctx.obj["fmt"] == "csv":
        _emit(ctx, "".join(",".join(map(str, d)) + "\n" for d in dice))
    else:
        _emit(ctx, "".join(format_die(d) + "\n" for d in dice))


@cli.command()
@click.option("--n", "n_values", type=click.IntRange(min=2), multiple=True, required=True)
@click.option("--trials", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--method", "methods", type=click.Choice([m.value for m in Method]), multiple=True,
              default=("exact", "mcmc"), show_default=True)
@_sampler_options
@click.option("--ties", "tie_handling", type=click.Choice(["count-as-neither", "exclude"]),
              default="count-as-neither", show_default=True)
@click.option("--replacement", type=click.Choice(["distinct", "with-replacement"]),
              default="distinct", show_default=True)
@click.option("--block-size", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--published", "published", is_flag=True, help="Use the table-reproduction configuration.")
@click.option("--omit-timing", is_flag=True, help="Leave wall-clock fields out of the report.")
@click.pass_context
def experiment(ctx, n_values, trials, methods, weighting, burn_in, thinning, chains,
               tie_handling, replacement, block_size, published, omit_timing):
    """Estimate the intransitive-triple fraction for each n and sampling method."""
    if published:
        spec = reproduction_spec(trials, ctx.obj["seed"], n_values)
    else:
        spec = RunSpec(
            subcommand="experiment", n_values=tuple(n_values), trials=trials, methods=tuple(methods),
            weighting=weighting, mcmc_burn_in=burn_in, mcmc_thinning=thinning, chains=chains,
            seed=ctx.obj["seed"], tie_handling=tie_handling,
            distinct=replacement == "distinct", block_size=block_size,
        )
    report = run_intransitive_table(spec, threads=ctx.obj["threads"])
    fmt = ctx.obj["fmt"] or "json"
    if fmt == "csv":
        _emit(ctx, report.to_csv())
    elif fmt == "text":
        _emit(ctx, report.published_table())
    else:
        _emit(ctx, report.to_json(timing=not omit_timing))


@cli.group()
def onestep():
    """One-step dice: beat-form checks, case verification and censuses."""


@onestep.command("verify")
@click.option("--n", "n", type=click.IntRange(min=3), required=True)
@click.option("--case", "case_index", type=click.IntRange(1, 64), multiple=True,
              help="Case number(s); all 64 when omitted.")
@click.pass_context
def onestep_verify(ctx, n, case_index):
    """Check the beat forms and the parametric case table at size n."""
    forms = verify_lemma1(n).as_dict()
    cases = [c for c in case_table() if not case_index or c.index in case_index]
    reports = [verify_case(c, n).as_dict() for c in cases] if n >= 8 else []
    if ctx.obj["fmt"] == "csv":
        _emit(ctx, _flat_csv([{k: v for k, v in r.items() if k != "mismatch_examples"} for r in reports]))
    else:
        _emit(ctx, _report({"n": n, "beat_forms": forms, "cases": reports}))
    if forms["violations"] or not all(r["passed"] for r in reports):
        ctx.exit(EXIT_CHECK_FAILED)


@onestep.command("census")
@click.option("--n", "n", type=click.IntRange(min=3), required=True)
@click.option("--max-n", type=click.IntRange(min=3), default=60, show_default=True)
@click.pass_context
def onestep_census(ctx, n, max_n):
    """Exact counts of tie-free and intransitive one-step triples."""
    c = census_onestep_triples(n, max_n=max_n).as_dict()
    c["leading_coefficients"] = {"comparable": "188/3", "intransitive": "47/3"}
    _emit(ctx, _report(c) if ctx.obj["fmt"] != "csv" else _flat_csv([c]))


@onestep.command("coverage")
@click.option("--n", "n", type=click.IntRange(min=3), required=True)
@click.option("--max-n", type=click.IntRange(min=3), default=16, show_default=True)
@click.pass_context
def onestep_coverage(ctx, n, max_n):
    """Match every tie-free one-step triple against the 64 cases."""
    r = coverage_check(n, max_n=max_n)
    _emit(ctx, _report(r.as_dict()))
    if r.uncovered_triples:
        ctx.exit(EXIT_CHECK_FAILED)


@cli.group()
def tournament():
    """Outcome tournaments of k dice."""


@tournament.command("census")
@click.option("--k", "k", type=click.IntRange(min=2), required=True)
@click.pass_context
def tournament_census(ctx, k):
    """Isomorphism classes of tie-free k-tournaments with labeled counts."""
    classes = orientation_census(k)
    rows = [{"canonical": c.canonical, "score_sequence": list(c.score_sequence), "count": c.count,
             "probability": c.count / 2 ** (k * (k - 1) // 2)} for c in classes]
    if ctx.obj["fmt"] == "csv":
        for r in rows:
            r["score_sequence"] = "".join(map(str, r["score_sequence"]))
        _emit(ctx, _flat_csv(rows))
    else:
        _emit(ctx, _report({"k": k, "classes": rows, "total": sum(c.count for c in classes)}))


@tournament.command("experiment")
@click.option("--n", "n", type=click.IntRange(min=2), required=True)
@click.option("--k", "k", type=click.IntRange(min=2), required=True)
@click.option("--trials", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--method", type=click.Choice([m.value for m in Method]), default="exact", show_default=True)
@_sampler_options
@click.option("--replacement", type=click.Choice(["distinct", "with-replacement"]),
              default="distinct", show_default=True)
@click.pass_context
def tournament_experiment(ctx, n, k, trials, method, weighting, burn_in, thinning, chains, replacement):
    """Tally outcome tournaments of random k-sets against the uniform law."""
    config = SamplerConfig(n, Method(method), ctx.obj["seed"], burn_in, thinning, Weighting(weighting), chains)
    r = equidistribution_experiment(n, k, trials, config, seed=ctx.obj["seed"],
                                    distinct=replacement == "distinct")
    payload = r.as_dict()
    payload["sampler"] = config.as_dict()
    payload["seed"] = ctx.obj["seed"]
    _emit(ctx, _report(payload))


@cli.command()
@click.option("--check", "only", type=click.Choice(list(CHECKS)), multiple=True,
              help="Run only these checks.")
@click.option("--case-table", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Verify an alternative case table file instead of the bundled one.")
@click.pass_context
def reproduce(ctx, only, case_table):
    """Run every acceptance check and print one status line each."""
    opts = Options(seed=ctx.obj["seed"], quick=ctx.obj["quick"], case_table_path=case_table)
    results = run_reproduction_suite(opts, only=set(only), echo=click.echo)
    failed = [r.name for r in results if not r.ok]
    click.echo(f"{len(results) - len(failed)}/{len(results)} checks passed" +
               (f"; failed: {', '.join(failed)}" if failed else ""))
    if ctx.obj["out"]:
        with open(ctx.obj["out"], "w") as fh:
            json.dump({"schema_version": SCHEMA_VERSION, "seed": opts.seed, "quick": opts.quick,
                       "checks": [{"name": r.name, "ok": r.ok, "seconds": r.seconds, "detail": r.detail}
                                  for r in results]}, fh, indent=2, default=str)
    if failed:
        ctx.exit(EXIT_CHECK_FAILED)


def main(argv=None) -> int:
    try:
        code = cli.main(args=argv, prog_name="dice-lab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return 1
    except ResourceLimitError as exc:
        click.echo(f"resource limit: {exc}", err=True)
        return EXIT_RESOURCE
    except InvalidArgument as exc:
        click.echo(f"invalid argument: {exc}", err=True)
        return EXIT_USAGE
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
