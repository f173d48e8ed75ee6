import logging
import sys
import time
from enum import IntEnum

import click

import corpus_service
from bounds_service import bounds_table, render_csv, render_table
from config import configure_logging
from criticality_service import (
    analyze,
    check_lemma_3_1,
    check_lemma_3_2,
    emptiness_profile,
    line_count_guard,
    theorem_case,
    union_stats,
)
from exceptions import CritsetError, PreconditionError
from extensions import shutdown_executors, worker_count
from models import PartialLatinSquare, Triple
from pls_service import is_latin_square, serialize
from search_service import (
    exhaustive_lcs,
    exhaustive_scs,
    greedy_large,
    random_latin_square,
    render_result,
    verify_corpus,
)
from solver_service import complete_unique, enumerate_completions
from trade_service import all_trades, find_intercalates, witness_trade


class ExitStatus(IntEnum):
    SUCCESS = 0
    PREDICATE_FALSE = 1
    USAGE = 2


class SquareParam(click.ParamType):
    """A .pls path or a corpus entry name."""
    name = "square"

    def convert(self, value, param, ctx) -> PartialLatinSquare:
        if isinstance(value, PartialLatinSquare):
            return value
        try:
            return corpus_service.load_square(value)
        except (CritsetError, OSError, UnicodeDecodeError) as e:
            self.fail(f"{value}: {e}", param, ctx)


class TripleParam(click.ParamType):
    name = "triple"

    def convert(self, value, param, ctx) -> Triple:
        parts = value.split()
        if len(parts) != 3 or not all(p.lstrip("-").isdigit() for p in parts):
            self.fail(f"expected \"row col symbol\", got {value!r}", param, ctx)
        return Triple(*(int(p) for p in parts))


SQUARE = SquareParam()


class CritsetGroup(click.Group):
    """Maps library errors to exit status 2 with a one-line message."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except CritsetError as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(ExitStatus.USAGE)


@click.group(cls=CritsetGroup)
@click.option("--verbose", is_flag=True, help="Debug logging and timings on stderr.")
@click.pass_context
def cli(ctx: click.Context, verbose: bool) -> None:
    """Exact tools for critical sets in Latin squares."""
    configure_logging(verbose)
    ctx.obj = {"verbose": verbose, "started": time.perf_counter()}
    ctx.call_on_close(shutdown_executors)
    if verbose:
        ctx.call_on_close(lambda: click.echo(f"elapsed {time.perf_counter() - ctx.obj['started']:.3f}s", err=True))


def _grid(P: PartialLatinSquare) -> str:
    return serialize(P).split("\n", 1)[1]


def _verdict(report) -> str:
    if report.is_critical:
        return "critical"
    if report.is_uc:
        return "UC but not minimal"
    if report.completion_count == 0:
        return "not completable"
    return "not uniquely completable"


@cli.command()
@click.argument("square", type=SQUARE)
@click.option("--expect-critical", is_flag=True, help="Exit 1 unless critical (default).")
@click.option("--expect-uc", is_flag=True, help="Exit 1 unless uniquely completable.")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
def verify(square: PartialLatinSquare, expect_critical: bool, expect_uc: bool, as_json: bool) -> None:
    """Decide unique completability and criticality."""
    if expect_critical and expect_uc:
        raise click.UsageError("--expect-critical and --expect-uc are mutually exclusive")
    report = analyze(square, workers=worker_count())
    if as_json:
        click.echo(report.model_dump_json(indent=2))
    else:
        click.echo(f"order {report.order}")
        click.echo(f"size {report.size}")
        completions = "1" if report.is_uc else ("0" if report.completion_count == 0 else ">=2")
        click.echo(f"completions {completions}")
        click.echo(f"uniquely_completable {'yes' if report.is_uc else 'no'}")
        click.echo(f"critical {'yes' if report.is_critical else 'no'}")
        if report.removable_entries:
            click.echo(f"removable {' '.join(map(str, report.removable_entries))}")
        click.echo(f"verdict {_verdict(report)}")
    ok = report.is_uc if expect_uc else report.is_critical
    sys.exit(ExitStatus.SUCCESS if ok else ExitStatus.PREDICATE_FALSE)


@cli.command()
@click.argument("square", type=SQUARE)
@click.option("--limit", default=10, show_default=True, type=click.IntRange(min=1), help="Maximum completions listed.")
def complete(square: PartialLatinSquare, limit: int) -> None:
    """List completions in lexicographic order, count first."""
    found = enumerate_completions(square, limit)
    suffix = " (limit reached)" if len(found) == limit else ""
    click.echo(f"count {len(found)}{suffix}")
    for L in found:
        click.echo()
        click.echo(serialize(L), nl=False)


@cli.command()
@click.argument("square", type=SQUARE)
def stats(square: PartialLatinSquare) -> None:
    """Union statistics, counting identity and structural checks."""
    s = union_stats(square)
    click.echo("x")
    width = len(str(square.order))
    for row in s.x:
        click.echo(" ".join(str(v).rjust(width) for v in row))
    click.echo(f"f {' '.join(map(str, s.f))}")
    click.echo(f"lhs {s.lhs_sum}")
    click.echo(f"rhs {s.rhs_sum}")
    click.echo(f"residual {s.residual}")
    profile = emptiness_profile(square)
    click.echo(
        f"profile empty_row={str(profile.has_empty_row).lower()} "
        f"empty_col={str(profile.has_empty_col).lower()} "
        f"missing_symbol={str(profile.has_missing_symbol).lower()}"
    )
    click.echo(line_count_guard(square).summary())
    report = analyze(square, workers=worker_count())
    if report.is_critical:
        click.echo(f"theorem case {theorem_case(square)}")
        for result in (
            check_lemma_3_1(square, report.completion, assume_critical=True),
            check_lemma_3_2(square, report.completion, assume_critical=True),
        ):
            click.echo(result.summary())
            for v in result.violations:
                click.echo(f"  {v}")
    else:
        click.echo("lemma checks skipped (not critical)")
    if s.residual != 0:
        sys.exit(ExitStatus.PREDICATE_FALSE)


@cli.command()
@click.option("--max-n", default=10, show_default=True, type=click.IntRange(min=1))
@click.option("--csv", "as_csv", is_flag=True, help="Machine-readable CSV.")
def bounds(max_n: int, as_csv: bool) -> None:
    """Known lcs values next to the bound formulas."""
    rows = bounds_table(max_n)
    click.echo(render_csv(rows) if as_csv else render_table(rows), nl=False)


@cli.command()
@click.option("--order", "n", required=True, type=click.IntRange(min=1))
@click.option("--mode", type=click.Choice(["exact", "greedy"]), default="exact", show_default=True)
@click.option("--objective", type=click.Choice(["largest", "smallest"]), default="largest", show_default=True)
@click.option("--restarts", default=100, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--host", type=SQUARE, default=None, help="Latin square for greedy mode (default: seeded random).")
@click.option("--json", "as_json", is_flag=True)
def search(n: int, mode: str, objective: str, restarts: int, seed: int, host: PartialLatinSquare | None, as_json: bool) -> None:
    """Exhaustive (n <= 4) or greedy critical set search."""
    workers = worker_count()
    if mode == "exact":
        result = exhaustive_lcs(n, workers) if objective == "largest" else exhaustive_scs(n, workers)
    else:
        if objective != "largest":
            raise PreconditionError("greedy mode searches for large critical sets only")
        L = host if host is not None else random_latin_square(n, seed)
        if L.order != n or not is_latin_square(L):
            raise PreconditionError("host is a Latin square of the requested order")
        result = greedy_large(L, restarts, seed, workers)
    if as_json:
        click.echo(result.model_dump_json(indent=2))
    else:
        click.echo(render_result(result), nl=False)


@cli.command()
@click.argument("square", type=SQUARE)
def intercalates(square: PartialLatinSquare) -> None:
    """Count and list the 2x2 Latin subsquares."""
    found = find_intercalates(square)
    click.echo(f"count {len(found)}")
    for ic in found:
        click.echo(
            f"rows {ic.rows[0]} {ic.rows[1]} cols {ic.cols[0]} {ic.cols[1]} symbols {ic.symbols[0]} {ic.symbols[1]}"
        )


def _side_by_side(left: PartialLatinSquare, right: PartialLatinSquare) -> str:
    a, b = _grid(left).splitlines(), _grid(right).splitlines()
    width = max(len(line) for line in a)
    return "\n".join(f"{x.ljust(width)}   {y}" for x, y in zip(a, b)) + "\n"


@cli.command()
@click.argument("square", type=SQUARE, required=False)
@click.option("--set", "critical_set", type=SQUARE, default=None, help="Critical set C contained in the square.")
@click.option("--entry", type=TripleParam(), default=None, help='Entry of C as "row col symbol".')
@click.option("--all", "list_all", is_flag=True, help="List every interchange in the square (order <= 4).")
def trades(square: PartialLatinSquare | None, critical_set: PartialLatinSquare | None, entry: Triple | None, list_all: bool) -> None:
    """Witness interchange for one entry of C, or all interchanges of a small square."""
    if list_all:
        if square is None:
            raise click.UsageError("--all needs a Latin square")
        found = all_trades(square)
        click.echo(f"count {len(found)}")
        for I in found:
            click.echo(f"size {I.size}: {' '.join(map(str, I))}")
        return
    if critical_set is None or entry is None:
        raise click.UsageError("--set and --entry are required unless --all is given")
    L = square if square is not None else complete_unique(critical_set)
    trade = witness_trade(L, critical_set, entry)
    meets = [t for t in trade.interchange if t in critical_set]
    click.echo(f"size {trade.size}")
    click.echo(f"meets_C {' '.join(map(str, meets))}")
    click.echo("interchange | mate")
    click.echo(_side_by_side(trade.interchange, trade.mate), nl=False)


@cli.group()
def corpus() -> None:
    """The embedded examples."""


@corpus.command("list")
def corpus_list() -> None:
    for name in corpus_service.list_names():
        entry = corpus_service.get(name)
        click.echo(f"{name} {entry.kind} order {entry.square.order} size {entry.claimed_size}")


@corpus.command("show")
@click.argument("name")
def corpus_show(name: str) -> None:
    entry = corpus_service.get(name)
    for P in entry.data:
        click.echo(serialize(P), nl=False)


@corpus.command("verify-all")
def corpus_verify_all() -> None:
    report = verify_corpus()
    for check in report.checks:
        click.echo(f"{check.name} {'ok' if check.passed else 'FAIL'} size {check.size}")
        for result in check.lemma_checks:
            click.echo(f"  {result.summary()}")
        for failure in check.failures:
            click.echo(f"  {failure}")
    sys.exit(ExitStatus.SUCCESS if report.passed else ExitStatus.PREDICATE_FALSE)


@corpus.command("derive-completions")
def corpus_derive_completions() -> None:
    """Write the solver's unique completion of every critical-set entry."""
    for path in corpus_service.derive_completions():
        click.echo(str(path))
    logging.info("Derived completions written")
