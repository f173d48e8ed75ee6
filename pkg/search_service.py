import logging
import random
from typing import Callable, Literal, NamedTuple

import numpy as np

import corpus_service
from bounds_service import nelder_lcs, nelder_scs, theorem_bound
from config import get_settings
from criticality_service import (
    analyze,
    emptiness_profile,
    lemma_checks,
    minimalize,
    passes_line_count_guard,
    random_policy,
)
from exceptions import CapabilityError, CritsetError, PreconditionError
from extensions import parallel_map
from models import CorpusCheck, CorpusReport, PartialLatinSquare, SearchResult, Triple
from pls_service import insert, is_latin_square, serialize
from solver_service import all_latin_squares, enumerate_completions, has_completion
from trade_service import find_intercalates, verify_trade

MAX_EXHAUSTIVE_ORDER = 4
Objective = Literal["largest", "smallest"]


class _HostOutcome(NamedTuple):
    host: PartialLatinSquare
    spectrum: frozenset[int]
    largest: PartialLatinSquare
    smallest: PartialLatinSquare
    examined: int


def reduced_squares(n: int) -> list[PartialLatinSquare]:
    """Latin squares with first row and first column in natural order."""
    border = [Triple(1, j, j) for j in range(1, n + 1)] + [Triple(i, 1, i) for i in range(2, n + 1)]
    return enumerate_completions(PartialLatinSquare(n, border))


def _mask_to_square(host: PartialLatinSquare, cells: list[Triple], mask: int) -> PartialLatinSquare:
    n = host.order
    grid = [[0] * n for _ in range(n)]
    for bit, (i, j, k) in enumerate(cells):
        if mask >> bit & 1:
            grid[i - 1][j - 1] = k
    return PartialLatinSquare._trusted(n, grid)


def _line_masks(cells: list[Triple], n: int) -> list[int]:
    """One mask per row, column and symbol: the host cells lying on it."""
    lines = [0] * (3 * n)
    for bit, (i, j, k) in enumerate(cells):
        lines[i - 1] |= 1 << bit
        lines[n + j - 1] |= 1 << bit
        lines[2 * n + k - 1] |= 1 << bit
    return lines


def _non_uc_lookup(maximal: list[int], width: int) -> Callable[[int], bool]:
    """Membership test for the downset of the maximal agreement masks."""
    limit = get_settings().memo_limit
    if 1 << width > limit:
        logging.info(f"Shape memo of 2^{width} entries exceeds CRITSET_MEMO_LIMIT={limit}; testing subsets directly")
        return lambda mask: any(mask & a == mask for a in maximal)
    memo = bytearray(1 << width)
    for a in maximal:
        sub = a
        while True:
            memo[sub] = 1
            if sub == 0:
                break
            sub = (sub - 1) & a
    return memo.__getitem__


def _host_spectrum(host: PartialLatinSquare) -> _HostOutcome:
    """
    Every critical subset of one host, by bitmask over its n^2 cells.

    A subset fails to be uniquely completable exactly when it fits inside the
    agreement set of host and some other Latin square, so the non-UC subsets
    form a downset generated by the maximal agreement sets. The downset is
    memoised in a bytearray when 2^(n^2) fits CRITSET_MEMO_LIMIT; otherwise
    each subset is tested against the maximal sets directly.
    """
    n = host.order
    cells = host.triples()
    width = len(cells)
    agreements = set()
    for other in all_latin_squares(n):
        if other != host:
            agreements.add(sum(1 << b for b, (i, j, k) in enumerate(cells) if other.get(i, j) == k))
    maximal = [a for a in agreements if not any(a != b and a & b == a for b in agreements)]

    not_uc = _non_uc_lookup(maximal, width)

    lines = _line_masks(cells, n)
    least_by_size: dict[int, tuple[str, PartialLatinSquare]] = {}
    examined = 0
    for mask in range(1 << width):
        if not_uc(mask):
            continue
        # a critical set never fills a whole row, column or symbol class
        if any(mask & line == line for line in lines):
            continue
        examined += 1
        bits = mask
        critical = True
        while bits:
            low = bits & -bits
            bits ^= low
            if not not_uc(mask ^ low):
                critical = False
                break
        if not critical:
            continue
        candidate = _mask_to_square(host, cells, mask)
        text = serialize(candidate)
        size = candidate.size
        if size not in least_by_size or text < least_by_size[size][0]:
            least_by_size[size] = (text, candidate)
    spectrum = frozenset(least_by_size)
    logging.info(f"Host with {len(maximal)} maximal agreement sets: critical sizes {sorted(spectrum)}")
    return _HostOutcome(
        host,
        spectrum,
        least_by_size[max(spectrum)][1],
        least_by_size[min(spectrum)][1],
        examined,
    )


def pick_best(witnesses: list[PartialLatinSquare], objective: Objective = "largest") -> PartialLatinSquare:
    """Extreme size first, then the lexicographically least serialization."""
    sizes = [W.size for W in witnesses]
    target = max(sizes) if objective == "largest" else min(sizes)
    return min((W for W in witnesses if W.size == target), key=serialize)


def _best(outcomes: list[_HostOutcome], objective: Objective) -> tuple[_HostOutcome, PartialLatinSquare]:
    pick = (lambda o: o.largest) if objective == "largest" else (lambda o: o.smallest)
    witness = pick_best([pick(o) for o in outcomes], objective)
    host = next(o for o in outcomes if pick(o) == witness)
    return host, witness


def _exhaustive(n: int, objective: Objective, workers: int | None) -> SearchResult:
    if not 1 <= n <= MAX_EXHAUSTIVE_ORDER:
        raise CapabilityError(f"exhaustive search is limited to orders 1..{MAX_EXHAUSTIVE_ORDER}, got {n}")
    hosts = reduced_squares(n)
    total = len(all_latin_squares(n))
    logging.info(f"Exhaustive {objective} critical set search at order {n}: {len(hosts)} reduced hosts")
    outcomes = parallel_map(_host_spectrum, hosts, max_workers=workers)
    best, witness = _best(outcomes, objective)
    if not (passes_line_count_guard(witness) and analyze(witness).is_critical):
        raise CritsetError(f"internal inconsistency: exhaustive witness of size {witness.size} is not critical")
    return SearchResult(
        order=n,
        best_size=witness.size,
        witness=witness,
        host=best.host,
        mode="exact",
        objective=objective,
        squares_examined=len(hosts),
        subsets_examined=sum(o.examined for o in outcomes),
        reduction=f"reduced squares only ({len(hosts)} of {total}); critical-set sizes are isotopy invariant",
        size_spectrum=sorted(set().union(*(o.spectrum for o in outcomes))),
        host_intercalates=len(find_intercalates(best.host)),
    )


def exhaustive_lcs(n: int, workers: int | None = None) -> SearchResult:
    result = _exhaustive(n, "largest", workers)
    if n >= 2 and result.best_size > theorem_bound(n):
        raise CritsetError(f"critical set of size {result.best_size} exceeds n^2-3n+3 at order {n}")
    if result.best_size > nelder_lcs(n):
        logging.info(f"lcs({n}) = {result.best_size} exceeds (n^2-n)/2 = {nelder_lcs(n)}")
    return result


def exhaustive_scs(n: int, workers: int | None = None) -> SearchResult:
    result = _exhaustive(n, "smallest", workers)
    # critical sets of size floor(n^2/4) exist at every order
    if result.best_size > nelder_scs(n):
        raise CritsetError(f"smallest critical set {result.best_size} exceeds floor(n^2/4) at order {n}")
    return result


def random_latin_square(n: int, seed: int) -> PartialLatinSquare:
    """A Latin square filled cell by cell with shuffled symbols, keeping only completable choices."""
    rng = random.Random(seed)
    P = PartialLatinSquare(n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            symbols = list(range(1, n + 1))
            rng.shuffle(symbols)
            used = {P.get(i, c) for c in range(1, j)} | {P.get(r, j) for r in range(1, i)}
            for k in symbols:
                if k in used:
                    continue
                trial = insert(P, (i, j, k))
                if has_completion(trial):
                    P = trial
                    break
    return P


def _greedy_run(args: tuple[PartialLatinSquare, int]) -> PartialLatinSquare:
    L, run_seed = args
    return minimalize(L, random_policy(run_seed))


def greedy_large(L: PartialLatinSquare, restarts: int, seed: int, workers: int | None = None) -> SearchResult:
    """Best of restarts random-order greedy descents from the full square L."""
    if restarts < 1:
        raise PreconditionError("restarts >= 1")
    if not is_latin_square(L):
        raise PreconditionError("L is a Latin square")
    run_seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(restarts)]
    witnesses = parallel_map(_greedy_run, [(L, s) for s in run_seeds], max_workers=workers)
    best = pick_best(witnesses)
    logging.info(
        f"Greedy search order {L.order}: best {best.size} over {restarts} restarts "
        f"(sizes {min(w.size for w in witnesses)}..{best.size})"
    )
    return SearchResult(
        order=L.order,
        best_size=best.size,
        witness=best,
        host=L,
        mode="greedy",
        squares_examined=1,
        subsets_examined=restarts * L.size,
        seed=seed,
        restarts=restarts,
        size_spectrum=sorted({w.size for w in witnesses}),
        host_intercalates=len(find_intercalates(L)),
    )


def render_result(result: SearchResult) -> str:
    lines = [
        f"order {result.order}",
        f"mode {result.mode}",
        f"objective {result.objective}",
        f"best_size {result.best_size}",
        f"squares_examined {result.squares_examined}",
        f"subsets_examined {result.subsets_examined}",
        f"size_spectrum {' '.join(map(str, result.size_spectrum))}",
        f"host_intercalates {result.host_intercalates}",
    ]
    if result.mode == "exact":
        lines.append(f"reduction {result.reduction}")
    else:
        lines.append(f"seed {result.seed}")
        lines.append(f"restarts {result.restarts}")
    return "\n".join(lines) + "\n" + serialize(result.witness, header="witness") + serialize(result.host, header="host")


def _check_critical_set(name: str) -> CorpusCheck:
    entry = corpus_service.get(name)
    C = entry.square
    check = CorpusCheck(name=name, kind=entry.kind, size=C.size, claimed_size=entry.claimed_size)
    report = analyze(C)
    check.critical = report.is_critical
    if not report.is_uc:
        check.failures.append(f"not uniquely completable ({report.completion_count} completions found)")
        return check
    if report.removable_entries:
        removable = " ".join(map(str, report.removable_entries))
        check.failures.append(f"not minimal: removable entries {removable}")
    if entry.completion is not None and entry.completion != report.completion:
        check.failures.append("stored completion differs from the solver's completion")
    check.profile = emptiness_profile(C)
    expected = corpus_service.expected_profile(name)
    if expected is not None and check.profile != expected:
        check.failures.append(f"emptiness profile {tuple(check.profile)} != expected {tuple(expected)}")
    check.lemma_checks = lemma_checks(C, report.completion)
    for result in check.lemma_checks:
        check.failures.extend(f"{result.name}: {v}" for v in result.violations)
    if C.order >= 2 and C.size > theorem_bound(C.order):
        check.failures.append(f"size {C.size} exceeds n^2-3n+3 = {theorem_bound(C.order)}")
    return check


def verify_corpus() -> CorpusReport:
    """Re-derive every claim the corpus makes about its entries."""
    checks = []
    for name in corpus_service.list_names():
        entry = corpus_service.get(name)
        if entry.kind == "critical-set":
            check = _check_critical_set(name)
        else:
            check = CorpusCheck(name=name, kind=entry.kind, size=entry.square.size, claimed_size=entry.claimed_size)
            if entry.kind == "latin-square" and not is_latin_square(entry.square):
                check.failures.append("not a full Latin square")
            if entry.kind == "trade-pair" and not verify_trade(entry.data[0], entry.data[1]):
                check.failures.append("pair is not a Latin interchange with its disjoint mate")
        if check.size != check.claimed_size:
            check.failures.append(f"size {check.size} != claimed {check.claimed_size}")
        for failure in check.failures:
            logging.error(f"Corpus entry {name}: {failure}")
        checks.append(check)
        logging.info(f"Corpus entry {name}: {'ok' if check.passed else 'FAILED'}")
    return CorpusReport(checks=checks)
