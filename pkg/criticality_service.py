import logging
import random
from typing import Callable, Literal

import numpy as np

from exceptions import PreconditionError
from extensions import parallel_map
from models import (
    CriticalityReport,
    EmptinessProfile,
    LemmaCheckResult,
    PartialLatinSquare,
    Triple,
    UnionStats,
)
from pls_service import is_subset, line_sets, remove
from solver_service import complete_unique, enumerate_completions, is_uniquely_completable
from trade_service import MAX_TRADE_ENUMERATION_ORDER, all_trades, witness_trade

RemovalPolicy = Callable[[list[Triple]], list[Triple]]

MAX_LISTED_VIOLATIONS = 10


def row_major_policy(entries: list[Triple]) -> list[Triple]:
    return sorted(entries)


def random_policy(seed: int) -> RemovalPolicy:
    rng = random.Random(seed)

    def policy(entries: list[Triple]) -> list[Triple]:
        order = sorted(entries)
        rng.shuffle(order)
        return order

    return policy


def _uc_without(args: tuple[PartialLatinSquare, Triple]) -> bool:
    C, t = args
    return is_uniquely_completable(remove(C, t))


def analyze(C: PartialLatinSquare, workers: int | None = 1) -> CriticalityReport:
    """Unique completability of C and of every single-entry removal."""
    found = enumerate_completions(C, 2)
    is_uc = len(found) == 1
    removable: list[Triple] = []
    if is_uc:
        entries = C.triples()
        flags = parallel_map(_uc_without, [(C, t) for t in entries], max_workers=workers)
        removable = [t for t, keeps_uc in zip(entries, flags) if keeps_uc]
    report = CriticalityReport(
        order=C.order,
        size=C.size,
        is_uc=is_uc,
        is_critical=is_uc and not removable,
        completion_count=len(found),
        removable_entries=removable,
        completion=found[0] if is_uc else None,
    )
    logging.debug(
        f"analyze order={C.order} size={C.size}: uc={report.is_uc} critical={report.is_critical} "
        f"removable={len(removable)}"
    )
    return report


def is_critical(C: PartialLatinSquare) -> bool:
    return analyze(C).is_critical


def minimalize(C: PartialLatinSquare, removal_order: RemovalPolicy = row_major_policy) -> PartialLatinSquare:
    """
    Greedy descent to a critical subset. One pass is enough: an entry that is
    not removable stays non-removable once more entries are gone.
    """
    if not is_uniquely_completable(C):
        raise PreconditionError("C is uniquely completable")
    current = C
    for t in removal_order(C.triples()):
        candidate = remove(current, t)
        if is_uniquely_completable(candidate):
            current = candidate
    return current


def _require_critical(C: PartialLatinSquare, L: PartialLatinSquare | None) -> PartialLatinSquare:
    report = analyze(C)
    if not report.is_critical:
        raise PreconditionError("C is a critical set", "uniquely completable but not minimal" if report.is_uc else "not uniquely completable")
    if L is None:
        return report.completion
    if L != report.completion:
        raise PreconditionError("L is the completion of C")
    return L


def _capped(violations: list[str]) -> list[str]:
    if len(violations) <= MAX_LISTED_VIOLATIONS:
        return violations
    extra = len(violations) - MAX_LISTED_VIOLATIONS
    return violations[:MAX_LISTED_VIOLATIONS] + [f"... and {extra} more"]


def check_lemma_1_1(C: PartialLatinSquare, L: PartialLatinSquare) -> LemmaCheckResult:
    """
    Trade characterisation of criticality: C meets every interchange in L
    (checked when L has order <= 4) and each entry of C is the sole
    intersection of some interchange with C.
    """
    if not is_subset(C, L):
        raise PreconditionError("C is contained in L")
    violations: list[str] = []
    notes: list[str] = []
    if L.order <= MAX_TRADE_ENUMERATION_ORDER:
        trades = all_trades(L)
        missed = [I for I in trades if not any(t in C for t in I)]
        violations.extend(
            f"part 1: interchange {' '.join(map(str, I))} contains no entry of C" for I in missed
        )
        notes.append(f"part 1: {len(trades)} interchanges checked")
    else:
        notes.append(f"part 1: not checked at order {L.order} (> {MAX_TRADE_ENUMERATION_ORDER})")
    for t in C:
        try:
            witness_trade(L, C, t)
        except PreconditionError as e:
            violations.append(f"part 2: no interchange meets C only in {t}: {e}")
    return LemmaCheckResult(name="Lemma 1.1", applicable=True, violations=_capped(violations), notes=notes)


def check_lemma_3_1(C: PartialLatinSquare, L: PartialLatinSquare | None = None, assume_critical: bool = False) -> LemmaCheckResult:
    """A row one short of full forces its missing symbol and column out of C."""
    if not assume_critical:
        L = _require_critical(C, L)
    elif L is None:
        L = complete_unique(C)
    n = C.order
    sets = line_sets(C)
    violations, notes = [], []
    applicable = False
    for i in range(1, n + 1):
        if len(sets.R[i]) != n - 1:
            continue
        applicable = True
        j = next(c for c in range(1, n + 1) if C.get(i, c) is None)
        k = L.get(i, j)
        notes.append(f"row {i}: missing ({i},{j};{k})")
        if sets.E[k]:
            violations.append(f"row {i}: missing symbol {k} occurs {len(sets.E[k])} time(s) in C")
        if sets.C[j]:
            violations.append(f"row {i}: column {j} of the missing cell is not empty ({len(sets.C[j])} entries)")
    return LemmaCheckResult(name="Lemma 3.1", applicable=applicable, violations=violations, notes=notes)


def check_lemma_3_2(C: PartialLatinSquare, L: PartialLatinSquare | None = None, assume_critical: bool = False) -> LemmaCheckResult:
    """
    For every partly filled row: (1) each filled column has, below or above,
    an empty-in-C cell holding one of the row's missing symbols; (2) each
    filled symbol is absent from C in one of the row's empty columns.
    """
    if not assume_critical:
        L = _require_critical(C, L)
    elif L is None:
        L = complete_unique(C)
    if not is_subset(C, L):
        raise PreconditionError("C is contained in L")
    n = C.order
    cols = range(1, n + 1)
    violations = []
    applicable = False
    for i in range(1, n + 1):
        empty_cols = [c for c in cols if C.get(i, c) is None]
        filled_cols = [c for c in cols if C.get(i, c) is not None]
        if not empty_cols or not filled_cols:
            continue
        applicable = True
        missing_symbols = {L.get(i, c) for c in empty_cols}
        for x in filled_cols:
            if not any(
                r != i and C.get(r, x) is None and L.get(r, x) in missing_symbols for r in range(1, n + 1)
            ):
                violations.append(f"row {i}, part 1: column {x} has every missing symbol of row {i} in C")
        for x in filled_cols:
            e = C.get(i, x)
            absent_somewhere = False
            for c in empty_cols:
                s = next(r for r in range(1, n + 1) if L.get(r, c) == e)
                if C.get(s, c) is None:
                    absent_somewhere = True
                    break
            if not absent_somewhere:
                violations.append(f"row {i}, part 2: symbol {e} is in C in every empty column of row {i}")
    return LemmaCheckResult(name="Lemma 3.2", applicable=applicable, violations=violations)


def union_stats(C: PartialLatinSquare) -> UnionStats:
    """x[i][j] = |R_i union C_j|, f_k = n - 2 - |E_k|, and both sides of the counting identity."""
    n = C.order
    in_row = np.zeros((n, n), dtype=np.int64)  # row x symbol
    in_col = np.zeros((n, n), dtype=np.int64)  # column x symbol
    for i, j, k in C:
        in_row[i - 1, k - 1] = 1
        in_col[j - 1, k - 1] = 1
    x = in_row.sum(axis=1)[:, None] + in_col.sum(axis=1)[None, :] - in_row @ in_col.T
    e_counts = in_row.sum(axis=0)
    return UnionStats(
        order=n,
        x=x.tolist(),
        f=(n - 2 - e_counts).tolist(),
        lhs_sum=int(x.sum()),
        rhs_sum=int(n**3 - ((n - e_counts) ** 2).sum()),
    )


def empty_cell_bound(C: PartialLatinSquare, L: PartialLatinSquare, stats: UnionStats | None = None) -> LemmaCheckResult:
    """Every cell of L outside C must have x[i][j] <= n - 1 (a full union would leave it unfillable)."""
    stats = stats or union_stats(C)
    n = C.order
    violations = [
        f"cell ({i},{j}): x = {stats.x[i - 1][j - 1]}"
        for i, j, _ in L
        if C.get(i, j) is None and stats.x[i - 1][j - 1] > n - 1
    ]
    return LemmaCheckResult(name="empty-cell union bound", applicable=C.size < n * n, violations=violations)


def line_count_guard(C: PartialLatinSquare) -> LemmaCheckResult:
    n = C.order
    sets = line_sets(C)
    violations = []
    for label, family in (("row", sets.R), ("column", sets.C), ("symbol", sets.E)):
        violations.extend(f"{label} {key} has {len(v)} = n entries" for key, v in family.items() if len(v) > n - 1)
    return LemmaCheckResult(name="line count guard", applicable=True, violations=violations)


def passes_line_count_guard(C: PartialLatinSquare) -> bool:
    return line_count_guard(C).passed


def emptiness_profile(C: PartialLatinSquare) -> EmptinessProfile:
    sets = line_sets(C)
    return EmptinessProfile(
        has_empty_row=any(not s for s in sets.R.values()),
        has_empty_col=any(not s for s in sets.C.values()),
        has_missing_symbol=any(not s for s in sets.E.values()),
    )


def theorem_case(C: PartialLatinSquare) -> Literal[1, 2, 3] | None:
    """
    Row profile used by the upper-bound argument: 1 if some row has n-1
    entries, 2 if every row has at most n-3, 3 if every row has at most n-2
    with some row at n-2. None when a row is full.
    """
    n = C.order
    counts = [len(s) for s in line_sets(C).R.values()]
    if max(counts) >= n:
        return None
    if n - 1 in counts:
        return 1
    if max(counts) <= n - 3:
        return 2
    return 3


def lemma_checks(C: PartialLatinSquare, L: PartialLatinSquare) -> list[LemmaCheckResult]:
    """All structural checks for a set already known to be critical with completion L."""
    stats = union_stats(C)
    checks = [
        check_lemma_3_1(C, L, assume_critical=True),
        check_lemma_3_2(C, L, assume_critical=True),
        line_count_guard(C),
        empty_cell_bound(C, L, stats),
    ]
    if stats.residual:
        checks.append(
            LemmaCheckResult(name="counting identity", applicable=True, violations=[f"residual {stats.residual}"])
        )
    return checks
