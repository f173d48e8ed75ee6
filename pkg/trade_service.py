import logging
from itertools import combinations

from exceptions import CapabilityError, NotSubsetError, PreconditionError
from models import Intercalate, PartialLatinSquare, Trade, Triple
from pls_service import difference, is_subset, line_sets, remove, restrict
from solver_service import all_latin_squares, enumerate_completions, has_completion

MAX_TRADE_ENUMERATION_ORDER = 4


def verify_trade(I: PartialLatinSquare, mate: PartialLatinSquare) -> bool:
    """Same order and shape, disjoint, and mutually balanced by rows and columns."""
    if I.order != mate.order or I.size == 0:
        return False
    if I.shape() != mate.shape():
        return False
    if any(mate.get(i, j) == k for i, j, k in I):
        return False
    a, b = line_sets(I), line_sets(mate)
    return a.R == b.R and a.C == b.C


def _forbid_symbols_of(I: PartialLatinSquare) -> dict[tuple[int, int], set[int]]:
    return {(i, j): {k} for i, j, k in I}


def find_mate(L: PartialLatinSquare, I: PartialLatinSquare) -> PartialLatinSquare | None:
    """
    First disjoint mate I' of I such that (L minus I) plus I' is a Latin
    square, or None. Searches completions of L minus I that disagree with L
    on every cell of I.
    """
    if not is_subset(I, L):
        raise NotSubsetError("interchange is not contained in the Latin square")
    if I.size == 0:
        return None
    found = enumerate_completions(difference(L, I), 1, forbid=_forbid_symbols_of(I))
    if not found:
        return None
    return restrict(found[0], I.shape())


def is_trade_in(L: PartialLatinSquare, I: PartialLatinSquare) -> bool:
    if not is_subset(I, L):
        raise NotSubsetError("interchange is not contained in the Latin square")
    if I.size == 0:
        return False
    return has_completion(difference(L, I), forbid=_forbid_symbols_of(I))


def apply_trade(L: PartialLatinSquare, trade: Trade) -> PartialLatinSquare:
    """(L minus I) plus I'."""
    rows = L.rows()
    for i, j, k in trade.mate:
        rows[i - 1][j - 1] = k
    return PartialLatinSquare.from_rows(rows)


def witness_trade(L: PartialLatinSquare, C: PartialLatinSquare, t: Triple | tuple[int, int, int]) -> Trade:
    """
    A trade I in L with I meeting C exactly in t, built from the cells where L
    and the first other completion of C minus t disagree.
    """
    t = Triple(*t)
    if t not in C:
        raise PreconditionError("entry belongs to C", f"{t} is not an entry")
    if not is_subset(C, L):
        raise PreconditionError("C is contained in L")
    if enumerate_completions(C, 2) != [L]:
        raise PreconditionError("C is uniquely completable to L")
    alternatives = [S for S in enumerate_completions(remove(C, t), 2) if S != L]
    if not alternatives:
        raise PreconditionError("C minus the entry is not uniquely completable", f"removing {t} keeps C uniquely completable")
    other = alternatives[0]
    differing = frozenset(
        (i, j) for i, j, k in L if other.get(i, j) != k
    )
    trade = Trade(interchange=restrict(L, differing), mate=restrict(other, differing))
    logging.debug(f"Witness trade of size {trade.size} for {t}")
    return trade


def all_trades(L: PartialLatinSquare) -> list[PartialLatinSquare]:
    """
    Every subset of L that is a Latin interchange in L. A subset I qualifies
    exactly when some other Latin square agrees with L off I and nowhere on I,
    so the trades are the disagreement sets of L with every other square.
    """
    if L.order > MAX_TRADE_ENUMERATION_ORDER:
        raise CapabilityError(
            f"trade enumeration is limited to order <= {MAX_TRADE_ENUMERATION_ORDER}; use witness-based checks"
        )
    if not L.is_full:
        raise PreconditionError("L is a Latin square")
    trades = set()
    for other in all_latin_squares(L.order):
        if other == L:
            continue
        differing = frozenset((i, j) for i, j, k in L if other.get(i, j) != k)
        trades.add(restrict(L, differing))
    return sorted(trades, key=lambda I: (I.size, I.grid()))


def find_intercalates(L: PartialLatinSquare) -> list[Intercalate]:
    n = L.order
    found = []
    for r1, r2 in combinations(range(1, n + 1), 2):
        for c1, c2 in combinations(range(1, n + 1), 2):
            a, b = L.get(r1, c1), L.get(r1, c2)
            if a is None or b is None:
                continue
            if L.get(r2, c1) == b and L.get(r2, c2) == a:
                found.append(Intercalate(rows=(r1, r2), cols=(c1, c2), symbols=tuple(sorted((a, b)))))
    return found


def intercalate_trade(L: PartialLatinSquare, ic: Intercalate) -> Trade:
    (r1, r2), (c1, c2) = ic.rows, ic.cols
    cells = [(r1, c1), (r1, c2), (r2, c1), (r2, c2)]
    interchange = restrict(L, frozenset(cells))
    # the swapped 2x2 subsquare
    mate = PartialLatinSquare(
        L.order,
        [
            Triple(r1, c1, L.get(r1, c2)),
            Triple(r1, c2, L.get(r1, c1)),
            Triple(r2, c1, L.get(r2, c2)),
            Triple(r2, c2, L.get(r2, c1)),
        ],
    )
    return Trade(interchange=interchange, mate=mate)


def max_intercalates(n: int) -> int:
    """I(n): the largest intercalate count over all Latin squares of order n (n <= 4)."""
    if n > MAX_TRADE_ENUMERATION_ORDER:
        raise CapabilityError(f"I(n) is only computed exhaustively for n <= {MAX_TRADE_ENUMERATION_ORDER}")
    return max(len(find_intercalates(L)) for L in all_latin_squares(n))
