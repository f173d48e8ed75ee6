import logging
from functools import lru_cache
from typing import Mapping

from exceptions import CapabilityError, InfeasibleError, NotUniqueError
from models import CompletionCount, PartialLatinSquare

DEFAULT_CAP = 2

# (row, col) -> symbols that may not be placed there; all 1-indexed
Forbid = Mapping[tuple[int, int], set[int] | frozenset[int]]

State = tuple[list[int], list[int], list[int]]


class CompletionSolver:
    """
    Backtracking completion search over one partial square.

    Candidate sets are symbol bitmasks: bit k-1 set means symbol k. The state
    is a flat row-major grid plus per-row and per-column used-symbol masks;
    branches copy the three lists.
    """

    def __init__(self, P: PartialLatinSquare, forbid: Forbid | None = None):
        n = P.order
        self.n = n
        self.full = (1 << n) - 1
        self.forbid = [0] * (n * n)
        for (i, j), symbols in (forbid or {}).items():
            for k in symbols:
                self.forbid[(i - 1) * n + (j - 1)] |= 1 << (k - 1)
        grid = [v for row in P.grid() for v in row]
        rows, cols = [0] * n, [0] * n
        self.consistent = True
        for idx, v in enumerate(grid):
            if v:
                bit = 1 << (v - 1)
                rows[idx // n] |= bit
                cols[idx % n] |= bit
                if self.forbid[idx] & bit:
                    self.consistent = False
        self.start: State = (grid, rows, cols)
        self.nodes = 0

    def _copy_start(self) -> State:
        grid, rows, cols = self.start
        return grid[:], rows[:], cols[:]

    def _place(self, state: State, idx: int, bit: int) -> None:
        grid, rows, cols = state
        grid[idx] = bit.bit_length()
        rows[idx // self.n] |= bit
        cols[idx % self.n] |= bit

    def candidates(self, state: State, idx: int) -> int:
        grid, rows, cols = state
        if grid[idx]:
            return 0
        return self.full & ~(rows[idx // self.n] | cols[idx % self.n] | self.forbid[idx])

    def propagate(self, state: State) -> bool:
        """Fill forced cells to a fixpoint; False on contradiction."""
        n, full, forbid = self.n, self.full, self.forbid
        grid, rows, cols = state
        while True:
            changed = False
            for idx in range(n * n):
                if grid[idx]:
                    continue
                cand = full & ~(rows[idx // n] | cols[idx % n] | forbid[idx])
                if not cand:
                    return False
                if not cand & (cand - 1):
                    self._place(state, idx, cand)
                    changed = True
            for line in range(n):
                for by_row in (True, False):
                    missing = full & ~(rows[line] if by_row else cols[line])
                    while missing:
                        bit = missing & -missing
                        missing ^= bit
                        spot, count = -1, 0
                        for other in range(n):
                            idx = line * n + other if by_row else other * n + line
                            if grid[idx]:
                                continue
                            blocked = (cols[other] if by_row else rows[other]) | forbid[idx]
                            if not blocked & bit:
                                count += 1
                                spot = idx
                                if count > 1:
                                    break
                        if count == 0:
                            return False
                        if count == 1:
                            self._place(state, spot, bit)
                            changed = True
            if not changed:
                return True

    def _choose_mrv(self, state: State) -> int:
        best, best_count = -1, self.n + 1
        for idx in range(self.n * self.n):
            if state[0][idx]:
                continue
            count = self.candidates(state, idx).bit_count()
            if count < best_count:
                best, best_count = idx, count
        return best

    def _choose_first(self, state: State) -> int:
        grid = state[0]
        for idx in range(self.n * self.n):
            if not grid[idx]:
                return idx
        return -1

    def _search(self, limit: int | None, mrv: bool, collect: bool) -> tuple[int, list[list[int]]]:
        found, solutions = 0, []
        if not self.consistent:
            return 0, solutions
        choose = self._choose_mrv if mrv else self._choose_first
        stack = [self._copy_start()]
        while stack and (limit is None or found < limit):
            state = stack.pop()
            self.nodes += 1
            if not self.propagate(state):
                continue
            idx = choose(state)
            if idx < 0:
                found += 1
                if collect:
                    solutions.append(state[0])
                continue
            cand = self.candidates(state, idx)
            bits = []
            while cand:
                bit = cand & -cand
                cand ^= bit
                bits.append(bit)
            # pushed high-to-low so the smallest symbol is explored first
            for bit in reversed(bits):
                child = (state[0][:], state[1][:], state[2][:])
                self._place(child, idx, bit)
                stack.append(child)
        return found, solutions

    def count(self, cap: int) -> int:
        return self._search(cap, mrv=True, collect=False)[0]

    def solutions(self, limit: int | None) -> list[list[int]]:
        return self._search(limit, mrv=False, collect=True)[1]

    def to_square(self, flat: list[int]) -> PartialLatinSquare:
        n = self.n
        return PartialLatinSquare._trusted(n, [flat[i * n:(i + 1) * n] for i in range(n)])


def count_completions(P: PartialLatinSquare, cap: int = DEFAULT_CAP, forbid: Forbid | None = None) -> CompletionCount:
    if cap < 1:
        raise ValueError("cap must be >= 1")
    solver = CompletionSolver(P, forbid)
    count = solver.count(cap)
    logging.debug(f"count_completions order={P.order} size={P.size} cap={cap} -> {count} ({solver.nodes} nodes)")
    return CompletionCount(count=count, capped=count >= cap, cap=cap)


def is_uniquely_completable(P: PartialLatinSquare, forbid: Forbid | None = None) -> bool:
    return count_completions(P, DEFAULT_CAP, forbid).count == 1


def has_completion(P: PartialLatinSquare, forbid: Forbid | None = None) -> bool:
    return count_completions(P, 1, forbid).count == 1


def enumerate_completions(
    P: PartialLatinSquare, limit: int | None = None, forbid: Forbid | None = None
) -> list[PartialLatinSquare]:
    """
    Up to limit completions of P in lexicographic row-major order
    (all of them when limit is None).
    """
    if limit is not None and limit < 1:
        raise ValueError("limit must be >= 1")
    solver = CompletionSolver(P, forbid)
    found = [solver.to_square(flat) for flat in solver.solutions(limit)]
    logging.debug(f"enumerate_completions order={P.order} size={P.size} limit={limit} -> {len(found)}")
    return found


def complete_unique(P: PartialLatinSquare) -> PartialLatinSquare:
    found = enumerate_completions(P, DEFAULT_CAP)
    if len(found) != 1:
        raise NotUniqueError(len(found), capped=len(found) >= DEFAULT_CAP)
    return found[0]


def propagate(P: PartialLatinSquare, forbid: Forbid | None = None) -> PartialLatinSquare:
    solver = CompletionSolver(P, forbid)
    state = solver._copy_start()
    if not solver.consistent or not solver.propagate(state):
        raise InfeasibleError(f"order-{P.order} partial square of size {P.size} has no completion")
    return solver.to_square(state[0])


@lru_cache(maxsize=8)
def all_latin_squares(n: int) -> tuple[PartialLatinSquare, ...]:
    if n > 4:
        raise CapabilityError(f"full enumeration of Latin squares is limited to order <= 4, got {n}")
    squares = tuple(enumerate_completions(PartialLatinSquare(n)))
    logging.info(f"Enumerated {len(squares)} Latin squares of order {n}")
    return squares
