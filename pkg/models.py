from typing import Any, Iterator, Literal, NamedTuple

from pydantic import BaseModel, ConfigDict, computed_field, model_validator
from pydantic_core import core_schema

from exceptions import (
    CellConflictError,
    ColumnConflictError,
    InvalidOrderError,
    OutOfRangeError,
    RowConflictError,
)

MAX_ORDER = 16


class Triple(NamedTuple):
    """One filled cell (row, col; symbol), all 1-indexed."""
    row: int
    col: int
    symbol: int

    def __str__(self) -> str:
        return f"({self.row},{self.col};{self.symbol})"


def check_order(order: int) -> None:
    if not isinstance(order, int) or order < 1 or order > MAX_ORDER:
        raise InvalidOrderError(f"order must be in 1..{MAX_ORDER}, got {order!r}")


class PartialLatinSquare:
    """
    Immutable order-n grid of optional symbols with the Latin property.

    Externally every coordinate is 1-indexed; the grid is stored row-major
    with 0 marking an empty cell.
    """

    __slots__ = ("_order", "_grid", "_size")

    def __init__(self, order: int, triples: Iterator[Triple] | list[Triple] = ()):
        check_order(order)
        grid = [[0] * order for _ in range(order)]
        for t in triples:
            _place(grid, order, Triple(*t))
        self._set(order, grid)

    def _set(self, order: int, grid: list[list[int]]) -> None:
        self._order = order
        self._grid = tuple(tuple(row) for row in grid)
        self._size = sum(1 for row in grid for v in row if v)

    @classmethod
    def from_rows(cls, rows: list[list[int]] | tuple[tuple[int, ...], ...]) -> "PartialLatinSquare":
        order = len(rows)
        check_order(order)
        triples = []
        for i, row in enumerate(rows, start=1):
            if len(row) != order:
                raise OutOfRangeError(f"row {i} has {len(row)} cells, expected {order}")
            triples.extend(Triple(i, j, v) for j, v in enumerate(row, start=1) if v)
        return cls(order, triples)

    @classmethod
    def _trusted(cls, order: int, grid: list[list[int]]) -> "PartialLatinSquare":
        # grid already known to satisfy the Latin property
        obj = cls.__new__(cls)
        obj._set(order, grid)
        return obj

    @property
    def order(self) -> int:
        return self._order

    @property
    def size(self) -> int:
        return self._size

    @property
    def is_full(self) -> bool:
        return self._size == self._order * self._order

    def get(self, row: int, col: int) -> int | None:
        v = self._grid[row - 1][col - 1]
        return v or None

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self._grid]

    def grid(self) -> tuple[tuple[int, ...], ...]:
        return self._grid

    def triples(self) -> list[Triple]:
        """Entries in row-major order."""
        return [
            Triple(i + 1, j + 1, v)
            for i, row in enumerate(self._grid)
            for j, v in enumerate(row)
            if v
        ]

    def shape(self) -> frozenset[tuple[int, int]]:
        return frozenset((t.row, t.col) for t in self.triples())

    def with_grid(self, grid: list[list[int]]) -> "PartialLatinSquare":
        return PartialLatinSquare._trusted(self._order, grid)

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples())

    def __contains__(self, t: object) -> bool:
        if not isinstance(t, tuple) or len(t) != 3:
            return False
        i, j, k = t
        return 1 <= i <= self._order and 1 <= j <= self._order and self._grid[i - 1][j - 1] == k

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PartialLatinSquare) and self._grid == other._grid

    def __hash__(self) -> int:
        return hash(self._grid)

    def __lt__(self, other: "PartialLatinSquare") -> bool:
        return self._grid < other._grid

    def __repr__(self) -> str:
        return f"PartialLatinSquare(order={self._order}, size={self._size})"

    @classmethod
    def __get_pydantic_core_schema__(cls, source: Any, handler: Any) -> core_schema.CoreSchema:
        def coerce(value: Any) -> "PartialLatinSquare":
            if isinstance(value, cls):
                return value
            if isinstance(value, (list, tuple)):
                return cls.from_rows(value)
            raise ValueError(f"cannot build a PartialLatinSquare from {type(value).__name__}")

        return core_schema.no_info_plain_validator_function(
            coerce,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda p: p.rows(), when_used="json"
            ),
        )


def _place(grid: list[list[int]], order: int, t: Triple) -> None:
    i, j, k = t
    for name, value in (("row", i), ("column", j), ("symbol", k)):
        if not isinstance(value, int) or not 1 <= value <= order:
            raise OutOfRangeError(f"{name} {value!r} of {t} outside 1..{order}")
    r, c = i - 1, j - 1
    if grid[r][c]:
        raise CellConflictError(f"cell ({i},{j}) already holds {grid[r][c]}, cannot place {k}")
    if k in grid[r]:
        raise RowConflictError(f"symbol {k} already in row {i}, cannot place at ({i},{j})")
    if any(grid[x][c] == k for x in range(order)):
        raise ColumnConflictError(f"symbol {k} already in column {j}, cannot place at ({i},{j})")
    grid[r][c] = k


class LineSets(BaseModel):
    model_config = ConfigDict(frozen=True)

    order: int
    R: dict[int, frozenset[int]]
    C: dict[int, frozenset[int]]
    E: dict[int, frozenset[tuple[int, int]]]


class CompletionCount(BaseModel):
    count: int
    capped: bool
    cap: int

    @model_validator(mode="after")
    def _capped_means_at_cap(self) -> "CompletionCount":
        if self.capped and self.count != self.cap:
            raise ValueError("capped count must equal the cap")
        return self


class Trade(BaseModel):
    """A Latin interchange together with one of its disjoint mates."""
    model_config = ConfigDict(frozen=True)

    interchange: PartialLatinSquare
    mate: PartialLatinSquare

    @property
    def size(self) -> int:
        return self.interchange.size


class Intercalate(NamedTuple):
    rows: tuple[int, int]
    cols: tuple[int, int]
    symbols: tuple[int, int]


class CriticalityReport(BaseModel):
    order: int
    size: int
    is_uc: bool
    is_critical: bool
    completion_count: int
    removable_entries: list[Triple] = []
    completion: PartialLatinSquare | None = None

    @model_validator(mode="after")
    def _critical_iff_uc_and_minimal(self) -> "CriticalityReport":
        if self.is_critical != (self.is_uc and not self.removable_entries):
            raise ValueError("is_critical must equal is_uc and no removable entries")
        return self


class UnionStats(BaseModel):
    order: int
    x: list[list[int]]
    f: list[int]
    lhs_sum: int
    rhs_sum: int

    @computed_field
    @property
    def residual(self) -> int:
        return self.lhs_sum - self.rhs_sum


class LemmaCheckResult(BaseModel):
    name: str
    applicable: bool
    violations: list[str] = []
    notes: list[str] = []

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if not self.passed:
            return f"{self.name}: FAIL ({len(self.violations)} violation(s))"
        return f"{self.name}: {'pass' if self.applicable else 'not applicable'}"


class EmptinessProfile(NamedTuple):
    has_empty_row: bool
    has_empty_col: bool
    has_missing_symbol: bool


class BoundsRow(BaseModel):
    n: int
    known_lcs: int | None
    known_is_exact: bool
    b_theorem: int
    b_conj1: int
    b_conj2: int

    @model_validator(mode="after")
    def _known_below_theorem(self) -> "BoundsRow":
        if self.n >= 2 and self.known_lcs is not None and self.known_lcs > self.b_theorem:
            raise ValueError(f"known lcs({self.n}) exceeds n^2-3n+3")
        return self


class SearchResult(BaseModel):
    order: int
    best_size: int
    witness: PartialLatinSquare
    host: PartialLatinSquare
    mode: Literal["exact", "greedy"]
    objective: Literal["largest", "smallest"] = "largest"
    squares_examined: int
    subsets_examined: int
    seed: int | None = None
    restarts: int | None = None
    reduction: str = "none"
    size_spectrum: list[int] = []
    host_intercalates: int = 0

    @model_validator(mode="after")
    def _witness_in_host(self) -> "SearchResult":
        if self.witness.size != self.best_size:
            raise ValueError("witness size must equal best_size")
        if not all(t in self.host for t in self.witness):
            raise ValueError("witness must be contained in its host")
        return self


class CorpusEntry(BaseModel):
    name: str
    kind: Literal["latin-square", "critical-set", "trade-pair"]
    data: list[PartialLatinSquare]
    claimed_size: int
    claims: list[str] = []
    completion: PartialLatinSquare | None = None

    @model_validator(mode="after")
    def _size_matches_claim(self) -> "CorpusEntry":
        if self.data[0].size != self.claimed_size:
            raise ValueError(f"{self.name}: size {self.data[0].size} != claimed {self.claimed_size}")
        return self

    @property
    def square(self) -> PartialLatinSquare:
        return self.data[0]


class CorpusCheck(BaseModel):
    name: str
    kind: str
    size: int
    claimed_size: int
    critical: bool | None = None
    profile: EmptinessProfile | None = None
    lemma_checks: list[LemmaCheckResult] = []
    failures: list[str] = []

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.failures


class CorpusReport(BaseModel):
    checks: list[CorpusCheck]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)
