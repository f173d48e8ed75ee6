import logging
from itertools import permutations
from typing import Literal, Sequence

import numpy as np

from exceptions import CritsetError, OrderMismatchError, OutOfRangeError, ParseError
from models import LineSets, PartialLatinSquare, Triple, check_order

Role = Literal["row", "col", "symbol"]
IDENTITY_ROLES: tuple[Role, Role, Role] = ("row", "col", "symbol")
# all six conjugates; each tuple says which old coordinate feeds (row, col, symbol)
ROLE_PERMUTATIONS: list[tuple[Role, Role, Role]] = list(permutations(IDENTITY_ROLES))


def new_empty(order: int) -> PartialLatinSquare:
    check_order(order)
    return PartialLatinSquare(order)


def insert(P: PartialLatinSquare, t: Triple | tuple[int, int, int]) -> PartialLatinSquare:
    return PartialLatinSquare(P.order, [*P.triples(), Triple(*t)])


def remove(P: PartialLatinSquare, t: Triple | tuple[int, int, int]) -> PartialLatinSquare:
    t = Triple(*t)
    if t not in P:
        raise OutOfRangeError(f"{t} is not an entry of the partial square")
    rows = P.rows()
    rows[t.row - 1][t.col - 1] = 0
    return P.with_grid(rows)


def is_latin_square(P: PartialLatinSquare) -> bool:
    return P.is_full


def line_sets(P: PartialLatinSquare) -> LineSets:
    n = P.order
    R: dict[int, set[int]] = {i: set() for i in range(1, n + 1)}
    C: dict[int, set[int]] = {j: set() for j in range(1, n + 1)}
    E: dict[int, set[tuple[int, int]]] = {k: set() for k in range(1, n + 1)}
    for i, j, k in P:
        R[i].add(k)
        C[j].add(k)
        E[k].add((i, j))
    return LineSets(
        order=n,
        R={i: frozenset(s) for i, s in R.items()},
        C={j: frozenset(s) for j, s in C.items()},
        E={k: frozenset(s) for k, s in E.items()},
    )


def invert_roles(role_perm: Sequence[Role]) -> tuple[Role, Role, Role]:
    inverse: dict[Role, Role] = {}
    for target, source in zip(IDENTITY_ROLES, role_perm):
        inverse[source] = target
    return tuple(inverse[r] for r in IDENTITY_ROLES)  # type: ignore[return-value]


def conjugate(P: PartialLatinSquare, role_perm: Sequence[Role]) -> PartialLatinSquare:
    """
    Permute the roles of row, column and symbol in every triple. role_perm[a]
    names the old coordinate that becomes coordinate a of the new triple.
    """
    if sorted(role_perm) != sorted(IDENTITY_ROLES):
        raise OutOfRangeError(f"not a permutation of row/col/symbol: {tuple(role_perm)}")
    index = {"row": 0, "col": 1, "symbol": 2}
    picks = [index[r] for r in role_perm]
    return PartialLatinSquare(P.order, [Triple(*(t[p] for p in picks)) for t in P])


def apply_isotopy(
    P: PartialLatinSquare,
    row_perm: Sequence[int],
    col_perm: Sequence[int],
    sym_perm: Sequence[int],
) -> PartialLatinSquare:
    """Relabel rows, columns and symbols; perm[x - 1] is the image of x (1-indexed)."""
    n = P.order
    for perm in (row_perm, col_perm, sym_perm):
        if sorted(perm) != list(range(1, n + 1)):
            raise OutOfRangeError(f"not a permutation of 1..{n}: {list(perm)}")
    return PartialLatinSquare(
        n, [Triple(row_perm[i - 1], col_perm[j - 1], sym_perm[k - 1]) for i, j, k in P]
    )


def _check_same_order(A: PartialLatinSquare, B: PartialLatinSquare) -> None:
    if A.order != B.order:
        raise OrderMismatchError(f"orders differ: {A.order} vs {B.order}")


def is_subset(C: PartialLatinSquare, L: PartialLatinSquare) -> bool:
    _check_same_order(C, L)
    return all(t in L for t in C)


def difference(L: PartialLatinSquare, C: PartialLatinSquare) -> PartialLatinSquare:
    """Entries of L that are not entries of C (L minus C)."""
    _check_same_order(C, L)
    return PartialLatinSquare(L.order, [t for t in L if t not in C])


def restrict(L: PartialLatinSquare, cells: set[tuple[int, int]] | frozenset[tuple[int, int]]) -> PartialLatinSquare:
    """The entries of L lying on the given (row, col) positions."""
    return PartialLatinSquare(L.order, [t for t in L if (t.row, t.col) in cells])


def cyclic_square(n: int) -> PartialLatinSquare:
    check_order(n)
    return PartialLatinSquare._trusted(n, [[(i + j) % n + 1 for j in range(n)] for i in range(n)])


def xor_square(k: int) -> PartialLatinSquare:
    """Cayley table of the elementary abelian group of order 2**k."""
    n = 1 << k
    check_order(n)
    return PartialLatinSquare._trusted(n, [[(i ^ j) + 1 for j in range(n)] for i in range(n)])


def random_partial(order: int, density: float, rng: np.random.Generator) -> PartialLatinSquare:
    """Random partial square built by legal random insertions (about density*n^2 attempts)."""
    check_order(order)
    grid = np.zeros((order, order), dtype=np.int64)
    attempts = int(round(density * order * order))
    for _ in range(attempts):
        r, c, k = (int(v) for v in rng.integers(0, order, size=3))
        if grid[r, c] or (grid[r, :] == k + 1).any() or (grid[:, c] == k + 1).any():
            continue
        grid[r, c] = k + 1
    return PartialLatinSquare._trusted(order, grid.tolist())


def serialize(P: PartialLatinSquare, header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.append(str(P.order))
    width = len(str(P.order))
    lines.extend(" ".join(str(v).rjust(width) for v in row) for row in P.grid())
    return "\n".join(lines) + "\n"


def parse(text: str) -> PartialLatinSquare:
    """Parse the .pls grid format: order line, then n rows of n integers (0 = empty)."""
    body = [
        (lineno, line.strip())
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not body:
        raise ParseError("empty input, expected an order line")
    lineno, first = body[0]
    try:
        order = int(first)
    except ValueError:
        raise ParseError(f"order line is not an integer: {first!r}", line=lineno) from None
    try:
        check_order(order)
    except CritsetError as e:
        raise ParseError(str(e), line=lineno) from None
    rows = body[1:]
    if len(rows) != order:
        raise ParseError(f"expected {order} grid rows, found {len(rows)}", line=lineno)

    grid = [[0] * order for _ in range(order)]
    square = PartialLatinSquare._trusted(order, grid)
    for i, (lineno, line) in enumerate(rows, start=1):
        tokens = line.split()
        if len(tokens) != order:
            raise ParseError(f"expected {order} entries, found {len(tokens)}", line=lineno)
        for j, token in enumerate(tokens, start=1):
            try:
                value = int(token)
            except ValueError:
                raise ParseError(f"not an integer: {token!r}", line=lineno, cell=(i, j)) from None
            if not 0 <= value <= order:
                raise ParseError(f"symbol {value} outside 0..{order}", line=lineno, cell=(i, j))
            if value:
                try:
                    square = insert(square, (i, j, value))
                except CritsetError as e:
                    raise ParseError(str(e), line=lineno, cell=(i, j)) from None
    logging.debug(f"Parsed order-{order} partial square of size {square.size}")
    return square
