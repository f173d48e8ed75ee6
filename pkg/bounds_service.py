import csv
import io
import logging
import math

import sympy

from exceptions import OutOfRangeError, UnknownOrderError
from models import BoundsRow

# lcs(n) for n = 1..10 as (value, exact); False marks a lower bound.
# n <= 4 and n = 6, 8 from the published small-order literature, n = 5 and the
# n = 7 bound due to Khodkar, n = 9, 10 from the critical sets shipped in corpus/.
KNOWN_LCS: dict[int, tuple[int, bool]] = {
    1: (0, True),
    2: (1, True),
    3: (3, True),
    4: (7, True),
    5: (11, True),
    6: (18, True),
    7: (25, False),
    8: (37, False),
    9: (44, False),
    10: (57, False),
}

MAX_STINSON_K = 30
_NEAR_INTEGER = 1e-9


def _check_n(n: int) -> None:
    if n < 1:
        raise OutOfRangeError(f"order must be >= 1, got {n}")


def curran_van_rees(n: int) -> int:
    _check_n(n)
    return n * n - n


def theorem_bound(n: int) -> int:
    _check_n(n)
    return n * n - 3 * n + 3


def nelder_lcs(n: int) -> int:
    """(n^2 - n)/2, the original largest-critical-set conjecture (false from n = 4)."""
    _check_n(n)
    return (n * n - n) // 2


def nelder_scs(n: int) -> int:
    """floor(n^2/4), the conjectured smallest critical set size."""
    _check_n(n)
    return n * n // 4


def _ceil_sqrt(m: int) -> int:
    root = math.isqrt(m)
    return root if root * root == m else root + 1


def conjecture_one(n: int) -> int:
    """floor(n^2 - n^(3/2)) = n^2 - ceil(sqrt(n^3)), exact in integers."""
    _check_n(n)
    return n * n - _ceil_sqrt(n**3)


def _ceil_n_pow_log2_3(n: int) -> int:
    # (3/4)^log2(n) * n^2 = n^log2(3)
    if n & (n - 1) == 0:
        return 3 ** (n.bit_length() - 1)
    direct = n ** math.log2(3)
    via_logs = math.exp(math.log(3) * math.log2(n))
    if math.ceil(direct) == math.ceil(via_logs) and abs(direct - round(direct)) > _NEAR_INTEGER * direct:
        return math.ceil(direct)
    logging.debug(f"Float evaluation of {n}^log2(3) is ambiguous; using high precision")
    value = sympy.N(sympy.Integer(n) ** (sympy.log(3) / sympy.log(2)), 60)
    return int(sympy.ceiling(value))


def conjecture_two(n: int) -> int:
    """floor((1 - (3/4)^log2(n)) * n^2) = n^2 - ceil(n^log2(3))."""
    _check_n(n)
    return n * n - _ceil_n_pow_log2_3(n)


def stinson_van_rees_lower(k: int) -> int:
    """Lower bound 4^k - 3^k for lcs(2^k)."""
    if not 0 <= k <= MAX_STINSON_K:
        raise OutOfRangeError(f"k must be in 0..{MAX_STINSON_K}, got {k}")
    return 4**k - 3**k


def known_lcs(n: int) -> tuple[int, bool]:
    if n not in KNOWN_LCS:
        raise UnknownOrderError(f"no recorded lcs value for order {n} (known for 1..10)")
    return KNOWN_LCS[n]


def bounds_row(n: int) -> BoundsRow:
    value, exact = KNOWN_LCS.get(n, (None, False))
    return BoundsRow(
        n=n,
        known_lcs=value,
        known_is_exact=exact,
        b_theorem=theorem_bound(n),
        b_conj1=conjecture_one(n),
        b_conj2=conjecture_two(n),
    )


def bounds_table(n_max: int) -> list[BoundsRow]:
    _check_n(n_max)
    return [bounds_row(n) for n in range(1, n_max + 1)]


def _lcs_cell(row: BoundsRow) -> str:
    if row.known_lcs is None:
        return "?"
    return f"{'' if row.known_is_exact else '≥'}{row.known_lcs}"


TABLE_HEADER = ("n", "lcs", "n^2-3n+3", "floor(n^2-n^1.5)", "conj2")


def render_table(rows: list[BoundsRow]) -> str:
    body = [
        (str(r.n), _lcs_cell(r), str(r.b_theorem), str(r.b_conj1), str(r.b_conj2)) for r in rows
    ]
    widths = [max(len(line[c]) for line in [TABLE_HEADER, *body]) for c in range(len(TABLE_HEADER))]
    lines = [" | ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in [TABLE_HEADER, *body]]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(rows: list[BoundsRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "lcs", "lcs_exact", "n2_3n_3", "conj1", "conj2"])
    for r in rows:
        writer.writerow([
            r.n,
            "" if r.known_lcs is None else r.known_lcs,
            "" if r.known_lcs is None else str(r.known_is_exact).lower(),
            r.b_theorem,
            r.b_conj1,
            r.b_conj2,
        ])
    return out.getvalue()
