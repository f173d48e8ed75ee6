class CritsetError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigError(CritsetError):
    pass


class InvalidOrderError(CritsetError):
    pass


class OutOfRangeError(CritsetError):
    pass


class CellConflictError(CritsetError):
    pass


class RowConflictError(CritsetError):
    pass


class ColumnConflictError(CritsetError):
    pass


class OrderMismatchError(CritsetError):
    pass


class ParseError(CritsetError):
    """Malformed .pls text; names the offending line and, when known, the cell."""

    def __init__(self, message: str, line: int | None = None, cell: tuple[int, int] | None = None):
        self.line = line
        self.cell = cell
        where = []
        if line is not None:
            where.append(f"line {line}")
        if cell is not None:
            where.append(f"cell ({cell[0]},{cell[1]})")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class NotUniqueError(CritsetError):
    def __init__(self, count: int, capped: bool = False):
        self.count = count
        self.capped = capped
        found = f">= {count}" if capped else str(count)
        super().__init__(f"partial square is not uniquely completable ({found} completions)")


class InfeasibleError(CritsetError):
    pass


class PreconditionError(CritsetError):
    def __init__(self, precondition: str, detail: str = ""):
        self.precondition = precondition
        super().__init__(f"precondition failed: {precondition}" + (f" ({detail})" if detail else ""))


class CapabilityError(CritsetError):
    pass


class UnknownOrderError(CritsetError):
    pass


class NotFoundError(CritsetError):
    pass


class NotSubsetError(CritsetError):
    pass


class CorpusIntegrityError(CritsetError):
    pass
