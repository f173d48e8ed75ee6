import hashlib
import logging
from functools import lru_cache
from pathlib import Path

from config import get_settings
from exceptions import CorpusIntegrityError, NotFoundError
from models import CorpusEntry, EmptinessProfile, PartialLatinSquare
from pls_service import parse, serialize
from solver_service import complete_unique

CHECKSUM_FILE = "CHECKSUMS"
COMPLETION_SUFFIX = "-completion"
MATE_SUFFIX = "-mate"

# name -> (kind, claimed size, claims, expected emptiness profile)
CATALOG: dict[str, tuple[str, int, list[str], EmptinessProfile | None]] = {
    "ls4-cyclic": ("latin-square", 16, ["Latin square of order 4"], None),
    "trade3-pair": ("trade-pair", 7, ["disjoint and mutually balanced with its mate"], None),
    "cs5-11": (
        "critical-set",
        11,
        ["critical", "size 11", "every row has at most n-2 entries", "empty row, empty column, missing symbol"],
        EmptinessProfile(True, True, True),
    ),
    "cs7-25": (
        "critical-set",
        25,
        ["critical", "size 25", "empty row, empty column, missing symbol"],
        EmptinessProfile(True, True, True),
    ),
    "cs9-44": (
        "critical-set",
        44,
        ["critical", "size 44", "empty row, empty column, missing symbol"],
        EmptinessProfile(True, True, True),
    ),
    "cs10-57": (
        "critical-set",
        57,
        ["critical", "size 57", "empty row and column but every symbol occurs"],
        EmptinessProfile(True, True, False),
    ),
}


def corpus_dir() -> Path:
    return get_settings().corpus_dir


@lru_cache(maxsize=1)
def _checksums() -> dict[str, str]:
    path = corpus_dir() / CHECKSUM_FILE
    sums = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            digest, filename = line.split()
            sums[filename] = digest
    return sums


def _read(filename: str) -> PartialLatinSquare:
    path = corpus_dir() / filename
    raw = path.read_bytes()
    expected = _checksums().get(filename)
    if expected is None:
        raise CorpusIntegrityError(f"{filename} is not pinned in {CHECKSUM_FILE}")
    if hashlib.sha256(raw).hexdigest() != expected:
        raise CorpusIntegrityError(f"{filename} does not match its pinned checksum")
    return parse(raw.decode("utf-8"))


def list_names() -> list[str]:
    return list(CATALOG)


def expected_profile(name: str) -> EmptinessProfile | None:
    return CATALOG[name][3]


def completion_path(name: str) -> Path:
    return corpus_dir() / f"{name}{COMPLETION_SUFFIX}.pls"


def _stored_completion(name: str) -> PartialLatinSquare | None:
    path = completion_path(name)
    if not path.exists():
        return None
    return parse(path.read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def get(name: str) -> CorpusEntry:
    if name not in CATALOG:
        raise NotFoundError(f"no corpus entry named {name!r} (known: {', '.join(CATALOG)})")
    kind, claimed_size, claims, _ = CATALOG[name]
    data = [_read(f"{name}.pls")]
    if kind == "trade-pair":
        data.append(_read(f"{name}{MATE_SUFFIX}.pls"))
    completion = _stored_completion(name) if kind == "critical-set" else None
    logging.debug(f"Loaded corpus entry {name} (size {data[0].size})")
    return CorpusEntry(
        name=name,
        kind=kind,
        data=data,
        claimed_size=claimed_size,
        claims=claims,
        completion=completion,
    )


def completion_of(name: str) -> PartialLatinSquare:
    """Stored completion when present, otherwise derived by the solver."""
    entry = get(name)
    if entry.kind == "latin-square":
        return entry.square
    return entry.completion or complete_unique(entry.square)


def derive_completions() -> list[Path]:
    """Write <name>-completion.pls for every critical-set entry."""
    written = []
    for name, (kind, *_rest) in CATALOG.items():
        if kind != "critical-set":
            continue
        L = complete_unique(get(name).square)
        path = completion_path(name)
        path.write_text(serialize(L, header=f"[DERIVED] unique completion of {name}, computed by the solver"), encoding="utf-8")
        written.append(path)
        logging.info(f"Wrote {path}")
    get.cache_clear()
    return written


def load_square(ref: str) -> PartialLatinSquare:
    """A .pls path, or a corpus name (optionally with the -completion suffix)."""
    path = Path(ref)
    if path.exists():
        return parse(path.read_text(encoding="utf-8"))
    stem = ref[:-4] if ref.endswith(".pls") else ref
    if stem.endswith(COMPLETION_SUFFIX) and stem[: -len(COMPLETION_SUFFIX)] in CATALOG:
        return completion_of(stem[: -len(COMPLETION_SUFFIX)])
    if stem.endswith(MATE_SUFFIX) and stem[: -len(MATE_SUFFIX)] in CATALOG:
        return get(stem[: -len(MATE_SUFFIX)]).data[1]
    if stem in CATALOG:
        return get(stem).square
    raise NotFoundError(f"{ref!r} is neither a readable file nor a corpus entry")
