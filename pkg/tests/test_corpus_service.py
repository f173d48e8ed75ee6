import shutil

import pytest

import config
import corpus_service
from exceptions import CorpusIntegrityError, NotFoundError
from models import EmptinessProfile
from pls_service import is_subset, parse, serialize
from solver_service import complete_unique
from trade_service import verify_trade


@pytest.fixture
def corpus_copy(tmp_path, monkeypatch):
    target = tmp_path / "corpus"
    shutil.copytree(config.BASE_DIR / "corpus", target)
    monkeypatch.setenv("CRITSET_CORPUS_DIR", str(target))
    config.get_settings.cache_clear()
    corpus_service.get.cache_clear()
    corpus_service._checksums.cache_clear()
    yield target
    config.get_settings.cache_clear()
    corpus_service.get.cache_clear()
    corpus_service._checksums.cache_clear()


def test_list_names():
    assert corpus_service.list_names() == ["ls4-cyclic", "trade3-pair", "cs5-11", "cs7-25", "cs9-44", "cs10-57"]


@pytest.mark.parametrize("name", ["ls4-cyclic", "trade3-pair", "cs5-11", "cs7-25", "cs9-44", "cs10-57"])
def test_entries_load_with_claimed_size(name):
    entry = corpus_service.get(name)
    assert entry.square.size == entry.claimed_size
    assert parse(serialize(entry.square)) == entry.square


def test_claimed_sizes():
    assert corpus_service.get("cs7-25").claimed_size == 25
    assert corpus_service.get("ls4-cyclic").square.is_full


def test_trade_pair_is_a_trade():
    entry = corpus_service.get("trade3-pair")
    assert len(entry.data) == 2
    assert verify_trade(*entry.data)


def test_order10_profile():
    C = corpus_service.get("cs10-57").square
    assert all(C.get(10, j) is None for j in range(1, 11))
    assert all(C.get(i, 10) is None for i in range(1, 11))
    assert {t.symbol for t in C} == set(range(1, 11))
    assert corpus_service.expected_profile("cs10-57") == EmptinessProfile(True, True, False)


def test_unknown_name():
    with pytest.raises(NotFoundError):
        corpus_service.get("nope")


def test_load_square_by_name_and_path(tmp_path):
    assert corpus_service.load_square("cs5-11") == corpus_service.get("cs5-11").square
    assert corpus_service.load_square("cs5-11.pls") == corpus_service.get("cs5-11").square
    assert corpus_service.load_square("trade3-pair-mate") == corpus_service.get("trade3-pair").data[1]
    path = tmp_path / "sq.pls"
    path.write_text("2\n1 2\n2 1\n")
    assert corpus_service.load_square(str(path)).is_full
    with pytest.raises(NotFoundError):
        corpus_service.load_square(str(tmp_path / "missing.pls"))


def test_completion_of_matches_entry(cs5):
    L = corpus_service.completion_of("cs5-11")
    assert L.is_full
    assert all(t in L for t in cs5)
    assert corpus_service.load_square("cs5-11-completion") == L


@pytest.mark.parametrize("name", ["cs5-11", "cs7-25", "cs9-44", "cs10-57"])
def test_stored_completion_matches_solver(name):
    path = corpus_service.completion_path(name)
    assert path.read_text().startswith("# [DERIVED]")
    entry = corpus_service.get(name)
    assert entry.completion is not None
    assert entry.completion.is_full
    assert is_subset(entry.square, entry.completion)
    assert entry.completion == complete_unique(entry.square)


def test_checksum_mismatch_is_detected(corpus_copy):
    path = corpus_copy / "cs5-11.pls"
    path.write_text(path.read_text() + "# edited\n")
    with pytest.raises(CorpusIntegrityError):
        corpus_service.get("cs5-11")


@pytest.mark.slow
def test_derive_completions_writes_marked_files(corpus_copy):
    written = corpus_service.derive_completions()
    assert sorted(p.name for p in written) == [
        "cs10-57-completion.pls",
        "cs5-11-completion.pls",
        "cs7-25-completion.pls",
        "cs9-44-completion.pls",
    ]
    text = (corpus_copy / "cs5-11-completion.pls").read_text()
    assert text.startswith("# [DERIVED]")
    entry = corpus_service.get("cs5-11")
    assert entry.completion is not None
    assert entry.completion.is_full
