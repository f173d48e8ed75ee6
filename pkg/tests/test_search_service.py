import pytest

import config
from bounds_service import nelder_scs, theorem_bound
from criticality_service import analyze, check_lemma_1_1, lemma_checks
from exceptions import CapabilityError, PreconditionError
from models import PartialLatinSquare
from pls_service import cyclic_square, is_subset, serialize
from search_service import (
    _host_spectrum,
    exhaustive_lcs,
    exhaustive_scs,
    greedy_large,
    pick_best,
    random_latin_square,
    reduced_squares,
    render_result,
    verify_corpus,
)
from solver_service import complete_unique


def _check_witness(result):
    W = result.witness
    assert W.size == result.best_size
    assert is_subset(W, result.host)
    assert analyze(W).is_critical
    assert complete_unique(W) == result.host


def test_reduced_squares_counts():
    assert [len(reduced_squares(n)) for n in (1, 2, 3, 4)] == [1, 1, 1, 4]


@pytest.mark.parametrize("n,expected", [(1, 0), (2, 1), (3, 3)])
def test_exhaustive_lcs_small(n, expected):
    result = exhaustive_lcs(n, workers=1)
    assert result.best_size == expected
    assert result.mode == "exact"
    _check_witness(result)


@pytest.mark.parametrize("n,expected", [(2, 1), (3, 2)])
def test_exhaustive_scs_small(n, expected):
    result = exhaustive_scs(n, workers=1)
    assert result.best_size == expected == nelder_scs(n)
    _check_witness(result)


@pytest.mark.slow
def test_exhaustive_order4():
    lcs = exhaustive_lcs(4, workers=1)
    assert lcs.best_size == 7 == theorem_bound(4)
    _check_witness(lcs)
    assert all(c.passed for c in lemma_checks(lcs.witness, lcs.host))
    assert check_lemma_1_1(lcs.witness, lcs.host).passed
    scs = exhaustive_scs(4, workers=1)
    assert scs.best_size == 4
    _check_witness(scs)
    assert lcs.size_spectrum == scs.size_spectrum
    assert min(lcs.size_spectrum) == 4
    assert max(lcs.size_spectrum) == 7


def test_exhaustive_guard():
    with pytest.raises(CapabilityError):
        exhaustive_lcs(5)
    with pytest.raises(CapabilityError):
        exhaustive_scs(0)


@pytest.mark.parametrize("n", [2, 3])
def test_exhaustive_without_shape_memo(n, monkeypatch):
    with_memo = [exhaustive_lcs(n, workers=1), exhaustive_scs(n, workers=1)]
    monkeypatch.setenv("CRITSET_MEMO_LIMIT", "0")
    config.get_settings.cache_clear()
    assert [exhaustive_lcs(n, workers=1), exhaustive_scs(n, workers=1)] == with_memo


def test_host_spectrum_without_shape_memo(monkeypatch):
    host = reduced_squares(3)[0]
    expected = _host_spectrum(host)
    monkeypatch.setenv("CRITSET_MEMO_LIMIT", "16")
    config.get_settings.cache_clear()
    assert _host_spectrum(host) == expected
    assert expected.spectrum == {2, 3}


def test_exhaustive_is_deterministic():
    assert exhaustive_lcs(3, workers=1) == exhaustive_lcs(3, workers=2)


def test_greedy_order1():
    result = greedy_large(cyclic_square(1), restarts=3, seed=0)
    assert result.best_size == 0


def test_greedy_order4_within_host_spectrum(cyclic4):
    result = greedy_large(cyclic4, restarts=40, seed=7, workers=1)
    _check_witness(result)
    spectrum = _host_spectrum(cyclic4).spectrum
    assert result.best_size in spectrum
    assert result.best_size <= max(spectrum) <= theorem_bound(4)
    assert set(result.size_spectrum) <= spectrum


def test_greedy_is_deterministic(cyclic4):
    first = greedy_large(cyclic4, restarts=12, seed=3, workers=1)
    assert greedy_large(cyclic4, restarts=12, seed=3, workers=1) == first
    assert greedy_large(cyclic4, restarts=12, seed=3, workers=3) == first


def test_greedy_preconditions(cyclic4):
    with pytest.raises(PreconditionError):
        greedy_large(cyclic4, restarts=0, seed=1)
    with pytest.raises(PreconditionError):
        greedy_large(PartialLatinSquare(4), restarts=1, seed=1)


@pytest.mark.slow
@pytest.mark.parametrize("n", [5, 6, 7])
def test_greedy_respects_theorem_bound(n):
    L = random_latin_square(n, seed=n)
    result = greedy_large(L, restarts=500, seed=1)
    _check_witness(result)
    assert result.best_size <= theorem_bound(n)
    if n == 5:
        assert result.best_size >= 9


def test_random_latin_square():
    L = random_latin_square(6, seed=4)
    assert L.is_full
    assert random_latin_square(6, seed=4) == L


def test_pick_best_tie_break():
    a = PartialLatinSquare.from_rows([[0, 1], [0, 0]])
    b = PartialLatinSquare.from_rows([[1, 0], [0, 0]])
    c = PartialLatinSquare.from_rows([[1, 2], [0, 0]])
    assert pick_best([a, b]) == a
    assert serialize(a) < serialize(b)
    assert pick_best([a, b, c]) == c
    assert pick_best([a, b, c], "smallest") == a


def test_render_result_lists_witness_and_host():
    text = render_result(exhaustive_lcs(2, workers=1))
    assert text.startswith("order 2\nmode exact\nobjective largest\nbest_size 1\n")
    assert "# witness\n2\n" in text
    assert "# host\n2\n1 2\n2 1\n" in text


@pytest.mark.slow
def test_verify_corpus_passes():
    report = verify_corpus()
    assert report.passed, [c.failures for c in report.checks if not c.passed]
    by_name = {c.name: c for c in report.checks}
    assert by_name["cs5-11"].critical
    assert by_name["cs9-44"].size == 44
    assert by_name["cs10-57"].profile.has_missing_symbol is False
