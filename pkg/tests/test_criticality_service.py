import numpy as np
import pytest

import corpus_service
from bounds_service import theorem_bound
from criticality_service import (
    analyze,
    check_lemma_1_1,
    check_lemma_3_1,
    check_lemma_3_2,
    empty_cell_bound,
    emptiness_profile,
    is_critical,
    lemma_checks,
    line_count_guard,
    minimalize,
    passes_line_count_guard,
    random_policy,
    row_major_policy,
    theorem_case,
    union_stats,
)
from exceptions import PreconditionError
from models import EmptinessProfile, PartialLatinSquare, Triple
from pls_service import cyclic_square, new_empty, random_partial
from solver_service import complete_unique


@pytest.fixture
def small3():
    return PartialLatinSquare(3, [Triple(1, 1, 1), Triple(1, 2, 2), Triple(2, 1, 2)])


def test_analyze_corpus_order5(cs5):
    report = analyze(cs5)
    assert report.is_uc
    assert report.is_critical
    assert report.removable_entries == []
    assert report.completion == complete_unique(cs5)


def test_analyze_full_order2(full2):
    report = analyze(full2)
    assert report.is_uc
    assert not report.is_critical
    assert report.removable_entries == full2.triples()


def test_analyze_empty_order1_is_critical():
    report = analyze(new_empty(1))
    assert report.is_critical
    assert report.size == 0


def test_analyze_small3(small3):
    assert is_critical(small3)


def test_analyze_not_uc():
    report = analyze(new_empty(3))
    assert not report.is_uc
    assert not report.is_critical
    assert report.completion is None
    assert report.completion_count == 2


def test_analyze_workers_do_not_change_result(cs5):
    assert analyze(cs5, workers=1) == analyze(cs5, workers=2)


def test_minimalize_full_order2(full2):
    C = minimalize(full2, row_major_policy)
    assert C.size == 1
    assert is_critical(C)


def test_minimalize_fixpoint(cs5):
    assert minimalize(cs5) == cs5


def test_minimalize_random_policy_order4(cyclic4):
    C = minimalize(cyclic4, random_policy(42))
    assert is_critical(C)
    assert 4 <= C.size <= theorem_bound(4)
    assert minimalize(cyclic4, random_policy(42)) == C


def test_minimalize_requires_uc():
    with pytest.raises(PreconditionError):
        minimalize(new_empty(2))


def test_lemma_1_1_passes_for_critical(small3):
    L = complete_unique(small3)
    result = check_lemma_1_1(small3, L)
    assert result.passed
    assert result.notes


def test_lemma_1_1_fails_for_full_square(cyclic4):
    result = check_lemma_1_1(cyclic4, cyclic4)
    assert not result.passed
    assert all(v.startswith("part 2") for v in result.violations if not v.startswith("..."))


def test_lemma_1_1_empty_set_misses_trade(full2):
    result = check_lemma_1_1(new_empty(2), full2)
    assert any(v.startswith("part 1") for v in result.violations)


def test_lemma_1_1_on_critical_sets_of_order4(cyclic4):
    for seed in range(3):
        C = minimalize(cyclic4, random_policy(seed))
        assert check_lemma_1_1(C, cyclic4).passed


def test_lemma_3_1_small3(small3):
    result = check_lemma_3_1(small3)
    assert result.applicable
    assert result.passed


def test_lemma_3_1_not_applicable_on_order5(cs5):
    result = check_lemma_3_1(cs5)
    assert not result.applicable
    assert result.passed
    assert result.summary() == "Lemma 3.1: not applicable"


def test_lemma_3_1_requires_critical(full2):
    with pytest.raises(PreconditionError):
        check_lemma_3_1(full2)
    with pytest.raises(PreconditionError):
        check_lemma_3_1(new_empty(3))


def test_lemma_3_2(cs5, small3):
    assert check_lemma_3_2(cs5, complete_unique(cs5)).passed
    assert check_lemma_3_2(small3).summary() == "Lemma 3.2: pass"


@pytest.mark.slow
def test_lemma_3_2_order9():
    C = corpus_service.get("cs9-44").square
    assert check_lemma_3_2(C, corpus_service.completion_of("cs9-44")).passed


def test_union_stats_empty_and_full(cyclic4):
    empty = union_stats(new_empty(4))
    assert empty.x == [[0] * 4] * 4
    assert empty.rhs_sum == 0
    assert empty.residual == 0
    full = union_stats(cyclic4)
    assert full.x == [[4] * 4] * 4
    assert full.rhs_sum == 64
    assert full.residual == 0
    assert full.f == [-2] * 4


def test_union_stats_small(small3):
    s = union_stats(small3)
    # R_1 = {1,2}, C_1 = {1,2}
    assert s.x[0][0] == 2
    # R_3 = {}, C_3 = {}
    assert s.x[2][2] == 0
    assert s.f == [0, -1, 1]


@pytest.mark.parametrize("n", range(1, 11))
def test_counting_identity_on_random_squares(n):
    rng = np.random.default_rng(n)
    for _ in range(1000):
        P = random_partial(n, float(rng.uniform(0.0, 1.2)), rng)
        s = union_stats(P)
        assert s.residual == 0
        assert all(0 <= v <= n for row in s.x for v in row)


def _corpus_squares():
    for name, (kind, *_rest) in corpus_service.CATALOG.items():
        for index in range(2 if kind == "trade-pair" else 1):
            yield pytest.param(name, index, id=f"{name}[{index}]")


@pytest.mark.parametrize("name,index", _corpus_squares())
def test_counting_identity_on_corpus(name, index):
    P = corpus_service.get(name).data[index]
    s = union_stats(P)
    assert s.lhs_sum == s.rhs_sum
    assert s.residual == 0


@pytest.mark.parametrize("name", ["cs5-11", "cs7-25", "cs9-44", "cs10-57"])
def test_counting_identity_on_corpus_completions(name):
    assert union_stats(corpus_service.completion_of(name)).residual == 0


def test_union_stats_order10():
    C = corpus_service.get("cs10-57").square
    s = union_stats(C)
    assert s.residual == 0
    for i in range(1, 11):
        for j in range(1, 11):
            if C.get(i, j) is None:
                assert s.x[i - 1][j - 1] <= 9


def test_empty_cell_bound(cs5):
    L = complete_unique(cs5)
    assert empty_cell_bound(cs5, L).passed


def test_line_count_guard(cs7, full2):
    assert line_count_guard(cs7).passed
    assert not line_count_guard(full2).passed
    assert passes_line_count_guard(new_empty(3))


def test_emptiness_profile(cs5):
    assert emptiness_profile(new_empty(3)) == EmptinessProfile(True, True, True)
    assert emptiness_profile(cyclic_square(3)) == EmptinessProfile(False, False, False)
    assert emptiness_profile(corpus_service.get("cs9-44").square) == EmptinessProfile(True, True, True)
    assert emptiness_profile(corpus_service.get("cs10-57").square).has_missing_symbol is False


def test_theorem_case(small3, cs5, cyclic4):
    assert theorem_case(small3) == 1
    assert theorem_case(cs5) == 3
    assert theorem_case(new_empty(5)) == 2
    assert theorem_case(cyclic4) is None


def test_lemma_checks_bundle(cs5):
    checks = lemma_checks(cs5, complete_unique(cs5))
    assert [c.name for c in checks] == ["Lemma 3.1", "Lemma 3.2", "line count guard", "empty-cell union bound"]
    assert all(c.passed for c in checks)
