import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walsh.exceptions import DimensionError, SelectionError, VerificationLimitError
from walsh.schemas.assignment import CodeAssignment, HallViolation, VerificationMethod
from walsh.schemas.matrix import BinaryMatrix
from walsh.services import hall
from walsh.services.bitmatrix import build_augmented_l_banded, build_l_banded, permute


def random_matrix(rng: random.Random, n: int, k: int, density: float) -> BinaryMatrix:
    return BinaryMatrix.from_rows(
        [[1 if rng.random() < density else 0 for _ in range(k)] for _ in range(n)]
    )


def assert_valid_assignment(m: BinaryMatrix, users, assignment: CodeAssignment):
    assert sorted(assignment.users) == sorted(users)
    assert len(set(assignment.codes)) == len(assignment.codes)
    for user, code in assignment.pairs:
        assert m.cells[user - 1][code - 1] == 1


def test_verify_exhaustive_fig1(banded_10x5, augmented_10x6):
    assert hall.verify_exhaustive(banded_10x5).holds
    assert hall.verify_exhaustive(augmented_10x6).holds


def test_verify_exhaustive_null_column(null_column):
    report = hall.verify_exhaustive(null_column)
    assert not report.holds
    assert report.method == VerificationMethod.EXHAUSTIVE
    assert report.witness.rows == (1, 2, 3)
    assert report.witness.columns == (1, 2)
    assert hall.validate_witness(null_column, report.witness)


def test_verify_exhaustive_zero_row(banded_10x5):
    m = banded_10x5
    for t in range(1, 6):
        m = m.with_cell(4, t, 0)
    report = hall.verify_exhaustive(m)
    assert not report.holds
    assert report.witness.rows == (4,)
    assert report.witness.columns == ()


def test_verify_bruteforce_examples(banded_10x5):
    assert hall.verify_bruteforce(banded_10x5).holds
    assert hall.verify_bruteforce(BinaryMatrix.ones(7, 4)).holds

    zeroed = banded_10x5
    for t in range(1, 6):
        zeroed = zeroed.with_cell(3, t, 0)
    report = hall.verify_bruteforce(zeroed)
    assert not report.holds
    assert 3 in report.witness.rows
    assert hall.validate_witness(zeroed, report.witness)


def test_verify_rejects_short_matrices():
    m = BinaryMatrix.ones(2, 3)
    with pytest.raises(DimensionError):
        hall.verify_exhaustive(m)
    with pytest.raises(DimensionError):
        hall.verify_bruteforce(m)


def test_verify_ceilings(settings_env):
    settings_env(bruteforce_hard_ceiling=8, exhaustive_hard_ceiling=4)
    with pytest.raises(VerificationLimitError):
        hall.verify_bruteforce(build_l_banded(5, 10))
    with pytest.raises(VerificationLimitError):
        hall.verify_exhaustive(build_l_banded(5, 10))


def test_auto_method_thresholds(settings_env):
    m = build_l_banded(5, 10)
    assert hall.resolve_method(m, VerificationMethod.AUTO) == VerificationMethod.EXHAUSTIVE

    settings_env(exhaustive_max_k=4)
    assert hall.resolve_method(m, VerificationMethod.AUTO) == VerificationMethod.BRUTEFORCE

    settings_env(exhaustive_max_k=4, bruteforce_max_subsets=100)
    assert hall.resolve_method(m, VerificationMethod.AUTO) == VerificationMethod.EXHAUSTIVE

    settings_env(exhaustive_max_k=4, exhaustive_hard_ceiling=4, bruteforce_max_subsets=100)
    with pytest.raises(VerificationLimitError, match="C\\(10,5\\)=252"):
        hall.resolve_method(m, VerificationMethod.AUTO)


def test_auto_method_past_the_scan_threshold():
    ones = BinaryMatrix.ones(21, 21)
    assert hall.resolve_method(ones, VerificationMethod.AUTO) == VerificationMethod.EXHAUSTIVE

    report = hall.verify(ones)
    assert report.holds
    assert report.method == VerificationMethod.EXHAUSTIVE


def test_auto_method_refusal_names_both_ceilings():
    with pytest.raises(VerificationLimitError) as e:
        hall.resolve_method(BinaryMatrix.ones(23, 23), VerificationMethod.AUTO)
    assert "k <= 22" in str(e.value)
    assert "n <= 16" in str(e.value)


@pytest.mark.parametrize("k", [3, 5, 7, 9, 11])
def test_banded_matrices_hold_for_every_height(k):
    for n in range(k, 2 * k + 1):
        assert hall.verify_exhaustive(build_l_banded(k, n)).holds


@pytest.mark.parametrize("k", [3, 5])
def test_banded_matrices_hold_by_bruteforce(k):
    assert hall.verify_bruteforce(build_l_banded(k, 2 * k)).holds


@pytest.mark.parametrize("k", [4, 6, 8, 10])
def test_augmented_matrices_hold_for_every_height(k):
    for n in range(k, 2 * (k - 1) + 1):
        assert hall.verify_exhaustive(build_augmented_l_banded(k, n)).holds


def test_find_assignment_diagonal(banded_10x5):
    outcome = hall.find_assignment(banded_10x5, [1, 2, 3, 4, 5])
    assert outcome == CodeAssignment(pairs=((1, 1), (2, 2), (3, 3), (4, 4), (5, 5)))


def test_find_assignment_too_many_users(banded_10x5):
    with pytest.raises(SelectionError):
        hall.find_assignment(banded_10x5, [1, 2, 3, 4, 5, 6])


@pytest.mark.parametrize("users", [[0], [11], [1, 1]])
def test_find_assignment_invalid_users(banded_10x5, users):
    with pytest.raises(SelectionError):
        hall.find_assignment(banded_10x5, users)


def test_find_assignment_hall_violation():
    m = BinaryMatrix.from_rows([[1, 0, 0], [1, 0, 0], [0, 1, 1]])
    outcome = hall.find_assignment(m, [1, 2])
    assert outcome == HallViolation(rows=(1, 2), columns=(1,))


def test_find_assignment_empty(banded_10x5):
    assert hall.find_assignment(banded_10x5, []) == CodeAssignment()


def test_find_assignment_is_deterministic(augmented_10x6):
    users = [2, 5, 7, 8, 9, 10]
    first = hall.find_assignment(augmented_10x6, users)
    assert first == hall.find_assignment(augmented_10x6, list(reversed(users)))
    assert_valid_assignment(augmented_10x6, users, first)


def test_check_diagonalized(banded_10x5):
    assert hall.check_diagonalized(BinaryMatrix.ones(3, 3))
    assert hall.check_diagonalized(banded_10x5.upper())
    assert not hall.check_diagonalized(BinaryMatrix.ones(3, 3).with_cell(1, 1, 0))
    with pytest.raises(DimensionError):
        hall.check_diagonalized(banded_10x5)


def test_oracle_agreement_on_random_matrices():
    rng = random.Random(20120901)
    for _ in range(1000):
        k = rng.randint(1, 8)
        n = rng.randint(k, 12)
        m = random_matrix(rng, n, k, rng.uniform(0.2, 0.8))

        exhaustive = hall.verify_exhaustive(m)
        bruteforce = hall.verify_bruteforce(m)
        assert exhaustive.holds == bruteforce.holds

        if exhaustive.holds:
            rows = list(range(1, n + 1))
            for _ in range(100):
                users = rng.sample(rows, k)
                outcome = hall.find_assignment(m, users)
                assert isinstance(outcome, CodeAssignment)
                assert_valid_assignment(m, users, outcome)
        else:
            assert hall.validate_witness(m, exhaustive.witness)
            assert hall.validate_witness(m, bruteforce.witness)


def test_find_assignment_matches_verdict_on_every_subset():
    rng = random.Random(7)
    for _ in range(60):
        k = rng.randint(2, 5)
        n = rng.randint(k, 9)
        m = random_matrix(rng, n, k, rng.uniform(0.3, 0.8))
        all_assigned = all(
            isinstance(hall.find_assignment(m, users), CodeAssignment)
            for users in combinations(range(1, n + 1), k)
        )
        assert all_assigned == hall.verify_exhaustive(m).holds


@settings(max_examples=50, deadline=None)
@given(st.permutations(list(range(1, 11))), st.permutations(list(range(1, 6))))
def test_verdict_is_permutation_invariant(row_perm, col_perm):
    m = build_l_banded(5, 10)
    assert hall.verify_exhaustive(permute(m, row_perm, col_perm)).holds

    broken = m.with_cell(1, 1, 0).with_cell(1, 2, 0).with_cell(1, 3, 0)
    assert not hall.verify_exhaustive(permute(broken, row_perm, col_perm)).holds


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_adding_ones_preserves_the_property(seed):
    rng = random.Random(seed)
    k = rng.randint(2, 6)
    n = rng.randint(k, 10)
    m = random_matrix(rng, n, k, 0.7)
    if not hall.verify_exhaustive(m).holds:
        return

    zeros = [(i, t) for i in range(1, n + 1) for t in range(1, k + 1) if m.cells[i - 1][t - 1] == 0]
    for i, t in zeros:
        assert hall.verify_exhaustive(m.with_cell(i, t, 1)).holds


def test_verify_dispatches_to_bruteforce(settings_env, banded_10x5):
    settings_env(exhaustive_max_k=2)
    report = hall.verify(banded_10x5)
    assert report.holds
    assert report.method == VerificationMethod.BRUTEFORCE
