from itertools import combinations
from math import comb
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from walsh.config.settings import get_settings
from walsh.exceptions import DimensionError, SelectionError, VerificationLimitError
from walsh.schemas.assignment import (
    CodeAssignment,
    HallViolation,
    VerificationMethod,
    VerificationReport,
)
from walsh.schemas.matrix import BinaryMatrix
from walsh.services.logger import get_logger

logger = get_logger(__name__)

AssignmentOutcome = Union[CodeAssignment, HallViolation]


def _bits(mask: int) -> tuple[int, ...]:
    """1-based positions of the set bits of mask."""
    return tuple(t + 1 for t in range(mask.bit_length()) if (mask >> t) & 1)


def _require_tall(m: BinaryMatrix) -> None:
    if m.n < m.k:
        raise DimensionError(f"the assignment property needs n >= k, got n={m.n}, k={m.k}")


def non_null_columns(m: BinaryMatrix, rows: Iterable[int]) -> tuple[int, ...]:
    """
    Columns with at least one 1 among the stacked rows.
    """
    union = 0
    for i in rows:
        union |= m.row_masks[i - 1]
    return _bits(union)


def _match(
    masks: Sequence[int], k: int, users: Sequence[int]
) -> tuple[Optional[list[Optional[int]]], Optional[tuple[set[int], int]]]:
    """
    Augmenting-path matching of users (1-based rows) onto columns.

    Rows are processed in ascending order and columns probed in ascending
    order, so the result only depends on the matrix and the user set.

    Returns:
        (owner, None) where owner[t] is the user holding column t, or
        (None, (rows, column_mask)) for the first row that cannot be matched.
    """
    owner: list[Optional[int]] = [None] * k

    def augment(user: int, seen: list[bool]) -> bool:
        mask = masks[user - 1]
        for t in range(k):
            if (mask >> t) & 1 and not seen[t]:
                seen[t] = True
                if owner[t] is None or augment(owner[t], seen):
                    owner[t] = user
                    return True
        return False

    for user in sorted(users):
        seen = [False] * k
        if not augment(user, seen):
            # every row reached by alternating paths from `user` only touches
            # the seen columns, and each seen column is held by one of them
            reached = {user} | {owner[t] for t in range(k) if seen[t]}
            column_mask = sum(1 << t for t in range(k) if seen[t])
            return None, (reached, column_mask)

    return owner, None


def _check_users(m: BinaryMatrix, users: Sequence[int]) -> list[int]:
    users = list(users)
    invalid = [i for i in users if not isinstance(i, (int, np.integer)) or not 1 <= i <= m.n]
    if invalid:
        raise SelectionError(f"user indices {invalid} are outside 1..{m.n}")
    if len(set(users)) != len(users):
        raise SelectionError("user indices must be distinct")
    if len(users) > m.k:
        raise SelectionError(f"at most k={m.k} users can be served, got {len(users)}")
    return [int(i) for i in users]


def find_assignment(m: BinaryMatrix, users: Iterable[int]) -> AssignmentOutcome:
    """
    Distinct codes for the selected users, or a Hall violation proving none exist.

    Args:
        m (BinaryMatrix): The assignment matrix.
        users (Iterable[int]): Distinct 1-based row indices, at most k of them.

    Returns:
        CodeAssignment | HallViolation: The matching, or a subset T of the users
            whose rows have |T| - 1 non-null columns.

    Raises:
        SelectionError: If an index is invalid or more than k users are given.
    """
    users = _check_users(m, list(users))
    owner, violation = _match(m.row_masks, m.k, users)

    if violation is not None:
        rows, column_mask = violation
        return HallViolation(rows=tuple(sorted(rows)), columns=_bits(column_mask))

    pairs = sorted((user, t + 1) for t, user in enumerate(owner) if user is not None)
    return CodeAssignment(pairs=tuple(pairs))


def _popcounts(values: np.ndarray, k: int) -> np.ndarray:
    counts = np.zeros_like(values)
    for b in range(k):
        counts += (values >> b) & 1
    return counts


def verify_exhaustive(m: BinaryMatrix) -> VerificationReport:
    """
    Decide the assignment property by scanning column subsets.

    Hall's condition over row sets of size at most k fails iff some column set
    C with |C| <= k-1 contains the support of more than |C| rows:
      - if rows T (|T| <= k) have fewer than |T| non-null columns, take C as
        those columns: |C| <= |T| - 1 <= k - 1 and all |T| > |C| rows of T
        have their support inside C;
      - if more than |C| rows have their support inside C, any |C| + 1 of them
        form a T with |T| <= k whose non-null columns lie in C, so fewer
        than |T|.
    Cost is about 2^k * n bit operations; subsets are evaluated in ascending
    mask order in vectorised blocks, so the witness is deterministic.

    Raises:
        DimensionError: If n < k.
        VerificationLimitError: If k exceeds the configured ceiling.
    """
    _require_tall(m)
    settings = get_settings()
    if m.k > settings.exhaustive_hard_ceiling:
        raise VerificationLimitError(
            f"exhaustive verification supports k <= {settings.exhaustive_hard_ceiling}, got k={m.k}"
        )

    k = m.k
    masks = np.array(m.row_masks, dtype=np.int64)
    total = 1 << k

    for start in range(0, total, settings.scan_chunk_size):
        subsets = np.arange(start, min(start + settings.scan_chunk_size, total), dtype=np.int64)
        inside = (masks[None, :] & ~subsets[:, None]) == 0
        counts = inside.sum(axis=1)
        sizes = _popcounts(subsets, k)
        violating = (counts > sizes) & (sizes <= k - 1)

        if violating.any():
            index = int(np.argmax(violating))
            size = int(sizes[index])
            rows = tuple(int(i) + 1 for i in np.flatnonzero(inside[index])[: size + 1])
            witness = HallViolation(rows=rows, columns=non_null_columns(m, rows))
            logger.info(f"Assignment property fails: {witness.to_record()}")
            return VerificationReport(
                holds=False, method=VerificationMethod.EXHAUSTIVE, witness=witness
            )

    logger.info(f"Assignment property holds for {m.n}x{k} matrix")
    return VerificationReport(holds=True, method=VerificationMethod.EXHAUSTIVE)


def verify_bruteforce(m: BinaryMatrix) -> VerificationReport:
    """
    Decide the assignment property by matching every k-subset of rows.

    Independent of the column-subset scan and used as its oracle.

    Raises:
        DimensionError: If n < k.
        VerificationLimitError: If n exceeds the configured ceiling.
    """
    _require_tall(m)
    settings = get_settings()
    if m.n > settings.bruteforce_hard_ceiling:
        raise VerificationLimitError(
            "brute-force verification supports "
            f"n <= {settings.bruteforce_hard_ceiling}, got n={m.n}"
        )

    masks = m.row_masks
    for users in combinations(range(1, m.n + 1), m.k):
        _, violation = _match(masks, m.k, users)
        if violation is not None:
            rows, column_mask = violation
            witness = HallViolation(rows=tuple(sorted(rows)), columns=_bits(column_mask))
            logger.info(f"Assignment property fails: {witness.to_record()}")
            return VerificationReport(
                holds=False, method=VerificationMethod.BRUTEFORCE, witness=witness
            )

    logger.info(f"Assignment property holds on all {comb(m.n, m.k)} subsets")
    return VerificationReport(holds=True, method=VerificationMethod.BRUTEFORCE)


def resolve_method(m: BinaryMatrix, method: VerificationMethod) -> VerificationMethod:
    """
    Pick the checker for "auto": the column-subset scan when k is small enough,
    otherwise subset enumeration while C(n, k) stays within budget and n within
    its ceiling, otherwise the column-subset scan up to its own ceiling.

    Raises:
        VerificationLimitError: If neither checker is within its ceiling.
    """
    method = VerificationMethod(method)
    if method != VerificationMethod.AUTO:
        return method

    settings = get_settings()
    subsets = comb(m.n, m.k)
    if m.k <= settings.exhaustive_max_k:
        return VerificationMethod.EXHAUSTIVE
    if m.n <= settings.bruteforce_hard_ceiling and subsets <= settings.bruteforce_max_subsets:
        return VerificationMethod.BRUTEFORCE
    if m.k <= settings.exhaustive_hard_ceiling:
        return VerificationMethod.EXHAUSTIVE

    raise VerificationLimitError(
        f"matrix too large for automatic verification: exhaustive needs k <= "
        f"{settings.exhaustive_hard_ceiling} (k={m.k}), brute force needs n <= "
        f"{settings.bruteforce_hard_ceiling} and C(n,k) <= "
        f"{settings.bruteforce_max_subsets} (n={m.n}, C({m.n},{m.k})={subsets})"
    )


def verify(
    m: BinaryMatrix, method: VerificationMethod = VerificationMethod.AUTO
) -> VerificationReport:
    if resolve_method(m, method) == VerificationMethod.EXHAUSTIVE:
        return verify_exhaustive(m)
    return verify_bruteforce(m)


def validate_witness(m: BinaryMatrix, witness: HallViolation) -> bool:
    """
    Re-check a Hall violation directly against the matrix.
    """
    rows = witness.rows
    if not rows or len(rows) > m.k or len(set(rows)) != len(rows):
        return False
    if any(not 1 <= i <= m.n for i in rows):
        return False

    columns = non_null_columns(m, rows)
    return set(columns) <= set(witness.columns) and len(columns) < len(rows)


def check_diagonalized(m: BinaryMatrix) -> bool:
    """
    Whether every diagonal entry of a square matrix is 1.

    Raises:
        DimensionError: If m is not square.
    """
    if m.n != m.k:
        raise DimensionError(f"expected a square matrix, got {m.n}x{m.k}")
    return all(m.cells[i][i] == 1 for i in range(m.n))
