from typing import Sequence

from pydantic import ValidationError

from walsh.exceptions import ConstructionError, DimensionError, TableError
from walsh.schemas.bounds import WeightProfile
from walsh.schemas.matrix import AssignmentTable, BinaryMatrix, ConstructionKind
from walsh.services.logger import get_logger

logger = get_logger(__name__)


def band_parameter(kind: ConstructionKind, k: int) -> int:
    """
    Number of ones per row of the cyclic band for a construction.

    Args:
        kind (ConstructionKind): banded or augmented.
        k (int): Number of codes.

    Returns:
        int: l = (k+1)/2 for the banded matrix, k/2 for the augmented one.
    """
    if kind == ConstructionKind.BANDED:
        return (k + 1) // 2
    if kind == ConstructionKind.AUGMENTED:
        return k // 2
    raise ConstructionError(f"{kind} matrices have no band parameter", field="kind")


def _band_rows(k: int, l: int, n: int) -> list[list[int]]:
    # row j is the j-position rightward cyclic shift of l ones followed by zeros
    return [[1 if (t - j) % k < l else 0 for t in range(k)] for j in range(n)]


def build_l_banded(k: int, n: int) -> BinaryMatrix:
    """
    First n rows of the 2k×k l-banded matrix, l = (k+1)/2.

    Args:
        k (int): Number of codes, odd and at least 3.
        n (int): Number of users, k <= n <= 2k.

    Returns:
        BinaryMatrix: The banded matrix.

    Raises:
        ConstructionError: If k is even, k < 3 or n is outside [k, 2k].
    """
    if k % 2 == 0:
        raise ConstructionError("k must be odd", field="k")
    if k < 3:
        raise ConstructionError("k must be at least 3", field="k")
    if not k <= n <= 2 * k:
        raise ConstructionError(f"n must satisfy {k} <= n <= {2 * k}", field="n")

    l = band_parameter(ConstructionKind.BANDED, k)
    logger.debug(f"Building {l}-banded matrix with k={k}, n={n}")
    return BinaryMatrix.from_rows(_band_rows(k, l, n))


def build_augmented_l_banded(k: int, n: int) -> BinaryMatrix:
    """
    First n rows of [M' b]: M' is the 2(k-1)×(k-1) l-banded matrix with l = k/2,
    b is zero on the upper k-1 rows and one on the lower k-1 rows.

    Raises:
        ConstructionError: If k is odd, k < 4 or n is outside [k, 2(k-1)].
    """
    if k % 2 == 1:
        raise ConstructionError("k must be even", field="k")
    if k < 4:
        raise ConstructionError("k must be at least 4", field="k")
    if not k <= n <= 2 * (k - 1):
        raise ConstructionError(
            f"n must satisfy {k} <= n <= {2 * (k - 1)}", field="n"
        )

    l = band_parameter(ConstructionKind.AUGMENTED, k)
    logger.debug(f"Building augmented {l}-banded matrix with k={k}, n={n}")
    rows = _band_rows(k - 1, l, n)
    return BinaryMatrix.from_rows(
        row + [0 if j < k - 1 else 1] for j, row in enumerate(rows)
    )


def is_l_banded(m: BinaryMatrix) -> bool:
    """Whether m is the full-height (n = 2k) l-banded matrix."""
    if m.k < 3 or m.k % 2 == 0 or m.n != 2 * m.k:
        return False
    return m == build_l_banded(m.k, m.n)


def is_augmented_l_banded(m: BinaryMatrix) -> bool:
    """Whether m is the full-height (n = 2(k-1)) augmented l-banded matrix."""
    if m.k < 4 or m.k % 2 == 1 or m.n != 2 * (m.k - 1):
        return False
    return m == build_augmented_l_banded(m.k, m.n)


def to_table(m: BinaryMatrix) -> AssignmentTable:
    return AssignmentTable(k=m.k, rows=tuple(m.support(i) for i in range(1, m.n + 1)))


def table_from_rows(rows: Sequence[Sequence[int]], k: int) -> AssignmentTable:
    try:
        return AssignmentTable(k=k, rows=tuple(tuple(r) for r in rows))
    except ValidationError as e:
        raise TableError(_first_message(e)) from e


def from_table(s: AssignmentTable) -> BinaryMatrix:
    """
    Binary matrix of an assignment table.

    Raises:
        TableError: If the table is empty, lists a code outside 1..k or repeats
            a code within a user's row.
    """
    # revalidate: tables built with model_construct skip the validators
    s = table_from_rows(s.rows, s.k)

    cells = []
    for codes in s.rows:
        row = [0] * s.k
        for code in codes:
            row[code - 1] = 1
        cells.append(row)

    return BinaryMatrix.from_rows(cells)


def _check_permutation(perm: Sequence[int], size: int, what: str) -> None:
    if len(perm) != size or sorted(perm) != list(range(1, size + 1)):
        raise DimensionError(f"{what} permutation must rearrange 1..{size}")


def permute(
    m: BinaryMatrix, row_perm: Sequence[int], col_perm: Sequence[int]
) -> BinaryMatrix:
    """
    Output cell (i, t) is input cell (row_perm[i], col_perm[t]), all 1-based.
    """
    _check_permutation(row_perm, m.n, "row")
    _check_permutation(col_perm, m.k, "column")

    return BinaryMatrix.from_rows(
        [m.cells[i - 1][t - 1] for t in col_perm] for i in row_perm
    )


def compose_permutations(first: Sequence[int], second: Sequence[int]) -> tuple[int, ...]:
    """
    Permutation equivalent to applying `first`, then `second`, through `permute`.
    """
    if len(first) != len(second):
        raise DimensionError("permutations of different sizes cannot be composed")
    return tuple(first[i - 1] for i in second)


def row_weight_profile(m: BinaryMatrix) -> WeightProfile:
    weights = tuple(sum(row) for row in m.cells)
    return WeightProfile(total_ones=sum(weights), l_max=max(weights), row_weights=weights)


def column_weights(m: BinaryMatrix) -> tuple[int, ...]:
    return tuple(sum(column) for column in zip(*m.cells))


def _first_message(e: ValidationError) -> str:
    error = e.errors()[0]
    return error["msg"].removeprefix("Value error, ")
