from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

import numpy as np

from walsh.exceptions import DimensionError, InvariantViolation
from walsh.schemas.bounds import OptimalityReport, TightnessReport
from walsh.schemas.matrix import BinaryMatrix
from walsh.services.bitmatrix import build_augmented_l_banded, column_weights, row_weight_profile
from walsh.services.logger import get_logger

logger = get_logger(__name__)

# search_min_ones enumerates every matrix up to this many cells
EXHAUSTIVE_SEARCH_CELLS = 16


def lower_bound(n: int, k: int) -> int:
    """Fewest ones any n×k matrix with the assignment property can have."""
    return k * (n - k + 1)


def _require_tall(m: BinaryMatrix) -> None:
    if m.n < m.k:
        raise DimensionError(f"the bound needs n >= k, got n={m.n}, k={m.k}")


def analyze(m: BinaryMatrix) -> OptimalityReport:
    """
    Compare the number of ones of m with k(n-k+1). No verification is done.

    Raises:
        DimensionError: If n < k.
    """
    _require_tall(m)
    profile = row_weight_profile(m)
    bound = lower_bound(m.n, m.k)

    return OptimalityReport(
        total_ones=profile.total_ones,
        lower_bound=bound,
        l_max=profile.l_max,
        # row weights are integers, so n * l_max >= bound rounds up
        per_row_bound=-(-bound // m.n),
        is_optimal=profile.total_ones == bound,
        ratio=Fraction(profile.total_ones, bound),
    )


def check_necessity(m: BinaryMatrix) -> tuple[int, ...]:
    """
    Columns with k or more zeros. Any such column certifies that the
    assignment property fails; an empty result is inconclusive.

    Raises:
        DimensionError: If n < k.
    """
    _require_tall(m)
    return tuple(
        t for t, weight in enumerate(column_weights(m), start=1) if m.n - weight >= m.k
    )


def ratio_trend(k_values: Iterable[int]) -> list[tuple[int, Fraction]]:
    """
    Ones-to-bound ratio of the full augmented matrix for each even k,
    counted on the constructed matrix and checked against (k+1)/k.

    Raises:
        ConstructionError: If some k is odd or below 4.
        InvariantViolation: If a counted ratio disagrees with (k+1)/k.
    """
    trend = []
    for k in k_values:
        report = analyze(build_augmented_l_banded(k, 2 * (k - 1)))
        if report.ratio != Fraction(k + 1, k):
            raise InvariantViolation(f"k={k}: counted ratio {report.ratio}, expected {k + 1}/{k}")
        trend.append((k, report.ratio))

    return trend


def _holds(masks: list[int], k: int) -> bool:
    # same column-subset criterion as hall.verify_exhaustive, kept scalar
    # because the search calls it on many tiny matrices
    for subset in range(1 << k):
        size = subset.bit_count()
        if size >= k:
            continue
        inside = sum(1 for mask in masks if mask & ~subset == 0)
        if inside > size:
            return False
    return True


def _masks_from_cells(cells: Iterable[int], n: int, k: int) -> list[int]:
    masks = [0] * n
    for cell in cells:
        masks[cell // k] |= 1 << (cell % k)
    return masks


def search_min_ones(
    n: int, k: int, *, trials: int = 200, seed: int = 0
) -> TightnessReport:
    """
    Empirical search for the sparsest n×k matrix with the assignment property.

    Small shapes (n*k <= 16) are enumerated by increasing number of ones, so the
    minimum is exact for that shape. Larger shapes start from the all-ones
    matrix and greedily drop ones in a seeded random order while the property
    holds; the result is only an upper estimate.

    Raises:
        DimensionError: If n < k.
    """
    if n < k:
        raise DimensionError(f"the bound needs n >= k, got n={n}, k={k}")
    bound = lower_bound(n, k)

    if n * k <= EXHAUSTIVE_SEARCH_CELLS:
        for ones in range(n * k + 1):
            for cells in combinations(range(n * k), ones):
                masks = _masks_from_cells(cells, n, k)
                if _holds(masks, k):
                    logger.info(f"Sparsest {n}x{k} matrix found has {ones} ones (bound {bound})")
                    return TightnessReport(
                        n=n,
                        k=k,
                        lower_bound=bound,
                        min_ones_found=ones,
                        method="exhaustive",
                        example=BinaryMatrix.from_masks(masks, k),
                    )

    rng = np.random.Generator(np.random.PCG64(seed))
    best: Optional[list[int]] = None
    for _ in range(trials):
        masks = [(1 << k) - 1] * n
        for cell in rng.permutation(n * k).tolist():
            row, bit = divmod(cell, k)
            masks[row] &= ~(1 << bit)
            if not _holds(masks, k):
                masks[row] |= 1 << bit
        if best is None or sum(map(int.bit_count, masks)) < sum(map(int.bit_count, best)):
            best = masks

    ones = sum(map(int.bit_count, best)) if best else None
    logger.info(f"Randomized search over {trials} trials: {ones} ones (bound {bound})")
    return TightnessReport(
        n=n,
        k=k,
        lower_bound=bound,
        min_ones_found=ones,
        method="randomized",
        example=BinaryMatrix.from_masks(best, k) if best else None,
    )


def find_bound_counterexample(
    n: int, k: int, *, trials: int = 1000, seed: int = 0
) -> Optional[BinaryMatrix]:
    """
    A seeded random matrix meeting N >= k(n-k+1) that still lacks the
    assignment property, showing the bound is necessary but not sufficient.
    """
    if n < k:
        raise DimensionError(f"the bound needs n >= k, got n={n}, k={k}")
    bound = lower_bound(n, k)
    rng = np.random.Generator(np.random.PCG64(seed))

    for _ in range(trials):
        cells = rng.choice(n * k, size=min(bound, n * k), replace=False).tolist()
        masks = _masks_from_cells(cells, n, k)
        if not _holds(masks, k):
            return BinaryMatrix.from_masks(masks, k)

    return None
