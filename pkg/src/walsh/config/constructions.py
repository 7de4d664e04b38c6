from typing import Callable

from walsh.exceptions import ConstructionError
from walsh.schemas.matrix import BinaryMatrix, ConstructionKind
from walsh.services.bitmatrix import build_augmented_l_banded, build_l_banded

# Custom matrices are read from ".wam" files and have no builder.
CONSTRUCTIONS: dict[ConstructionKind, Callable[[int, int], BinaryMatrix]] = {
    ConstructionKind.BANDED: build_l_banded,
    ConstructionKind.AUGMENTED: build_augmented_l_banded,
}


def build(kind: ConstructionKind, k: int, n: int) -> BinaryMatrix:
    """
    Build the n×k matrix of a named construction.

    Raises:
        ConstructionError: If the kind has no builder or rejects k and n.
    """
    builder = CONSTRUCTIONS.get(ConstructionKind(kind))
    if builder is None:
        raise ConstructionError(f"{kind} matrices cannot be generated", field="kind")
    return builder(k, n)
