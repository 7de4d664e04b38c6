from enum import StrEnum
from typing import Any, Iterable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator


class ConstructionKind(StrEnum):
    BANDED = "banded"
    AUGMENTED = "augmented"
    CUSTOM = "custom"


class BinaryMatrix(BaseModel):
    """
    An n×k 0/1 matrix. Cell (i, t) is 1 iff code t is assigned to user i.

    Rows and columns are addressed 1-based everywhere outside this class.
    Instances are frozen; every transform returns a new matrix.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    k: int = Field(ge=1)
    cells: tuple[tuple[int, ...], ...]

    _masks: tuple[int, ...] = PrivateAttr(default=())

    @model_validator(mode="before")
    @classmethod
    def infer_dimensions(cls, values: Any) -> Any:
        if isinstance(values, dict) and "cells" in values:
            cells = values["cells"]
            values.setdefault("n", len(cells))
            if len(cells) > 0:
                values.setdefault("k", len(cells[0]))
        return values

    @model_validator(mode="after")
    def check_cells(self) -> "BinaryMatrix":
        if len(self.cells) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.cells)}")

        for i, row in enumerate(self.cells, start=1):
            if len(row) != self.k:
                raise ValueError(f"row {i} has {len(row)} cells, expected {self.k}")
            if any(bit not in (0, 1) for bit in row):
                raise ValueError(f"row {i} contains a value other than 0 or 1")

        return self

    def model_post_init(self, __context: Any) -> None:
        self._masks = tuple(
            sum(1 << t for t, bit in enumerate(row) if bit) for row in self.cells
        )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "BinaryMatrix":
        cells = tuple(tuple(int(bit) for bit in row) for row in rows)
        return cls(cells=cells)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "BinaryMatrix":
        return cls.from_rows(np.asarray(array, dtype=np.uint8).tolist())

    @classmethod
    def from_masks(cls, masks: Sequence[int], k: int) -> "BinaryMatrix":
        return cls.from_rows(
            [[(mask >> t) & 1 for t in range(k)] for mask in masks]
        )

    @classmethod
    def ones(cls, n: int, k: int) -> "BinaryMatrix":
        return cls(n=n, k=k, cells=((1,) * k,) * n)

    @property
    def row_masks(self) -> tuple[int, ...]:
        """Bit t-1 of mask i-1 is set iff cell (i, t) is 1."""
        return self._masks

    def row(self, i: int) -> tuple[int, ...]:
        return self.cells[i - 1]

    def column(self, t: int) -> tuple[int, ...]:
        return tuple(row[t - 1] for row in self.cells)

    def support(self, i: int) -> tuple[int, ...]:
        return tuple(t for t, bit in enumerate(self.cells[i - 1], start=1) if bit)

    def submatrix(self, rows: Sequence[int]) -> "BinaryMatrix":
        return BinaryMatrix(cells=tuple(self.cells[i - 1] for i in rows))

    def upper(self) -> "BinaryMatrix":
        """The first k rows."""
        return self.submatrix(range(1, min(self.k, self.n) + 1))

    def with_cell(self, i: int, t: int, value: int) -> "BinaryMatrix":
        cells = [list(row) for row in self.cells]
        cells[i - 1][t - 1] = value
        return BinaryMatrix(n=self.n, k=self.k, cells=cells)

    def to_array(self) -> np.ndarray:
        array = np.array(self.cells, dtype=np.uint8).reshape(self.n, self.k)
        array.flags.writeable = False
        return array

    def __str__(self) -> str:
        return "\n".join(" ".join(str(bit) for bit in row) for row in self.cells)


class AssignmentTable(BaseModel):
    """
    Per-user lists of assigned code numbers, the dual view of a BinaryMatrix.
    """

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    rows: tuple[tuple[int, ...], ...] = Field(min_length=1)

    @model_validator(mode="after")
    def check_codes(self) -> "AssignmentTable":
        for i, codes in enumerate(self.rows, start=1):
            outside = [code for code in codes if not 1 <= code <= self.k]
            if outside:
                raise ValueError(
                    f"user {i} lists codes {outside} outside 1..{self.k}"
                )
            if len(set(codes)) != len(codes):
                raise ValueError(f"user {i} lists a code more than once")

        return self

    @property
    def n(self) -> int:
        return len(self.rows)

    def canonical(self) -> "AssignmentTable":
        return AssignmentTable(k=self.k, rows=tuple(tuple(sorted(r)) for r in self.rows))
