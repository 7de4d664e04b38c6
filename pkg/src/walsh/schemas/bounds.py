from fractions import Fraction
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, model_validator

from walsh.schemas.matrix import BinaryMatrix


class WeightProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    total_ones: int
    l_max: int
    row_weights: tuple[int, ...]


class OptimalityReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    total_ones: int
    lower_bound: int
    l_max: int
    per_row_bound: int
    is_optimal: bool
    ratio: Fraction

    @model_validator(mode="after")
    def check_ratio(self) -> "OptimalityReport":
        if self.is_optimal and self.ratio != 1:
            raise ValueError("an optimal matrix has ratio 1")
        return self

    def to_record(self) -> str:
        return " ".join(f"{key}={value}" for key, value in self.to_table())

    def to_table(self) -> list[tuple[str, str]]:
        return [
            ("N", str(self.total_ones)),
            ("lower_bound", str(self.lower_bound)),
            ("l_max", str(self.l_max)),
            ("per_row_bound", str(self.per_row_bound)),
            ("optimal", str(self.is_optimal).lower()),
            ("ratio", str(self.ratio)),
        ]


class TightnessReport(BaseModel):
    """
    Result of a search for the sparsest matrix with the assignment property.
    Always empirical: a randomized search only gives an upper estimate.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    k: int
    lower_bound: int
    min_ones_found: Optional[int]
    method: Literal["exhaustive", "randomized"]
    empirical: Literal[True] = True
    example: Optional[BinaryMatrix] = None

    @property
    def attained(self) -> bool:
        return self.min_ones_found == self.lower_bound
