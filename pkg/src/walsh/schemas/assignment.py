from enum import StrEnum
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator


class VerificationMethod(StrEnum):
    AUTO = "auto"
    EXHAUSTIVE = "exhaustive"
    BRUTEFORCE = "bruteforce"


class AssignmentPath(StrEnum):
    FAST = "fast"
    MATCHING = "matching"


def _join(indices: tuple[int, ...]) -> str:
    return ",".join(str(i) for i in indices)


class CodeAssignment(BaseModel):
    """
    Injective map from selected users to codes, as (user, code) pairs sorted by user.
    """

    model_config = ConfigDict(frozen=True)

    pairs: tuple[tuple[int, int], ...] = ()

    @model_validator(mode="after")
    def check_injective(self) -> "CodeAssignment":
        users = [user for user, _ in self.pairs]
        codes = [code for _, code in self.pairs]
        if len(set(users)) != len(users):
            raise ValueError("a user appears in more than one pair")
        if len(set(codes)) != len(codes):
            raise ValueError("a code is assigned to more than one user")
        return self

    @property
    def users(self) -> tuple[int, ...]:
        return tuple(user for user, _ in self.pairs)

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(code for _, code in self.pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def to_lines(self) -> list[str]:
        return [f"user {user} -> code {code}" for user, code in self.pairs]


class HallViolation(BaseModel):
    """
    A row set whose stacked rows have fewer non-null columns than rows.
    """

    model_config = ConfigDict(frozen=True)

    rows: tuple[int, ...]
    columns: tuple[int, ...]

    @model_validator(mode="after")
    def check_deficient(self) -> "HallViolation":
        if len(self.columns) >= len(self.rows):
            raise ValueError(
                f"{len(self.rows)} rows with {len(self.columns)} non-null columns "
                "do not violate Hall's condition"
            )
        return self

    def to_record(self) -> str:
        return f"FAILS rows={_join(self.rows)} cols={_join(self.columns)}"


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    holds: bool
    method: VerificationMethod
    witness: Optional[HallViolation] = None

    @model_validator(mode="after")
    def check_witness(self) -> "VerificationReport":
        if self.holds and self.witness is not None:
            raise ValueError("a holding report carries no witness")
        if not self.holds and self.witness is None:
            raise ValueError("a failing report needs a witness")
        return self

    def to_record(self) -> str:
        return "HOLDS" if self.holds else self.witness.to_record()
