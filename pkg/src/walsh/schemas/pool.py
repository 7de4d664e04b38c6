from enum import StrEnum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from walsh.schemas.assignment import AssignmentPath, CodeAssignment, HallViolation
from walsh.schemas.matrix import BinaryMatrix, ConstructionKind


class SizeDistribution(StrEnum):
    # uniform over [min_request, max_request]
    UNIFORM = "uniform"
    # always k users
    FULL = "full"
    # always max_request users
    FIXED = "fixed"


class PoolSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    pool_id: str = Field(min_length=1)
    kind: ConstructionKind
    k: Optional[int] = Field(default=None, ge=1)
    n: Optional[int] = Field(default=None, ge=1)
    path: Optional[Path] = None
    min_request: Optional[int] = Field(default=None, ge=0)
    max_request: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def check_source(self) -> "PoolSpec":
        if self.kind == ConstructionKind.CUSTOM:
            if self.path is None:
                raise ValueError("custom pools need a path")
        elif self.k is None or self.n is None:
            raise ValueError(f"{self.kind} pools need k and n")
        return self


class PoolConfig(BaseModel):
    """
    A user population partitioned into pools, each with its own code namespace.

    The demand model (uniform random subsets of configurable size) is a
    harness choice, not a traffic model.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    pools: tuple[PoolSpec, ...] = Field(min_length=1)
    seed: int = 0
    frames: int = Field(default=1, ge=0)
    min_request: int = Field(default=0, ge=0)
    max_request: Optional[int] = Field(default=None, ge=0)
    size_distribution: SizeDistribution = SizeDistribution.UNIFORM
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_unique_ids(self) -> "PoolConfig":
        ids = [pool.pool_id for pool in self.pools]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise ValueError(f"duplicate pool ids: {', '.join(duplicates)}")
        return self

    def ordered_pools(self) -> list[PoolSpec]:
        return sorted(self.pools, key=lambda pool: pool.pool_id)


class PoolGrant(BaseModel):
    model_config = ConfigDict(frozen=True)

    pool_id: str
    requested: tuple[int, ...]
    path: AssignmentPath
    assignment: Optional[CodeAssignment] = None
    violation: Optional[HallViolation] = None
    relocations: Optional[int] = None
    wall_time_ms: float = Field(default=0.0, exclude=True)

    @property
    def failed(self) -> bool:
        return self.assignment is None

    def granted_codes(self) -> list[str]:
        if self.assignment is None:
            return []
        return [f"{self.pool_id}:{code}" for code in self.assignment.codes]


class FrameResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    frame: int
    grants: tuple[PoolGrant, ...]


class SimulationSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    frames: int
    requests: int
    granted_users: int
    failures: int
    fast_path: int
    matching_path: int
    max_relocations: int
    mean_relocations: float


class PoolLoad(BaseModel):
    """
    Codes each user of a pool has to monitor, which is its row weight.
    """

    model_config = ConfigDict(frozen=True)

    pool_id: str
    row_weights: tuple[int, ...]
    l_max: int
    per_row_bound: int
    within_bound: bool


class SimulationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: PoolConfig
    matrices: dict[str, BinaryMatrix] = Field(exclude=True)
    frames: tuple[FrameResult, ...]
    summary: SimulationSummary
