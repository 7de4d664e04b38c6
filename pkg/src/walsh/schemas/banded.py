from enum import StrEnum

from pydantic import BaseModel, ConfigDict

from walsh.schemas.matrix import BinaryMatrix


class RowLabel(StrEnum):
    """
    Label of a duplicate row pair (j, j+k) relative to a chosen k-subset.
    """

    VOID = "V"
    SINGLE = "S"
    DOUBLE = "D"


class ClusterPlan(BaseModel):
    """
    Couples of (D-slot, V-slot) in the cyclic upper submatrix, 1-based, sorted
    by D-slot, and for each couple the cyclic run of slots from D to V.
    """

    model_config = ConfigDict(frozen=True)

    k: int
    couples: tuple[tuple[int, int], ...] = ()
    clusters: tuple[tuple[int, ...], ...] = ()

    @property
    def top_level(self) -> tuple[tuple[int, ...], ...]:
        """Clusters not contained in another cluster; pairwise disjoint."""
        return tuple(
            cluster
            for cluster in self.clusters
            if not any(
                other is not cluster
                and len(other) > len(cluster)
                and set(cluster) <= set(other)
                for other in self.clusters
            )
        )


class Relocation(BaseModel):
    """
    One row move. `from_slot` is the row's position in the 2k-row matrix,
    `to_slot` its position in the k×k output.
    """

    model_config = ConfigDict(frozen=True)

    row: int
    from_slot: int
    to_slot: int

    def to_line(self) -> str:
        return f"move row {self.row} : slot {self.from_slot} -> slot {self.to_slot}"


class FastAssignResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    matrix: BinaryMatrix
    row_order: tuple[int, ...]
    trace: tuple[Relocation, ...]
    plan: ClusterPlan
    elementary_operations: int

    @property
    def shifts(self) -> int:
        return len(self.trace)
