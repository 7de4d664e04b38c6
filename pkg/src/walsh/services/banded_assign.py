from collections import deque
from typing import Iterable, Optional

from pydantic import BaseModel, ConfigDict

from walsh.exceptions import AssignmentError, InvariantViolation, LabelError, SelectionError
from walsh.schemas.assignment import AssignmentPath, CodeAssignment, HallViolation
from walsh.schemas.banded import ClusterPlan, FastAssignResult, Relocation, RowLabel
from walsh.schemas.matrix import BinaryMatrix
from walsh.services import hall
from walsh.services.bitmatrix import build_l_banded, is_l_banded
from walsh.services.logger import get_logger

logger = get_logger(__name__)


def _check_chosen(k: int, chosen: Iterable[int]) -> list[int]:
    chosen = [int(i) for i in chosen]
    if k < 3 or k % 2 == 0:
        raise SelectionError(f"k must be odd and at least 3, got {k}")
    if len(chosen) != k or len(set(chosen)) != k:
        raise SelectionError(f"expected {k} distinct rows, got {sorted(chosen)}")
    outside = [i for i in chosen if not 1 <= i <= 2 * k]
    if outside:
        raise SelectionError(f"rows {outside} are outside 1..{2 * k}")
    return chosen


def label_rows(k: int, chosen: Iterable[int]) -> tuple[RowLabel, ...]:
    """
    V/S/D label of every row 1..2k of the l-banded matrix for a chosen k-subset.

    Rows j and j+k always carry the same label.

    Raises:
        SelectionError: If chosen is not a set of k distinct rows in 1..2k.
    """
    chosen = set(_check_chosen(k, chosen))

    upper = []
    for j in range(1, k + 1):
        picked = (j in chosen) + (j + k in chosen)
        upper.append((RowLabel.VOID, RowLabel.SINGLE, RowLabel.DOUBLE)[picked])

    return tuple(upper + upper)


def _check_labels(labels: tuple[RowLabel, ...], k: int) -> list[RowLabel]:
    if len(labels) != 2 * k:
        raise LabelError(f"expected {2 * k} labels, got {len(labels)}")

    labels = [RowLabel(label) for label in labels]
    upper, lower = labels[:k], labels[k:]
    if upper != lower:
        raise LabelError("rows j and j+k must carry the same label")
    if upper.count(RowLabel.DOUBLE) != upper.count(RowLabel.VOID):
        raise LabelError("the upper submatrix must hold as many D-rows as V-rows")
    if upper.count(RowLabel.SINGLE) + 2 * upper.count(RowLabel.DOUBLE) != k:
        raise LabelError(f"labels must account for exactly {k} chosen rows")

    return upper


def _cyclic_start(upper: list[RowLabel]) -> int:
    # slot after the lowest point of the running D-V balance, so that the
    # balance never goes negative when reading cyclically from there
    balance, lowest, start = 0, 0, 0
    for slot, label in enumerate(upper):
        balance += {RowLabel.DOUBLE: 1, RowLabel.VOID: -1}.get(label, 0)
        if balance < lowest:
            lowest, start = balance, slot + 1
    return start % len(upper)


def _assert_laminar(k: int, start: int, couples: list[tuple[int, int]]) -> None:
    spans = [((d - start) % k, (v - start) % k) for d, v in couples]
    for a, (d1, v1) in enumerate(spans):
        for d2, v2 in spans[a + 1 :]:
            crossing = d1 < d2 <= v1 < v2 or d2 < d1 <= v2 < v1
            if crossing or not (d1 < v1 and d2 < v2):
                raise InvariantViolation(f"clusters of couples {couples} cross")


def plan_clusters(labels: tuple[RowLabel, ...], k: int) -> ClusterPlan:
    """
    Couple every D-row of the upper submatrix with a V-row below it.

    Couples are matched like brackets read cyclically downward: each V-row is
    taken by the nearest D-row above it that has no V-row yet. An isolated
    D-row therefore gets its closest V-row from below. Clusters (the cyclic run
    from a D-row to its V-row) never cross; they are disjoint or nested.

    Raises:
        LabelError: If the labels are inconsistent.
    """
    upper = _check_labels(labels, k)
    start = _cyclic_start(upper)

    open_rows: list[int] = []
    couples: list[tuple[int, int]] = []
    for offset in range(k):
        slot = (start + offset) % k
        if upper[slot] == RowLabel.DOUBLE:
            open_rows.append(slot)
        elif upper[slot] == RowLabel.VOID:
            couples.append((open_rows.pop(), slot))

    if open_rows:
        raise InvariantViolation(f"D-rows {open_rows} were left without a V-row")
    _assert_laminar(k, start, couples)

    couples.sort()
    return ClusterPlan(
        k=k,
        couples=tuple((d + 1, v + 1) for d, v in couples),
        clusters=tuple(
            tuple((d + step) % k + 1 for step in range((v - d) % k + 1))
            for d, v in couples
        ),
    )


def fast_assign(k: int, chosen: Iterable[int]) -> FastAssignResult:
    """
    Row permutation of the chosen k rows of the 2k×k l-banded matrix whose
    diagonal is all ones.

    Single rows from the lower submatrix move to their identical upper slot.
    Inside each top-level cluster the rows flow down the cluster's slots in
    order: a D-row keeps its slot and its duplicate goes next below it, the
    S-rows of the cluster shift one slot down. Nested clusters push rows
    further down, never by more than the number of D-rows, which is at most
    l-1, so every row still covers its diagonal cell. Each row is relocated at
    most once.

    Raises:
        SelectionError: If chosen is not a set of k distinct rows in 1..2k.
    """
    chosen_set = set(_check_chosen(k, chosen))
    labels = label_rows(k, chosen_set)
    plan = plan_clusters(labels, k)
    operations = 2 * k

    order: list[Optional[int]] = [None] * k
    trace: list[Relocation] = []

    def place(row: int, slot: int) -> None:
        order[slot] = row
        if row != slot + 1:
            trace.append(Relocation(row=row, from_slot=row, to_slot=slot + 1))

    clustered = {slot - 1 for cluster in plan.clusters for slot in cluster}
    for slot in range(k):
        if slot not in clustered:
            # outside clusters only S-rows remain
            place(slot + 1 if slot + 1 in chosen_set else slot + 1 + k, slot)
            operations += 1

    for cluster in plan.top_level:
        waiting: deque[int] = deque()
        for slot in (s - 1 for s in cluster):
            for row in (slot + 1, slot + 1 + k):
                if row in chosen_set:
                    waiting.append(row)
                    operations += 1
            if not waiting:
                raise InvariantViolation(f"cluster {cluster} ran out of rows at slot {slot + 1}")
            place(waiting.popleft(), slot)
            operations += 1
        if waiting:
            raise InvariantViolation(f"cluster {cluster} left rows {list(waiting)} unplaced")

    moved = [move.row for move in trace]
    if None in order or sorted(order) != sorted(chosen_set) or len(set(moved)) != len(moved):
        raise InvariantViolation(f"rows {order} are not a permutation of {sorted(chosen_set)}")

    banded = build_l_banded(k, 2 * k)
    matrix = banded.submatrix(order)
    if not hall.check_diagonalized(matrix):
        raise InvariantViolation(f"row order {order} leaves a zero on the diagonal")

    for move in trace:
        logger.debug(move.to_line())

    return FastAssignResult(
        matrix=matrix,
        row_order=tuple(order),
        trace=tuple(trace),
        plan=plan,
        elementary_operations=operations,
    )


class AssignmentDispatch(BaseModel):
    """
    Outcome of assign_with_fallback with the path taken, kept for the CLI and
    the simulator.
    """

    model_config = ConfigDict(frozen=True)

    path: AssignmentPath
    assignment: Optional[CodeAssignment] = None
    violation: Optional[HallViolation] = None
    fast_result: Optional[FastAssignResult] = None

    @property
    def relocations(self) -> Optional[int]:
        return self.fast_result.shifts if self.fast_result else None


def dispatch_assignment(m: BinaryMatrix, chosen: Iterable[int]) -> AssignmentDispatch:
    chosen = list(chosen)

    if is_l_banded(m) and len(chosen) == m.k and len(set(chosen)) == m.k:
        result = fast_assign(m.k, chosen)
        # output slot t holds code t for the user in that slot
        pairs = sorted((row, slot) for slot, row in enumerate(result.row_order, start=1))
        return AssignmentDispatch(
            path=AssignmentPath.FAST,
            assignment=CodeAssignment(pairs=tuple(pairs)),
            fast_result=result,
        )

    outcome = hall.find_assignment(m, chosen)
    if isinstance(outcome, HallViolation):
        return AssignmentDispatch(path=AssignmentPath.MATCHING, violation=outcome)
    return AssignmentDispatch(path=AssignmentPath.MATCHING, assignment=outcome)


def assign_with_fallback(m: BinaryMatrix, chosen: Iterable[int]) -> CodeAssignment:
    """
    Codes for the chosen users: the fast banded algorithm when m is the full
    l-banded matrix and exactly k users are chosen, matching otherwise.

    Raises:
        AssignmentError: If no assignment exists (matching path only).
        SelectionError: If the chosen users are invalid.
    """
    dispatch = dispatch_assignment(m, chosen)
    if dispatch.violation is not None:
        raise AssignmentError(dispatch.violation)
    return dispatch.assignment
