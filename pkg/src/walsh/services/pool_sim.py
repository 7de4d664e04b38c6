import configparser
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import IO, Any, Optional

import numpy as np
from pydantic import ValidationError

from walsh.config.constructions import build
from walsh.config.settings import get_settings
from walsh.exceptions import ConstructionError, MatrixFormatError, PoolConfigError
from walsh.schemas.matrix import BinaryMatrix, ConstructionKind
from walsh.schemas.pool import (
    FrameResult,
    PoolConfig,
    PoolGrant,
    PoolLoad,
    PoolSpec,
    SimulationResult,
    SimulationSummary,
    SizeDistribution,
)
from walsh.services import hall
from walsh.services.banded_assign import dispatch_assignment
from walsh.services.bitmatrix import row_weight_profile
from walsh.services.bounds import analyze
from walsh.services.formats import read_matrix, read_text
from walsh.services.logger import get_logger

logger = get_logger(__name__)

SIMULATION_SECTION = "simulation"
POOL_SECTION_PREFIX = "pool:"


def _validation_field(e: ValidationError) -> tuple[str, str]:
    error = e.errors()[0]
    field = ".".join(str(part) for part in error["loc"]) or "config"
    return field, error["msg"].removeprefix("Value error, ")


def load_config(path: Path) -> PoolConfig:
    """
    Read a simulation config written as INI sections:

        [simulation]
        seed = 7
        frames = 100

        [pool:a]
        kind = banded
        k = 5
        n = 10

    Raises:
        PoolConfigError: Naming the pool and field at fault.
        MatrixFormatError: If the file is not valid INI.
    """
    parser = configparser.ConfigParser()
    try:
        parser.read_string(read_text(path), source=str(path))
    except configparser.Error as e:
        raise MatrixFormatError(str(e), line=getattr(e, "lineno", None)) from e

    base_dir = Path(path).parent
    pools = []
    for section in parser.sections():
        if not section.startswith(POOL_SECTION_PREFIX):
            continue
        pool_id = section.removeprefix(POOL_SECTION_PREFIX).strip()
        values: dict[str, Any] = dict(parser[section])
        if "path" in values:
            values["path"] = base_dir / values["path"]
        try:
            pools.append(PoolSpec(pool_id=pool_id, **values))
        except ValidationError as e:
            field, message = _validation_field(e)
            raise PoolConfigError(message, pool_id=pool_id, field=field) from e

    options = dict(parser[SIMULATION_SECTION]) if parser.has_section(SIMULATION_SECTION) else {}
    options.setdefault("seed", get_settings().default_seed)
    options.setdefault("workers", get_settings().sim_workers)
    try:
        return PoolConfig(pools=tuple(pools), **options)
    except ValidationError as e:
        field, message = _validation_field(e)
        raise PoolConfigError(message, field=field) from e


def load_pools(cfg: PoolConfig) -> dict[str, BinaryMatrix]:
    """
    Build or read the matrix of every pool, ordered by pool id.

    Custom matrices must pass verification when loaded.

    Raises:
        PoolConfigError: If a construction rejects its parameters or a custom
            matrix is unreadable or lacks the assignment property.
    """
    matrices = {}
    for spec in cfg.ordered_pools():
        if spec.kind == ConstructionKind.CUSTOM:
            try:
                m = read_matrix(spec.path)
            except (OSError, MatrixFormatError) as e:
                raise PoolConfigError(str(e), pool_id=spec.pool_id, field="path") from e
            report = hall.verify(m)
            if not report.holds:
                raise PoolConfigError(
                    f"matrix lacks the assignment property ({report.to_record()})",
                    pool_id=spec.pool_id,
                    field="path",
                )
        else:
            try:
                m = build(spec.kind, spec.k, spec.n)
            except ConstructionError as e:
                raise PoolConfigError(str(e), pool_id=spec.pool_id, field=e.field) from e

        logger.info(f"Pool {spec.pool_id}: {spec.kind} matrix {m.n}x{m.k}")
        matrices[spec.pool_id] = m

    return matrices


def _request_bounds(cfg: PoolConfig, spec: PoolSpec, m: BinaryMatrix) -> tuple[int, int]:
    ceiling = min(m.k, m.n)
    low = spec.min_request if spec.min_request is not None else cfg.min_request
    high = spec.max_request if spec.max_request is not None else cfg.max_request
    high = ceiling if high is None else min(high, ceiling)
    if low > high:
        raise PoolConfigError(
            f"min_request {low} exceeds max_request {high}",
            pool_id=spec.pool_id,
            field="min_request",
        )
    return low, high


def draw_request(
    rng: np.random.Generator, cfg: PoolConfig, spec: PoolSpec, m: BinaryMatrix
) -> tuple[int, ...]:
    low, high = _request_bounds(cfg, spec, m)

    if cfg.size_distribution == SizeDistribution.FULL:
        size = min(m.k, m.n)
    elif cfg.size_distribution == SizeDistribution.FIXED:
        size = high
    else:
        size = int(rng.integers(low, high, endpoint=True))

    users = rng.choice(m.n, size=size, replace=False) + 1
    return tuple(sorted(int(user) for user in users))


def _serve(pool_id: str, m: BinaryMatrix, users: tuple[int, ...]) -> PoolGrant:
    start = time.perf_counter()
    dispatch = dispatch_assignment(m, users)
    elapsed_ms = (time.perf_counter() - start) * 1000

    return PoolGrant(
        pool_id=pool_id,
        requested=users,
        path=dispatch.path,
        assignment=dispatch.assignment,
        violation=dispatch.violation,
        relocations=dispatch.relocations,
        wall_time_ms=elapsed_ms,
    )


def _summarize(cfg: PoolConfig, frames: list[FrameResult]) -> SimulationSummary:
    grants = [grant for frame in frames for grant in frame.grants]
    relocations = [grant.relocations for grant in grants if grant.relocations is not None]

    return SimulationSummary(
        frames=cfg.frames,
        requests=len(grants),
        granted_users=sum(len(grant.assignment.pairs) for grant in grants if not grant.failed),
        failures=sum(1 for grant in grants if grant.failed),
        fast_path=len(relocations),
        matching_path=len(grants) - len(relocations),
        max_relocations=max(relocations, default=0),
        mean_relocations=sum(relocations) / len(relocations) if relocations else 0.0,
    )


def run_simulation(
    cfg: PoolConfig, matrices: Optional[dict[str, BinaryMatrix]] = None
) -> SimulationResult:
    """
    Serve random user requests in every pool, frame by frame.

    All random draws for a frame are taken in pool-id order from a PCG64
    generator seeded by the config before any assignment runs, so the result
    stream is identical for every worker count.

    Raises:
        PoolConfigError: If the config cannot be turned into pool matrices.
    """
    matrices = matrices if matrices is not None else load_pools(cfg)
    specs = cfg.ordered_pools()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    frames = []
    with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        for frame in range(cfg.frames):
            requests = []
            for spec in specs:
                m = matrices[spec.pool_id]
                requests.append((spec.pool_id, m, draw_request(rng, cfg, spec, m)))
            grants = tuple(executor.map(lambda request: _serve(*request), requests))
            for grant in grants:
                if grant.failed:
                    logger.warning(
                        f"Frame {frame}, pool {grant.pool_id}: {grant.violation.to_record()}"
                    )
            frames.append(FrameResult(frame=frame, grants=grants))

    summary = _summarize(cfg, frames)
    logger.info(
        f"Simulated {summary.frames} frames: {summary.requests} requests, "
        f"{summary.failures} failures, max relocations {summary.max_relocations}"
    )
    return SimulationResult(config=cfg, matrices=matrices, frames=tuple(frames), summary=summary)


def monitor_load(result: SimulationResult) -> list[PoolLoad]:
    """
    Codes each user has to monitor (its row weight), per pool, against the
    per-row bound ceil(k(n-k+1)/n).
    """
    loads = []
    for pool_id, m in result.matrices.items():
        report = analyze(m)
        loads.append(
            PoolLoad(
                pool_id=pool_id,
                row_weights=row_weight_profile(m).row_weights,
                l_max=report.l_max,
                per_row_bound=report.per_row_bound,
                within_bound=m.n * report.l_max >= report.lower_bound,
            )
        )
    return loads


def write_records(result: SimulationResult, stream: IO[str]) -> None:
    """
    One JSON record per frame followed by a summary record. Wall times are
    left out so that replays compare equal byte for byte.
    """
    for frame in result.frames:
        stream.write(frame.model_dump_json() + "\n")
    stream.write('{"summary": ' + result.summary.model_dump_json() + "}\n")
