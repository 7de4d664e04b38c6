import io

import numpy as np
import pytest

from walsh.exceptions import MatrixFormatError, PoolConfigError
from walsh.schemas.assignment import AssignmentPath
from walsh.schemas.matrix import BinaryMatrix, ConstructionKind
from walsh.schemas.pool import SizeDistribution
from walsh.services import pool_sim
from walsh.services.formats import write_matrix
from walsh.tests.factories import get_factory

PoolConfigFactory = get_factory("PoolConfig")
PoolSpecFactory = get_factory("PoolSpec")


def replay(cfg) -> str:
    stream = io.StringIO()
    pool_sim.write_records(pool_sim.run_simulation(cfg), stream)
    return stream.getvalue()


def test_load_sample_config(data_dir):
    cfg = pool_sim.load_config(data_dir / "sample_sim.ini")
    assert cfg.seed == 2012
    assert cfg.frames == 50
    assert cfg.size_distribution == SizeDistribution.UNIFORM
    assert [pool.pool_id for pool in cfg.ordered_pools()] == ["augmented", "banded"]
    assert cfg.ordered_pools()[0].kind == ConstructionKind.AUGMENTED


def test_load_config_defaults_from_settings(tmp_path, settings_env):
    settings_env(default_seed=99, sim_workers=3)
    path = tmp_path / "sim.ini"
    path.write_text("[pool:a]\nkind = banded\nk = 3\nn = 6\n")
    cfg = pool_sim.load_config(path)
    assert (cfg.seed, cfg.workers, cfg.frames) == (99, 3, 1)


def test_thousand_frames_without_failures():
    cfg = PoolConfigFactory(frames=1000)
    result = pool_sim.run_simulation(cfg)

    summary = result.summary
    assert summary.frames == 1000
    assert summary.requests == 2000
    assert summary.failures == 0
    assert summary.fast_path > 0
    assert summary.max_relocations <= 5
    assert summary.fast_path + summary.matching_path == summary.requests

    for frame in result.frames:
        for grant in frame.grants:
            m = result.matrices[grant.pool_id]
            assert sorted(grant.assignment.users) == list(grant.requested)
            for user, code in grant.assignment.pairs:
                assert m.cells[user - 1][code - 1] == 1


def test_replay_is_bit_identical():
    cfg = PoolConfigFactory(frames=1000)
    first = replay(cfg)
    assert first == replay(cfg)
    assert first.splitlines()[-1].startswith('{"summary": ')
    assert len(first.splitlines()) == 1001


def test_worker_count_does_not_change_results():
    cfg = PoolConfigFactory(frames=200)
    assert replay(cfg) == replay(cfg.model_copy(update={"workers": 4}))


def test_seed_changes_requests():
    cfg = PoolConfigFactory(frames=50)
    assert replay(cfg) != replay(cfg.model_copy(update={"seed": 7}))


def test_codes_are_namespaced_per_pool():
    cfg = PoolConfigFactory(frames=20, size_distribution=SizeDistribution.FULL)
    result = pool_sim.run_simulation(cfg)

    for frame in result.frames:
        banded, augmented = sorted(frame.grants, key=lambda grant: grant.pool_id != "banded")
        assert 1 in banded.assignment.codes and 1 in augmented.assignment.codes
        granted = banded.granted_codes() + augmented.granted_codes()
        assert len(granted) == len(set(granted)) == 11
        assert "banded:1" in granted and "augmented:1" in granted


def test_full_requests_take_the_fast_path():
    cfg = PoolConfigFactory(frames=100, size_distribution=SizeDistribution.FULL)
    result = pool_sim.run_simulation(cfg)

    for frame in result.frames:
        for grant in frame.grants:
            if grant.pool_id == "banded":
                assert grant.path == AssignmentPath.FAST
                assert len(grant.requested) == 5
            else:
                assert grant.path == AssignmentPath.MATCHING
                assert grant.relocations is None
    assert result.summary.fast_path == 100


def test_fixed_request_size():
    cfg = PoolConfigFactory(frames=30, size_distribution=SizeDistribution.FIXED, max_request=2)
    result = pool_sim.run_simulation(cfg)
    assert all(len(grant.requested) == 2 for frame in result.frames for grant in frame.grants)


def test_empty_requests_succeed():
    cfg = PoolConfigFactory(frames=10, min_request=0, max_request=0)
    result = pool_sim.run_simulation(cfg)
    assert result.summary.failures == 0
    assert result.summary.granted_users == 0
    assert all(grant.granted_codes() == [] for frame in result.frames for grant in frame.grants)


def test_request_bounds_conflict():
    cfg = PoolConfigFactory(frames=1, min_request=4, max_request=2)
    with pytest.raises(PoolConfigError) as e:
        pool_sim.run_simulation(cfg)
    assert e.value.field == "min_request"


def test_pool_request_bounds_override_the_simulation():
    spec = PoolSpecFactory(pool_id="solo", min_request=3, max_request=3)
    cfg = PoolConfigFactory(pools=(spec,), frames=20)
    result = pool_sim.run_simulation(cfg)
    assert all(len(frame.grants[0].requested) == 3 for frame in result.frames)


def test_draw_request_is_sorted_and_in_range(banded_10x5):
    cfg = PoolConfigFactory()
    spec = cfg.ordered_pools()[1]
    rng = np.random.Generator(np.random.PCG64(5))
    for _ in range(100):
        users = pool_sim.draw_request(rng, cfg, spec, banded_10x5)
        assert list(users) == sorted(set(users))
        assert all(1 <= user <= 10 for user in users)
        assert len(users) <= 5


def test_monitor_load(tmp_path):
    write_matrix(BinaryMatrix.ones(6, 3), tmp_path / "ones.wam")
    ones = PoolSpecFactory(
        pool_id="ones", kind=ConstructionKind.CUSTOM, k=None, n=None, path=tmp_path / "ones.wam"
    )
    cfg = PoolConfigFactory(pools=PoolConfigFactory().pools + (ones,), frames=5)
    loads = {load.pool_id: load for load in pool_sim.monitor_load(pool_sim.run_simulation(cfg))}

    assert loads["banded"].row_weights == (3,) * 10
    assert loads["banded"].l_max == loads["banded"].per_row_bound == 3
    assert loads["augmented"].row_weights == (3,) * 5 + (4,) * 5
    assert loads["augmented"].l_max == 4
    assert loads["ones"].row_weights == (3,) * 6
    assert all(load.within_bound for load in loads.values())


def test_custom_pool_from_config_file(tmp_path, banded_10x5):
    write_matrix(banded_10x5, tmp_path / "left.wam")
    path = tmp_path / "sim.ini"
    path.write_text(
        "[simulation]\nseed = 1\nframes = 25\n\n[pool:left]\nkind = custom\npath = left.wam\n"
    )
    cfg = pool_sim.load_config(path)
    assert cfg.pools[0].path == tmp_path / "left.wam"

    result = pool_sim.run_simulation(cfg)
    assert result.matrices["left"] == banded_10x5
    assert result.summary.failures == 0


def test_custom_pool_must_hold(data_dir):
    spec = PoolSpecFactory(
        pool_id="weak",
        kind=ConstructionKind.CUSTOM,
        k=None,
        n=None,
        path=data_dir / "null_column.wam",
    )
    with pytest.raises(PoolConfigError, match="lacks the assignment property") as e:
        pool_sim.load_pools(PoolConfigFactory(pools=(spec,)))
    assert (e.value.pool_id, e.value.field) == ("weak", "path")


def test_custom_pool_missing_file(tmp_path):
    spec = PoolSpecFactory(
        pool_id="gone", kind=ConstructionKind.CUSTOM, path=tmp_path / "gone.wam"
    )
    with pytest.raises(PoolConfigError) as e:
        pool_sim.load_pools(PoolConfigFactory(pools=(spec,)))
    assert e.value.field == "path"


def test_construction_errors_name_the_pool():
    spec = PoolSpecFactory(pool_id="even", k=4, n=8)
    with pytest.raises(PoolConfigError, match="pool even: k: k must be odd") as e:
        pool_sim.load_pools(PoolConfigFactory(pools=(spec,)))
    assert e.value.field == "k"


@pytest.mark.parametrize(
    "text, pool_id, field",
    [
        ("[pool:a]\nkind = banded\nk = five\nn = 10\n", "a", "k"),
        ("[pool:a]\nkind = banded\nk = 5\nn = 10\ncolour = red\n", "a", "colour"),
        ("[pool:a]\nkind = triangle\nk = 5\nn = 10\n", "a", "kind"),
        ("[pool:a]\nkind = banded\nk = 5\nn = 10\n[simulation]\nframes = -1\n", None, "frames"),
        ("[simulation]\nframes = 3\n", None, "pools"),
    ],
)
def test_load_config_errors(tmp_path, text, pool_id, field):
    path = tmp_path / "sim.ini"
    path.write_text(text)
    with pytest.raises(PoolConfigError) as e:
        pool_sim.load_config(path)
    assert (e.value.pool_id, e.value.field) == (pool_id, field)


def test_load_config_rejects_malformed_ini(tmp_path):
    path = tmp_path / "sim.ini"
    path.write_text("[pool:a]\nkind = banded\n[pool:a]\nkind = banded\n")
    with pytest.raises(MatrixFormatError):
        pool_sim.load_config(path)
