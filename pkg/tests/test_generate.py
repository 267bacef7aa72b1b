import numpy as np
import pytest

import casemix.generate as gen
from casemix.archive import Archive
from casemix.cam import CamModel, compute_upper_bounds
from casemix.generate import (
    GenerationError,
    GeneratorConfig,
    _stage_plan,
    no_close_neighbours,
    prcecm01,
    prcecm02,
    rcecm,
)


@pytest.fixture
def shared_model(toy_shared):
    model = CamModel(toy_shared)
    return model, compute_upper_bounds(model)


def pairwise_min_distance(points):
    if points.shape[0] < 2:
        return np.inf
    d = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(d, np.inf)
    return d.min()


def test_no_close_neighbours_conventions():
    arch = Archive(2)
    assert no_close_neighbours(arch, [0.0, 0.0], 5.0)  # empty archive
    arch.insert([3.0, 4.0])
    # 3-4-5 triangle: a point at exactly the radius is "close" (closed ball).
    assert not no_close_neighbours(arch, [0.0, 0.0], 5.0)
    assert no_close_neighbours(arch, [0.0, 0.0], 4.999)
    # Radius zero disables crowding control; duplicates are is_in's job.
    assert no_close_neighbours(arch, [3.0, 4.0], 0.0)


def test_rcecm_zero_count_leaves_archive_unchanged(shared_model):
    model, bounds = shared_model
    arch = Archive(model.k)
    stats = rcecm(model, bounds, 0, arch, np.random.default_rng(0))
    assert len(arch) == 0 and stats.evaluated == 0


def test_rcecm_toy_points_lie_on_efficient_face(shared_model):
    model, bounds = shared_model
    arch = Archive(model.k)
    rcecm(model, bounds, 60, arch, np.random.default_rng(42))
    pts = arch.points_array()
    assert len(arch) == 60
    assert np.allclose(pts.sum(axis=1), 50.0, atol=1e-6)


def test_rcecm_proximity_guard_enforced(shared_model):
    model, bounds = shared_model
    arch = Archive(model.k)
    rcecm(model, bounds, 80, arch, np.random.default_rng(1), proximity=10.0)
    assert pairwise_min_distance(arch.points_array()) >= 10.0 - 1e-9


def test_stage_plan_ceiling_with_trim():
    cfg = GeneratorConfig(total_points=100, threads=4, stage_size=8)
    plan = _stage_plan(cfg)
    assert cfg.max_stages == 4  # ceil(100 / 32)
    assert len(plan) == 4
    assert sum(sum(stage) for stage in plan) == 100
    assert plan[-1] == [1, 1, 1, 1]  # 100 - 3*32 = 4, spread over workers
    assert all(sum(stage) <= 32 for stage in plan)


def test_prcecm01_single_worker_single_stage_equals_serial(shared_model):
    model, bounds = shared_model
    cfg = GeneratorConfig(total_points=30, threads=1, stage_size=30, seed=9)
    parallel, _ = prcecm01(model, cfg, bounds=bounds)
    serial = Archive(model.k)
    rcecm(model, bounds, 30, serial, gen._worker_rng(cfg, 0, 0))
    assert parallel.points_array().tolist() == serial.points_array().tolist()


def test_prcecm01_deterministic_across_runs(shared_model):
    model, bounds = shared_model
    cfg = GeneratorConfig(total_points=48, threads=3, stage_size=8, seed=5,
                          proximity=2.0)
    one, rep1 = prcecm01(model, cfg, bounds=bounds)
    two, rep2 = prcecm01(model, cfg, bounds=bounds)
    assert one.points_array().tolist() == two.points_array().tolist()
    assert rep1.generated == rep2.generated
    assert rep1.evaluations == 48


def test_prcecm02_deterministic_and_reports(shared_model):
    model, bounds = shared_model
    cfg = GeneratorConfig(total_points=48, threads=3, stage_size=8, seed=5,
                          proximity=2.0)
    one, rep1 = prcecm02(model, cfg, bounds=bounds)
    two, _ = prcecm02(model, cfg, bounds=bounds)
    assert one.points_array().tolist() == two.points_array().tolist()
    assert rep1.evaluations == 48
    assert rep1.generated == len(one)
    per_stage = [s.inserted for s in rep1.stage_stats]
    assert sum(per_stage) == rep1.generated


def test_prcecm01_proximity_shrinks_archive(shared_model):
    model, bounds = shared_model
    sizes = []
    for prox in (0.0, 2.0, 8.0):
        cfg = GeneratorConfig(total_points=60, threads=2, stage_size=10,
                              seed=3, proximity=prox)
        archive, report = prcecm01(model, cfg, bounds=bounds)
        assert pairwise_min_distance(archive.points_array()) >= prox - 1e-9
        sizes.append(len(archive))
    assert sizes[0] >= sizes[1] >= sizes[2]
    assert sizes[2] < sizes[0]


def test_prcecm02_guarantees_against_stage_start_master(shared_model):
    # With one worker the cross-worker relaxation is vacuous: the private
    # guard plus snapshot pruning give the full pairwise guarantee.
    model, bounds = shared_model
    cfg = GeneratorConfig(total_points=40, threads=1, stage_size=8, seed=11,
                          proximity=3.0)
    archive, _ = prcecm02(model, cfg, bounds=bounds)
    assert pairwise_min_distance(archive.points_array()) >= 3.0 - 1e-9


def test_prcecm_variants_cover_same_region(shared_model):
    # Same statistical profile on the toy: per-dimension spread within 5%.
    model, bounds = shared_model
    spans = []
    for runner in (prcecm01, prcecm02):
        cfg = GeneratorConfig(total_points=120, threads=2, stage_size=20, seed=21)
        archive, _ = runner(model, cfg, bounds=bounds)
        pts = archive.points_array()
        spans.append(np.mean(pts, axis=0))
    assert np.allclose(spans[0], spans[1], rtol=0.05)


def test_generated_archives_are_mutually_non_dominated(shared_model):
    model, bounds = shared_model
    cfg = GeneratorConfig(total_points=50, threads=2, stage_size=5, seed=13)
    archive, _ = prcecm01(model, cfg, bounds=bounds)
    pts = archive.points_array()
    nd = archive.find_non_dominated(pts)
    assert nd.shape[0] == pts.shape[0]


def test_worker_failure_aborts_with_partial_archive(shared_model, monkeypatch):
    model, bounds = shared_model
    calls = {"n": 0}
    real = gen.evaluate_gridpoint

    def flaky(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] > 25:
            raise RuntimeError("solver exploded")
        return real(*args, **kwargs)

    monkeypatch.setattr(gen, "evaluate_gridpoint", flaky)
    cfg = GeneratorConfig(total_points=40, threads=1, stage_size=10, seed=2)
    with pytest.raises(GenerationError) as err:
        prcecm01(model, cfg, bounds=bounds)
    # Two full stages completed before the failing third one.
    assert len(err.value.archive) == 20


def test_progress_and_snapshot_callbacks(shared_model):
    model, bounds = shared_model
    cfg = GeneratorConfig(total_points=20, threads=2, stage_size=5, seed=1)
    seen = []
    snaps = []
    prcecm01(model, cfg, bounds=bounds, progress=lambda s, t, n: seen.append((s, t, n)),
             snapshot=lambda a: snaps.append(len(a)))
    assert [s for s, _, _ in seen] == [1, 2]
    assert seen[-1][2] == 20
    assert snaps[-1] == 20


def test_provenance_recorded(shared_model):
    model, bounds = shared_model
    cfg = GeneratorConfig(total_points=10, threads=2, stage_size=5, seed=77,
                          proximity=1.5)
    archive, _ = prcecm01(model, cfg, bounds=bounds)
    assert archive.provenance == {
        "algorithm": "prcecm01", "points": 10, "threads": 2,
        "stage": 5, "proximity": 1.5, "seed": 77,
    }


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(total_points=-1).validate()
    with pytest.raises(ValueError):
        GeneratorConfig(total_points=10, threads=0).validate()
    with pytest.raises(ValueError):
        GeneratorConfig(total_points=10, proximity=-0.5).validate()
