import numpy as np
import pytest

from levelgas.ensemble import run_ensemble
from levelgas.errors import ConfigError, DegenerateLevels
from levelgas.noise import NoiseProcess
from levelgas.runner import realization, run_config

from conftest import pinned

SHORT = ("schedule.t1=20.0",)


def test_single_realization_matches_trajectory():
    cfg = pinned("ising_wiener", *SHORT)
    stats = run_ensemble(cfg, 1, workers=1)
    tr = run_config(cfg, 0).trajectory
    np.testing.assert_array_equal(stats.mean_occ, tr.occupations)
    np.testing.assert_array_equal(stats.mean_purity, tr.purity)
    assert not stats.std_occ.any() and not stats.std_purity.any()
    assert stats.R == stats.completed == 1 and stats.master_seed == cfg.seed


@pytest.mark.parametrize("R", [1, 16, 256])
def test_mean_occupations_normalised(R):
    stats = run_ensemble(pinned("ising_noiseless", 'model.j_mode="gaussian"', "schedule.t1=12.0"), R, workers=1)
    # draws with |J| > ~2 start below the initial-gap threshold; they are
    # counted as failures, and the statistics cover the rest
    assert stats.completed + len(stats.failures) == R
    assert stats.completed >= 0.9 * R
    assert all(abs(f.J) > 1.9 for f in stats.failures)
    assert np.abs(stats.mean_occ.sum(axis=1) - 1).max() <= 1e-9
    assert np.all(stats.std_occ >= 0) and np.all(stats.std_purity >= 0)
    assert len(set(stats.J)) == R


def test_failures_reported_not_dropped():
    cfg = pinned("ising_wiener_gaussian_j", "schedule.t1=12.0", "integrator.floor=5e-10")
    stats = run_ensemble(cfg, 8, workers=1)
    assert stats.completed + len(stats.failures) == 8
    assert 0 < len(stats.failures) < 8
    for f in stats.failures:
        assert f.J == stats.J[f.index] and f.t == pytest.approx(10.1)
    summary = stats.summary()
    assert summary["failed"] == len(stats.failures)
    assert summary["failures"][0]["J"] == stats.failures[0].J


def test_all_failed_raises():
    cfg = pinned("ising_noiseless", "schedule.t1=12.0", "integrator.floor=1.0")
    with pytest.raises(DegenerateLevels, match="all 2 realizations failed"):
        run_ensemble(cfg, 2, workers=1)


def test_rejects_empty_ensemble():
    with pytest.raises(ConfigError):
        run_ensemble(pinned("ising_noiseless"), 0)


def test_concurrency_does_not_change_results():
    cfg = pinned("ising_wiener_gaussian_j", *SHORT)
    a = run_ensemble(cfg, 6, workers=1)
    b = run_ensemble(cfg, 6, workers=3)
    for name in ("mean_occ", "std_occ", "mean_purity", "std_purity", "purity_of_mean"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    assert a.J == b.J


def test_realization_streams_independent():
    cfg = pinned("ising_wiener")
    paths = [NoiseProcess("wiener", 4, 1.0, seed=realization(cfg, i).noise_seed).path(np.full(1000, 1e-3))
             for i in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            for u, w in ((0, 0), (0, 1)):
                c = np.corrcoef(paths[i][:, u, w].real, paths[j][:, u, w].real)[0, 1]
                assert abs(c) <= 4 / np.sqrt(1000)


def test_realization_reproducible_alone():
    cfg = pinned("ising_wiener_gaussian_j")
    assert realization(cfg, 5).J == realization(cfg, 5).J
    assert realization(cfg, 5).J != realization(cfg, 4).J
