import numpy as np
import pytest

from shrinkreg import (
    SimConfig,
    error_variance_from_reliability,
    generate_sample,
    optimal_s_population,
    run_experiment,
    run_replication,
)
from shrinkreg.selection import S_GRID
from shrinkreg.simulation import replication_seed


@pytest.mark.parametrize("rho, expected", [(1.0, 0.0), (0.5, 1.0), (0.8, 0.25)])
def test_error_variance(rho, expected):
    assert error_variance_from_reliability(rho) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("rho", [0.0, -0.2, 1.01])
def test_error_variance_rejects(rho):
    with pytest.raises(ValueError):
        error_variance_from_reliability(rho)


def test_perfect_reliability_observes_true_score():
    s = generate_sample(50, 0.3, 1.0, np.random.default_rng(0))
    np.testing.assert_array_equal(s.observed_score, s.true_score)


def test_generator_moments():
    s = generate_sample(100_000, 0.4, 0.5, np.random.default_rng(1))
    assert np.var(s.criterion) == pytest.approx(1.0, abs=0.02)
    assert np.var(s.true_score) == pytest.approx(1.0, abs=0.02)
    assert np.corrcoef(s.true_score, s.criterion)[0, 1] == pytest.approx(0.4, abs=0.01)
    assert np.mean(s.observed_score - s.true_score) == pytest.approx(0.0, abs=0.01)


def test_replication_deterministic():
    a = run_replication(50, 0.3, 0.8, 10, S_GRID, 500, np.random.default_rng(7))
    b = run_replication(50, 0.3, 0.8, 10, S_GRID, 500, np.random.default_rng(7))
    assert a == b
    assert 0.0 <= a.s_opt <= 1.0 and a.prediction_error > 0


def test_unrelated_criterion_gets_heavy_shrinkage():
    res = [run_replication(25, 0.0, 1.0, 10, S_GRID, 1000, np.random.default_rng(k))
           for k in range(40)]
    assert np.median([r.s_opt for r in res]) <= 0.3
    assert np.median([r.prediction_error for r in res]) == pytest.approx(1.0, abs=0.1)


def test_large_sample_shrinkage_near_formula():
    s = [run_replication(200, 0.4, 1.0, 10, S_GRID, 200, np.random.default_rng(k)).s_opt
         for k in range(60)]
    assert np.median(s) == pytest.approx(optimal_s_population(0.4, 200), abs=0.15)


def test_seed_derivation_distinguishes_cells():
    keys = {tuple(np.random.default_rng(replication_seed(1, *cell)).integers(0, 2**62, 2))
            for cell in [(25, 0.2, 1.0, 0), (25, 0.2, 1.0, 1), (25, 0.2, 0.9, 0), (50, 0.2, 1.0, 0),
                         (25, 0.25, 1.0, 0)]}
    assert len(keys) == 5


SMALL = dict(n_grid=(25, 40), r_grid=(0.2, 0.4), rho_grid=(1.0, 0.6), replications=12,
             validation_n=200, master_seed=99)


def test_experiment_shape_and_ordering():
    out = run_experiment(SimConfig(**SMALL))
    assert [(s.n, s.r, s.rho) for s in out] == SimConfig(**SMALL).cells()
    for s in out:
        assert s.s_q25 <= s.s_median <= s.s_q75
        assert s.pe_q25 <= s.pe_median <= s.pe_q75
        assert 0 <= s.s_q25 and s.s_q75 <= 1 and s.pe_q25 > 0
        assert s.replications_used == 12


def test_experiment_deterministic_across_threads():
    cfg = SimConfig(**SMALL)
    assert run_experiment(cfg) == run_experiment(cfg, threads=3)


def test_checkpoint_resume(tmp_path):
    cfg = SimConfig(**SMALL)
    ckpt = tmp_path / "cells.csv"
    seen = []
    full = run_experiment(cfg, checkpoint=str(ckpt), progress=seen.append)
    assert len(seen) == len(full)
    # drop the last two cells to mimic an interrupted run
    lines = ckpt.read_text().splitlines(keepends=True)
    ckpt.write_text("".join(lines[:-2]))
    seen.clear()
    resumed = run_experiment(cfg, checkpoint=str(ckpt), progress=seen.append)
    assert resumed == full
    assert len(seen) == 2


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(r_grid=(0.0,))
    with pytest.raises(ValueError):
        SimConfig(rho_grid=(1.2,))
    with pytest.raises(ValueError):
        SimConfig(n_grid=(5,), folds=10)
    with pytest.raises(ValueError):
        SimConfig(replications=0)
