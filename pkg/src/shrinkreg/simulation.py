"""Reliability vs. predictive accuracy under cross-validated shrinkage.

True scores ``T ~ N(0, 1)`` drive the criterion ``Y = r T + e`` with
``e ~ N(0, 1 - r^2)``, so ``cor(T, Y) = r``.  The test only observes
``X = T + E`` with ``var(E) = (1 - rho) / rho``, which gives ``X`` reliability
``rho``.  Each replication picks the shrinkage factor by K-fold CV on a
calibration sample, refits on the whole calibration sample and scores the
rule on an independent validation sample.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from shrinkreg.core import Dataset, predict
from shrinkreg.selection import S_GRID, cross_validate_shrinkage, kfold_split
from shrinkreg.shrinkage import apply_shrinkage

SUMMARY_COLUMNS = ("n", "r", "rho", "s_q25", "s_median", "s_q75",
                   "pe_q25", "pe_median", "pe_q75")


@dataclass(frozen=True)
class SimConfig:
    n_grid: tuple[int, ...] = (25, 50, 100, 200)
    r_grid: tuple[float, ...] = (0.20, 0.25, 0.30, 0.35, 0.40)
    rho_grid: tuple[float, ...] = (1.0, 0.9, 0.8, 0.7, 0.6, 0.5)
    replications: int = 1000
    validation_n: int = 1000
    folds: int = 10
    s_grid: tuple[float, ...] = field(default_factory=lambda: tuple(S_GRID.tolist()))
    master_seed: int = 20190901

    def __post_init__(self):
        for name in ("n_grid", "r_grid", "rho_grid", "s_grid"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if any(not 0 < r < 1 for r in self.r_grid):
            raise ValueError("effect sizes must lie in (0, 1)")
        if any(not 0 < rho <= 1 for rho in self.rho_grid):
            raise ValueError("reliabilities must lie in (0, 1]")
        if any(n < self.folds for n in self.n_grid):
            raise ValueError("every calibration size must be at least the fold count")
        if min(self.replications, self.validation_n, self.folds - 1, *self.n_grid) < 1:
            raise ValueError("counts must be positive and folds at least 2")
        if any(not 0 <= s <= 1 for s in self.s_grid):
            raise ValueError("shrinkage grid must lie in [0, 1]")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned integer")

    def cells(self):
        return list(itertools.product(self.n_grid, self.r_grid, self.rho_grid))

    def as_dict(self) -> dict:
        return {f.name: list(v) if isinstance(v := getattr(self, f.name), tuple) else v
                for f in fields(self)}


@dataclass(frozen=True)
class GeneratedSample:
    true_score: np.ndarray
    observed_score: np.ndarray
    criterion: np.ndarray

    def dataset(self) -> Dataset:
        return Dataset(self.observed_score[:, None], self.criterion, ("x",))


@dataclass(frozen=True)
class ReplicationResult:
    s_opt: float
    prediction_error: float


@dataclass(frozen=True)
class SimCellSummary:
    """Quantiles over replications; the center statistic is the median."""

    n: int
    r: float
    rho: float
    s_q25: float
    s_median: float
    s_q75: float
    pe_q25: float
    pe_median: float
    pe_q75: float
    replications_used: int


def error_variance_from_reliability(rho: float) -> float:
    """Error variance giving reliability ``rho`` when the true-score variance is 1."""
    if not 0 < rho <= 1:
        raise ValueError(f"reliability must lie in (0, 1], got {rho}")
    return (1.0 - rho) / rho


def generate_sample(n: int, r: float, rho: float, rng: np.random.Generator) -> GeneratedSample:
    var_e = error_variance_from_reliability(rho)
    if not 0 <= r < 1:
        raise ValueError(f"effect size must lie in [0, 1), got {r}")
    t = rng.standard_normal(n)
    eps = rng.standard_normal(n) * math.sqrt(1.0 - r * r)
    err = rng.standard_normal(n)
    x = t.copy() if var_e == 0 else t + math.sqrt(var_e) * err
    return GeneratedSample(t, x, r * t + eps)


def replication_seed(master_seed: int, n: int, r: float, rho: float, rep: int) -> np.random.SeedSequence:
    # r and rho enter as integer micro-units so the key is exact
    key = (int(n), int(round(r * 1e6)), int(round(rho * 1e6)), int(rep))
    return np.random.SeedSequence(master_seed, spawn_key=key)


def run_replication(n: int, r: float, rho: float, folds: int, s_grid,
                    validation_n: int, rng: np.random.Generator) -> ReplicationResult:
    calibration = generate_sample(n, r, rho, rng).dataset()
    assignment = kfold_split(n, folds, int(rng.integers(2**63)))
    curve = cross_validate_shrinkage(calibration, s_grid, assignment)
    s_opt = curve.value_min
    fit = apply_shrinkage(calibration, s_opt)
    validation = generate_sample(validation_n, r, rho, rng)
    resid = validation.criterion - predict(fit, validation.observed_score[:, None])
    return ReplicationResult(s_opt, float(np.mean(resid**2)))


def _replicate(config: SimConfig, cell, rep: int) -> ReplicationResult:
    n, r, rho = cell
    rng = np.random.default_rng(replication_seed(config.master_seed, n, r, rho, rep))
    return run_replication(n, r, rho, config.folds, config.s_grid, config.validation_n, rng)


def summarize_cell(cell, results: list[ReplicationResult]) -> SimCellSummary:
    n, r, rho = cell
    s = np.array([res.s_opt for res in results])
    pe = np.array([res.prediction_error for res in results])
    sq = np.quantile(s, [0.25, 0.5, 0.75])
    pq = np.quantile(pe, [0.25, 0.5, 0.75])
    return SimCellSummary(n, r, rho, *map(float, sq), *map(float, pq), len(results))


def run_cell(config: SimConfig, cell, pool: ThreadPoolExecutor | None = None) -> SimCellSummary:
    reps = range(config.replications)
    if pool is None:
        results = [_replicate(config, cell, k) for k in reps]
    else:
        results = list(pool.map(lambda k: _replicate(config, cell, k), reps))
    return summarize_cell(cell, results)


def _cell_key(n, r, rho):
    return (int(n), round(float(r), 9), round(float(rho), 9))


def _load_checkpoint(path) -> dict:
    done = {}
    if path is None or not os.path.exists(path):
        return done
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            s = SimCellSummary(
                int(row["n"]), float(row["r"]), float(row["rho"]),
                *(float(row[c]) for c in SUMMARY_COLUMNS[3:]),
                int(row["replications_used"]),
            )
            done[_cell_key(s.n, s.r, s.rho)] = s
    return done


def run_experiment(config: SimConfig, threads: int = 1, checkpoint: str | None = None,
                   progress=None) -> list[SimCellSummary]:
    """Run every (n, r, rho) cell and return summaries in grid order.

    With ``checkpoint`` set, each finished cell is appended to that CSV at full
    precision and cells already present there are not rerun.  Results do not
    depend on ``threads``.
    """
    done = _load_checkpoint(checkpoint)
    names = [f.name for f in fields(SimCellSummary)]
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    out = []
    try:
        for cell in config.cells():
            key = _cell_key(*cell)
            prior = done.get(key)
            if prior is not None and prior.replications_used == config.replications:
                out.append(prior)
                continue
            summary = run_cell(config, cell, pool)
            out.append(summary)
            if checkpoint is not None:
                fresh = not os.path.exists(checkpoint)
                with open(checkpoint, "a", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    if fresh:
                        w.writerow(names)
                    w.writerow([repr(v) for v in asdict(summary).values()])
            if progress is not None:
                progress(summary)
    finally:
        if pool is not None:
            pool.shutdown()
    return out
