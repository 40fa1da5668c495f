import logging

import numpy as np
from scipy.optimize import OptimizeResult, brute

log = logging.getLogger(__name__)


class SuperpositionGridOptimizer:
    """叠加功率分配优化器 - superposition fractions on a [0, 1] grid

    The objective is minimized, so callers return the negated rate
    (最大化速率 = 最小化 -rate). Up to ``full_grid_limit`` parameters the whole
    grid is scanned in lexicographic order; beyond that coordinate ascent runs
    from the seed points and ``restarts`` random grid points.
    """

    def __init__(self, objective, n_params, step=0.01, restarts=5, seed=0,
                 full_grid_limit=2, max_sweeps=50):
        if not 0.0 < step <= 1.0:
            raise ValueError(f"step must be in (0, 1], got {step}")
        self.objective = objective
        self.n_params = int(n_params)
        self.step = step
        self.restarts = restarts
        self.seed = seed
        self.full_grid_limit = full_grid_limit
        self.max_sweeps = max_sweeps
        self.grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
        self._cache = {}

    def _evaluate(self, idx):
        idx = tuple(int(i) for i in idx)
        if idx not in self._cache:
            value = float(self.objective(self.grid[list(idx)]))
            self._cache[idx] = value if np.isfinite(value) else np.inf
        return self._cache[idx]

    def _snap(self, point):
        point = np.clip(np.asarray(point, dtype=float), 0.0, 1.0)
        return tuple(int(i) for i in np.rint(point / self.step))

    def _full_grid(self):
        # brute walks the index grid in C order, argmin keeps the first minimum
        ranges = (slice(0, len(self.grid), 1),) * self.n_params
        x0, best, _, _ = brute(lambda idx: self._evaluate(np.rint(idx)), ranges, finish=None, full_output=True)
        return tuple(int(i) for i in np.rint(np.atleast_1d(x0))), float(best), 1

    def _ascend(self, start):
        current = list(start)
        best = self._evaluate(current)
        sweeps = 0
        for sweeps in range(1, self.max_sweeps + 1):
            improved = False
            for coord in range(self.n_params):
                for i in range(len(self.grid)):
                    if i == current[coord]:
                        continue
                    trial = current.copy()
                    trial[coord] = i
                    value = self._evaluate(trial)
                    if value < best - 1e-12:
                        best, current, improved = value, trial, True
            if not improved:
                break
        return tuple(current), best, sweeps

    def optimize(self, seeds=()):
        """执行优化"""
        self._cache = {}
        if self.n_params == 0:
            value = float(self.objective(np.zeros(0)))
            return OptimizeResult(x=np.zeros(0), fun=value, nfev=1, nit=0, success=True)
        if self.n_params <= self.full_grid_limit:
            best_idx, best, nit = self._full_grid()
        else:
            rng = np.random.default_rng(self.seed)
            starts = [self._snap(point) for point in seeds]
            starts.append(self._snap(np.ones(self.n_params)))
            starts += [tuple(rng.integers(0, len(self.grid), self.n_params)) for _ in range(self.restarts)]
            best_idx, best, nit = None, np.inf, 0
            for start in starts:
                idx, value, sweeps = self._ascend(start)
                nit += sweeps
                if best_idx is None or value < best - 1e-12:
                    best_idx, best = idx, value
        for point in seeds:
            # seeds compete even when the grid was scanned exhaustively
            idx = self._snap(point)
            value = self._evaluate(idx)
            if value < best - 1e-12:
                best_idx, best = idx, value
        log.debug("grid optimizer: %d evaluations, best %.6g", len(self._cache), best)
        return OptimizeResult(x=self.grid[list(best_idx)], fun=best, nfev=len(self._cache),
                              nit=nit, success=bool(np.isfinite(best)))
