"""
Experiment grid orchestration.
Runs every (k, eta, method) cell of an ExperimentSpec, optionally across a
process pool, and merges the rows back in grid order.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.baselines import SEEDERS, SeedingContext, select_seeds
from src.diffusion import estimate_spread_mc
from src.harness import HUGE_EVENT_LIMIT, ExperimentSpec, ResultRow, load_dataset, spread_percent
from src.seeding import SelectionConfig
from src.tgraph import SimilarityWeights, TemporalNetwork

logger = logging.getLogger(__name__)

Cell = Tuple[int, int, float, str]


def cell_seed(rng_seed: int, index: int) -> int:
    """Per-cell seed for stochastic seeders, split from the experiment seed."""
    return int(np.random.SeedSequence([rng_seed, index]).generate_state(1)[0])


def run_cell(net: TemporalNetwork, spec: ExperimentSpec, cell: Cell,
             weights: Optional[SimilarityWeights] = None) -> ResultRow:
    """
    Select seeds for one grid cell and evaluate them by Monte Carlo.

    Only seed selection is timed. The Monte Carlo evaluation uses
    spec.rng_seed as base seed for every cell so methods are compared on the
    same realizations.
    """
    index, k, eta, method = cell
    selection_config = SelectionConfig(k=k, min_iter=spec.min_iter, eta=eta,
                                       weights=weights or SimilarityWeights(),
                                       window_width=spec.window_width)
    context = SeedingContext(net, spec.diffusion, selection_config, rng_seed=cell_seed(spec.rng_seed, index))

    started = time.perf_counter()
    selection = select_seeds(method, context, k, spec.baseline)
    runtime = time.perf_counter() - started if spec.record_runtime else 0.0

    estimate = estimate_spread_mc(net, selection.seeds, spec.diffusion, context.horizon,
                                  spec.mc_realizations, spec.rng_seed)
    spread_pct, spread_stderr = spread_percent(estimate, net.node_count)
    logger.debug(f"Cell {index} ({method}, k={k}, eta={eta}): seeds {list(selection.seeds)}, "
                 f"spread {spread_pct:.3f}%")

    return ResultRow(dataset=spec.dataset, method=method, k=k, eta=float(eta), spread_pct=spread_pct,
                     spread_stderr=spread_stderr, runtime_seconds=runtime, evaluations=selection.evaluations)


class ExperimentRunner:
    """Runs experiment grids inline or on a process pool."""

    def __init__(self, workers: int = 1, huge_event_limit: int = HUGE_EVENT_LIMIT,
                 weights: Optional[SimilarityWeights] = None):
        if workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}")
        self.workers = workers
        self.huge_event_limit = huge_event_limit
        self.weights = weights
        self.failures: List[Dict[str, Any]] = []
        logger.debug(f"ExperimentRunner initialized with {workers} worker(s)")

    def run(self, spec: ExperimentSpec, net: Optional[TemporalNetwork] = None) -> List[ResultRow]:
        """
        Run every cell of the grid.

        Args:
            spec: Experiment grid
            net: Preloaded network; loaded from spec.dataset when omitted

        Returns:
            Result rows in (k, eta, method) grid order; failed cells are
            logged, recorded in `failures` and left out
        """
        unknown = [method for method in spec.methods if method not in SEEDERS]
        if unknown:
            raise ValueError(f"unknown seeding method(s) {unknown}; registered methods: {', '.join(sorted(SEEDERS))}")

        if net is None:
            net = load_dataset(spec.dataset, spec.rng_seed, spec.directed, spec.allow_huge, self.huge_event_limit)
        for k in spec.k_values:
            if k > net.node_count:
                raise ValueError(f"seed budget k={k} exceeds node count {net.node_count}")

        cells = spec.cells()
        self.failures = []
        logger.info(f"Running {len(cells)} experiment cells on {spec.dataset} "
                    f"({net.node_count} nodes, {net.num_events} events) with {self.workers} worker(s)")

        if self.workers > 1 and len(cells) > 1:
            results = self._run_parallel(net, spec, cells)
        else:
            results = {}
            for cell in cells:
                results[cell[0]] = self._run_guarded(net, spec, cell)

        rows = [results[index] for index in sorted(results) if results[index] is not None]
        logger.info(f"Experiment finished: {len(rows)} rows, {len(self.failures)} failed cells")
        return rows

    def _run_guarded(self, net: TemporalNetwork, spec: ExperimentSpec, cell: Cell) -> Optional[ResultRow]:
        try:
            return run_cell(net, spec, cell, self.weights)
        except ValueError as e:
            self._record_failure(cell, e)
            return None

    def _run_parallel(self, net: TemporalNetwork, spec: ExperimentSpec,
                      cells: List[Cell]) -> Dict[int, Optional[ResultRow]]:
        results: Dict[int, Optional[ResultRow]] = {}
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            future_to_cell = {executor.submit(run_cell, net, spec, cell, self.weights): cell for cell in cells}

            completed = 0
            for future in as_completed(future_to_cell):
                cell = future_to_cell[future]
                completed += 1
                try:
                    results[cell[0]] = future.result()
                    logger.info(f"Completed {completed}/{len(cells)}: {cell[3]} k={cell[1]} eta={cell[2]}")
                except ValueError as e:
                    self._record_failure(cell, e)
                    results[cell[0]] = None
        return results

    def _record_failure(self, cell: Cell, error: Exception) -> None:
        index, k, eta, method = cell
        logger.error(f"Cell {index} ({method}, k={k}, eta={eta}) failed: {error}")
        self.failures.append({'index': index, 'method': method, 'k': k, 'eta': eta, 'error': str(error)})

    def summarize(self, rows: List[ResultRow], total_time: float) -> Dict[str, Any]:
        """Aggregate figures for the CLI summary."""
        best = max(rows, key=lambda row: row.spread_pct, default=None)
        return {
            'total_time': total_time,
            'total_cells': len(rows) + len(self.failures),
            'successful_cells': len(rows),
            'failed_cells': len(self.failures),
            'total_evaluations': sum(row.evaluations for row in rows),
            'best': best,
            'failures': self.failures,
        }


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> List[ResultRow]:
    return ExperimentRunner(workers=workers).run(spec)
