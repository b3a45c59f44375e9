"""
Seed selection module.
Scores singleton seeds, refines a k-seed set with the lazy-forward swap
heuristic, runs the end-to-end sampling + selection pipeline and provides an
exhaustive oracle for small instances.
"""

import csv
import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from src.diffusion import DiffusionParams, InfluenceEvaluator
from src.tgraph import (Horizon, SampleSchedule, SimilarityWeights, TemporalNetwork,
                        build_snapshots, sample_timestamps)

logger = logging.getLogger(__name__)

# Minimum objective gain for a swap to count as an improvement.
SWAP_TOLERANCE = 1e-12
BRUTE_FORCE_LIMIT = 10 ** 6

Ranking = List[Tuple[int, float]]


class GuardRefusedError(RuntimeError):
    """Raised when a request exceeds a configured size guard."""


@dataclass(frozen=True)
class SelectionConfig:
    k: int
    min_iter: int = 5
    horizon: Optional[Horizon] = None
    eta: float = 0.7
    weights: SimilarityWeights = field(default_factory=SimilarityWeights)
    window_width: int = 1
    invert_threshold: bool = False
    max_rounds: int = 100

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"seed budget k must be at least 1, got {self.k}")
        if self.min_iter < 1:
            raise ValueError(f"min_iter must be at least 1, got {self.min_iter}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.window_width <= 0:
            raise ValueError(f"window_width must be positive, got {self.window_width}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be at least 1, got {self.max_rounds}")

    def check_budget(self, net: TemporalNetwork) -> None:
        if self.k > net.node_count:
            raise ValueError(f"seed budget k={self.k} exceeds node count {net.node_count}")


@dataclass(frozen=True)
class SeedSelection:
    seeds: Tuple[int, ...]
    objective: float
    evaluations: int
    swaps: int = 0
    method: str = 'ours'

    @property
    def seed_set(self) -> frozenset:
        return frozenset(self.seeds)


def candidate_pool(net: TemporalNetwork, evaluator: InfluenceEvaluator, k: int) -> List[int]:
    """
    Nodes active at t0: endpoints of contacts in the first schedule interval.

    Falls back to every node when fewer than k nodes are active.
    """
    start, stop = evaluator.breakpoints[0], evaluator.breakpoints[1]
    lo, hi = net.event_range(start, stop - 1)
    active = set(net.sources[lo:hi].tolist()) | set(net.targets[lo:hi].tolist())
    if not active:
        raise ValueError("empty candidate pool: no contacts in the first schedule interval")
    if len(active) < k:
        logger.info(f"Only {len(active)} nodes active at t0 for k={k}; using all {net.node_count} nodes")
        return list(range(net.node_count))
    return sorted(active)


def rank_singletons(evaluator: InfluenceEvaluator, pool: Sequence[int]) -> Ranking:
    """Score each candidate alone; descending by score, ascending id on ties."""
    scored = [(node, evaluator((node,))) for node in pool]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


def top_singletons(net: TemporalNetwork, params: DiffusionParams, schedule: SampleSchedule,
                   horizon: Optional[Horizon], k: int) -> Ranking:
    """Full singleton ranking over the candidate pool (callers take prefixes)."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    evaluator = InfluenceEvaluator(net, params, schedule, horizon)
    return rank_singletons(evaluator, candidate_pool(net, evaluator, k))


def _order_by_rank(seeds, ranking: Ranking) -> Tuple[int, ...]:
    position = {node: index for index, (node, _) in enumerate(ranking)}
    return tuple(sorted(seeds, key=lambda node: (position.get(node, len(position)), node)))


def lazy_forward_influence(net: TemporalNetwork, params: DiffusionParams, schedule: SampleSchedule,
                           config: SelectionConfig, evaluator: Optional[InfluenceEvaluator] = None,
                           ranking: Optional[Ranking] = None) -> SeedSelection:
    """
    Swap-based refinement of the top-k singleton set.

    Candidates outside S are popped from a max-heap keyed by their singleton
    score (keys are never refreshed). For each popped node i, every swap
    S + {i} - {j} is evaluated and the best strictly positive one is taken.
    The search stops after `min_iter` consecutive pops without a swap or
    when the heap runs dry.

    Evaluation count: one per scored candidate, one for the initial set
    when k > 1 (a single seed reuses its singleton score), then k per pop.
    A first pop without gain at min_iter=1 therefore ends at
    candidates + k for k = 1 and candidates + 1 + k otherwise.

    Args:
        net: Temporal network
        params: cpSI-R parameters
        schedule: Sampled schedule driving the estimator
        config: Selection settings
        evaluator: Shared estimator; a fresh one is built when omitted
        ranking: Precomputed singleton ranking to reuse

    Returns:
        SeedSelection with the final set, its objective and the call count
    """
    config.check_budget(net)
    evaluator = evaluator or InfluenceEvaluator(net, params, schedule, config.horizon)
    if ranking is None:
        ranking = rank_singletons(evaluator, candidate_pool(net, evaluator, config.k))
    if len(ranking) < config.k:
        raise ValueError(f"candidate pool of {len(ranking)} nodes is smaller than k={config.k}")

    seeds = [node for node, _ in ranking[:config.k]]
    objective = ranking[0][1] if config.k == 1 else evaluator(seeds)
    heap = [(-score, node) for node, score in ranking[config.k:]]
    heapq.heapify(heap)

    no_replace = 0
    swaps = 0
    while no_replace < config.min_iter and heap:
        _, candidate = heapq.heappop(heap)
        best_gain = SWAP_TOLERANCE
        best = None
        for outgoing in sorted(seeds):
            trial = [candidate if node == outgoing else node for node in seeds]
            value = evaluator(trial)
            gain = value - objective
            if gain > best_gain:
                best_gain, best = gain, (outgoing, trial, value)

        if best is None:
            no_replace += 1
            continue

        outgoing, seeds, objective = best
        swaps += 1
        no_replace = 0
        logger.debug(f"Swapped {outgoing} -> {candidate}: gain {best_gain:.6f}, objective {objective:.6f}")

    logger.info(f"Lazy forward finished: {swaps} swaps, objective {objective:.6f}, "
                f"{evaluator.evaluations} evaluations")
    return SeedSelection(seeds=_order_by_rank(seeds, ranking), objective=objective,
                         evaluations=evaluator.evaluations, swaps=swaps, method='lazy_forward')


def sample_schedule_for(net: TemporalNetwork, config: SelectionConfig) -> SampleSchedule:
    series = build_snapshots(net, config.window_width)
    schedule = sample_timestamps(series, config.eta, config.weights, config.invert_threshold)
    if not schedule.selected:
        raise ValueError(f"sampling at eta={config.eta} selected no timestamps")
    return schedule


def temporal_influence_maximization(net: TemporalNetwork, params: DiffusionParams,
                                    config: SelectionConfig) -> SeedSelection:
    """
    End-to-end pipeline: sample timestamps, score singletons, refine with
    lazy forward swaps and re-evaluate the final set.
    """
    config.check_budget(net)
    logger.info(f"Temporal influence maximization: k={config.k}, eta={config.eta}, "
                f"window={config.window_width}")

    schedule = sample_schedule_for(net, config)
    evaluator = InfluenceEvaluator(net, params, schedule, config.horizon)
    ranking = rank_singletons(evaluator, candidate_pool(net, evaluator, config.k))
    selection = lazy_forward_influence(net, params, schedule, config, evaluator=evaluator, ranking=ranking)
    final = evaluator(selection.seeds)

    return SeedSelection(seeds=selection.seeds, objective=final, evaluations=evaluator.evaluations,
                         swaps=selection.swaps, method='ours')


def brute_force_optimal(net: TemporalNetwork, params: DiffusionParams, schedule: SampleSchedule,
                        horizon: Optional[Horizon], k: int, limit: int = BRUTE_FORCE_LIMIT) -> SeedSelection:
    """Exhaustive maximisation over all k-subsets; the lexicographically first maximum wins."""
    if not 1 <= k <= net.node_count:
        raise ValueError(f"k must lie in [1, {net.node_count}], got {k}")
    subsets = math.comb(net.node_count, k)
    if subsets > limit:
        raise GuardRefusedError(f"brute force over C({net.node_count}, {k}) = {subsets} subsets exceeds {limit}")

    evaluator = InfluenceEvaluator(net, params, schedule, horizon)
    best_value, best_set = -math.inf, None
    for subset in itertools.combinations(range(net.node_count), k):
        value = evaluator(subset)
        if value > best_value:
            best_value, best_set = value, subset

    return SeedSelection(seeds=best_set, objective=best_value, evaluations=evaluator.evaluations,
                         method='brute_force')


def prefix_objectives(seeds: Sequence[int], evaluator: InfluenceEvaluator) -> List[float]:
    """Objective after each ranked prefix of the seed list (not counted as evaluations)."""
    return [evaluator.plan.objective(seeds[:rank]) for rank in range(1, len(seeds) + 1)]


def export_selection_csv(seeds: Sequence[int], objectives: Sequence[float], path: str) -> None:
    """Write `rank,node,objective_after` rows."""
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(['rank', 'node', 'objective_after'])
        for rank, (node, value) in enumerate(zip(seeds, objectives), start=1):
            writer.writerow([rank, node, f"{value:.6f}"])
    logger.info(f"Seed selection written to {path}")


def export_node_list(seeds: Sequence[int], path: str) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for node in seeds:
            handle.write(f"{node}\n")


def read_node_list(path: str) -> List[int]:
    with open(path, 'r', encoding='utf-8') as handle:
        return [int(line.split()[0]) for line in handle if line.strip() and not line.startswith('#')]
