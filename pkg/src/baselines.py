"""
Baseline seeders for comparison runs.
Dynamic degree discount, Borgs-Tang reachability sampling, dynamic collective
influence, exhaustive forward influence, INMFA mean-field estimation and
neighbourhood-entropy ranking, all reachable through one dispatch point.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.diffusion import DiffusionParams, InfluenceEvaluator, InfluencePlan
from src.seeding import (SWAP_TOLERANCE, SeedSelection, SelectionConfig, candidate_pool, lazy_forward_influence,
                         rank_singletons, sample_schedule_for, temporal_influence_maximization)
from src.tgraph import (Horizon, SampleSchedule, SnapshotSeries, TemporalNetwork, aggregated_graph,
                        build_snapshots, earliest_arrival)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaselineParams:
    susceptibility_alpha: float = 0.01
    bt_lambda: float = 0.01
    bt_gamma: Optional[int] = None
    ci_radius: int = 10
    inmfa_lambda: float = 0.1
    inmfa_mu: float = 0.05

    def __post_init__(self):
        for name in ('susceptibility_alpha', 'bt_lambda', 'inmfa_lambda', 'inmfa_mu'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.ci_radius < 1:
            raise ValueError(f"ci_radius must be at least 1, got {self.ci_radius}")
        if self.bt_gamma is not None and self.bt_gamma < 1:
            raise ValueError(f"bt_gamma must be at least 1, got {self.bt_gamma}")

    def samples_for(self, node_count: int) -> int:
        return self.bt_gamma if self.bt_gamma is not None else 10 * node_count


def _check_budget(k: int, node_count: int) -> None:
    if not 1 <= k <= node_count:
        raise ValueError(f"seed budget k must lie in [1, {node_count}], got {k}")


def _top_k(scores: Sequence[float], k: int) -> Tuple[int, ...]:
    """Indices of the k largest scores, ascending id on ties."""
    order = sorted(range(len(scores)), key=lambda node: (-scores[node], node))
    return tuple(order[:k])


def _undirected_view(net: TemporalNetwork, horizon: Optional[Horizon]) -> nx.Graph:
    graph = aggregated_graph(net, horizon)
    return graph.to_undirected() if net.directed else graph


def degree_discount_trace(net: TemporalNetwork, k: int, params: BaselineParams,
                          horizon: Optional[Horizon] = None) -> Tuple[Tuple[int, ...], List[Dict[int, float]]]:
    """
    Dynamic degree discount with the discount history.

    Delta_q = D(q) - 2 t_q - (D(q) - t_q) t_q alpha, where D is the degree in
    the aggregated graph and t_q counts q's neighbours already selected.

    Returns:
        (seeds, history) where history[r] holds every unselected Delta after pick r
    """
    _check_budget(k, net.node_count)
    graph = _undirected_view(net, horizon)
    alpha = params.susceptibility_alpha

    degree = {node: graph.degree(node) for node in graph.nodes}
    discount = {node: float(degree[node]) for node in graph.nodes}
    selected_neighbours = dict.fromkeys(graph.nodes, 0)
    seeds: List[int] = []
    history: List[Dict[int, float]] = []

    for _ in range(k):
        pick = min(discount, key=lambda node: (-discount[node], node))
        seeds.append(pick)
        del discount[pick]
        for neighbour in graph.neighbors(pick):
            if neighbour not in discount:
                continue
            selected_neighbours[neighbour] += 1
            d, t = degree[neighbour], selected_neighbours[neighbour]
            discount[neighbour] = d - 2 * t - (d - t) * t * alpha
        history.append(dict(discount))

    return tuple(seeds), history


def dynamic_degree_discount(net: TemporalNetwork, k: int, params: BaselineParams,
                            horizon: Optional[Horizon] = None) -> Tuple[int, ...]:
    seeds, _ = degree_discount_trace(net, k, params, horizon)
    return seeds


def borgs_tang(net: TemporalNetwork, k: int, params: BaselineParams, rng_seed: int,
               horizon: Optional[Horizon] = None) -> Tuple[int, ...]:
    """
    Reachability sampling on the aggregated graph.

    Each sample keeps every edge with probability lambda and records the
    nodes reachable from a uniformly drawn start node. Seeds are the k most
    frequently reached nodes.
    """
    _check_budget(k, net.node_count)
    graph = aggregated_graph(net, horizon)
    edges = sorted(graph.edges)
    rng = np.random.default_rng(rng_seed)
    counts = np.zeros(net.node_count, dtype=np.int64)
    samples = params.samples_for(net.node_count)

    for _ in range(samples):
        start = int(rng.integers(net.node_count))
        kept = rng.random(len(edges)) < params.bt_lambda
        sample = nx.DiGraph() if net.directed else nx.Graph()
        sample.add_node(start)
        sample.add_edges_from(edge for edge, keep in zip(edges, kept.tolist()) if keep)
        reached = nx.descendants(sample, start) | {start}
        counts[list(reached)] += 1

    logger.debug(f"Borgs-Tang: {samples} samples at lambda={params.bt_lambda}, max count {counts.max()}")
    return _top_k(counts.tolist(), k)


def dynamic_ci_scores(net: TemporalNetwork, params: BaselineParams, window_width: int = 1,
                      horizon: Optional[Horizon] = None) -> List[float]:
    """
    Gamma(x) * sum of Gamma(y) over nodes y first reached from x within
    ci_radius windows of the horizon start.
    """
    horizon = net.clip_horizon(horizon)
    graph = _undirected_view(net, horizon)
    gamma = [graph.degree(node) for node in range(net.node_count)]
    deadline = horizon.start + params.ci_radius * window_width

    scores = []
    for node in range(net.node_count):
        if gamma[node] == 0:
            scores.append(0.0)
            continue
        arrival = earliest_arrival(net, node, horizon.start, horizon.end)
        ball = [other for other, time in arrival.items() if other != node and time < deadline]
        scores.append(float(gamma[node] * sum(gamma[other] for other in ball)))
    return scores


def dynamic_ci(net: TemporalNetwork, k: int, params: BaselineParams, window_width: int = 1,
               horizon: Optional[Horizon] = None) -> Tuple[int, ...]:
    _check_budget(k, net.node_count)
    return _top_k(dynamic_ci_scores(net, params, window_width, horizon), k)


def forward_influence(net: TemporalNetwork, params: DiffusionParams, schedule: SampleSchedule,
                      config: SelectionConfig, evaluator: Optional[InfluenceEvaluator] = None) -> SeedSelection:
    """
    Exhaustive swap search from the top-k singleton set.

    Every round scans all (candidate, seed) swaps and applies the best
    strictly positive one; stops when a full scan finds none or after
    `max_rounds` rounds.
    """
    config.check_budget(net)
    evaluator = evaluator or InfluenceEvaluator(net, params, schedule, config.horizon)
    pool = candidate_pool(net, evaluator, config.k)
    ranking = rank_singletons(evaluator, pool)

    seeds = [node for node, _ in ranking[:config.k]]
    objective = ranking[0][1] if config.k == 1 else evaluator(seeds)
    swaps = 0

    for _ in range(config.max_rounds):
        best_gain = SWAP_TOLERANCE
        best = None
        members = set(seeds)
        for candidate in pool:
            if candidate in members:
                continue
            for outgoing in sorted(seeds):
                trial = [candidate if node == outgoing else node for node in seeds]
                value = evaluator(trial)
                if value - objective > best_gain:
                    best_gain, best = value - objective, (trial, value)
        if best is None:
            break
        seeds, objective = best
        swaps += 1

    logger.info(f"Forward influence finished: {swaps} swaps, objective {objective:.6f}, "
                f"{evaluator.evaluations} evaluations")
    return SeedSelection(seeds=tuple(sorted(seeds)), objective=objective, evaluations=evaluator.evaluations,
                         swaps=swaps, method='forward_influence')


def _snapshot_arrays(series: SnapshotSeries, horizon: Optional[Horizon]) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Binary adjacency of each snapshot as (source, target) index arrays."""
    arrays = []
    for index, snapshot in enumerate(series.snapshots):
        start = series.timestamp_of(index)
        if horizon is not None and not horizon.start <= start <= horizon.end:
            continue
        pairs = sorted(snapshot.edges)
        if not series.directed:
            pairs = pairs + [(v, u) for u, v in pairs]
        sources = np.array([u for u, _ in pairs], dtype=np.int64)
        targets = np.array([v for _, v in pairs], dtype=np.int64)
        arrays.append((sources, targets))
    return arrays


def inmfa_states(series: SnapshotSeries, seeds: Sequence[int], params: BaselineParams,
                 horizon: Optional[Horizon] = None) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """
    Mean-field S/I/R trajectory over the snapshots.

    I_i <- (1 - mu) I_i + S_i [1 - prod_j (1 - lambda A_ji I_j)],
    R_i <- R_i + mu I_i, S_i = 1 - I_i - R_i.
    """
    n = series.node_count
    seed_index = np.asarray(sorted(set(seeds)), dtype=np.int64)
    if seed_index.size == 0:
        raise ValueError("seed set must not be empty")
    lam, mu = params.inmfa_lambda, params.inmfa_mu

    infected = np.zeros(n)
    infected[seed_index] = 1.0
    recovered = np.zeros(n)
    trajectory = [(1.0 - infected - recovered, infected, recovered)]

    for sources, targets in _snapshot_arrays(series, horizon):
        susceptible = 1.0 - infected - recovered
        escape = np.ones(n)
        if sources.size:
            np.multiply.at(escape, targets, 1.0 - lam * infected[sources])
        infected, recovered = (1.0 - mu) * infected + susceptible * (1.0 - escape), recovered + mu * infected
        trajectory.append((1.0 - infected - recovered, infected, recovered))
    return trajectory


def inmfa_estimate(series: SnapshotSeries, seeds: Sequence[int], params: BaselineParams,
                   horizon: Optional[Horizon] = None) -> float:
    """Outbreak size O = mean(I + R) at the end of the horizon."""
    _, infected, recovered = inmfa_states(series, seeds, params, horizon)[-1]
    return float((infected + recovered).mean())


def inmfa_seed(series: SnapshotSeries, k: int, params: BaselineParams,
               horizon: Optional[Horizon] = None) -> Tuple[Tuple[int, ...], int]:
    """Greedy marginal-gain selection on the INMFA outbreak size; returns (seeds, estimate calls)."""
    _check_budget(k, series.node_count)
    seeds: List[int] = []
    calls = 0
    for _ in range(k):
        best_value, best_node = -math.inf, None
        for node in range(series.node_count):
            if node in seeds:
                continue
            value = inmfa_estimate(series, seeds + [node], params, horizon)
            calls += 1
            if value > best_value:
                best_value, best_node = value, node
        seeds.append(best_node)
    return tuple(seeds), calls


def configuration_entropy(configurations: Sequence) -> float:
    """Shannon entropy (nats) of the empirical distribution of configurations."""
    total = len(configurations)
    if total == 0:
        return 0.0
    return -sum((count / total) * math.log(count / total) for count in Counter(configurations).values())


def entropy_scores(series: SnapshotSeries) -> List[float]:
    """
    Entropy of each node's neighbourhood transitions between consecutive windows.

    A configuration is the pair (neighbours in window n, neighbours in window n+1)
    with both sets canonicalised as sorted tuples.
    """
    if len(series) < 2:
        raise ValueError("entropy ranking needs at least two snapshots")

    neighbourhoods = []
    for snapshot in series.snapshots:
        adjacency: Dict[int, set] = {}
        for u, v in snapshot.edges:
            adjacency.setdefault(u, set()).add(v)
            adjacency.setdefault(v, set()).add(u)
        neighbourhoods.append({node: tuple(sorted(nbrs)) for node, nbrs in adjacency.items()})

    scores = []
    for node in range(series.node_count):
        configurations = [(before.get(node, ()), after.get(node, ()))
                          for before, after in zip(neighbourhoods, neighbourhoods[1:])]
        scores.append(configuration_entropy(configurations))
    return scores


def entropy_rank(series: SnapshotSeries, k: int) -> Tuple[int, ...]:
    _check_budget(k, series.node_count)
    return _top_k(entropy_scores(series), k)


@dataclass(frozen=True, eq=False)
class SeedingContext:
    """Everything a seeder may need, shared by every method in a comparison."""
    net: TemporalNetwork
    diffusion: DiffusionParams
    config: SelectionConfig
    rng_seed: int = 0

    @cached_property
    def horizon(self) -> Horizon:
        return self.net.clip_horizon(self.config.horizon)

    @cached_property
    def series(self) -> SnapshotSeries:
        return build_snapshots(self.net, self.config.window_width)

    @cached_property
    def schedule(self) -> SampleSchedule:
        return sample_schedule_for(self.net, self.config)

    @cached_property
    def plan(self) -> InfluencePlan:
        return InfluencePlan(self.net, self.diffusion, self.schedule, self.horizon)

    def for_budget(self, k: int) -> SelectionConfig:
        return replace(self.config, k=k)

    def heuristic_selection(self, seeds: Tuple[int, ...], method: str, evaluations: int = 0) -> SeedSelection:
        """Wrap heuristic seeds; the estimator objective is NaN when sampling selected nothing."""
        try:
            objective = self.plan.objective(seeds)
        except ValueError as e:
            logger.debug(f"No estimator objective for {method}: {e}")
            objective = math.nan
        return SeedSelection(seeds=seeds, objective=objective, evaluations=evaluations, method=method)


Seeder = Callable[[SeedingContext, int, BaselineParams], SeedSelection]


def _ours(context: SeedingContext, k: int, params: BaselineParams) -> SeedSelection:
    return temporal_influence_maximization(context.net, context.diffusion, context.for_budget(k))


def _lazy_forward(context: SeedingContext, k: int, params: BaselineParams) -> SeedSelection:
    return lazy_forward_influence(context.net, context.diffusion, context.schedule, context.for_budget(k))


def _forward(context: SeedingContext, k: int, params: BaselineParams) -> SeedSelection:
    return forward_influence(context.net, context.diffusion, context.schedule, context.for_budget(k))


def _degree_discount(context: SeedingContext, k: int, params: BaselineParams) -> SeedSelection:
    return context.heuristic_selection(dynamic_degree_discount(context.net, k, params, context.horizon),
                                       'degree_discount')


def _borgs_tang(context: SeedingContext, k: int, params: BaselineParams) -> SeedSelection:
    seeds = borgs_tang(context.net, k, params, context.rng_seed, context.horizon)
    return context.heuristic_selection(seeds, 'borgs_tang')


def _dynamic_ci(context: SeedingContext, k: int, params: BaselineParams) -> SeedSelection:
    seeds = dynamic_ci(context.net, k, params, context.config.window_width, context.horizon)
    return context.heuristic_selection(seeds, 'dynamic_ci')


def _inmfa(context: SeedingContext, k: int, params: BaselineParams) -> SeedSelection:
    seeds, calls = inmfa_seed(context.series, k, params, context.horizon)
    return context.heuristic_selection(seeds, 'inmfa', evaluations=calls)


def _entropy(context: SeedingContext, k: int, params: BaselineParams) -> SeedSelection:
    return context.heuristic_selection(entropy_rank(context.series, k), 'entropy')


SEEDERS: Dict[str, Seeder] = {
    'ours': _ours,
    'lazy_forward': _lazy_forward,
    'forward_influence': _forward,
    'degree_discount': _degree_discount,
    'borgs_tang': _borgs_tang,
    'dynamic_ci': _dynamic_ci,
    'inmfa': _inmfa,
    'entropy': _entropy,
}


def select_seeds(method: str, context: SeedingContext, k: int,
                 params: Optional[BaselineParams] = None) -> SeedSelection:
    """Run any registered seeder by name."""
    seeder = SEEDERS.get(method)
    if seeder is None:
        raise ValueError(f"unknown seeding method {method!r}; registered methods: {', '.join(sorted(SEEDERS))}")
    logger.info(f"Selecting {k} seeds with {method}")
    return seeder(context, k, params or BaselineParams())
