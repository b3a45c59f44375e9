"""
Experiment harness utilities.
Synthetic network generation, experiment specs and result rows, the
active-inactive counterexample search, cpSI-R vs SIR comparison and result
CSV export.
"""

import csv
import itertools
import logging
from dataclasses import dataclass, field, fields
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.baselines import BaselineParams
from src.diffusion import (DiffusionParams, SpreadEstimate, simulate_active_inactive_once, simulate_cpsir_once,
                           simulate_sir_once, summarize_samples)
from src.seeding import GuardRefusedError
from src.tgraph import Horizon, TemporalNetwork, load_edge_list

logger = logging.getLogger(__name__)

HUGE_EVENT_LIMIT = 100_000
RESULT_HEADER = ['dataset', 'method', 'k', 'eta', 'spread_pct', 'spread_stderr', 'runtime_seconds', 'evaluations']


@dataclass(frozen=True)
class ExperimentSpec:
    """
    One experiment grid: every (k, eta, method) cell is selected and then
    evaluated by Monte Carlo cpSI-R simulation.

    `dataset` is an edge-list path or a generator spec `ba:<nodes>:<events>`.
    """
    dataset: str
    methods: Tuple[str, ...]
    k_values: Tuple[int, ...]
    eta_values: Tuple[float, ...]
    diffusion: DiffusionParams = field(default_factory=DiffusionParams)
    mc_realizations: int = 100
    rng_seed: int = 0
    window_width: int = 1
    min_iter: int = 5
    baseline: BaselineParams = field(default_factory=BaselineParams)
    directed: bool = False
    record_runtime: bool = True
    allow_huge: bool = False

    def __post_init__(self):
        if not self.methods:
            raise ValueError("experiment needs at least one method")
        if not self.k_values or not self.eta_values:
            raise ValueError("k_values and eta_values must be non-empty")
        if self.mc_realizations < 1:
            raise ValueError(f"mc_realizations must be at least 1, got {self.mc_realizations}")
        if self.window_width <= 0:
            raise ValueError(f"window_width must be positive, got {self.window_width}")

    def cells(self) -> List[Tuple[int, int, float, str]]:
        """Grid cells as (index, k, eta, method) in output order."""
        grid = itertools.product(self.k_values, self.eta_values, self.methods)
        return [(index, k, eta, method) for index, (k, eta, method) in enumerate(grid)]


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    method: str
    k: int
    eta: float
    spread_pct: float
    spread_stderr: float
    runtime_seconds: float
    evaluations: int


def generate_synthetic_ba(n_nodes: int, n_events: int, rng_seed: int, allow_huge: bool = False,
                          huge_limit: int = HUGE_EVENT_LIMIT) -> TemporalNetwork:
    """
    Preferential-attachment contact stream.

    Nodes arrive in id order and attach to an existing node chosen with
    probability proportional to (degree + 1). The remaining events are
    repeat contacts whose endpoints are drawn the same way. Arrivals and
    repeats are interleaved at random and event i happens at time i.
    """
    if n_nodes < 2:
        raise ValueError(f"n_nodes must be at least 2, got {n_nodes}")
    if n_events < n_nodes - 1:
        raise ValueError(f"n_events must be at least n_nodes - 1 = {n_nodes - 1}, got {n_events}")
    if n_events > huge_limit and not allow_huge:
        raise GuardRefusedError(f"{n_events} events exceeds the {huge_limit} event limit; pass --huge to allow it")

    rng = np.random.default_rng(rng_seed)
    # One entry per node for the +1 term plus one per contact endpoint.
    weighted = [0]
    contacts = []
    arrivals_left = n_nodes - 1
    repeats_left = n_events - arrivals_left
    next_node = 1

    for time in range(n_events):
        arrive = arrivals_left > 0 and (
            next_node < 2 or rng.random() * (arrivals_left + repeats_left) < arrivals_left)
        if arrive:
            target = weighted[int(rng.integers(len(weighted)))]
            contacts.append((next_node, target, time))
            weighted.extend((next_node, next_node, target))
            next_node += 1
            arrivals_left -= 1
        else:
            source = weighted[int(rng.integers(len(weighted)))]
            target = source
            while target == source:
                target = weighted[int(rng.integers(len(weighted)))]
            contacts.append((source, target, time))
            weighted.extend((source, target))
            repeats_left -= 1

    logger.info(f"Generated preferential-attachment network: {n_nodes} nodes, {n_events} events (seed {rng_seed})")
    return TemporalNetwork.from_contacts(contacts, directed=False, node_count=n_nodes)


def load_dataset(dataset: str, rng_seed: int = 0, directed: bool = False, allow_huge: bool = False,
                 huge_limit: int = HUGE_EVENT_LIMIT) -> TemporalNetwork:
    """Resolve an edge-list path or a `ba:<nodes>:<events>` generator spec."""
    if dataset.startswith('ba:'):
        try:
            _, nodes, events = dataset.split(':')
            n_nodes, n_events = int(nodes), int(events)
        except ValueError:
            raise ValueError(f"generator spec must look like ba:<nodes>:<events>, got {dataset!r}")
        return generate_synthetic_ba(n_nodes, n_events, rng_seed, allow_huge, huge_limit)
    return load_edge_list(dataset, directed=directed)


@dataclass(frozen=True)
class Witness:
    """A small network on which the active-inactive spread breaks a set-function property."""
    kind: str
    instance: int
    node_count: int
    contacts: Tuple[Tuple[int, int, int], ...]
    sets: Dict[str, FrozenSet[int]]
    spreads: Dict[str, int]
    trace: Dict[str, Dict[int, int]]

    def describe(self) -> str:
        lines = [f"{self.kind} witness (instance {self.instance}, {self.node_count} nodes)"]
        lines += [f"  contact {u}-{v} at t={t}" for u, v, t in self.contacts]
        for name, members in self.sets.items():
            lines.append(f"  {name} = {sorted(members)}")
        for name, value in self.spreads.items():
            lines.append(f"  sigma({name}) = {value}")
        return '\n'.join(lines)


@dataclass(frozen=True)
class CounterexampleReport:
    monotonicity: Optional[Witness]
    submodularity: Optional[Witness]
    instances_searched: int

    @property
    def complete(self) -> bool:
        return self.monotonicity is not None and self.submodularity is not None


def _random_instance(rng: np.random.Generator, max_nodes: int,
                     max_windows: int) -> Tuple[int, List[Tuple[int, int, int]]]:
    n = int(rng.integers(3, max_nodes + 1))
    n_events = int(rng.integers(n - 1, 3 * n + 1))
    contacts = []
    while len(contacts) < n_events:
        u, v = (int(x) for x in rng.integers(n, size=2))
        if u != v:
            contacts.append((u, v, int(rng.integers(max_windows))))
    return n, contacts


def _check_instance(instance: int, n: int, contacts, activation_prob: float, active_window: float,
                    need_monotone: bool, need_submodular: bool) -> Tuple[Optional[Witness], Optional[Witness]]:
    net = TemporalNetwork.from_contacts(contacts, directed=False, node_count=n)
    cache: Dict[FrozenSet[int], Tuple[int, Dict[int, int]]] = {frozenset(): (0, {})}

    def sigma(members: FrozenSet[int]) -> int:
        if members not in cache:
            realization = simulate_active_inactive_once(net, members, activation_prob, active_window, instance)
            cache[members] = (realization.size, dict(realization.activation_times))
        return cache[members][0]

    def witness(kind: str, sets: Dict[str, FrozenSet[int]]) -> Witness:
        spreads = {name: sigma(members) for name, members in sets.items()}
        return Witness(kind=kind, instance=instance, node_count=n, contacts=net.events,
                       sets=sets, spreads=spreads, trace={name: cache[members][1] for name, members in sets.items()})

    nodes = range(n)
    monotone = submodular = None

    if need_monotone:
        for size in (1, 2):
            for base in map(frozenset, itertools.combinations(nodes, size)):
                for extra in nodes:
                    if extra in base:
                        continue
                    extended = base | {extra}
                    if sigma(extended) < sigma(base):
                        monotone = witness('monotonicity', {'S': base, 'S+u': extended})
                        break
                if monotone:
                    break
            if monotone:
                break

    if need_submodular:
        for size in (1, 2):
            for larger in map(frozenset, itertools.combinations(nodes, size)):
                for smaller_size in range(size):
                    for smaller in map(frozenset, itertools.combinations(sorted(larger), smaller_size)):
                        for x in nodes:
                            if x in larger:
                                continue
                            gain_small = sigma(smaller | {x}) - sigma(smaller)
                            gain_large = sigma(larger | {x}) - sigma(larger)
                            if gain_small < gain_large:
                                submodular = witness('submodularity', {
                                    'A': smaller, 'A+x': smaller | {x}, 'B': larger, 'B+x': larger | {x}})
                                break
                        if submodular:
                            break
                    if submodular:
                        break
                if submodular:
                    break
            if submodular:
                break

    return monotone, submodular


def find_counterexample(activation_prob: float = 1.0, active_window: float = 1, max_nodes: int = 6,
                        max_windows: int = 4, rng_seed: int = 0,
                        budget: int = 100_000) -> Optional[CounterexampleReport]:
    """
    Randomised search for networks where the active-inactive spread is not
    monotone or not submodular.

    Each instance draws a small undirected contact stream; the spread of every
    seed set of size <= 3 is computed by simulation (deterministic at
    activation_prob = 1). Returns None when the budget is exhausted without
    any witness.
    """
    if not 3 <= max_nodes <= 10:
        raise ValueError(f"max_nodes must lie in [3, 10], got {max_nodes}")
    if not 1 <= max_windows <= 6:
        raise ValueError(f"max_windows must lie in [1, 6], got {max_windows}")
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")

    rng = np.random.default_rng(rng_seed)
    monotone = submodular = None
    searched = 0

    for instance in range(budget):
        searched = instance + 1
        n, contacts = _random_instance(rng, max_nodes, max_windows)
        found_monotone, found_submodular = _check_instance(
            instance, n, contacts, activation_prob, active_window,
            need_monotone=monotone is None, need_submodular=submodular is None)
        if found_monotone:
            monotone = found_monotone
            logger.info(f"Monotonicity witness at instance {instance}")
        if found_submodular:
            submodular = found_submodular
            logger.info(f"Submodularity witness at instance {instance}")
        if monotone and submodular:
            break

    if monotone is None and submodular is None:
        logger.info(f"No witness found in {searched} instances")
        return None
    return CounterexampleReport(monotonicity=monotone, submodularity=submodular, instances_searched=searched)


def compare_models(net: TemporalNetwork, seeds: Iterable[int], params: DiffusionParams, recovery_prob: float,
                   horizon: Optional[Horizon], n: int, base_seed: int,
                   infection_prob: Optional[float] = None) -> Dict[str, object]:
    """
    cpSI-R against temporal SIR under shared randomness.

    Realization r of both models uses rng seed base_seed + r. The SIR
    infection probability defaults to p0.

    Returns:
        Dictionary with both SpreadEstimates and the fraction of realizations
        whose SIR infected set is contained in the cpSI-R one
    """
    if n < 1:
        raise ValueError(f"realization count must be at least 1, got {n}")
    seeds = sorted(set(seeds))
    infection_prob = params.p0 if infection_prob is None else infection_prob
    cpsir_sizes, sir_sizes, contained = [], [], 0

    for r in range(n):
        cpsir = simulate_cpsir_once(net, seeds, params, horizon, base_seed + r)
        sir = simulate_sir_once(net, seeds, infection_prob, recovery_prob, horizon, base_seed + r)
        cpsir_sizes.append(cpsir.size)
        sir_sizes.append(sir.size)
        contained += sir.infected <= cpsir.infected

    return {
        'cpsir': summarize_samples(np.array(cpsir_sizes, dtype=np.float64)),
        'sir': summarize_samples(np.array(sir_sizes, dtype=np.float64)),
        'dominance_fraction': contained / n,
    }


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def export_csv(rows: Sequence[ResultRow], path: str) -> None:
    """Write result rows with a fixed header, 6-decimal reals and '\\n' newlines."""
    logger.info(f"Writing {len(rows)} result rows to {path}")
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(RESULT_HEADER)
        for row in rows:
            writer.writerow([_format_value(getattr(row, name)) for name in RESULT_HEADER])


def read_results_csv(path: str) -> List[ResultRow]:
    converters = {item.name: item.type for item in fields(ResultRow)}
    with open(path, 'r', encoding='utf-8', newline='') as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != RESULT_HEADER:
            raise ValueError(f"unexpected result header {reader.fieldnames}")
        return [ResultRow(**{name: _convert(converters[name], raw) for name, raw in record.items()})
                for record in reader]


def _convert(kind, raw: str):
    if kind in (int, 'int'):
        return int(raw)
    if kind in (float, 'float'):
        return float(raw)
    return raw


def spread_percent(estimate: SpreadEstimate, node_count: int) -> Tuple[float, float]:
    """Mean spread and its standard error as percentages of the node count."""
    return 100.0 * estimate.mean / node_count, 100.0 * estimate.stderr / node_count
