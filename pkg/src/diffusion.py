"""
Diffusion module for the cpSI-R contagion model.
Provides the contact success law, event-driven simulators (cpSI-R, temporal
SIR, active-inactive), Monte Carlo spread estimation and the deterministic
probability-propagation influence estimator used for seed selection.
"""

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from src.tgraph import Horizon, SampleSchedule, TemporalNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiffusionParams:
    """
    cpSI-R parameter block.

    Defaults suit small desk-scale experiments.
    """
    p0: float = 0.1
    reinforce_alpha: float = 0.5
    scale_beta: float = 1.0
    decay_gamma: float = 0.01
    tau: float = 10.0

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if not math.isfinite(value):
                raise ValueError(f"{item.name} must be finite, got {value}")
        if not 0.0 <= self.p0 <= 1.0:
            raise ValueError(f"p0 must lie in [0, 1], got {self.p0}")
        if self.reinforce_alpha <= 0.0:
            raise ValueError(f"reinforce_alpha must be positive, got {self.reinforce_alpha}")
        if not 0.0 < self.scale_beta <= 1.0:
            raise ValueError(f"scale_beta must lie in (0, 1], got {self.scale_beta}")
        if self.decay_gamma < 0.0:
            raise ValueError(f"decay_gamma must be non-negative, got {self.decay_gamma}")
        if self.tau <= 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.p0 * self.scale_beta > 1.0:
            raise ValueError(f"p0 * scale_beta must not exceed 1, got {self.p0 * self.scale_beta}")

    def to_text(self) -> str:
        """Serialise as flat `key=value` lines."""
        return ''.join(f"{item.name}={getattr(self, item.name)!r}\n" for item in fields(self))

    @classmethod
    def from_text(cls, text: str) -> 'DiffusionParams':
        known = {item.name for item in fields(cls)}
        values = {}
        for line_number, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, sep, raw = line.partition('=')
            key = key.strip()
            if not sep or key not in known:
                raise ValueError(f"line {line_number}: unknown parameter entry {line!r}")
            values[key] = float(raw.strip())
        return cls(**values)


class NodeStatus(Enum):
    SUSCEPTIBLE = 'susceptible'
    ACTIVE = 'active'
    DORMANT = 'dormant'
    RECOVERED = 'recovered'


@dataclass
class NodeDiffusionState:
    status: NodeStatus
    infection_time: Optional[int] = None
    last_attempt_time: Optional[int] = None

    def clock(self) -> int:
        """delta_u: last attempt time, defaulting to the infection time."""
        return self.infection_time if self.last_attempt_time is None else self.last_attempt_time


class ExposureLedger:
    """Exposure counts k(u, v) for ordered node pairs."""

    def __init__(self):
        self._counts: Dict[Tuple[int, int], int] = defaultdict(int)

    def expose(self, source: int, target: int) -> int:
        self._counts[(source, target)] += 1
        return self._counts[(source, target)]



@dataclass(frozen=True)
class Realization:
    rng_seed: int
    infected: FrozenSet[int]
    activation_times: Mapping[int, int] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.infected)


@dataclass(frozen=True)
class InfluenceVector:
    probabilities: np.ndarray
    at_time: int

    def total(self) -> float:
        return float(self.probabilities.sum())


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    stderr: float
    n_realizations: int


def contact_success_probability(params: DiffusionParams, k: int, contact_time: float,
                                infector_infection_time: float) -> float:
    """p0 * (1 - exp(-alpha k)) * beta * exp(-gamma (t - t_u)), clamped to [0, 1]."""
    if k < 1:
        raise ValueError(f"exposure count must be at least 1, got {k}")
    elapsed = contact_time - infector_infection_time
    if elapsed < 0:
        raise ValueError(f"contact at {contact_time} precedes infector infection at {infector_infection_time}")
    reinforcement = -math.expm1(-params.reinforce_alpha * k)
    decay = params.scale_beta * math.exp(-params.decay_gamma * elapsed)
    return min(1.0, max(0.0, params.p0 * reinforcement * decay))


def _check_seeds(net: TemporalNetwork, seeds: Iterable[int]) -> FrozenSet[int]:
    seed_set = frozenset(int(s) for s in seeds)
    if not seed_set:
        raise ValueError("seed set must not be empty")
    for seed in seed_set:
        net.check_node(seed)
    return seed_set


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _horizon_draws(net: TemporalNetwork, horizon: Optional[Horizon], rng: np.random.Generator):
    """
    Events inside the horizon plus one uniform per contact direction.

    Every simulator consumes the same (n_events, 2) draw matrix first, so
    realizations sharing an rng_seed share their transmission randomness.
    """
    horizon = net.clip_horizon(horizon)
    lo, hi = net.event_range(horizon.start, horizon.end)
    draws = rng.random((hi - lo, 2))
    events = zip(net.sources[lo:hi].tolist(), net.targets[lo:hi].tolist(),
                 net.times[lo:hi].tolist(), draws.tolist())
    return horizon, events


def _realization(rng_seed: int, states: Mapping[int, NodeDiffusionState]) -> Realization:
    return Realization(
        rng_seed=rng_seed,
        infected=frozenset(states),
        activation_times={node: state.infection_time for node, state in sorted(states.items())},
    )


def simulate_cpsir_once(net: TemporalNetwork, seeds: Iterable[int], params: DiffusionParams,
                        horizon: Optional[Horizon], rng_seed: int) -> Realization:
    """
    One event-driven cpSI-R realization.

    Seeds are active from the horizon start. An active node that has not
    attempted an infection for more than tau goes dormant and stops
    transmitting until a contact with an active node reactivates it.
    Newly infected nodes transmit only on contacts strictly after their
    infection time. Infected nodes never return to susceptible.
    """
    seed_set = _check_seeds(net, seeds)
    rng = np.random.default_rng(rng_seed)
    horizon, events = _horizon_draws(net, horizon, rng)
    t0 = horizon.start

    states: Dict[int, NodeDiffusionState] = {
        seed: NodeDiffusionState(NodeStatus.ACTIVE, infection_time=t0) for seed in seed_set
    }
    ledger = ExposureLedger()

    def is_dormant(state: NodeDiffusionState, t: int) -> bool:
        if state.status is NodeStatus.ACTIVE and t - state.clock() > params.tau:
            state.status = NodeStatus.DORMANT
        return state.status is NodeStatus.DORMANT

    def attempt(u: int, v: int, t: int, draw: float) -> None:
        infector = states.get(u)
        if infector is None or is_dormant(infector, t):
            return
        if u not in seed_set and infector.infection_time >= t:
            return
        target = states.get(v)
        if target is None:
            k = ledger.expose(u, v)
            probability = contact_success_probability(params, k, t, infector.infection_time)
            infector.last_attempt_time = t
            if draw < probability:
                states[v] = NodeDiffusionState(NodeStatus.ACTIVE, infection_time=t)
        elif is_dormant(target, t):
            target.status = NodeStatus.ACTIVE
            target.last_attempt_time = t

    for u, v, t, (forward, backward) in events:
        attempt(u, v, t, forward)
        if not net.directed:
            attempt(v, u, t, backward)

    return _realization(rng_seed, states)


def simulate_sir_once(net: TemporalNetwork, seeds: Iterable[int], infection_prob: float,
                      recovery_prob: float, horizon: Optional[Horizon], rng_seed: int) -> Realization:
    """
    One temporal SIR realization.

    Recovery is drawn for every infectious node at each transition between
    distinct timestamps. Recovered nodes never transmit again.
    """
    _check_probability('infection_prob', infection_prob)
    _check_probability('recovery_prob', recovery_prob)
    seed_set = _check_seeds(net, seeds)
    rng = np.random.default_rng(rng_seed)
    horizon, events = _horizon_draws(net, horizon, rng)

    states: Dict[int, NodeDiffusionState] = {
        seed: NodeDiffusionState(NodeStatus.ACTIVE, infection_time=horizon.start) for seed in seed_set
    }
    current_time = None

    def attempt(u: int, v: int, t: int, draw: float) -> None:
        infector = states.get(u)
        if infector is None or infector.status is not NodeStatus.ACTIVE or v in states:
            return
        if u not in seed_set and infector.infection_time >= t:
            return
        if draw < infection_prob:
            states[v] = NodeDiffusionState(NodeStatus.ACTIVE, infection_time=t)

    for u, v, t, (forward, backward) in events:
        if current_time is not None and t != current_time:
            infectious = sorted(node for node, state in states.items() if state.status is NodeStatus.ACTIVE)
            if infectious:
                for node, draw in zip(infectious, rng.random(len(infectious)).tolist()):
                    if draw < recovery_prob:
                        states[node].status = NodeStatus.RECOVERED
        current_time = t
        attempt(u, v, t, forward)
        if not net.directed:
            attempt(v, u, t, backward)

    return _realization(rng_seed, states)


def simulate_active_inactive_once(net: TemporalNetwork, seeds: Iterable[int], activation_prob: float,
                                  active_window: float, rng_seed: int,
                                  horizon: Optional[Horizon] = None) -> Realization:
    """
    One realization of the active-inactive transition model.

    A node activated at time a can activate others on contacts at times t
    with a < t <= a + active_window (seeds also at t = a), then becomes
    inactive for good. Already activated nodes are never activated again.
    """
    _check_probability('activation_prob', activation_prob)
    if not active_window >= 1:
        raise ValueError(f"active_window must be at least 1, got {active_window}")
    seed_set = _check_seeds(net, seeds)
    rng = np.random.default_rng(rng_seed)
    horizon, events = _horizon_draws(net, horizon, rng)

    states: Dict[int, NodeDiffusionState] = {
        seed: NodeDiffusionState(NodeStatus.ACTIVE, infection_time=horizon.start) for seed in seed_set
    }

    def attempt(u: int, v: int, t: int, draw: float) -> None:
        source = states.get(u)
        if source is None or source.status is NodeStatus.RECOVERED or v in states:
            return
        if t - source.infection_time > active_window:
            source.status = NodeStatus.RECOVERED
            return
        if u not in seed_set and source.infection_time >= t:
            return
        if draw < activation_prob:
            states[v] = NodeDiffusionState(NodeStatus.ACTIVE, infection_time=t)

    for u, v, t, (forward, backward) in events:
        attempt(u, v, t, forward)
        if not net.directed:
            attempt(v, u, t, backward)

    return _realization(rng_seed, states)


def realization_sizes(net: TemporalNetwork, seeds: Iterable[int], params: DiffusionParams,
                      horizon: Optional[Horizon], n: int, base_seed: int) -> np.ndarray:
    """Spread of realizations base_seed .. base_seed + n - 1."""
    if n < 1:
        raise ValueError(f"realization count must be at least 1, got {n}")
    seed_set = _check_seeds(net, seeds)
    horizon = net.clip_horizon(horizon)
    return np.array([simulate_cpsir_once(net, seed_set, params, horizon, base_seed + r).size
                     for r in range(n)], dtype=np.float64)


def summarize_samples(samples: np.ndarray) -> SpreadEstimate:
    n = int(samples.shape[0])
    stderr = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return SpreadEstimate(mean=float(samples.mean()), stderr=stderr, n_realizations=n)


def estimate_spread_mc(net: TemporalNetwork, seeds: Iterable[int], params: DiffusionParams,
                       horizon: Optional[Horizon], n: int, base_seed: int) -> SpreadEstimate:
    """
    Monte Carlo estimate of the expected cpSI-R spread.

    Realization r uses rng seed base_seed + r, so two seed sets evaluated
    with the same base_seed see the same randomness stream.
    """
    estimate = summarize_samples(realization_sizes(net, seeds, params, horizon, n, base_seed))
    logger.debug(f"MC spread over {n} realizations: {estimate.mean:.4f} +/- {estimate.stderr:.4f}")
    return estimate


class InfluencePlan:
    """
    Seed-independent part of the influence estimator.

    For every schedule interval [t_j, t_{j+1}) it stores the directed
    contacts (u, i) with their success probability q. Exposure counts run
    over the whole horizon, the decay kernel is anchored at t_j, and a
    contact from u is dropped (q = 0) when it falls more than tau after u's
    last transmission opportunity. Any contact from a non-dormant node
    reactivates a dormant target's clock.
    """

    def __init__(self, net: TemporalNetwork, params: DiffusionParams, schedule: SampleSchedule,
                 horizon: Optional[Horizon] = None):
        self.node_count = net.node_count
        self.horizon = net.clip_horizon(horizon)
        self.breakpoints = schedule.breakpoints(self.horizon)
        self.intervals: List[Tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self._compile(net, params)

    def _compile(self, net: TemporalNetwork, params: DiffusionParams) -> None:
        clock = [self.horizon.start] * net.node_count
        exposures: Dict[Tuple[int, int], int] = defaultdict(int)
        tau = params.tau

        for left, right in zip(self.breakpoints, self.breakpoints[1:]):
            lo, hi = net.event_range(left, right - 1)
            infectors, infected, weights = [], [], []

            def attempt(u: int, v: int, t: int) -> None:
                if t - clock[u] > tau:
                    return
                exposures[(u, v)] += 1
                clock[u] = t
                q = contact_success_probability(params, exposures[(u, v)], t, left)
                if q > 0.0:
                    infectors.append(u)
                    infected.append(v)
                    weights.append(q)
                if t - clock[v] > tau:
                    clock[v] = t

            for u, v, t in zip(net.sources[lo:hi].tolist(), net.targets[lo:hi].tolist(),
                               net.times[lo:hi].tolist()):
                attempt(u, v, t)
                if not net.directed:
                    attempt(v, u, t)

            self.intervals.append((np.array(infectors, dtype=np.int64),
                                   np.array(infected, dtype=np.int64),
                                   np.array(weights, dtype=np.float64)))

        logger.debug(f"Compiled influence plan: {len(self.intervals)} intervals, "
                     f"{sum(len(w) for _, _, w in self.intervals)} weighted contacts")

    def propagate(self, seeds: Iterable[int]) -> InfluenceVector:
        """
        Evolve p(i, t) across the intervals.

        p(i, t_{j+1}) = 1 - (1 - p(i, t_j)) * prod over contacts (u, i) of
        (1 - p(u, t_j) q); seed probabilities stay pinned at 1.
        """
        seed_index = np.fromiter(seeds, dtype=np.int64)
        if seed_index.size == 0:
            raise ValueError("seed set must not be empty")
        if seed_index.min() < 0 or seed_index.max() >= self.node_count:
            raise ValueError(f"seed outside [0, {self.node_count})")

        p = np.zeros(self.node_count, dtype=np.float64)
        p[seed_index] = 1.0
        for infectors, infected, weights in self.intervals:
            if weights.size == 0:
                continue
            survival = np.ones(self.node_count, dtype=np.float64)
            np.multiply.at(survival, infected, 1.0 - p[infectors] * weights)
            p = 1.0 - (1.0 - p) * survival
            p[seed_index] = 1.0
        return InfluenceVector(probabilities=p, at_time=self.breakpoints[-1])

    def objective(self, seeds: Iterable[int]) -> float:
        """|S| + sum of p(i, t_r) over non-seeds."""
        return self.propagate(seeds).total()


class InfluenceEvaluator:
    """calc_influence bound to one network, parameter block and schedule, with a call counter."""

    def __init__(self, net: TemporalNetwork, params: DiffusionParams, schedule: SampleSchedule,
                 horizon: Optional[Horizon] = None):
        self.plan = InfluencePlan(net, params, schedule, horizon)
        self.evaluations = 0

    @property
    def horizon(self) -> Horizon:
        return self.plan.horizon

    @property
    def breakpoints(self) -> List[int]:
        return self.plan.breakpoints

    def __call__(self, seeds: Iterable[int]) -> float:
        self.evaluations += 1
        return self.plan.objective(seeds)


def calc_influence(seeds: Iterable[int], net: TemporalNetwork, params: DiffusionParams,
                   schedule: SampleSchedule, horizon: Optional[Horizon] = None) -> float:
    """Deterministic cpSI-R influence of a seed set over the sampled schedule."""
    seed_set = _check_seeds(net, seeds)
    return InfluencePlan(net, params, schedule, horizon).objective(sorted(seed_set))


def write_realization_csv(realization: Realization, path: str) -> None:
    """Dump `node,activation_time` rows for one realization."""
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(['node', 'activation_time'])
        for node, time in sorted(realization.activation_times.items()):
            writer.writerow([node, time])
    logger.info(f"Realization {realization.rng_seed} written to {path}")
