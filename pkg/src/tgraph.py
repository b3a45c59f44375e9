"""
Temporal graph module.
Stores timestamped contact streams, builds windowed snapshots, scores snapshot
similarity, samples informative timestamps and answers temporal reachability.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.edge_list_reader import EdgeListReader

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class ContactEvent(NamedTuple):
    source: int
    target: int
    time: int


class Horizon(NamedTuple):
    """Closed time interval [start, end] in dataset-native units."""
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1


def _frozen_array(values: Sequence[int]) -> np.ndarray:
    array = np.asarray(values, dtype=np.int64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TemporalNetwork:
    """
    Immutable stream of contact events over the node universe [0, node_count).

    Events are held as three parallel read-only arrays sorted by
    (time, source, target). Undirected networks store each contact once
    with source < target.
    """
    node_count: int
    sources: np.ndarray
    targets: np.ndarray
    times: np.ndarray
    directed: bool = False

    @classmethod
    def from_contacts(cls, contacts: Iterable[Tuple[int, int, int]], directed: bool = False,
                      node_count: Optional[int] = None) -> 'TemporalNetwork':
        """
        Build a network from raw (source, target, time) contacts.

        Args:
            contacts: Iterable of contact triples
            directed: Whether contacts are one-way
            node_count: Size of the node universe; defaults to 1 + max id seen

        Returns:
            Sorted, validated TemporalNetwork
        """
        cleaned = []
        for source, target, time in contacts:
            source, target, time = int(source), int(target), int(time)
            if source == target:
                raise ValueError(f"self-loop contact on node {source} at t={time}")
            if source < 0 or target < 0:
                raise ValueError(f"negative node id in contact ({source}, {target}, {time})")
            if time < 0:
                raise ValueError(f"negative timestamp in contact ({source}, {target}, {time})")
            if not directed and source > target:
                source, target = target, source
            cleaned.append((time, source, target))

        cleaned.sort()
        max_id = max((max(s, t) for _, s, t in cleaned), default=-1)
        if node_count is None:
            node_count = max_id + 1
        if node_count < 1:
            raise ValueError("a temporal network needs at least one node")
        if max_id >= node_count:
            raise ValueError(f"node id {max_id} outside universe of {node_count} nodes")

        return cls(
            node_count=node_count,
            sources=_frozen_array([s for _, s, _ in cleaned]),
            targets=_frozen_array([t for _, _, t in cleaned]),
            times=_frozen_array([time for time, _, _ in cleaned]),
            directed=directed,
        )

    @property
    def num_events(self) -> int:
        return int(self.times.shape[0])

    @property
    def t_min(self) -> int:
        return int(self.times[0]) if self.num_events else 0

    @property
    def t_max(self) -> int:
        return int(self.times[-1]) if self.num_events else 0

    @cached_property
    def events(self) -> Tuple[ContactEvent, ...]:
        return tuple(ContactEvent(s, t, time) for s, t, time in
                     zip(self.sources.tolist(), self.targets.tolist(), self.times.tolist()))

    def full_horizon(self) -> Horizon:
        return Horizon(self.t_min, self.t_max)

    def event_range(self, start: int, end: int) -> Tuple[int, int]:
        """Index range [lo, hi) of events with start <= time <= end."""
        lo = int(np.searchsorted(self.times, start, side='left'))
        hi = int(np.searchsorted(self.times, end, side='right'))
        return lo, hi

    def events_between(self, start: int, end: int) -> Tuple[ContactEvent, ...]:
        lo, hi = self.event_range(start, end)
        return self.events[lo:hi]

    def clip_horizon(self, horizon: Optional[Horizon]) -> Horizon:
        """Clip a horizon to [t_min, t_max], warning when it had to move."""
        if horizon is None:
            return self.full_horizon()
        start, end = int(horizon[0]), int(horizon[1])
        if end < start:
            raise ValueError(f"horizon end {end} precedes start {start}")
        clipped = Horizon(max(start, self.t_min), min(end, self.t_max))
        if clipped.end < clipped.start:
            clipped = Horizon(start, start)
        if clipped != (start, end):
            logger.warning(f"Horizon ({start}, {end}) clipped to ({clipped.start}, {clipped.end})")
        return clipped

    def check_node(self, node: int) -> None:
        if not 0 <= node < self.node_count:
            raise ValueError(f"node {node} outside [0, {self.node_count})")


@dataclass(frozen=True)
class Snapshot:
    label: int
    edges: FrozenSet[Edge] = frozenset()

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class SnapshotSeries:
    window_width: int
    origin: int
    snapshots: Tuple[Snapshot, ...]
    directed: bool = False
    node_count: int = 0

    def __len__(self) -> int:
        return len(self.snapshots)

    def __getitem__(self, index: int) -> Snapshot:
        return self.snapshots[index]

    def timestamp_of(self, index: int) -> int:
        """First timestamp covered by window `index`."""
        return self.origin + index * self.window_width

    def window_of(self, time: int) -> int:
        return (time - self.origin) // self.window_width


@dataclass(frozen=True)
class SimilarityWeights:
    w_jaccard: float = 0.5
    w_kulczynski: float = 0.5

    def __post_init__(self):
        for name in ('w_jaccard', 'w_kulczynski'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if abs(self.w_jaccard + self.w_kulczynski - 1.0) > 1e-12:
            raise ValueError(f"similarity weights must sum to 1, got {self.w_jaccard} + {self.w_kulczynski}")


class AuditRecord(NamedTuple):
    index: int
    score: float
    step_used: int
    selected: bool


@dataclass(frozen=True)
class SampleSchedule:
    """Selected window indices plus the comparisons that produced them."""
    selected: Tuple[int, ...]
    eta: float
    origin: int = 0
    window_width: int = 1
    audit: Tuple[AuditRecord, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.selected)

    def timestamps(self) -> List[int]:
        return [self.origin + index * self.window_width for index in self.selected]

    def breakpoints(self, horizon: Horizon) -> List[int]:
        """
        Interval boundaries t_0 < t_1 < ... < t_r covering the horizon.

        t_0 is the horizon start, interior points are the selected window
        starts inside the horizon, and t_r = horizon.end + 1 so the last
        half-open interval includes events at horizon.end.
        """
        if not self.selected:
            raise ValueError("sample schedule is empty")
        interior = [t for t in self.timestamps() if horizon.start < t <= horizon.end]
        return [horizon.start] + sorted(set(interior)) + [horizon.end + 1]


def load_edge_list(path: str, directed: bool = False) -> TemporalNetwork:
    """Load a `u v t` edge-list file into a TemporalNetwork."""
    reader = EdgeListReader(directed=directed)
    contacts = reader.read_contacts(path)
    net = TemporalNetwork.from_contacts(contacts, directed=directed)
    logger.info(f"Temporal network ready: {net.node_count} nodes, {net.num_events} events, "
                f"t in [{net.t_min}, {net.t_max}]")
    return net


def write_edge_list(net: TemporalNetwork, path: str) -> None:
    """Write the event stream as a `u v t` edge-list file."""
    logger.info(f"Writing {net.num_events} events to {path}")
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(f"# nodes={net.node_count} events={net.num_events} directed={str(net.directed).lower()}\n")
        for source, target, time in net.events:
            handle.write(f"{source} {target} {time}\n")


def build_snapshots(net: TemporalNetwork, window_width: int) -> SnapshotSeries:
    """
    Aggregate the event stream into consecutive fixed-width windows.

    Window i covers [t_min + i*w, t_min + (i+1)*w); repeated contacts on the
    same pair inside one window collapse to a single edge.
    """
    if window_width <= 0:
        raise ValueError(f"window_width must be positive, got {window_width}")

    origin = net.t_min
    n_windows = max(1, math.ceil((net.t_max - origin + 1) / window_width))
    buckets: List[set] = [set() for _ in range(n_windows)]
    window_ids = ((net.times - origin) // window_width).tolist()
    for window, source, target in zip(window_ids, net.sources.tolist(), net.targets.tolist()):
        buckets[window].add((source, target))

    snapshots = tuple(Snapshot(label=i, edges=frozenset(edges)) for i, edges in enumerate(buckets))
    logger.debug(f"Built {n_windows} snapshots of width {window_width} from {net.num_events} events")
    return SnapshotSeries(window_width=window_width, origin=origin, snapshots=snapshots,
                          directed=net.directed, node_count=net.node_count)


def aggregate(net: TemporalNetwork) -> Snapshot:
    """Union of all contact pairs over the whole stream."""
    return Snapshot(label=net.t_min, edges=frozenset(zip(net.sources.tolist(), net.targets.tolist())))


def aggregated_graph(net: TemporalNetwork, horizon: Optional[Horizon] = None) -> nx.Graph:
    """networkx view of the pairs contacted inside the horizon (all nodes included)."""
    horizon = horizon or net.full_horizon()
    lo, hi = net.event_range(horizon.start, horizon.end)
    graph = nx.DiGraph() if net.directed else nx.Graph()
    graph.add_nodes_from(range(net.node_count))
    graph.add_edges_from(zip(net.sources[lo:hi].tolist(), net.targets[lo:hi].tolist()))
    return graph


def earliest_arrival(net: TemporalNetwork, source: int, start: int,
                     end: Optional[int] = None) -> Dict[int, int]:
    """
    Earliest arrival time of a strictly time-increasing path from `source`.

    The source may use any contact at time >= start; every other node relays
    only on contacts strictly later than its own arrival.

    Returns:
        Mapping node -> arrival time for every reachable node; the source maps to start
    """
    net.check_node(source)
    end = net.t_max if end is None else end
    lo, hi = net.event_range(start, end)

    arrival = {source: start}
    sources = net.sources[lo:hi].tolist()
    targets = net.targets[lo:hi].tolist()
    times = net.times[lo:hi].tolist()

    for u, v, t in zip(sources, targets, times):
        if v not in arrival and (u == source or (u in arrival and arrival[u] < t)):
            arrival[v] = t
        if not net.directed and u not in arrival and (v == source or (v in arrival and arrival[v] < t)):
            arrival[u] = t
    return arrival


def temporal_reachable(net: TemporalNetwork, source: int, start: int) -> FrozenSet[int]:
    """All nodes reachable from `source` by a temporal path starting at or after `start`."""
    return frozenset(earliest_arrival(net, source, start))


def jaccard(a: Snapshot, b: Snapshot) -> float:
    if not a.edges and not b.edges:
        return 1.0
    return len(a.edges & b.edges) / len(a.edges | b.edges)


def kulczynski(a: Snapshot, b: Snapshot) -> float:
    if not a.edges and not b.edges:
        return 1.0
    if not a.edges or not b.edges:
        return 0.0
    common = len(a.edges & b.edges)
    return 0.5 * (common / len(a.edges) + common / len(b.edges))


def similarity_score(a: Snapshot, b: Snapshot, weights: SimilarityWeights) -> float:
    return weights.w_jaccard * jaccard(a, b) + weights.w_kulczynski * kulczynski(a, b)


def sample_timestamps(series: SnapshotSeries, eta: float, weights: SimilarityWeights,
                      invert_threshold: bool = False) -> SampleSchedule:
    """
    Adaptive timestamp sampling over a snapshot series.

    Compares snapshot t with t+1; a passing score selects t and advances by
    one. A failing score starts exponential doubling (1, 2, 4, ...) of the
    right-hand snapshot while the left one stays pinned, until the score
    passes or the next jump leaves the series. With `invert_threshold` a
    score passes when it falls below eta instead.

    Args:
        series: Snapshot series to sample
        eta: Threshold in [0, 1]
        weights: Jaccard/Kulczynski mixing weights
        invert_threshold: Select low-similarity transitions instead

    Returns:
        SampleSchedule with the selected indices and a full audit trail
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")

    if len(series) < 2:
        logger.info("Fewer than two snapshots; schedule holds index 0 only")
        return SampleSchedule(selected=(0,), eta=eta, origin=series.origin, window_width=series.window_width)

    def passes(score: float) -> bool:
        return score < eta if invert_threshold else score >= eta

    max_t = len(series) - 1
    selected: List[int] = []
    audit: List[AuditRecord] = []
    t = 0

    while t < max_t:
        left = series[t]
        score = similarity_score(left, series[t + 1], weights)
        if passes(score):
            selected.append(t)
            audit.append(AuditRecord(t, score, 1, True))
            t += 1
            continue

        audit.append(AuditRecord(t, score, 1, False))
        # t + 1 already failed against the pinned snapshot
        t += 1
        step = 2
        while not passes(score) and t + step <= max_t:
            t += step
            score = similarity_score(left, series[t], weights)
            logger.debug(f"Doubling: compared pinned snapshot {left.label} with {t} (step {step}), score={score:.6f}")
            audit.append(AuditRecord(t, score, step, False))
            step *= 2

        if passes(score):
            selected.append(t)
            audit[-1] = audit[-1]._replace(selected=True)
            t += 1
        else:
            t += step

    logger.info(f"Sampled {len(selected)} of {len(series)} snapshots at eta={eta}")
    return SampleSchedule(selected=tuple(selected), eta=eta, origin=series.origin,
                          window_width=series.window_width, audit=tuple(audit))


def write_audit_csv(schedule: SampleSchedule, path: str) -> None:
    """Write the selected comparisons as `index,score,step_used`."""
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(['index', 'score', 'step_used'])
        for record in schedule.audit:
            if record.selected:
                writer.writerow([record.index, f"{record.score:.6f}", record.step_used])
    logger.info(f"Sampling audit written to {path}")


def write_schedule(schedule: SampleSchedule, path: str) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(f"# eta={schedule.eta} origin={schedule.origin} window_width={schedule.window_width}\n")
        for index in schedule.selected:
            handle.write(f"{index}\n")


def network_summary(net: TemporalNetwork) -> Dict[str, int]:
    """Dataset statistics in the shape of a dataset summary table row."""
    return {
        'nodes': net.node_count,
        'events': net.num_events,
        'distinct_edges': len(aggregate(net).edges),
        't_min': net.t_min,
        't_max': net.t_max,
        'directed': int(net.directed),
    }
