"""Shared builders for the test suite."""

from src.diffusion import DiffusionParams
from src.tgraph import SimilarityWeights, TemporalNetwork, build_snapshots, sample_timestamps

# p0 * (1 - exp(-50)) rounds to p0, so every contact succeeds when p0 = 1.
CERTAIN = DiffusionParams(p0=1.0, reinforce_alpha=50.0, scale_beta=1.0, decay_gamma=0.0, tau=1e6)
SILENT = DiffusionParams(p0=0.0)


def full_schedule(net, window_width=1):
    """Schedule that keeps every window transition (eta = 0)."""
    return sample_timestamps(build_snapshots(net, window_width), 0.0, SimilarityWeights())


def random_network(rng, n_nodes, n_events, n_times, first_matching=False):
    """Random undirected contact stream; optionally pair up every node at t = 0."""
    contacts = []
    if first_matching:
        order = rng.permutation(n_nodes).tolist()
        contacts += [(order[i], order[i + 1], 0) for i in range(0, n_nodes - 1, 2)]
        if n_nodes % 2:
            contacts.append((order[-1], order[0], 0))
    while len(contacts) < n_events:
        u, v = (int(x) for x in rng.integers(n_nodes, size=2))
        if u != v:
            contacts.append((u, v, int(rng.integers(n_times))))
    return TemporalNetwork.from_contacts(contacts, node_count=n_nodes)


def random_params(rng):
    return DiffusionParams(p0=float(rng.uniform(0.05, 1.0)), reinforce_alpha=float(rng.uniform(0.1, 3.0)),
                           scale_beta=float(rng.uniform(0.2, 1.0)), decay_gamma=float(rng.uniform(0.0, 0.5)),
                           tau=float(rng.uniform(1.0, 10.0)))
