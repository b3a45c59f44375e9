import itertools

import numpy as np
import pytest

from src.tgraph import TemporalNetwork


@pytest.fixture
def write_edges(tmp_path):
    """Write `u v t` lines to a file and return its path."""
    def _write(lines, name='edges.txt'):
        path = tmp_path / name
        path.write_text(''.join(f"{line}\n" for line in lines), encoding='utf-8')
        return str(path)
    return _write


@pytest.fixture
def toy_net():
    """Snapshots 0-2 hold edge (0,1); snapshot 3 holds four edges including (0,1)."""
    contacts = [(0, 1, 0), (0, 1, 1), (0, 1, 2), (0, 1, 3), (1, 2, 3), (2, 3, 3), (0, 3, 3)]
    return TemporalNetwork.from_contacts(contacts)


@pytest.fixture
def star_net():
    """Hub 0 contacts leaves 1..5 in turn, twice."""
    contacts = [(0, leaf, t) for t, leaf in enumerate(itertools.chain(range(1, 6), range(1, 6)))]
    return TemporalNetwork.from_contacts(contacts)


@pytest.fixture
def chain_net():
    """Path 0-1-2-3-4 with every edge active at each of t = 0..4."""
    contacts = [(i, i + 1, t) for t in range(5) for i in range(4)]
    return TemporalNetwork.from_contacts(contacts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """Keep TIM_* variables and stray config.yaml files out of every test."""
    for name in ('TIM_WORKERS', 'TIM_P0', 'TIM_ALPHA', 'TIM_BETA', 'TIM_GAMMA', 'TIM_TAU', 'TIM_WINDOW',
                 'TIM_ETA', 'TIM_MC', 'TIM_SEED', 'TIM_LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
