import math

import numpy as np
import pytest

from src.diffusion import DiffusionParams, SpreadEstimate
from src.harness import (RESULT_HEADER, ExperimentSpec, ResultRow, compare_models, export_csv,
                         find_counterexample, generate_synthetic_ba, load_dataset, read_results_csv,
                         spread_percent)
from src.seeding import GuardRefusedError
from tests.helpers import random_network


class TestSyntheticNetwork:
    def test_two_nodes_one_event(self):
        net = generate_synthetic_ba(2, 1, 0)
        assert net.events == ((0, 1, 0),)

    def test_event_i_at_time_i(self):
        net = generate_synthetic_ba(30, 90, 4)
        assert net.times.tolist() == list(range(90))
        assert net.node_count == 30

    def test_every_node_arrives(self):
        net = generate_synthetic_ba(50, 60, 1)
        touched = set(net.sources.tolist()) | set(net.targets.tolist())
        assert touched == set(range(50))

    def test_same_seed_same_stream(self):
        assert generate_synthetic_ba(40, 120, 9).events == generate_synthetic_ba(40, 120, 9).events

    def test_degree_distribution_is_heavy_tailed(self):
        for seed in range(3):
            net = generate_synthetic_ba(10_000, 20_000, seed)
            degree = np.bincount(np.concatenate([net.sources, net.targets]), minlength=net.node_count)
            assert degree.max() >= 5 * np.median(degree)

    def test_too_few_events(self):
        with pytest.raises(ValueError):
            generate_synthetic_ba(10, 5, 0)

    def test_size_guard(self):
        with pytest.raises(GuardRefusedError):
            generate_synthetic_ba(5, 60, 0, huge_limit=50)
        assert generate_synthetic_ba(5, 60, 0, allow_huge=True, huge_limit=50).num_events == 60


class TestLoadDataset:
    def test_generator_spec(self):
        net = load_dataset('ba:10:20', rng_seed=2)
        assert (net.node_count, net.num_events) == (10, 20)

    def test_bad_generator_spec(self):
        with pytest.raises(ValueError, match='ba:<nodes>:<events>'):
            load_dataset('ba:10')

    def test_edge_list_path(self, write_edges):
        assert load_dataset(write_edges(['0 1 0', '1 2 1'])).num_events == 2


class TestExperimentSpec:
    def test_cells_iterate_k_then_eta_then_method(self):
        spec = ExperimentSpec('ba:10:20', ('ours', 'entropy'), (1, 2), (0.5,))
        assert spec.cells() == [(0, 1, 0.5, 'ours'), (1, 1, 0.5, 'entropy'),
                                (2, 2, 0.5, 'ours'), (3, 2, 0.5, 'entropy')]

    @pytest.mark.parametrize('kwargs', [{'methods': ()}, {'k_values': ()}, {'mc_realizations': 0},
                                        {'window_width': 0}])
    def test_rejects_invalid_grids(self, kwargs):
        base = {'dataset': 'ba:10:20', 'methods': ('ours',), 'k_values': (1,), 'eta_values': (0.5,)}
        with pytest.raises(ValueError):
            ExperimentSpec(**{**base, **kwargs})


class TestCounterexampleSearch:
    @pytest.mark.parametrize('window', [1, 2])
    def test_finite_window_breaks_both_properties(self, window):
        report = find_counterexample(activation_prob=1.0, active_window=window, rng_seed=0)
        assert report is not None and report.complete

        drop = report.monotonicity
        assert drop.spreads['S+u'] < drop.spreads['S']
        assert drop.sets['S'] < drop.sets['S+u']

        sub = report.submodularity
        gain_small = sub.spreads['A+x'] - sub.spreads['A']
        gain_large = sub.spreads['B+x'] - sub.spreads['B']
        assert gain_small < gain_large
        assert sub.sets['A'] <= sub.sets['B']

    def test_witness_description_lists_contacts(self):
        report = find_counterexample(active_window=1, rng_seed=0)
        text = report.monotonicity.describe()
        assert text.startswith('monotonicity witness')
        assert 'contact' in text

    def test_infinite_window_has_no_witness(self):
        assert find_counterexample(active_window=math.inf, rng_seed=0, budget=200) is None

    @pytest.mark.parametrize('kwargs', [{'max_nodes': 2}, {'max_nodes': 11}, {'max_windows': 7}, {'budget': 0}])
    def test_search_bounds(self, kwargs):
        with pytest.raises(ValueError):
            find_counterexample(**kwargs)


class TestCompareModels:
    def test_sir_is_contained_in_cpsir(self, rng):
        params = DiffusionParams(p0=0.5, reinforce_alpha=50.0, scale_beta=1.0, decay_gamma=0.0, tau=1e6)
        for _ in range(20):
            net = random_network(rng, 10, 30, 8)
            result = compare_models(net, {0}, params, recovery_prob=0.2, horizon=None, n=50, base_seed=7)
            assert result['dominance_fraction'] == 1.0
            assert result['sir'].mean <= result['cpsir'].mean

    def test_requires_realizations(self, star_net):
        with pytest.raises(ValueError):
            compare_models(star_net, {0}, DiffusionParams(), 0.1, None, 0, 0)


class TestResultCsv:
    def test_header_only_when_empty(self, tmp_path):
        path = tmp_path / 'results.csv'
        export_csv([], str(path))
        assert path.read_text() == ','.join(RESULT_HEADER) + '\n'

    def test_round_trip(self, tmp_path):
        path = tmp_path / 'results.csv'
        row = ResultRow('ba:10:20', 'ours', 2, 0.5, 37.5, 1.25, 0.0, 14)
        export_csv([row], str(path))
        lines = path.read_bytes().split(b'\n')
        assert lines[1] == b'ba:10:20,ours,2,0.500000,37.500000,1.250000,0.000000,14'
        assert lines[2] == b''
        assert read_results_csv(str(path)) == [row]

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / 'other.csv'
        path.write_text('a,b\n1,2\n')
        with pytest.raises(ValueError, match='header'):
            read_results_csv(str(path))


def test_spread_percent():
    pct, stderr = spread_percent(SpreadEstimate(mean=5.0, stderr=0.5, n_realizations=10), 20)
    assert (pct, stderr) == (25.0, 2.5)
