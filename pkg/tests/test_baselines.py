import pytest

from src.baselines import (SEEDERS, BaselineParams, SeedingContext, borgs_tang, configuration_entropy,
                           degree_discount_trace, dynamic_ci, dynamic_ci_scores, entropy_rank, entropy_scores,
                           inmfa_estimate, inmfa_seed, inmfa_states, select_seeds)
from src.seeding import SelectionConfig
from src.tgraph import TemporalNetwork, build_snapshots
from tests.helpers import CERTAIN, random_network


@pytest.fixture
def path_net():
    return TemporalNetwork.from_contacts([(0, 1, 0), (1, 2, 1), (2, 3, 2), (3, 4, 3)])


def classic_degree_discount(node_count, edges, k):
    """Classic degree discount with zero propagation probability: D(q) - 2 t_q."""
    neighbours = {node: set() for node in range(node_count)}
    for u, v in edges:
        neighbours[u].add(v)
        neighbours[v].add(u)
    discount = {node: len(nbrs) for node, nbrs in neighbours.items()}
    chosen = dict.fromkeys(range(node_count), 0)
    seeds = []
    for _ in range(k):
        pick = max(sorted(discount), key=discount.get)
        seeds.append(pick)
        del discount[pick]
        for neighbour in neighbours[pick]:
            if neighbour in discount:
                chosen[neighbour] += 1
                discount[neighbour] = len(neighbours[neighbour]) - 2 * chosen[neighbour]
    return tuple(seeds)


class TestBaselineParams:
    def test_defaults(self):
        params = BaselineParams()
        assert params.susceptibility_alpha == 0.01
        assert params.ci_radius == 10
        assert params.samples_for(30) == 300

    @pytest.mark.parametrize('kwargs', [{'bt_lambda': 1.5}, {'ci_radius': 0}, {'bt_gamma': 0},
                                        {'inmfa_mu': -0.1}])
    def test_rejects_invalid_values(self, kwargs):
        with pytest.raises(ValueError):
            BaselineParams(**kwargs)


class TestDegreeDiscount:
    def test_path_picks_and_discounts(self, path_net):
        seeds, history = degree_discount_trace(path_net, 2, BaselineParams(susceptibility_alpha=0.01))
        assert seeds == (1, 3)
        assert history[0][2] == pytest.approx(-0.01)
        assert history[0][0] == pytest.approx(-1.0)
        assert 1 not in history[0]

    def test_budget_checked(self, path_net):
        with pytest.raises(ValueError):
            degree_discount_trace(path_net, 6, BaselineParams())

    def test_zero_susceptibility_is_classic_degree_discount(self, rng):
        for _ in range(20):
            net = random_network(rng, 12, 30, 6)
            edges = set(zip(net.sources.tolist(), net.targets.tolist()))
            seeds, _ = degree_discount_trace(net, 4, BaselineParams(susceptibility_alpha=0.0))
            assert seeds == classic_degree_discount(net.node_count, edges, 4)


class TestBorgsTang:
    def test_deterministic_for_seed(self, rng):
        net = random_network(rng, 12, 40, 8)
        params = BaselineParams(bt_lambda=0.3, bt_gamma=200)
        assert borgs_tang(net, 3, params, 5) == borgs_tang(net, 3, params, 5)

    def test_full_retention_ties_break_by_id(self, star_net):
        assert borgs_tang(star_net, 1, BaselineParams(bt_lambda=1.0, bt_gamma=20), 0) == (0,)


class TestDynamicCi:
    def test_star_scores(self):
        net = TemporalNetwork.from_contacts([(0, leaf, leaf - 1) for leaf in range(1, 5)], node_count=6)
        scores = dynamic_ci_scores(net, BaselineParams())
        assert scores[0] == 16.0
        assert scores[5] == 0.0
        assert dynamic_ci(net, 1, BaselineParams()) == (0,)

    def test_radius_limits_the_ball(self):
        net = TemporalNetwork.from_contacts([(0, 1, 0), (1, 2, 5)])
        assert dynamic_ci_scores(net, BaselineParams(ci_radius=2))[0] == 2.0


class TestInmfa:
    def test_single_edge_outbreak(self):
        series = build_snapshots(TemporalNetwork.from_contacts([(0, 1, 0)]), 1)
        params = BaselineParams(inmfa_lambda=0.5, inmfa_mu=0.0)
        assert inmfa_estimate(series, [0], params) == pytest.approx(0.75)

    def test_no_transmission_keeps_seed_fraction(self, star_net):
        series = build_snapshots(star_net, 1)
        assert inmfa_estimate(series, [0, 3], BaselineParams(inmfa_lambda=0.0)) == pytest.approx(2 / 6)

    def test_states_stay_normalised(self, star_net):
        for susceptible, infected, recovered in inmfa_states(build_snapshots(star_net, 1), [2], BaselineParams()):
            assert (susceptible + infected + recovered) == pytest.approx([1.0] * 6)
            assert susceptible.min() >= -1e-12

    def test_greedy_picks_hub(self, star_net):
        seeds, calls = inmfa_seed(build_snapshots(star_net, 1), 1, BaselineParams())
        assert seeds == (0,)
        assert calls == 6

    def test_ties_break_by_node_id(self, star_net):
        seeds, _ = inmfa_seed(build_snapshots(star_net, 1), 2, BaselineParams(inmfa_lambda=0.0))
        assert seeds == (0, 1)


class TestEntropy:
    def test_configuration_entropy(self):
        assert configuration_entropy(['A', 'A', 'B']) == pytest.approx(0.6365141682948128, abs=1e-12)
        assert configuration_entropy([]) == 0.0

    def test_hub_has_richest_neighbourhood(self, star_net):
        assert entropy_rank(build_snapshots(star_net, 1), 1) == (0,)

    def test_needs_two_snapshots(self):
        series = build_snapshots(TemporalNetwork.from_contacts([(0, 1, 0)]), 1)
        with pytest.raises(ValueError):
            entropy_scores(series)

    def test_relabelling_permutes_scores(self, rng):
        for _ in range(10):
            net = random_network(rng, 8, 30, 6)
            relabel = rng.permutation(net.node_count).tolist()
            contacts = zip(net.sources.tolist(), net.targets.tolist(), net.times.tolist())
            moved = TemporalNetwork.from_contacts([(relabel[u], relabel[v], t) for u, v, t in contacts],
                                                  node_count=net.node_count)
            scores = entropy_scores(build_snapshots(net, 1))
            moved_scores = entropy_scores(build_snapshots(moved, 1))
            for node in range(net.node_count):
                assert moved_scores[relabel[node]] == pytest.approx(scores[node], abs=1e-12)


class TestDispatch:
    @pytest.fixture
    def context(self, star_net):
        return SeedingContext(star_net, CERTAIN, SelectionConfig(k=1, eta=0.0), rng_seed=3)

    @pytest.mark.parametrize('method', sorted(SEEDERS))
    def test_every_seeder_returns_budget(self, context, method):
        selection = select_seeds(method, context, 2)
        assert len(selection.seeds) == 2
        assert selection.method == method
        assert 2.0 <= selection.objective <= 6.0

    def test_unknown_method(self, context):
        with pytest.raises(ValueError, match='registered methods'):
            select_seeds('pagerank', context, 1)
