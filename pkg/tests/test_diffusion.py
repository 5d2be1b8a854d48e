import itertools

import networkx as nx
import numpy as np
import pytest

from core.diffusion import InfluenceEstimate, exact_influence, expected_influence, simulate_once, trial_seeds
from core.errors import ModelStateError, ParameterError, RefusalError
from core.graph import build_graph
from tests.helpers import chain, from_networkx, weighted_graph


def test_empty_seed_set_activates_nothing():
    assert simulate_once(chain(3, 0.5), [], "ic", 1) == 0
    assert expected_influence(chain(3, 0.5), [], "ic", 4, 1).mean == 0.0


def test_certain_edges_reach_whole_component():
    g = from_networkx(nx.path_graph(6), "ic", p=1.0)
    assert simulate_once(g, [2], "ic", 3) == 6


def test_lt_chain_with_unit_weights_cascades():
    g = chain(4, 1.0, "lt")
    assert all(simulate_once(g, [0], "lt", s) == 4 for s in trial_seeds(1, 20))


def test_chain_support():
    g = chain(3, 0.5)
    counts = {simulate_once(g, [0], "ic", s) for s in trial_seeds(5, 400)}
    assert counts == {1, 2, 3}


def test_chain_exact_expectation():
    assert exact_influence(chain(3, 0.5), [0]) == pytest.approx(1.75)


@pytest.mark.slow
def test_chain_monte_carlo_expectation():
    estimate = expected_influence(chain(3, 0.5), [0], "ic", 100_000, 8)
    assert estimate.mean == pytest.approx(1.75, abs=0.01)


def test_single_trial_has_zero_stderr():
    estimate = expected_influence(chain(4, 0.5), [0], "ic", 1, 2)
    assert estimate.stderr == 0.0
    assert estimate.as_dict() == {"mean": estimate.mean, "stderr": 0.0, "trials": 1}


def test_lt_star_center_always_activates():
    g = weighted_graph([(1, 0, 0.5), (2, 0, 0.5)], 3, "lt")
    estimate = expected_influence(g, [1, 2], "lt", 200, 3)
    assert estimate.mean == 3.0
    assert exact_influence(g, [1, 2], "lt") == pytest.approx(3.0)
    assert exact_influence(g, [1], "lt") == pytest.approx(1.5)


def test_simulation_is_pure_in_trial_seed():
    g = from_networkx(nx.gnm_random_graph(40, 160, seed=1, directed=True), "lt", p=0.3)
    assert simulate_once(g, [0, 5], "lt", 77) == simulate_once(g, [0, 5], "lt", 77)
    a = expected_influence(g, [0, 5], "lt", 50, 9)
    assert a == expected_influence(g, [0, 5], "lt", 50, 9)


def test_estimate_bounds():
    g = from_networkx(nx.gnm_random_graph(40, 160, seed=2, directed=True), "ic", p=0.2)
    estimate = expected_influence(g, [1, 2, 3], "ic", 64, 4)
    assert isinstance(estimate, InfluenceEstimate)
    assert 3 <= estimate.mean <= 40
    assert estimate.stderr >= 0.0


def test_seed_out_of_range():
    with pytest.raises(ParameterError):
        simulate_once(chain(3, 0.5), [3], "ic", 0)


def test_zero_trials_rejected():
    with pytest.raises(ParameterError):
        expected_influence(chain(3, 0.5), [0], "ic", 0, 0)


def test_unprepared_graph_rejected():
    with pytest.raises(ModelStateError):
        simulate_once(build_graph([(0, 1)]), [0], "ic", 0)


def test_statistical_monotonicity():
    g = from_networkx(nx.gnm_random_graph(60, 240, seed=3, directed=True), "ic", p=0.15)
    rng = np.random.default_rng(4)
    for _ in range(5):
        superset = rng.choice(60, size=6, replace=False)
        subset = superset[:3]
        small = expected_influence(g, subset, "ic", 300, 1)
        large = expected_influence(g, superset, "ic", 300, 1)
        assert large.mean >= small.mean - 3 * small.stderr


@pytest.mark.parametrize("model", ["ic", "lt"])
def test_submodularity_on_tiny_graphs(model):
    for seed in range(4):
        g = from_networkx(nx.gnm_random_graph(5, 8, seed=seed, directed=True), model, p=0.4)
        vertices = range(g.n)
        for x in vertices:
            others = [v for v in vertices if v != x]
            for b in itertools.combinations(others, 2):
                big = set(b)
                for a in (set(), {b[0]}):
                    gain_a = exact_influence(g, a | {x}, model) - exact_influence(g, a, model)
                    gain_b = exact_influence(g, big | {x}, model) - exact_influence(g, big, model)
                    assert gain_a >= gain_b - 1e-12


def test_exact_influence_refuses_large_graphs():
    g = chain(18, 0.5)
    with pytest.raises(RefusalError):
        exact_influence(g, [0])
