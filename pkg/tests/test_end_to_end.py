import networkx as nx
import pytest

from core.diffusion import expected_influence
from core.driver import run
from core.run_config import RunConfig, SeedConfig
from tests.helpers import from_networkx

pytestmark = pytest.mark.slow


def test_distributed_seeds_match_sequential_influence():
    # 척도 없는 그래프, 평균 차수 약 10, IC 가중치 [0, 0.1]
    graph = from_networkx(nx.barabasi_albert_graph(10_000, 5, seed=1), "ic", seed=3)
    seeds = SeedConfig.from_master(42)
    sequential = RunConfig(k=50, epsilon=0.13, mode="sequential", m=1, seeds=seeds)
    distributed = RunConfig(k=50, epsilon=0.13, mode="imm", m=8, alpha=1.0, seeds=seeds)

    seq = run(graph, sequential)
    dist = run(graph, distributed)
    assert seq.converged and dist.converged

    base = expected_influence(graph, seq.solution.seeds, "ic", 10_000, seeds.evaluation)
    other = expected_influence(graph, dist.solution.seeds, "ic", 10_000, seeds.evaluation)
    assert abs(other.mean - base.mean) <= 0.05 * base.mean
