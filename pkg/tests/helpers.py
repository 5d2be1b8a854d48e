"""테스트용 작은 그래프·covering 인스턴스 생성기."""

from __future__ import annotations

import networkx as nx
import numpy as np
from hypothesis import strategies as st

from core.graph import Graph, build_graph, prepare_weights
from core.sampling import CoveringSet


def weighted_graph(edges, n: int, model: str = "ic", p: float | None = None) -> Graph:
    """(u, v[, w]) 목록 → 준비된 Graph. p를 주면 모든 엣지 가중치를 p로."""
    rows = [(e[0], e[1], p if p is not None else (e[2] if len(e) > 2 else None)) for e in edges]
    return prepare_weights(build_graph(rows, n=n), model, 0.0, 0.1, seed=0)


def chain(n: int, p: float, model: str = "ic") -> Graph:
    return weighted_graph([(i, i + 1) for i in range(n - 1)], n, model, p)


def from_networkx(g: nx.Graph, model: str = "ic", p: float | None = None, seed: int = 0) -> Graph:
    """networkx 그래프 → Graph. 무방향이면 양방향 엣지."""
    g = nx.convert_node_labels_to_integers(g)
    edges = list(g.edges())
    if not g.is_directed():
        edges += [(v, u) for u, v in edges]
    rows = [(u, v, p) for u, v in edges]
    return prepare_weights(build_graph(rows, n=g.number_of_nodes()), model, 0.0, 0.1, seed=seed)


def covering_from_lists(lists: dict[int, list[int]]) -> dict[int, CoveringSet]:
    return {v: CoveringSet.of(v, ids) for v, ids in lists.items()}


def random_covering(rng: np.random.Generator, max_vertices: int, max_universe: int,
                    density: float | None = None) -> tuple[int, dict[int, CoveringSet]]:
    """무작위 covering 인스턴스 (universe 크기, {정점: CoveringSet})."""
    n_vertices = int(rng.integers(1, max_vertices + 1))
    universe = int(rng.integers(1, max_universe + 1))
    p = density if density is not None else float(rng.uniform(0.05, 0.5))
    sets = {}
    for v in range(n_vertices):
        ids = np.nonzero(rng.random(universe) < p)[0]
        sets[v] = CoveringSet(v, ids.astype(np.int64))
    return universe, sets


@st.composite
def covering_instances(draw, max_vertices: int = 10, max_universe: int = 24):
    universe = draw(st.integers(1, max_universe))
    n_vertices = draw(st.integers(1, max_vertices))
    lists = draw(st.lists(
        st.sets(st.integers(0, universe - 1), max_size=universe),
        min_size=n_vertices, max_size=n_vertices,
    ))
    return universe, {v: CoveringSet.of(v, ids) for v, ids in enumerate(lists)}
