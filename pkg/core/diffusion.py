"""정방향 확산 시뮬레이션: 시드 집합의 기대 영향력 σ(S) 측정."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from config import EXACT_INFLUENCE_MAX_EDGES, MODEL_IC, MODELS
from core.errors import ModelStateError, ParameterError, RefusalError
from core.graph import Graph
from core.rng import mix64, stream
from utils.log_utils import get_logger

logger = get_logger("diffusion")


@dataclass(frozen=True)
class InfluenceEstimate:
    mean: float
    stderr: float
    trials: int

    def as_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "trials": self.trials}


def _seed_array(graph: Graph, seeds: Iterable[int]) -> np.ndarray:
    arr = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if len(arr) and (arr[0] < 0 or arr[-1] >= graph.n):
        bad = arr[(arr < 0) | (arr >= graph.n)][0]
        raise ParameterError(f"시드 정점 {int(bad)}가 범위 [0, {graph.n - 1}] 밖")
    return arr


def _check_model(graph: Graph, model: str) -> None:
    if model not in MODELS:
        raise ParameterError(f"알 수 없는 확산 모델: {model!r}")
    if not graph.is_prepared_for(model):
        raise ModelStateError(f"그래프가 {model.upper()} 모델용으로 준비되지 않음")


def _simulate(graph: Graph, seeds: np.ndarray, model: str, trial_seed: int) -> int:
    if len(seeds) == 0:
        return 0
    rng = stream(trial_seed, 0)
    active = np.zeros(graph.n, dtype=bool)
    active[seeds] = True

    if model == MODEL_IC:
        targets = graph.dst[graph.fwd_edges]
        weights = graph.weight[graph.fwd_edges]
        offsets = graph.fwd_offsets
        frontier = seeds.tolist()
        while frontier:
            nxt = []
            for u in frontier:
                lo, hi = offsets[u], offsets[u + 1]
                if hi == lo:
                    continue
                hit = targets[lo:hi][rng.random(hi - lo) < weights[lo:hi]]
                for v in hit.tolist():
                    if not active[v]:
                        active[v] = True
                        nxt.append(v)
            frontier = nxt
        return int(active.sum())

    # LT: 임계값 τ ∈ (0, 1], 동기 라운드
    tau = 1.0 - rng.random(graph.n)
    while True:
        live = active[graph.src]
        pressure = np.bincount(graph.dst[live], weights=graph.weight[live], minlength=graph.n)
        newly = ~active & (pressure >= tau)
        if not newly.any():
            return int(active.sum())
        active |= newly


def simulate_once(graph: Graph, seeds: Iterable[int], model: str, trial_seed: int) -> int:
    """한 번의 확산. 정지 시점의 활성 정점 수를 반환 (입력과 trial_seed의 순수 함수)."""
    _check_model(graph, model)
    return _simulate(graph, _seed_array(graph, seeds), model, trial_seed)


def trial_seeds(base_seed: int, trials: int) -> list[int]:
    return [mix64(base_seed, t) for t in range(trials)]


def expected_influence(graph: Graph, seeds: Iterable[int], model: str, trials: int,
                       base_seed: int) -> InfluenceEstimate:
    """Monte-Carlo 평균과 표준오차. trials=1이면 표준오차 0."""
    if trials < 1:
        raise ParameterError(f"trials는 1 이상이어야 함: {trials}")
    _check_model(graph, model)
    arr = _seed_array(graph, seeds)
    counts = np.fromiter(
        (_simulate(graph, arr, model, s) for s in trial_seeds(base_seed, trials)),
        dtype=np.float64, count=trials,
    )
    stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    estimate = InfluenceEstimate(float(counts.mean()), stderr, trials)
    logger.debug("영향력 %.3f ± %.3f (%d회, 시드 %d개)", estimate.mean, estimate.stderr, trials, len(arr))
    return estimate


# ────────────────────────────────────────
# 정확 계산 (작은 그래프 전용)
# ────────────────────────────────────────

def _reach(n: int, seeds: np.ndarray, src: np.ndarray, dst: np.ndarray) -> int:
    active = np.zeros(n, dtype=bool)
    active[seeds] = True
    frontier = seeds.tolist()
    adjacency: dict[int, list[int]] = {}
    for u, v in zip(src.tolist(), dst.tolist()):
        adjacency.setdefault(u, []).append(v)
    while frontier:
        nxt = []
        for u in frontier:
            for v in adjacency.get(u, ()):
                if not active[v]:
                    active[v] = True
                    nxt.append(v)
        frontier = nxt
    return int(active.sum())


def exact_influence(graph: Graph, seeds: Iterable[int], model: str = MODEL_IC) -> float:
    """모든 live-edge 세계를 열거한 정확한 σ(S).

    IC는 엣지마다 살아있음/죽음, LT는 정점마다 진입 엣지 하나 또는 없음을 고른다.
    """
    _check_model(graph, model)
    m = graph.edge_count
    if m > EXACT_INFLUENCE_MAX_EDGES:
        raise RefusalError(f"정확 계산 한도 초과: 엣지 {m}개 (최대 {EXACT_INFLUENCE_MAX_EDGES})")
    arr = _seed_array(graph, seeds)
    if len(arr) == 0:
        return 0.0

    total = 0.0
    if model == MODEL_IC:
        for world in itertools.product((False, True), repeat=m):
            live = np.array(world, dtype=bool)
            prob = float(np.prod(np.where(live, graph.weight, 1.0 - graph.weight)))
            if prob > 0.0:
                total += prob * _reach(graph.n, arr, graph.src[live], graph.dst[live])
        return total

    # LT: 정점별 선택지 (진입 엣지 번호 또는 -1)
    choices = []
    for v in range(graph.n):
        incoming = np.nonzero(graph.dst == v)[0].tolist()
        rest = 1.0 - float(graph.weight[incoming].sum()) if incoming else 1.0
        choices.append([(e, float(graph.weight[e])) for e in incoming] + [(-1, max(0.0, rest))])
    for world in itertools.product(*choices):
        prob = math.prod(p for _, p in world)
        if prob > 0.0:
            edges = np.array([e for e, _ in world if e >= 0], dtype=np.int64)
            total += prob * _reach(graph.n, arr, graph.src[edges], graph.dst[edges])
    return total
