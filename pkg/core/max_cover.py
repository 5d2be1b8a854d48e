"""max-k-cover 솔버: 표준/지연 greedy, 절단, 버킷 스트리밍 집계, 전수 탐색 오라클.

covering set 하나가 후보 집합이고, 샘플 id가 덮어야 할 원소다.
동점은 항상 가장 작은 정점 id가 이긴다.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from config import BRUTE_FORCE_MAX_K, BRUTE_FORCE_MAX_VERTICES
from core.errors import ParameterError, RefusalError
from core.sampling import CoveringSet
from utils.log_utils import get_logger

logger = get_logger("max_cover")

MODE_LAZY = "lazy"
MODE_STANDARD = "standard"


@dataclass(frozen=True)
class Solution:
    """선택 순서대로의 시드와 각 시드의 한계 이득."""

    seeds: tuple[int, ...] = ()
    marginals: tuple[int, ...] = ()
    coverage: int = 0
    universe_size: int = 0
    budget: int = 0                 # 풀이에 쓰인 k
    origin: str = ""

    def __len__(self) -> int:
        return len(self.seeds)

    @property
    def fraction(self) -> float:
        return self.coverage / self.universe_size if self.universe_size else 0.0

    def prefix(self, count: int) -> "Solution":
        count = max(0, min(count, len(self.seeds)))
        marginals = self.marginals[:count]
        return Solution(
            seeds=self.seeds[:count], marginals=marginals, coverage=int(sum(marginals)),
            universe_size=self.universe_size, budget=self.budget, origin=self.origin,
        )

    def with_origin(self, origin: str) -> "Solution":
        return Solution(self.seeds, self.marginals, self.coverage,
                        self.universe_size, self.budget, origin)


def _normalize(covering_sets) -> list[CoveringSet]:
    if isinstance(covering_sets, dict):
        covering_sets = covering_sets.values()
    return sorted(covering_sets, key=lambda cs: cs.vertex)


def _check_universe(sets: list[CoveringSet], universe_size: int) -> None:
    for cs in sets:
        if len(cs.samples) and int(cs.samples[-1]) >= universe_size:
            raise ParameterError(
                f"정점 {cs.vertex}의 샘플 id {int(cs.samples[-1])}가 universe {universe_size} 이상"
            )


def _gain(covered: np.ndarray, samples: np.ndarray) -> int:
    return int(np.count_nonzero(~covered[samples]))


# ────────────────────────────────────────
# greedy
# ────────────────────────────────────────

def iter_greedy(universe_size: int, covering_sets, k: int,
                mode: str = MODE_LAZY) -> Iterator[tuple[int, int]]:
    """시드가 정해질 때마다 (정점, 한계 이득)을 내보내는 greedy.

    lazy 모드는 힙의 오래된 키를 다시 계산해 현재 최상위 이상이면 채택한다.
    남은 이득이 모두 0이면 일찍 멈춘다.
    """
    if k < 0:
        raise ParameterError(f"k는 0 이상이어야 함: {k}")
    if mode not in (MODE_LAZY, MODE_STANDARD):
        raise ParameterError(f"알 수 없는 greedy 모드: {mode!r}")
    sets = _normalize(covering_sets)
    _check_universe(sets, universe_size)
    if k == 0 or not sets:
        return

    covered = np.zeros(universe_size, dtype=bool)
    by_vertex = {cs.vertex: cs.samples for cs in sets}

    if mode == MODE_STANDARD:
        remaining = list(by_vertex)
        for _ in range(k):
            best_v, best_gain = -1, 0
            for v in remaining:
                g = _gain(covered, by_vertex[v])
                if g > best_gain:
                    best_v, best_gain = v, g
            if best_gain == 0:
                return
            covered[by_vertex[best_v]] = True
            remaining.remove(best_v)
            yield best_v, best_gain
        return

    # 힙 키 (-이득 상한, 정점)
    heap = [(-len(cs.samples), cs.vertex) for cs in sets]
    heapq.heapify(heap)
    selected = 0
    while heap and selected < k:
        _, v = heapq.heappop(heap)
        g = _gain(covered, by_vertex[v])
        if heap and (-g, v) > heap[0]:
            heapq.heappush(heap, (-g, v))
            continue
        if g == 0:
            return
        covered[by_vertex[v]] = True
        selected += 1
        yield v, g


def lazy_greedy_max_cover(universe_size: int, covering_sets, k: int,
                          mode: str = MODE_LAZY) -> Solution:
    seeds, marginals = [], []
    for v, g in iter_greedy(universe_size, covering_sets, k, mode):
        seeds.append(v)
        marginals.append(g)
    return Solution(tuple(seeds), tuple(marginals), int(sum(marginals)), universe_size, k)


def coverage_of(seeds: Iterable[int], covering_sets) -> int:
    """시드 집합이 덮는 서로 다른 샘플 수."""
    if isinstance(covering_sets, dict):
        lookup = covering_sets
    else:
        lookup = {cs.vertex: cs for cs in covering_sets}
    arrays = [lookup[v].samples for v in seeds if v in lookup]
    if not arrays:
        return 0
    return int(len(np.unique(np.concatenate(arrays))))


# ────────────────────────────────────────
# 전수 탐색 오라클
# ────────────────────────────────────────

def brute_force_max_cover(universe_size: int, covering_sets, k: int) -> Solution:
    """모든 k-부분집합을 평가해 최대 커버 중 사전순 최소 해를 반환 (작은 입력 전용)."""
    sets = _normalize(covering_sets)
    _check_universe(sets, universe_size)
    size = min(k, len(sets))
    if len(sets) > BRUTE_FORCE_MAX_VERTICES or size > BRUTE_FORCE_MAX_K:
        raise RefusalError(
            f"전수 탐색 한도 초과: 정점 {len(sets)}개 (최대 {BRUTE_FORCE_MAX_VERTICES}), "
            f"k={size} (최대 {BRUTE_FORCE_MAX_K})"
        )
    if size <= 0:
        return Solution(universe_size=universe_size, budget=k)

    masks = [sum(1 << i for i in cs.samples.tolist()) for cs in sets]
    best_combo, best_cover = None, -1
    for combo in combinations(range(len(sets)), size):
        union = 0
        for i in combo:
            union |= masks[i]
        cover = union.bit_count()
        if cover > best_cover:
            best_combo, best_cover = combo, cover

    seeds, marginals, union = [], [], 0
    for i in best_combo:
        marginals.append((masks[i] & ~union).bit_count())
        union |= masks[i]
        seeds.append(sets[i].vertex)
    return Solution(tuple(seeds), tuple(marginals), best_cover, universe_size, k, "brute_force")


# ────────────────────────────────────────
# 절단 (상위 α·k만 전송)
# ────────────────────────────────────────

def truncated_count(k: int, alpha: float) -> int:
    """⌈α·k⌉. 부동소수 오차(0.1*30 등)는 흡수한다."""
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha는 (0, 1] 범위여야 함: {alpha}")
    return max(0, math.ceil(alpha * k - 1e-9))


def truncate_stream_order(solution: Solution, alpha: float) -> Solution:
    budget = solution.budget or len(solution.seeds)
    return solution.prefix(truncated_count(budget, alpha))


# ────────────────────────────────────────
# 스트리밍 집계 (버킷)
# ────────────────────────────────────────

def bucket_count(k: int, delta: float) -> int:
    """B = max(1, ⌈log_{1+δ} k⌉)."""
    if not 0.0 < delta < 0.5:
        raise ParameterError(f"delta는 (0, 1/2) 범위여야 함: {delta}")
    if k <= 1:
        return 1
    return max(1, math.ceil(math.log(k) / math.log1p(delta) - 1e-9))


@dataclass
class _Bucket:
    guess: float
    covered: np.ndarray
    covered_count: int = 0
    seeds: list[int] = field(default_factory=list)
    marginals: list[int] = field(default_factory=list)
    admitted: list[np.ndarray] = field(default_factory=list)
    members: set[int] = field(default_factory=set)
    applied: int = 0                # 이 버킷에 적용된 메시지 수
    duplicates: int = 0


class StreamingSketch:
    """한 번의 통과로 max-k-cover를 근사하는 버킷 스케치.

    버킷 b의 추정치는 l·(1+δ)^b 이고, 한계 이득이 추정치/(2k) 이상인 집합만
    받아들인다. 버킷 간 결정은 서로 독립이라 버킷 구간별로 다른 워커가
    동시에 insert_into를 호출해도 된다 (한 버킷은 한 워커만 소유).
    """

    def __init__(self, k: int, delta: float, lower_bound: float, universe_size: int,
                 buckets: int | None = None):
        if k < 1:
            raise ParameterError(f"k는 1 이상이어야 함: {k}")
        if lower_bound < 1:
            raise ParameterError(f"lower_bound는 1 이상이어야 함: {lower_bound}")
        count = bucket_count(k, delta)
        if buckets is not None:
            if buckets < 1:
                raise ParameterError(f"버킷 수는 1 이상이어야 함: {buckets}")
            count = buckets
        self.k = k
        self.delta = delta
        self.lower_bound = float(lower_bound)
        self.universe_size = universe_size
        self.processed_count = 0
        self.buckets = [
            _Bucket(guess=self.lower_bound * (1.0 + delta) ** b,
                    covered=np.zeros(universe_size, dtype=bool))
            for b in range(count)
        ]

    def __len__(self) -> int:
        return len(self.buckets)

    @property
    def guesses(self) -> list[float]:
        return [b.guess for b in self.buckets]

    def insert_into(self, seed: int, covering: CoveringSet, lo: int, hi: int) -> int:
        """버킷 [lo, hi)에만 삽입. 채택된 버킷 수 반환."""
        samples = covering.samples
        if len(samples) and int(samples[-1]) >= self.universe_size:
            raise ParameterError(f"샘플 id {int(samples[-1])}가 universe {self.universe_size} 이상")
        admitted = 0
        for bucket in self.buckets[lo:hi]:
            bucket.applied += 1
            if len(bucket.seeds) >= self.k:
                continue
            if seed in bucket.members:
                bucket.duplicates += 1
                continue
            gain = _gain(bucket.covered, samples)
            # 이득 0은 임계값과 무관하게 거절
            if gain > 0 and gain >= bucket.guess / (2 * self.k):
                bucket.covered[samples] = True
                bucket.covered_count += gain
                bucket.seeds.append(seed)
                bucket.marginals.append(gain)
                bucket.admitted.append(samples)
                bucket.members.add(seed)
                admitted += 1
        return admitted

    def insert(self, seed: int, covering: CoveringSet) -> int:
        self.processed_count += 1
        return self.insert_into(seed, covering, 0, len(self.buckets))

    def finalize(self) -> Solution:
        """커버가 가장 큰 버킷의 해 (동점이면 작은 버킷 번호)."""
        best = None
        for bucket in self.buckets:
            if best is None or bucket.covered_count > best.covered_count:
                best = bucket
        if best is None or best.covered_count == 0:
            return Solution(universe_size=self.universe_size, budget=self.k, origin="global")
        return Solution(tuple(best.seeds), tuple(best.marginals), best.covered_count,
                        self.universe_size, self.k, "global")

    # ── 진단 ──

    def occupancy(self) -> list[int]:
        return [len(b.seeds) for b in self.buckets]

    def duplicate_count(self) -> int:
        return sum(b.duplicates for b in self.buckets)

    def applied_counts(self) -> list[int]:
        return [b.applied for b in self.buckets]

    def recount(self, index: int) -> int:
        """채택된 covering set들의 합집합 크기를 처음부터 다시 센다."""
        admitted = self.buckets[index].admitted
        if not admitted:
            return 0
        return int(len(np.unique(np.concatenate(admitted))))


def sketch_create(k: int, delta: float, lower_bound: float, universe_size: int,
                  buckets: int | None = None) -> StreamingSketch:
    return StreamingSketch(k, delta, lower_bound, universe_size, buckets)


def sketch_insert(sketch: StreamingSketch, seed: int, covering: CoveringSet) -> StreamingSketch:
    sketch.insert(seed, covering)
    return sketch


def sketch_finalize(sketch: StreamingSketch) -> Solution:
    return sketch.finalize()
