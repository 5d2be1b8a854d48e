"""RRR(random reverse reachable) 샘플 생성과 정점별 covering set 역색인."""

from __future__ import annotations

import weakref
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from config import MODEL_IC, MODELS
from core.errors import EmptyGraphError, IntegrityError, ModelStateError, ParameterError
from core.graph import Graph
from core.rng import stream
from utils.log_utils import get_logger

logger = get_logger("sampling")


@dataclass(frozen=True)
class RRRSample:
    id: int
    root: int
    members: tuple[int, ...]        # 오름차순, root 포함

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True, eq=False)
class CoveringSet:
    """정점 v를 포함하는 샘플 id 목록 (오름차순)."""

    vertex: int
    samples: np.ndarray

    def __len__(self) -> int:
        return len(self.samples)

    def tolist(self) -> list[int]:
        return self.samples.tolist()

    @classmethod
    def of(cls, vertex: int, samples: Iterable[int]) -> "CoveringSet":
        return cls(vertex=int(vertex), samples=np.asarray(sorted(set(samples)), dtype=np.int64))


# ────────────────────────────────────────
# 단일 샘플
# ────────────────────────────────────────

# 역방향 CSR의 (출발 정점, 가중치) 배열 캐시
_reverse_cache: "weakref.WeakKeyDictionary[Graph, tuple[np.ndarray, np.ndarray]]" = (
    weakref.WeakKeyDictionary()
)


def _reverse_arrays(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    cached = _reverse_cache.get(graph)
    if cached is None:
        cached = (graph.src[graph.rev_edges], graph.weight[graph.rev_edges])
        _reverse_cache[graph] = cached
    return cached


def sample_rrr(graph: Graph, model: str, sample_id: int, global_seed: int) -> RRRSample:
    """(global_seed, sample_id)의 순수 함수로 RRR 샘플 하나를 만든다.

    IC: 역방향 BFS, 진입 엣지마다 확률 p로 독립 통과.
    LT: live-edge 역추적, 정점마다 진입 이웃을 최대 하나 선택 (확률 w, 없음 1-Σw).
    """
    if model not in MODELS:
        raise ParameterError(f"알 수 없는 확산 모델: {model!r}")
    if not graph.is_prepared_for(model):
        raise ModelStateError(f"그래프가 {model.upper()} 모델용으로 준비되지 않음 (prepare_weights 필요)")
    if graph.n == 0:
        raise EmptyGraphError("정점이 없는 그래프")

    rng = stream(global_seed, sample_id)
    root = int(rng.integers(graph.n))
    sources, weights = _reverse_arrays(graph)
    offsets = graph.rev_offsets
    visited = {root}

    if model == MODEL_IC:
        queue = deque([root])
        while queue:
            v = queue.popleft()
            lo, hi = offsets[v], offsets[v + 1]
            if hi == lo:
                continue
            crossed = rng.random(hi - lo) < weights[lo:hi]
            for u in sources[lo:hi][crossed].tolist():
                if u not in visited:
                    visited.add(u)
                    queue.append(u)
    else:
        v = root
        while True:
            lo, hi = offsets[v], offsets[v + 1]
            if hi == lo:
                break
            pick = int(np.searchsorted(np.cumsum(weights[lo:hi]), rng.random(), side="right"))
            if pick >= hi - lo:
                break                   # 선택 없음
            u = int(sources[lo + pick])
            if u in visited:
                break
            visited.add(u)
            v = u

    return RRRSample(id=int(sample_id), root=root, members=tuple(sorted(visited)))


def generate_batch(graph: Graph, model: str, id_lo: int, id_hi: int,
                   global_seed: int) -> list[RRRSample]:
    """샘플 id [id_lo, id_hi) 구간 생성. 어떤 구간 분할로 나눠 만들어도 합집합은 같다."""
    if id_lo > id_hi:
        raise ParameterError(f"id 구간이 잘못됨: [{id_lo}, {id_hi})")
    return [sample_rrr(graph, model, i, global_seed) for i in range(id_lo, id_hi)]


class SampleStore:
    """id가 고정된 샘플 캐시. 라운드가 늘어나도 기존 샘플은 같은 id로 재사용된다."""

    def __init__(self, graph: Graph, model: str, global_seed: int):
        self.graph = graph
        self.model = model
        self.global_seed = global_seed
        self._samples: dict[int, RRRSample] = {}

    def __len__(self) -> int:
        return len(self._samples)

    def range(self, id_lo: int, id_hi: int) -> list[RRRSample]:
        """[id_lo, id_hi) 샘플 반환. 없는 id만 새로 생성."""
        if id_lo > id_hi:
            raise ParameterError(f"id 구간이 잘못됨: [{id_lo}, {id_hi})")
        missing = [i for i in range(id_lo, id_hi) if i not in self._samples]
        for i in missing:
            self._samples[i] = sample_rrr(self.graph, self.model, i, self.global_seed)
        if missing:
            logger.debug("샘플 %d개 추가 생성 (보유 %d)", len(missing), len(self._samples))
        return [self._samples[i] for i in range(id_lo, id_hi)]

    def ensure(self, theta: int) -> list[RRRSample]:
        return self.range(0, theta)


# ────────────────────────────────────────
# covering set 역색인
# ────────────────────────────────────────

def build_covering_sets(samples: list[RRRSample],
                        vertex_filter: Iterable[int] | None = None) -> dict[int, CoveringSet]:
    """샘플 → 정점별 covering set 𝒮(v) = {i | v ∈ ℛ(i)}.

    vertex_filter가 있으면 그 정점만, 샘플에 없는 정점은 빈 목록으로 포함한다.

    Returns:
        {vertex: CoveringSet, ...} (정점 id 오름차순)
    """
    ids = np.fromiter((s.id for s in samples), dtype=np.int64, count=len(samples))
    if len(np.unique(ids)) != len(ids):
        uniq, counts = np.unique(ids, return_counts=True)
        raise IntegrityError(f"중복 샘플 id: {uniq[counts > 1][:5].tolist()}")

    lengths = np.fromiter((len(s) for s in samples), dtype=np.int64, count=len(samples))
    verts = np.fromiter(
        (v for s in samples for v in s.members), dtype=np.int64, count=int(lengths.sum())
    )
    owners = np.repeat(ids, lengths)

    wanted = None
    if vertex_filter is not None:
        wanted = np.asarray(sorted(set(int(v) for v in vertex_filter)), dtype=np.int64)
        keep = np.isin(verts, wanted)
        verts, owners = verts[keep], owners[keep]

    order = np.lexsort((owners, verts))
    verts, owners = verts[order], owners[order]
    uniq, starts = np.unique(verts, return_index=True)
    bounds = np.append(starts, len(verts))

    result: dict[int, CoveringSet] = {}
    if wanted is not None:
        for v in wanted.tolist():
            result[v] = CoveringSet(v, np.empty(0, dtype=np.int64))
    for j, v in enumerate(uniq.tolist()):
        result[v] = CoveringSet(v, owners[bounds[j]:bounds[j + 1]].copy())
    return dict(sorted(result.items()))


def expand_covering_sets(covering: Iterable[CoveringSet]) -> dict[int, list[int]]:
    """역색인을 되돌려 {샘플 id: 정점 목록}으로."""
    members: dict[int, list[int]] = {}
    for cs in covering:
        for i in cs.samples.tolist():
            members.setdefault(i, []).append(cs.vertex)
    return {i: sorted(vs) for i, vs in sorted(members.items())}


# ────────────────────────────────────────
# 디버그 덤프
# ────────────────────────────────────────

def format_batch(samples: list[RRRSample]) -> str:
    """"sample_id: root: v1,v2,..." 줄 단위 텍스트."""
    return "".join(
        f"{s.id}: {s.root}: {','.join(str(v) for v in s.members)}\n" for s in samples
    )


def dump_batch(samples: list[RRRSample], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_batch(samples), encoding="utf-8")
    return path
