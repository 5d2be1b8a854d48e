"""그래프 로딩: 엣지 리스트 파싱, 정/역방향 CSR 구성, 확산 모델용 가중치 부여."""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from config import (
    BINARY_MAGIC, LT_WEIGHT_TOLERANCE, MODEL_IC, MODEL_LT, MODELS,
    WEIGHT_LOW, WEIGHT_HIGH,
)
from core.errors import EmptyGraphError, ParameterError, ParseError
from core.rng import uniform_by_index
from utils.log_utils import get_logger

logger = get_logger("graph")

_MODEL_CODES = {None: 0, MODEL_IC: 1, MODEL_LT: 2}


# ────────────────────────────────────────
# 자료형
# ────────────────────────────────────────

@dataclass(frozen=True)
class EdgeList:
    """파싱된 엣지 목록. 가중치가 없으면 NaN."""

    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    n: int
    labels: np.ndarray              # 조밀 id → 원본 정점 번호

    def triples(self) -> list[tuple[int, int, float | None]]:
        return [
            (int(u), int(v), None if np.isnan(w) else float(w))
            for u, v, w in zip(self.src, self.dst, self.weight)
        ]

    def __len__(self) -> int:
        return len(self.src)


@dataclass(frozen=True, eq=False)
class Graph:
    """불변 가중 방향 그래프.

    정방향/역방향 인접 리스트를 CSR로 보관한다. 엣지 순서(canonical index)는
    입력 순서이며 가중치 생성 난수의 키로 쓰인다.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    fwd_offsets: np.ndarray
    fwd_edges: np.ndarray           # 정방향 CSR 위치 → canonical 엣지 번호
    rev_offsets: np.ndarray
    rev_edges: np.ndarray
    labels: np.ndarray
    model_prepared: str | None = None

    @property
    def edge_count(self) -> int:
        return len(self.src)

    # ── 인접 조회 ──

    def out_neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        edges = self.fwd_edges[self.fwd_offsets[u]:self.fwd_offsets[u + 1]]
        return self.dst[edges], self.weight[edges]

    def in_neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        edges = self.rev_edges[self.rev_offsets[v]:self.rev_offsets[v + 1]]
        return self.src[edges], self.weight[edges]

    def forward(self) -> list[list[tuple[int, float]]]:
        return [list(zip(*(a.tolist() for a in self.out_neighbors(u)))) for u in range(self.n)]

    def reverse(self) -> list[list[tuple[int, float]]]:
        return [list(zip(*(a.tolist() for a in self.in_neighbors(v)))) for v in range(self.n)]

    def incoming_weight_sums(self) -> np.ndarray:
        return np.bincount(self.dst, weights=np.nan_to_num(self.weight), minlength=self.n)

    def is_prepared_for(self, model: str) -> bool:
        # LT용 가중치는 IC 확률로도 유효
        return self.model_prepared == model or (
            model == MODEL_IC and self.model_prepared == MODEL_LT
        )

    def label_of(self, v: int) -> int:
        return int(self.labels[v])


# ────────────────────────────────────────
# 엣지 리스트 로딩
# ────────────────────────────────────────

def load_edge_list(path: str | Path, directed: bool = True) -> EdgeList:
    """"src dst [weight]" 형식 텍스트를 읽는다. '#'으로 시작하는 줄은 주석.

    정점 번호는 처음 등장한 순서대로 [0, n-1]로 재부여한다.
    무방향 입력은 양방향 엣지를 모두 만든다.
    """
    ids: dict[int, int] = {}
    src: list[int] = []
    dst: list[int] = []
    weight: list[float] = []

    def _dense(label: int) -> int:
        if label not in ids:
            ids[label] = len(ids)
        return ids[label]

    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(f"필드 수가 잘못됨 ({len(parts)}개): {line!r}", line=lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"정수가 아닌 끝점: {line!r}", line=lineno) from None
            w = float("nan")
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ParseError(f"숫자가 아닌 가중치: {parts[2]!r}", line=lineno) from None
                if not 0.0 <= w <= 1.0:
                    raise ParseError(f"가중치 범위 [0,1] 벗어남: {w}", line=lineno)
            du, dv = _dense(u), _dense(v)
            src.append(du)
            dst.append(dv)
            weight.append(w)
            if not directed:
                src.append(dv)
                dst.append(du)
                weight.append(w)

    if not src:
        raise EmptyGraphError(f"엣지가 없는 파일: {path}")

    labels = np.fromiter(ids.keys(), dtype=np.int64, count=len(ids))
    logger.info("엣지 리스트 로드: %s (정점 %d, 엣지 %d)", path, len(ids), len(src))
    return EdgeList(
        src=np.asarray(src, dtype=np.int64),
        dst=np.asarray(dst, dtype=np.int64),
        weight=np.asarray(weight, dtype=np.float64),
        n=len(ids),
        labels=labels,
    )


# ────────────────────────────────────────
# CSR 구성
# ────────────────────────────────────────

def _csr(keys: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=offsets[1:])
    return offsets, order.astype(np.int64)


def build_graph(edges, n: int | None = None, labels=None) -> Graph:
    """엣지 목록으로 Graph 생성. 중복 엣지는 병렬 엣지로 유지.

    Args:
        edges: EdgeList 또는 (src, dst[, weight]) 튜플 목록
        n: 정점 수 (없으면 최대 id + 1)
    """
    if isinstance(edges, EdgeList):
        src, dst, weight = edges.src, edges.dst, edges.weight
        n = edges.n if n is None else n
        labels = edges.labels if labels is None else labels
    else:
        rows = list(edges)
        src = np.asarray([e[0] for e in rows], dtype=np.int64)
        dst = np.asarray([e[1] for e in rows], dtype=np.int64)
        weight = np.asarray(
            [e[2] if len(e) > 2 and e[2] is not None else np.nan for e in rows],
            dtype=np.float64,
        )

    if n is None:
        n = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
    if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
        raise ParameterError(f"정점 id가 [0, {n - 1}] 범위를 벗어남")
    finite = weight[~np.isnan(weight)]
    if len(finite) and (finite.min() < 0.0 or finite.max() > 1.0):
        raise ParameterError("엣지 가중치는 [0, 1] 범위여야 함")

    if labels is None:
        labels = np.arange(n, dtype=np.int64)

    fwd_offsets, fwd_edges = _csr(src, n)
    rev_offsets, rev_edges = _csr(dst, n)
    return Graph(
        n=n, src=src, dst=dst, weight=weight,
        fwd_offsets=fwd_offsets, fwd_edges=fwd_edges,
        rev_offsets=rev_offsets, rev_edges=rev_edges,
        labels=np.asarray(labels, dtype=np.int64),
    )


# ────────────────────────────────────────
# 가중치 부여
# ────────────────────────────────────────

def prepare_weights(graph: Graph, model: str, lo: float = WEIGHT_LOW,
                    hi: float = WEIGHT_HIGH, seed: int = 0) -> Graph:
    """가중치가 없는 엣지에 [lo, hi] 균등 난수를 부여하고 모델 제약을 맞춘다.

    엣지 i의 난수는 (seed, i)만으로 결정된다. LT는 정점마다 진입 가중치를
    max(1, 합)으로 나눈다 (작은 가중치는 키우지 않음).
    """
    if model not in MODELS:
        raise ParameterError(f"알 수 없는 확산 모델: {model!r}")
    if not (0.0 <= lo <= hi <= 1.0):
        raise ParameterError(f"가중치 구간이 잘못됨: lo={lo}, hi={hi}")

    weight = graph.weight.copy()
    missing = np.nonzero(np.isnan(weight))[0]
    if len(missing):
        weight[missing] = lo + (hi - lo) * uniform_by_index(seed, missing)

    if model == MODEL_LT:
        sums = np.bincount(graph.dst, weights=weight, minlength=graph.n)
        weight = weight / np.maximum(1.0, sums)[graph.dst]

    logger.info("가중치 준비: model=%s, 생성 %d / 전체 %d", model, len(missing), len(weight))
    return replace(graph, weight=weight, model_prepared=model)


def max_incoming_weight(graph: Graph) -> float:
    sums = graph.incoming_weight_sums()
    return float(sums.max()) if len(sums) else 0.0


def is_lt_feasible(graph: Graph) -> bool:
    return max_incoming_weight(graph) <= 1.0 + LT_WEIGHT_TOLERANCE


def graph_summary(graph: Graph) -> dict:
    """보고서·대시보드용 그래프 요약.

    Returns:
        {"n", "edges", "mean_out_degree", "max_out_degree", "max_in_degree",
         "weight_mean", "weight_max", "model"}
    """
    out_deg = np.diff(graph.fwd_offsets)
    in_deg = np.diff(graph.rev_offsets)
    finite = graph.weight[~np.isnan(graph.weight)]
    return {
        "n": graph.n,
        "edges": graph.edge_count,
        "mean_out_degree": float(out_deg.mean()) if graph.n else 0.0,
        "max_out_degree": int(out_deg.max(initial=0)),
        "max_in_degree": int(in_deg.max(initial=0)),
        "weight_mean": float(finite.mean()) if len(finite) else None,
        "weight_max": float(finite.max()) if len(finite) else None,
        "model": graph.model_prepared,
    }


# ────────────────────────────────────────
# 바이너리 캐시 ("GIRI1")
# ────────────────────────────────────────

def save_binary(graph: Graph, path: str | Path) -> Path:
    """magic | u64 n | u64 m | u8 model | offsets | targets | edge ids | weights | labels (리틀엔디언)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    order = graph.fwd_edges
    with open(path, "wb") as f:
        f.write(BINARY_MAGIC)
        f.write(struct.pack("<QQB", graph.n, graph.edge_count, _MODEL_CODES[graph.model_prepared]))
        f.write(graph.fwd_offsets.astype("<u8").tobytes())
        f.write(graph.dst[order].astype("<u8").tobytes())
        f.write(order.astype("<u8").tobytes())
        f.write(graph.weight[order].astype("<f8").tobytes())
        f.write(graph.labels.astype("<i8").tobytes())
    return path


def load_binary(path: str | Path) -> Graph:
    data = Path(path).read_bytes()
    if not data.startswith(BINARY_MAGIC):
        raise ParseError(f"GIRI1 캐시가 아님: {path}")
    pos = len(BINARY_MAGIC)
    try:
        n, m, code = struct.unpack_from("<QQB", data, pos)
    except struct.error:
        raise ParseError(f"헤더가 잘림: {path}") from None
    pos += struct.calcsize("<QQB")

    def _take(dtype: str, count: int) -> np.ndarray:
        nonlocal pos
        size = np.dtype(dtype).itemsize * count
        if pos + size > len(data):
            raise ParseError(f"CSR 배열이 잘림: {path}")
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
        pos += size
        return arr

    offsets = _take("<u8", n + 1).astype(np.int64)
    targets = _take("<u8", m).astype(np.int64)
    edge_ids = _take("<u8", m).astype(np.int64)
    weights = _take("<f8", m).astype(np.float64)
    labels = _take("<i8", n).astype(np.int64)

    sources = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    weight = np.empty(m, dtype=np.float64)
    src[edge_ids], dst[edge_ids], weight[edge_ids] = sources, targets, weights

    model = {v: k for k, v in _MODEL_CODES.items()}.get(code)
    graph = build_graph(list(zip(src.tolist(), dst.tolist(), weight.tolist())), n=n, labels=labels)
    return replace(graph, weight=weight, model_prepared=model)
