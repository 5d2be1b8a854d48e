"""대시보드 공용 입력: 그래프 업로드와 실행 설정 사이드바."""

from __future__ import annotations

import streamlit as st
from pydantic import ValidationError

from config import (
    DEFAULT_ALPHA, DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_K, DEFAULT_TRIALS, MODES, MODELS,
    OPIM_BUDGET,
)
from core.errors import GreediRISError
from core.graph import Graph, build_graph, graph_summary, load_binary, load_edge_list, prepare_weights
from core.report_generator import InputEcho
from core.run_config import RunConfig, SeedConfig
from utils.file_utils import compute_file_hash, save_uploaded_file


@st.cache_resource(show_spinner="그래프 로딩 중...")
def _load(sha256: str, _path: str, is_binary: bool, undirected: bool, model: str, lo: float,
          hi: float, seed: int) -> Graph:
    """캐시 키는 내용 해시. `_path` 는 해시 대상에서 빠진다."""
    if is_binary:
        graph = load_binary(_path)
    else:
        graph = build_graph(load_edge_list(_path, directed=not undirected))
    return prepare_weights(graph, model, lo, hi, seed)


def sidebar_config(key: str, show_workers: bool = True) -> RunConfig | None:
    """사이드바 위젯 → RunConfig. 값이 잘못되면 오류를 보여 주고 None."""
    with st.sidebar:
        st.subheader("실행 설정")
        model = st.selectbox("확산 모델", MODELS, key=f"{key}_model")
        mode = st.selectbox("모드", MODES, index=1, key=f"{key}_mode")
        k = st.number_input("k (시드 수)", min_value=1, value=min(DEFAULT_K, 20), key=f"{key}_k")
        epsilon = st.number_input("ε", min_value=0.01, max_value=0.99, value=DEFAULT_EPSILON,
                                  step=0.01, key=f"{key}_eps")
        delta = st.number_input("δ (버킷 간격)", min_value=0.001, max_value=0.499,
                                value=DEFAULT_DELTA, step=0.001, format="%.3f", key=f"{key}_delta")
        m, alpha = 2, DEFAULT_ALPHA
        if show_workers:
            m = st.number_input("워커 수 m", min_value=1, value=4, key=f"{key}_m")
            alpha = st.slider("α (절단 비율)", 0.05, 1.0, DEFAULT_ALPHA, 0.05, key=f"{key}_alpha")
        bucket_workers = st.number_input("버킷 워커 수", min_value=1, value=1, key=f"{key}_bw")
        trials = st.number_input("영향력 평가 횟수", min_value=1, value=DEFAULT_TRIALS, key=f"{key}_trials")
        opim_budget = st.number_input("OPIM 샘플 예산", min_value=2, value=OPIM_BUDGET // 16,
                                      key=f"{key}_budget")
        seed = st.number_input("마스터 시드", min_value=0, value=0, key=f"{key}_seed")
        deterministic = st.checkbox("결정적 스케줄러", value=True, key=f"{key}_det")

    try:
        return RunConfig(
            k=k, epsilon=epsilon, delta=delta, alpha=alpha, m=m, bucket_workers=bucket_workers,
            model=model, mode=mode, trials=trials, opim_budget=opim_budget,
            seeds=SeedConfig.from_master(int(seed)), deterministic=deterministic,
        )
    except ValidationError as exc:
        for err in exc.errors():
            st.sidebar.error(f"{'.'.join(str(x) for x in err['loc']) or '설정'}: {err['msg']}")
        return None


def graph_input(key: str, config: RunConfig) -> tuple[Graph, InputEcho] | None:
    """그래프 파일 업로드 → 가중치 준비된 Graph. 업로드 전이면 None."""
    uploaded = st.file_uploader(
        "그래프 파일 (엣지 리스트 `src dst [weight]` 또는 GIRI1 캐시)",
        type=["txt", "edges", "tsv", "csv", "bin", "giri"],
        key=f"{key}_upload",
    )
    undirected = st.checkbox("무방향 그래프", value=False, key=f"{key}_undirected")
    if uploaded is None:
        return None

    file_bytes = uploaded.getvalue()
    sha256 = compute_file_hash(file_bytes)
    path = save_uploaded_file(file_bytes, uploaded.name)
    is_binary = file_bytes.startswith(b"GIRI1")
    try:
        graph = _load(sha256, str(path), is_binary, undirected, config.model,
                      config.weight_low, config.weight_high, config.seeds.graph_weights)
    except (GreediRISError, OSError) as exc:
        st.error(f"그래프를 읽을 수 없음: {exc}")
        return None
    echo = InputEcho(path=uploaded.name, format="binary" if is_binary else "edgelist",
                     sha256=sha256, summary=graph_summary(graph))
    return graph, echo
