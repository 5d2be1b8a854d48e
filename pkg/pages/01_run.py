"""단일 실행 페이지."""

import pandas as pd
import streamlit as st

from components.charts import bar_chart_bucket_occupancy, line_chart_rounds
from components.run_form import graph_input, sidebar_config
from core.diffusion import expected_influence
from core.driver import run
from core.errors import GreediRISError
from core.report_generator import build_run_report

st.header("단일 실행")

config = sidebar_config("run")
if config is None:
    st.stop()

loaded = graph_input("run", config)
if loaded is None:
    st.info("그래프 파일을 업로드하면 실행할 수 있습니다.")
    st.stop()
graph, echo = loaded

c1, c2, c3 = st.columns(3)
c1.metric("정점", f"{graph.n:,}")
c2.metric("엣지", f"{graph.edge_count:,}")
c3.metric("평균 출차수", f"{echo.summary['mean_out_degree']:.2f}")

if not st.button("실행", type="primary"):
    st.stop()

try:
    with st.spinner("시드 선택 중..."):
        outcome = run(graph, config)
    with st.spinner("영향력 평가 중..."):
        influence = expected_influence(graph, outcome.solution.seeds, config.model,
                                       config.trials, config.seeds.evaluation)
except GreediRISError as exc:
    st.error(str(exc))
    st.stop()

report = build_run_report(outcome, config, graph, influence, echo)

# ── 요약 카드 ──
c1, c2, c3, c4 = st.columns(4)
c1.metric("커버", f"{report.coverage:,} / {report.universe_size:,}",
          delta=f"{report.coverage_fraction:.2%}", delta_color="off")
c2.metric("영향력", f"{influence.mean:.1f}", delta=f"± {influence.stderr:.1f}", delta_color="off")
c3.metric("최악 보장", f"{report.guarantee.applied:.3f}")
c4.metric("수렴", "예" if report.converged else "아니오")

if report.guarantee.achieved is not None:
    st.caption(f"OPIM 인스턴스 보장: {report.guarantee.achieved:.4f}")

# ── 라운드 ──
st.subheader("라운드")
st.plotly_chart(line_chart_rounds([r.model_dump() for r in report.rounds]),
                use_container_width=True, theme=None)
if report.opim_rounds:
    st.dataframe(pd.DataFrame([r.model_dump() for r in report.opim_rounds]), use_container_width=True)

# ── 시드 ──
st.subheader("선택된 시드 (원본 번호)")
st.dataframe(pd.DataFrame({"순서": range(1, len(report.seeds) + 1),
                           "정점": report.seeds, "한계 이득": report.marginals}),
             use_container_width=True, hide_index=True)

occupancy = report.diagnostics.get("bucket_occupancy")
if occupancy:
    st.plotly_chart(bar_chart_bucket_occupancy(occupancy), use_container_width=True, theme=None)

st.download_button("보고서 JSON 다운로드", report.model_dump_json(indent=2),
                   file_name="greediris_report.json", mime="application/json")
