"""Plotly 차트 빌더."""

import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

_FONT = dict(family="Malgun Gothic, sans-serif")
_THEME_KWARGS = dict(template="plotly_white")

PHASE_LABELS = {
    "sampling": "샘플 생성",
    "shuffle": "셔플",
    "sender_select": "송신자 선택",
    "receiver_select": "수신자 집계",
}


def bar_chart_influence_delta(frame: pd.DataFrame, title: str = "순차 기준 대비 영향력 증감") -> go.Figure:
    """(m, α) 행별 영향력 % 변화. 기준 행은 0."""
    df = frame[["label", "influence_delta_pct"]].copy()
    df["부호"] = df["influence_delta_pct"].map(lambda v: "증가" if v >= 0 else "감소")
    fig = px.bar(
        df, x="label", y="influence_delta_pct", color="부호",
        color_discrete_map={"증가": "#1E88E5", "감소": "#E53935"},
        title=title, **_THEME_KWARGS,
    )
    fig.update_layout(font=_FONT, xaxis_title="구성", yaxis_title="영향력 변화 (%)", showlegend=False)
    return fig


def line_chart_coverage(frame: pd.DataFrame, title: str = "워커 수별 커버 비율") -> go.Figure:
    """α마다 한 줄, x축 m. 기준 커버는 점선."""
    rows = frame[frame["mode"] != "sequential"]
    fig = go.Figure()
    for alpha, group in rows.groupby("alpha", sort=False):
        group = group.sort_values("m")
        fig.add_trace(go.Scatter(
            x=group["m"], y=group["coverage_fraction"], mode="lines+markers",
            name=f"α={alpha:g}",
            hovertemplate="m=%{x}<br>%{y:.4f}",
        ))
    baseline = frame[frame["label"] == "sequential"]
    if not baseline.empty:
        fig.add_hline(y=float(baseline["coverage_fraction"].iloc[0]), line_dash="dash",
                      annotation_text="순차")
    fig.update_layout(title=title, font=_FONT, xaxis_title="워커 수 m",
                      yaxis_title="커버 비율", **_THEME_KWARGS)
    return fig


def stacked_bar_phase_timings(frame: pd.DataFrame, title: str = "단계별 실행 시간") -> go.Figure:
    fig = go.Figure()
    for phase, label in PHASE_LABELS.items():
        if phase in frame:
            fig.add_trace(go.Bar(x=frame["label"], y=frame[phase], name=label,
                                 hovertemplate="%{x}<br>%{y:.3f}s"))
    fig.update_layout(barmode="stack", title=title, font=_FONT,
                      xaxis_title="구성", yaxis_title="초", **_THEME_KWARGS)
    return fig


def line_chart_rounds(rounds: list[dict], title: str = "라운드별 θ̂와 하한") -> go.Figure:
    """IMM/OPIM 라운드 진행. rounds는 RunReport.rounds의 dict 목록."""
    df = pd.DataFrame(rounds)
    fig = go.Figure()
    if df.empty:
        fig.update_layout(title=title, font=_FONT, **_THEME_KWARGS)
        return fig
    fig.add_trace(go.Bar(x=df["round_index"], y=df["theta_hat"], name="θ̂", yaxis="y"))
    fig.add_trace(go.Scatter(x=df["round_index"], y=df["lower_bound"], name="LB",
                             mode="lines+markers", yaxis="y2"))
    fig.update_layout(
        title=title, font=_FONT, xaxis_title="라운드",
        yaxis=dict(title="샘플 수"),
        yaxis2=dict(title="하한", overlaying="y", side="right"),
        **_THEME_KWARGS,
    )
    return fig


def bar_chart_bucket_occupancy(occupancy: list[int], title: str = "버킷별 시드 수") -> go.Figure:
    df = pd.DataFrame({"버킷": list(range(len(occupancy))), "시드 수": occupancy})
    fig = px.bar(df, x="버킷", y="시드 수", title=title, **_THEME_KWARGS)
    fig.update_layout(font=_FONT)
    return fig
