"""벤치마크 집계: 워커 수·절단 비율 스윕, 순차 기준 대비 영향력 증감."""

from __future__ import annotations

import pandas as pd

from config import BENCH_ALPHAS, BENCH_WORKERS, MODE_IMM, MODE_OPIM, MODE_SEQUENTIAL
from core.diffusion import expected_influence
from core.driver import run, worst_case_guarantee
from core.graph import Graph
from core.report_generator import PHASES, BenchReport, BenchRow, InputEcho
from core.run_config import RunConfig
from utils.log_utils import get_logger

logger = get_logger("bench")

BENCH_COLUMNS = [
    "label", "mode", "m", "alpha", "theta", "coverage", "coverage_fraction",
    "influence_mean", "influence_stderr", "influence_delta_pct", "guarantee",
    *PHASES,
]


def delta_pct(value: float, baseline: float) -> float:
    return (value - baseline) / baseline * 100 if baseline else 0.0


def _measure(graph: Graph, config: RunConfig, label: str, baseline_influence: float | None) -> BenchRow:
    outcome = run(graph, config)
    influence = expected_influence(graph, outcome.solution.seeds, config.model,
                                   config.trials, config.seeds.evaluation)
    reference = influence.mean if baseline_influence is None else baseline_influence
    sol = outcome.solution
    logger.info("%s: 커버 %d/%d, 영향력 %.2f", label, sol.coverage, sol.universe_size, influence.mean)
    return BenchRow(
        label=label, mode=config.mode, m=config.m, alpha=config.alpha,
        theta=outcome.theta, converged=outcome.converged,
        coverage=sol.coverage, universe_size=sol.universe_size, coverage_fraction=sol.fraction,
        influence_mean=influence.mean, influence_stderr=influence.stderr,
        influence_delta_pct=delta_pct(influence.mean, reference),
        guarantee=worst_case_guarantee(config),
        **{phase: max(0.0, float(outcome.timings.get(phase, 0.0))) for phase in PHASES},
    )


def run_bench(graph: Graph, base: RunConfig, workers=BENCH_WORKERS, alphas=BENCH_ALPHAS,
              input_echo: InputEcho | None = None) -> BenchReport:
    """순차 기준 1행 + (m, α) 격자. 모든 행은 같은 시드 설정을 써서 샘플 id별 내용이 같다.

    OPIM 기준은 같은 OPIM 루프를 단일 greedy로 돌린다.
    """
    distributed_mode = MODE_OPIM if base.mode == MODE_OPIM else MODE_IMM
    if distributed_mode == MODE_OPIM:
        baseline_cfg = base.model_copy(update={"mode": MODE_OPIM, "m": 1, "alpha": 1.0})
    else:
        baseline_cfg = base.model_copy(update={"mode": MODE_SEQUENTIAL, "m": 1, "alpha": 1.0})
    baseline = _measure(graph, baseline_cfg, "sequential", None)

    rows = []
    for m in workers:
        for alpha in alphas:
            cfg = RunConfig.model_validate(
                {**base.model_dump(), "mode": distributed_mode, "m": m, "alpha": alpha}
            )
            rows.append(_measure(graph, cfg, f"m={m}, α={alpha:g}", baseline.influence_mean))

    return BenchReport(
        input=input_echo or InputEcho(),
        config=base.model_dump(mode="json"),
        baseline=baseline,
        rows=rows,
    )


def bench_frame(report: BenchReport) -> pd.DataFrame:
    """기준 행을 맨 위에 둔 비교 표."""
    df = pd.DataFrame([row.model_dump() for row in report.all_rows()])
    return df[BENCH_COLUMNS]


def summarize_bench(report: BenchReport) -> dict:
    """대시보드 요약 카드용.

    Returns:
        {
            "baseline_influence": float,
            "best_label": str,
            "best_delta_pct": float,
            "worst_label": str,
            "worst_delta_pct": float,
            "rows": int,
        }
    """
    if not report.rows:
        return {"baseline_influence": report.baseline.influence_mean, "best_label": "",
                "best_delta_pct": 0.0, "worst_label": "", "worst_delta_pct": 0.0, "rows": 0}
    best = max(report.rows, key=lambda r: r.influence_delta_pct)
    worst = min(report.rows, key=lambda r: r.influence_delta_pct)
    return {
        "baseline_influence": report.baseline.influence_mean,
        "best_label": best.label,
        "best_delta_pct": best.influence_delta_pct,
        "worst_label": worst.label,
        "worst_delta_pct": worst.influence_delta_pct,
        "rows": len(report.rows),
    }
