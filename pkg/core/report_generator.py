"""실행 보고서: 설정 echo, 라운드 상태, 시드(원본 번호), 보장, 영향력, 시간, 진단.

보고서는 pydantic 모델이며 들여쓴 JSON으로 저장한다. 필드 목록은 docs/report_schema.md.
보장 수치는 항상 보고서를 만드는 시점에 설정값에서 다시 계산한다.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from core.diffusion import InfluenceEstimate
from core.driver import (
    GREEDY_RATIO, RunOutcome, combined_guarantee, truncated_guarantee, worst_case_guarantee,
)
from core.graph import Graph, graph_summary
from core.run_config import RunConfig

SCHEMA_VERSION = 1
PHASES = ("sampling", "shuffle", "sender_select", "receiver_select", "total")


class InputEcho(BaseModel):
    path: str = ""
    format: str = "edgelist"
    sha256: str = ""
    summary: dict[str, Any] = Field(default_factory=dict)


class RoundModel(BaseModel):
    round_index: int
    theta_hat: int
    samples_retained: int
    lower_bound: float
    passed: bool
    coverage: int
    seconds: float = Field(ge=0.0)


class OpimRoundModel(BaseModel):
    round_index: int
    samples: int
    r1_size: int
    r2_size: int
    coverage_r1: int
    coverage_r2: int
    sigma_low: float
    sigma_up: float
    guarantee: float


class GuaranteeModel(BaseModel):
    truncated_local: float          # 1 − e^{−α}
    streaming_global: float         # ½ − δ
    combined: float                 # 합성 보장 − ε
    sequential: float               # (1 − 1/e) − ε
    applied: float                  # 이번 실행 모드에 해당하는 값
    achieved: float | None = None   # OPIM 인스턴스 보장


class InfluenceModel(BaseModel):
    mean: float
    stderr: float = Field(ge=0.0)
    trials: int


class RunReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    input: InputEcho
    config: dict[str, Any]
    rounds: list[RoundModel]
    opim_rounds: list[OpimRoundModel] = Field(default_factory=list)
    converged: bool
    theta: int
    seeds: list[int]
    marginals: list[int]
    coverage: int
    universe_size: int
    coverage_fraction: float
    origin: str
    guarantee: GuaranteeModel
    influence: InfluenceModel | None = None
    timings: dict[str, float]
    diagnostics: dict[str, Any] = Field(default_factory=dict)

    def without_timings(self) -> dict:
        """시간 필드를 뺀 dict. 재현성 비교용."""
        data = self.model_dump(mode="json")
        data.pop("timings")
        for r in data["rounds"]:
            r.pop("seconds")
        return data


def guarantee_block(config: RunConfig, achieved: float | None = None) -> GuaranteeModel:
    local = truncated_guarantee(config.alpha)
    streaming = 0.5 - config.delta
    return GuaranteeModel(
        truncated_local=local,
        streaming_global=streaming,
        combined=combined_guarantee(local, streaming, config.epsilon),
        sequential=GREEDY_RATIO - config.epsilon,
        applied=worst_case_guarantee(config),
        achieved=achieved,
    )


def _jsonable(value):
    """numpy 스칼라·배열, 정수 키를 JSON 친화형으로."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def build_run_report(outcome: RunOutcome, config: RunConfig, graph: Graph,
                     influence: InfluenceEstimate | None = None,
                     input_echo: InputEcho | None = None) -> RunReport:
    sol = outcome.solution
    timings = {phase: max(0.0, float(outcome.timings.get(phase, 0.0))) for phase in PHASES}
    return RunReport(
        input=input_echo or InputEcho(summary=_jsonable(graph_summary(graph))),
        config=config.model_dump(mode="json"),
        rounds=[RoundModel(**vars(r)) for r in outcome.rounds],
        opim_rounds=[OpimRoundModel(**vars(r)) for r in outcome.opim_rounds],
        converged=outcome.converged,
        theta=outcome.theta,
        seeds=[graph.label_of(v) for v in sol.seeds],
        marginals=list(sol.marginals),
        coverage=sol.coverage,
        universe_size=sol.universe_size,
        coverage_fraction=sol.fraction,
        origin=sol.origin,
        guarantee=guarantee_block(config, outcome.achieved_guarantee),
        influence=InfluenceModel(**influence.as_dict()) if influence else None,
        timings=timings,
        diagnostics=_jsonable(outcome.diagnostics),
    )


def write_report(report: BaseModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_run_report(path: str | Path) -> RunReport:
    return RunReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


# ────────────────────────────────────────
# 벤치마크 보고서
# ────────────────────────────────────────

class BenchRow(BaseModel):
    label: str
    mode: str
    m: int
    alpha: float
    theta: int
    converged: bool
    coverage: int
    universe_size: int
    coverage_fraction: float
    influence_mean: float
    influence_stderr: float
    influence_delta_pct: float      # 기준(sequential) 행 대비 %
    guarantee: float
    sampling: float = 0.0
    shuffle: float = 0.0
    sender_select: float = 0.0
    receiver_select: float = 0.0
    total: float = 0.0


class BenchReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    input: InputEcho
    config: dict[str, Any]
    baseline: BenchRow
    rows: list[BenchRow]

    def all_rows(self) -> list[BenchRow]:
        return [self.baseline, *self.rows]
