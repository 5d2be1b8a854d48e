"""실행 설정 모델: CLI·대시보드 입력을 검증해 한 곳에 모은다."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import (
    DEFAULT_K, DEFAULT_EPSILON, DEFAULT_DELTA, DEFAULT_ALPHA, DEFAULT_ELL,
    DEFAULT_WORKERS, DEFAULT_BUCKET_WORKERS, DEFAULT_TRIALS, OPIM_BUDGET,
    WEIGHT_LOW, WEIGHT_HIGH,
)
from core.rng import derive_seeds


class SeedConfig(BaseModel):
    """역할별 시드. 마스터 시드 하나에서 도출하는 것이 기본."""

    model_config = ConfigDict(frozen=True)

    graph_weights: int = 0
    sampling: int = 0
    partition: int = 0
    scheduler: int = 0
    evaluation: int = 0

    @classmethod
    def from_master(cls, master: int) -> "SeedConfig":
        return cls(**derive_seeds(master))


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(DEFAULT_K, ge=1)
    epsilon: float = Field(DEFAULT_EPSILON, gt=0.0, lt=1.0)
    ell: float = Field(DEFAULT_ELL, gt=0.0)
    delta: float = Field(DEFAULT_DELTA, gt=0.0, lt=0.5)
    alpha: float = Field(DEFAULT_ALPHA, gt=0.0, le=1.0)
    m: int = Field(DEFAULT_WORKERS, ge=1)
    bucket_workers: int = Field(DEFAULT_BUCKET_WORKERS, ge=1)
    bucket_override: int | None = Field(None, ge=1)
    model: Literal["ic", "lt"] = "ic"
    mode: Literal["sequential", "imm", "opim"] = "imm"
    opim_budget: int = Field(OPIM_BUDGET, ge=2)
    seeds: SeedConfig = SeedConfig()
    trials: int = Field(DEFAULT_TRIALS, ge=1)
    weight_low: float = Field(WEIGHT_LOW, ge=0.0, le=1.0)
    weight_high: float = Field(WEIGHT_HIGH, ge=0.0, le=1.0)
    deterministic: bool = False
    transport: Literal["thread", "process"] = "thread"

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.mode == "imm" and self.m < 2:
            raise ValueError("imm 모드는 워커 2개 이상 필요 (송신자 1 + 수신자)")
        if self.weight_low > self.weight_high:
            raise ValueError(f"가중치 구간이 잘못됨: {self.weight_low} > {self.weight_high}")
        return self

    @property
    def distributed(self) -> bool:
        """시드 선택을 분산 스트리밍으로 할지 여부."""
        return self.mode != "sequential" and self.m >= 2
