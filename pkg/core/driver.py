"""RIS 바깥 루프: IMM 마팅게일 라운드, OPIM 두 절반 검증, 근사 보장 계산기.

IMM 상수 (ε′ = √2·ε):
    λ′ = (2 + ⅔ε′)·(ln C(n,k) + ℓ·ln n + ln log₂ n)·n / ε′²
    θ̂₁ = ⌈λ′ / (n/2)⌉,  라운드 x 통과 조건 n·F ≥ (1+ε′)·n/2^x
    λ* = 2n·((1−1/e)·a + b)²/ε²,  θ = ⌈λ*/LB⌉
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from core.errors import ParameterError
from core.graph import Graph
from core.max_cover import Solution, coverage_of, lazy_greedy_max_cover
from core.run_config import RunConfig, SeedConfig
from core.runtime import RoundResult, distributed_select, partition_vertices, run_round, sample_slice
from core.sampling import RRRSample, SampleStore, build_covering_sets
from utils.log_utils import get_logger

logger = get_logger("driver")

GREEDY_RATIO = 1.0 - 1.0 / math.e

__all__ = [
    "RunConfig", "SeedConfig", "RoundState", "OpimRound", "RunOutcome",
    "estimate_theta0", "check_goodness", "final_theta", "failure_exponent",
    "truncated_guarantee", "combined_guarantee", "worst_case_guarantee", "approx_ratio",
    "select_on_universe", "run_imm", "run_opim", "run",
]


# ────────────────────────────────────────
# 닫힌 형태 계산기
# ────────────────────────────────────────

def log_comb(n: int, k: int) -> float:
    """ln C(n, k): log-gamma로 계산."""
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def failure_exponent(ell: float, n: int) -> float:
    """라운드 합집합을 반영한 ℓ·(1 + ln2/ln n). n < 2면 ℓ 그대로."""
    if n < 2:
        return ell
    return ell * (1.0 + math.log(2) / math.log(n))


def estimate_theta0(n: int, k: int, epsilon: float, ell: float) -> int:
    if not 1 <= k <= n:
        raise ParameterError(f"1 ≤ k ≤ n 이어야 함: k={k}, n={n}")
    eps_p = math.sqrt(2) * epsilon
    log2n = max(1.0, math.log2(n))
    lam = (2 + 2 * eps_p / 3) * (log_comb(n, k) + ell * math.log(n) + math.log(log2n)) * n / eps_p ** 2
    return max(1, math.ceil(lam / (n / 2)))


def check_goodness(solution: Solution, universe_size: int, n: int, round_index: int,
                   epsilon: float) -> tuple[bool, float]:
    """커버 비율로 영향력을 추정해 라운드 하한을 넘는지 판정.

    Returns:
        (통과 여부, LB): LB는 통과 여부와 무관하게 I/(1+ε′)
    """
    if universe_size <= 0:
        raise ParameterError("universe_size가 0인 해는 판정할 수 없음")
    eps_p = math.sqrt(2) * epsilon
    influence = n * solution.coverage / universe_size
    passed = influence >= (1 + eps_p) * (n / 2 ** round_index)
    return passed, influence / (1 + eps_p)


def final_theta(n: int, k: int, epsilon: float, ell: float, lower_bound: float) -> int:
    if lower_bound <= 0:
        raise ParameterError(f"LB는 양수여야 함: {lower_bound}")
    a = math.sqrt(ell * math.log(n) + math.log(2))
    b = math.sqrt(GREEDY_RATIO * (log_comb(n, k) + ell * math.log(n) + math.log(2)))
    lam_star = 2 * n * (GREEDY_RATIO * a + b) ** 2 / epsilon ** 2
    return math.ceil(lam_star / lower_bound)


def truncated_guarantee(alpha: float) -> float:
    """상위 α·k만 보낸 greedy의 보장 1 − e^{−α}."""
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha는 (0, 1] 범위여야 함: {alpha}")
    return 1.0 - math.exp(-alpha)


def combined_guarantee(local_ratio: float, global_ratio: float, epsilon: float) -> float:
    """2단계 합성 보장 local·global/(local+global) − ε. 음수면 보장 없음."""
    for name, ratio in (("local_ratio", local_ratio), ("global_ratio", global_ratio)):
        if not 0.0 < ratio <= 1.0:
            raise ParameterError(f"{name}는 (0, 1] 범위여야 함: {ratio}")
    return local_ratio * global_ratio / (local_ratio + global_ratio) - epsilon


def approx_ratio(config: RunConfig) -> float:
    """ε을 빼기 전 선택 단계의 근사비."""
    if not config.distributed:
        return GREEDY_RATIO
    return combined_guarantee(truncated_guarantee(config.alpha), 0.5 - config.delta, 0.0)


def worst_case_guarantee(config: RunConfig) -> float:
    return approx_ratio(config) - config.epsilon


# ────────────────────────────────────────
# 상태
# ────────────────────────────────────────

@dataclass
class RoundState:
    round_index: int
    theta_hat: int
    samples_retained: int
    lower_bound: float
    passed: bool
    coverage: int = 0
    seconds: float = 0.0


@dataclass
class OpimRound:
    round_index: int
    samples: int
    r1_size: int
    r2_size: int
    coverage_r1: int
    coverage_r2: int
    sigma_low: float
    sigma_up: float
    guarantee: float


@dataclass
class RunOutcome:
    solution: Solution
    rounds: list[RoundState]
    converged: bool
    theta: int
    guarantee: float
    timings: dict[str, float] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    opim_rounds: list[OpimRound] = field(default_factory=list)
    achieved_guarantee: float | None = None


def _effective_k(k: int, n: int) -> int:
    if k > n:
        logger.warning("k=%d가 정점 수 %d보다 커서 θ 추정에는 k=%d 사용", k, n, n)
    return min(k, n)


def _accumulate(totals: dict[str, float], timings: dict[str, float]) -> None:
    for key, value in timings.items():
        totals[key] = totals.get(key, 0.0) + value


# ────────────────────────────────────────
# 선택
# ────────────────────────────────────────

def select_on_universe(graph: Graph, store: SampleStore, theta_hat: int,
                       config: RunConfig) -> RoundResult:
    """샘플 [0, θ̂)에서 시드 선택. 분산 모드면 run_round, 아니면 단일 lazy greedy."""
    if config.distributed:
        return run_round(graph, config.model, theta_hat, config.k, config.m, config, store)
    t0 = time.perf_counter()
    samples = store.ensure(theta_hat)
    t_sampling = time.perf_counter() - t0
    t0 = time.perf_counter()
    solution = lazy_greedy_max_cover(theta_hat, build_covering_sets(samples), config.k)
    solution = solution.with_origin("sequential")
    return RoundResult(
        solution=solution, global_solution=solution, sender_solutions={},
        universe_size=theta_hat,
        timings={"sampling": t_sampling, "sender_select": time.perf_counter() - t0},
    )


def _select_on_half(samples: list[RRRSample], config: RunConfig, n: int) -> RoundResult:
    """R₁(재번호된 샘플)에서 시드 선택."""
    universe = len(samples)
    if not config.distributed:
        t0 = time.perf_counter()
        solution = lazy_greedy_max_cover(universe, build_covering_sets(samples), config.k)
        return RoundResult(solution.with_origin("sequential"), solution, {}, universe,
                           timings={"sender_select": time.perf_counter() - t0})
    local_sets = {}
    for rank in range(config.m):
        lo, hi = sample_slice(rank, config.m, universe)
        local_sets[rank] = build_covering_sets(samples[lo:hi])
    assignment = partition_vertices(n, config.m, config.seeds.partition)
    return distributed_select(local_sets, assignment, universe, config.k, config)


# ────────────────────────────────────────
# IMM
# ────────────────────────────────────────

def run_imm(graph: Graph, config: RunConfig) -> RunOutcome:
    """마팅게일 라운드로 θ를 정하고 최종 시드를 고른다.

    라운드마다 θ̂를 두 배로 늘리며 기존 샘플은 같은 id로 재사용한다.
    round 예산 안에 통과하지 못하면 마지막 라운드 해를 unconverged로 돌려준다.
    """
    n = graph.n
    k_est = _effective_k(config.k, n)
    ell = failure_exponent(config.ell, n)
    store = SampleStore(graph, config.model, config.seeds.sampling)
    max_rounds = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    theta_hat = estimate_theta0(n, k_est, config.epsilon, ell)

    started = time.perf_counter()
    timings: dict[str, float] = {}
    rounds: list[RoundState] = []
    result = None
    passed, lower_bound = False, 0.0
    for x in range(1, max_rounds + 1):
        t0 = time.perf_counter()
        result = select_on_universe(graph, store, theta_hat, config)
        _accumulate(timings, result.timings)
        passed, lower_bound = check_goodness(result.solution, theta_hat, n, x, config.epsilon)
        rounds.append(RoundState(x, theta_hat, len(store), lower_bound, passed,
                                 result.solution.coverage, time.perf_counter() - t0))
        logger.info("라운드 %d: θ̂=%d, 커버 %d, LB=%.2f, 통과=%s",
                    x, theta_hat, result.solution.coverage, lower_bound, passed)
        if passed:
            break
        if x < max_rounds:
            theta_hat *= 2

    if passed:
        theta = max(final_theta(n, k_est, config.epsilon, ell, lower_bound), theta_hat)
        logger.info("최종 θ=%d (보유 샘플 %d)", theta, len(store))
        if theta > theta_hat:
            result = select_on_universe(graph, store, theta, config)
            _accumulate(timings, result.timings)
    else:
        theta = theta_hat
        logger.warning("%d라운드 안에 하한 조건을 통과하지 못함: 마지막 해 반환", max_rounds)

    timings["total"] = time.perf_counter() - started
    return RunOutcome(
        solution=result.solution, rounds=rounds, converged=passed, theta=theta,
        guarantee=worst_case_guarantee(config), timings=timings,
        diagnostics=dict(result.diagnostics, failure_exponent=ell),
    )


# ────────────────────────────────────────
# OPIM
# ────────────────────────────────────────

def _even(value: int) -> int:
    return value + (value % 2)


def opim_bounds(n: int, coverage_r1: int, r1_size: int, coverage_r2: int, r2_size: int,
                ratio: float, log_inv_delta: float) -> tuple[float, float]:
    """(σ_low, σ_up). R₂ 검증 하한과 R₁ 커버 기반 최적해 상한.

    커버 수에 대한 마팅게일 꼬리 한계 (a = ln 1/δ):
        low = (√(cov₂ + 2a/9) − √(a/2))² − a/18
        up  = (√(cov₁ + a/2) + √(a/2))²
    """
    if r2_size == 0 or r1_size == 0:
        return 0.0, 0.0
    a = log_inv_delta
    low = max(0.0, (math.sqrt(coverage_r2 + 2 * a / 9) - math.sqrt(a / 2)) ** 2 - a / 18)
    up = (math.sqrt(coverage_r1 + a / 2) + math.sqrt(a / 2)) ** 2
    return n * low / r2_size, n * up / (r1_size * ratio)


def run_opim(graph: Graph, config: RunConfig) -> RunOutcome:
    """짝수 id(R₁)로 선택하고 홀수 id(R₂)로 검증하며 보장 목표에 닿을 때까지 샘플을 두 배로."""
    n = graph.n
    k_est = _effective_k(config.k, n)
    ell = failure_exponent(config.ell, n)
    log_inv_delta = ell * math.log(max(n, 2))
    ratio = approx_ratio(config)
    target = ratio - config.epsilon
    budget = config.opim_budget - config.opim_budget % 2
    samples_target = min(_even(estimate_theta0(n, k_est, config.epsilon, ell)), budget)
    store = SampleStore(graph, config.model, config.seeds.sampling)

    started = time.perf_counter()
    timings: dict[str, float] = {}
    rounds: list[RoundState] = []
    opim_rounds: list[OpimRound] = []
    best: tuple[float, RoundResult, int] | None = None
    index = 0
    while True:
        index += 1
        t0 = time.perf_counter()
        samples = store.ensure(samples_target)
        _accumulate(timings, {"sampling": time.perf_counter() - t0})
        r1 = [RRRSample(s.id // 2, s.root, s.members) for s in samples if s.id % 2 == 0]
        r2 = [s for s in samples if s.id % 2 == 1]

        result = _select_on_half(r1, config, n)
        _accumulate(timings, result.timings)
        cov1 = result.solution.coverage
        cov2 = coverage_of(result.solution.seeds, build_covering_sets(r2, result.solution.seeds))
        sigma_low, sigma_up = opim_bounds(n, cov1, len(r1), cov2, len(r2), ratio, log_inv_delta)
        achieved = sigma_low / sigma_up if sigma_up > 0 else 0.0
        opim_rounds.append(OpimRound(index, samples_target, len(r1), len(r2), cov1, cov2,
                                     sigma_low, sigma_up, achieved))
        rounds.append(RoundState(index, samples_target, len(store), sigma_low, achieved >= target,
                                 cov1, time.perf_counter() - t0))
        logger.info("OPIM 라운드 %d: 샘플 %d, σ_low=%.2f, σ_up=%.2f, 보장 %.4f (목표 %.4f)",
                    index, samples_target, sigma_low, sigma_up, achieved, target)
        if best is None or achieved >= best[0]:
            best = (achieved, result, samples_target)
        if achieved >= target or samples_target >= budget:
            break
        samples_target = min(samples_target * 2, budget)

    achieved, result, theta = best
    converged = opim_rounds[-1].guarantee >= target
    if not converged:
        logger.warning("샘플 예산 %d 소진: 달성 보장 %.4f (목표 %.4f)", budget, achieved, target)
    timings["total"] = time.perf_counter() - started
    return RunOutcome(
        solution=result.solution, rounds=rounds, converged=converged, theta=theta,
        guarantee=worst_case_guarantee(config), timings=timings,
        diagnostics=dict(result.diagnostics, failure_exponent=ell, target_guarantee=target),
        opim_rounds=opim_rounds, achieved_guarantee=achieved,
    )


def run(graph: Graph, config: RunConfig) -> RunOutcome:
    """모드별 분기. sequential은 IMM 루프를 단일 greedy로 돈다."""
    if config.mode == "opim":
        return run_opim(graph, config)
    return run_imm(graph, config)
