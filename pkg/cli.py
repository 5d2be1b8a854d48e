"""명령줄 진입점: `python cli.py run ...`, `python cli.py bench ...`.

종료 코드: 0 성공, 2 사용법/입력 오류, 1 실행 중 오류.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pydantic import ValidationError

from config import (
    BENCH_ALPHAS, BENCH_WORKERS, DEFAULT_ALPHA, DEFAULT_BUCKET_WORKERS, DEFAULT_DELTA, DEFAULT_ELL,
    DEFAULT_EPSILON, DEFAULT_K, DEFAULT_TRIALS, DEFAULT_WORKERS,
    MODE_OPIM, MODES, MODELS, OPIM_DELTA, OPIM_EPSILON, OPIM_K, WEIGHT_HIGH, WEIGHT_LOW,
)
from core.aggregator import bench_frame, run_bench
from core.diffusion import expected_influence
from core.driver import run
from core.errors import GreediRISError
from core.graph import Graph, build_graph, graph_summary, load_binary, load_edge_list, prepare_weights, save_binary
from core.report_generator import InputEcho, build_run_report, write_report
from core.run_config import RunConfig, SeedConfig
from utils.export_utils import write_bench_excel
from utils.file_utils import compute_file_hash
from utils.log_utils import configure_logging, get_logger

logger = get_logger("cli")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _positive_list(cast):
    def parse(text: str):
        try:
            return tuple(cast(x) for x in text.split(",") if x.strip())
        except ValueError:
            raise argparse.ArgumentTypeError(f"쉼표로 구분된 값이어야 함: {text!r}") from None
    return parse


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, type=Path, help="엣지 리스트 또는 GIRI1 캐시")
    p.add_argument("--format", choices=("edgelist", "binary"), default="edgelist")
    p.add_argument("--undirected", action="store_true", help="엣지 리스트를 양방향으로 읽음")
    p.add_argument("--model", choices=MODELS, default="ic")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--ell", type=float, default=DEFAULT_ELL)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="워커 수 m (수신자 포함)")
    p.add_argument("--bucket-workers", type=int, default=DEFAULT_BUCKET_WORKERS)
    p.add_argument("--buckets", type=int, default=None, help="버킷 수 직접 지정")
    p.add_argument("--mode", choices=MODES, default="imm")
    p.add_argument("--opim-budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="마스터 시드 (역할별 시드 도출)")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="영향력 평가 시뮬레이션 횟수")
    p.add_argument("--weight-low", type=float, default=WEIGHT_LOW)
    p.add_argument("--weight-high", type=float, default=WEIGHT_HIGH)
    p.add_argument("--transport", choices=("thread", "process"), default="thread")
    p.add_argument("--deterministic", action="store_true", help="시드 고정 스케줄러로 메시지 순서 직렬화")
    p.add_argument("--output", type=Path, default=None, help="보고서 JSON 경로 (없으면 stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greediris", description="RIS 기반 영향력 최대화 (분산 스트리밍 시드 선택)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="한 번 실행하고 보고서 작성")
    _add_common(p_run)
    p_run.add_argument("--cache", type=Path, default=None, help="가중치 준비된 그래프를 GIRI1로 저장")

    p_bench = sub.add_parser("bench", help="워커 수·α 스윕과 순차 기준 비교")
    _add_common(p_bench)
    p_bench.add_argument("--bench-workers", type=_positive_list(int), default=BENCH_WORKERS)
    p_bench.add_argument("--bench-alphas", type=_positive_list(float), default=BENCH_ALPHAS)
    p_bench.add_argument("--excel", type=Path, default=None, help="비교 표 xlsx 경로")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """플래그 → RunConfig. OPIM 모드는 k/ε/δ 기본값이 다르다."""
    opim = args.mode == MODE_OPIM
    values = {
        "k": args.k if args.k is not None else (OPIM_K if opim else DEFAULT_K),
        "epsilon": args.epsilon if args.epsilon is not None else (OPIM_EPSILON if opim else DEFAULT_EPSILON),
        "delta": args.delta if args.delta is not None else (OPIM_DELTA if opim else DEFAULT_DELTA),
        "ell": args.ell,
        "alpha": args.alpha,
        "m": args.workers,
        "bucket_workers": args.bucket_workers,
        "bucket_override": args.buckets,
        "model": args.model,
        "mode": args.mode,
        "seeds": SeedConfig.from_master(args.seed),
        "trials": args.trials,
        "weight_low": args.weight_low,
        "weight_high": args.weight_high,
        "deterministic": args.deterministic,
        "transport": args.transport,
    }
    if args.opim_budget is not None:
        values["opim_budget"] = args.opim_budget
    return RunConfig(**values)


def load_graph(args: argparse.Namespace, config: RunConfig) -> tuple[Graph, InputEcho]:
    if args.format == "binary":
        graph = load_binary(args.input)
    else:
        graph = build_graph(load_edge_list(args.input, directed=not args.undirected))
    graph = prepare_weights(graph, config.model, config.weight_low, config.weight_high,
                            config.seeds.graph_weights)
    echo = InputEcho(path=str(args.input), format=args.format,
                     sha256=compute_file_hash(args.input), summary=graph_summary(graph))
    return graph, echo


def _emit(text_or_report, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text_or_report.model_dump_json(indent=2) + "\n")
    else:
        write_report(text_or_report, output)
        logger.info("보고서 저장: %s", output)


def run_command(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    graph, echo = load_graph(args, config)
    if args.cache is not None:
        save_binary(graph, args.cache)
    outcome = run(graph, config)
    influence = expected_influence(graph, outcome.solution.seeds, config.model,
                                   config.trials, config.seeds.evaluation)
    report = build_run_report(outcome, config, graph, influence, echo)
    _emit(report, args.output)
    return EXIT_OK


def bench_command(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    graph, echo = load_graph(args, config)
    report = run_bench(graph, config, args.bench_workers, args.bench_alphas, echo)
    frame = bench_frame(report)
    sys.stderr.write(frame.to_string(index=False, float_format=lambda x: f"{x:.4g}") + "\n")
    if args.excel is not None:
        write_bench_excel(frame, args.excel, report.config)
    _emit(report, args.output)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging()
    handler = run_command if args.command == "run" else bench_command
    try:
        return handler(args)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(x) for x in first.get("loc", ())) or "config"
        sys.stderr.write(f"greediris: 잘못된 파라미터 {where}: {first.get('msg')}\n")
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"greediris: {exc}\n")
        return EXIT_USAGE
    except GreediRISError as exc:
        sys.stderr.write(f"greediris: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
