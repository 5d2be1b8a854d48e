import logging

import pandas as pd
import pytest

from components.charts import (
    bar_chart_bucket_occupancy, bar_chart_influence_delta, line_chart_coverage, line_chart_rounds,
    stacked_bar_phase_timings,
)
from core.aggregator import BENCH_COLUMNS, bench_frame, delta_pct, summarize_bench
from core.report_generator import BenchReport, BenchRow, InputEcho
from utils.export_utils import export_bench_to_excel
from utils.file_utils import compute_file_hash, save_uploaded_file
from utils.log_utils import configure_logging, get_logger, resolve_level


def _row(label, mode="imm", m=2, alpha=1.0, coverage=50, influence=10.0, delta=0.0):
    return BenchRow(label=label, mode=mode, m=m, alpha=alpha, theta=100, converged=True,
                    coverage=coverage, universe_size=100, coverage_fraction=coverage / 100,
                    influence_mean=influence, influence_stderr=0.5, influence_delta_pct=delta,
                    guarantee=0.12, sampling=0.2, shuffle=0.1, sender_select=0.3,
                    receiver_select=0.05, total=0.7)


@pytest.fixture
def bench_report():
    baseline = _row("sequential", mode="sequential", m=1, coverage=60, influence=10.0)
    rows = [
        _row("m=2, α=1", m=2, alpha=1.0, coverage=60, influence=10.0, delta=0.0),
        _row("m=2, α=0.5", m=2, alpha=0.5, coverage=55, influence=9.5, delta=-5.0),
        _row("m=4, α=1", m=4, alpha=1.0, coverage=58, influence=10.2, delta=2.0),
        _row("m=4, α=0.5", m=4, alpha=0.5, coverage=52, influence=9.0, delta=-10.0),
    ]
    return BenchReport(input=InputEcho(), config={"k": 3}, baseline=baseline, rows=rows)


# ── 집계 ──

def test_delta_pct():
    assert delta_pct(11.0, 10.0) == pytest.approx(10.0)
    assert delta_pct(10.0, 10.0) == 0.0
    assert delta_pct(5.0, 0.0) == 0.0


def test_bench_frame_puts_baseline_first(bench_report):
    frame = bench_frame(bench_report)
    assert list(frame.columns) == BENCH_COLUMNS
    assert frame["label"].iloc[0] == "sequential"
    assert len(frame) == 5


def test_summarize_bench(bench_report):
    summary = summarize_bench(bench_report)
    assert summary["best_label"] == "m=4, α=1"
    assert summary["worst_delta_pct"] == -10.0
    assert summary["rows"] == 4
    empty = BenchReport(input=InputEcho(), config={}, baseline=bench_report.baseline, rows=[])
    assert summarize_bench(empty)["rows"] == 0


# ── 차트 ──

def test_chart_trace_counts(bench_report):
    frame = bench_frame(bench_report)
    assert len(line_chart_coverage(frame).data) == 2
    assert len(stacked_bar_phase_timings(frame).data) == 4
    assert len(bar_chart_influence_delta(frame).data) >= 1
    assert len(bar_chart_bucket_occupancy([3, 2, 0]).data) == 1


def test_round_chart_handles_empty_history():
    assert len(line_chart_rounds([]).data) == 0
    rounds = [{"round_index": 1, "theta_hat": 10, "lower_bound": 1.5},
              {"round_index": 2, "theta_hat": 20, "lower_bound": 3.0}]
    assert len(line_chart_rounds(rounds).data) == 2


# ── 내보내기 ──

def test_excel_export_is_xlsx(bench_report):
    payload = export_bench_to_excel(bench_frame(bench_report), {"k": 3})
    assert payload[:2] == b"PK"


def test_file_hash_matches_for_bytes_and_path(tmp_path):
    path = save_uploaded_file(b"0 1\n", "g.txt", tmp_path)
    assert compute_file_hash(path) == compute_file_hash(b"0 1\n")
    assert path.suffix == ".txt"


def test_repeated_upload_reuses_one_file(tmp_path):
    paths = {save_uploaded_file(b"0 1\n1 2\n", "g.txt", tmp_path) for _ in range(5)}
    assert len(paths) == 1
    assert len(list(tmp_path.iterdir())) == 1
    other = save_uploaded_file(b"1 2\n", "g.txt", tmp_path)
    assert other not in paths
    assert other.read_bytes() == b"1 2\n"


# ── 로깅 ──

@pytest.mark.parametrize("value, level", [
    ("debug", logging.DEBUG), ("INFO", logging.INFO), (" warning ", logging.WARNING),
    ("10", 10), (None, logging.WARNING), ("", logging.WARNING), ("nonsense", logging.WARNING),
])
def test_resolve_level(value, level):
    assert resolve_level(value) == level


def test_package_loggers_share_root(monkeypatch):
    monkeypatch.setenv("GREEDIRIS_LOG", "debug")
    root = configure_logging()
    assert root.level == logging.DEBUG
    assert get_logger("driver").name == "greediris.driver"
    assert get_logger("driver").getEffectiveLevel() == logging.DEBUG
    configure_logging("error")
    assert len(root.handlers) == 1


def test_frame_values_are_plain(bench_report):
    frame = bench_frame(bench_report)
    assert isinstance(frame, pd.DataFrame)
    assert frame["influence_delta_pct"].tolist() == [0.0, 0.0, -5.0, 2.0, -10.0]
