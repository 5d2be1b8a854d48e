"""Excel 내보내기 유틸리티."""

import io
from datetime import datetime
from pathlib import Path

import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill

HEADER_FILL = PatternFill(start_color="1E88E5", end_color="1E88E5", fill_type="solid")
BASELINE_FILL = PatternFill(start_color="E3F2FD", end_color="E3F2FD", fill_type="solid")

_FLOAT_FORMATS = {
    "coverage_fraction": "0.0000",
    "influence_mean": "0.00",
    "influence_stderr": "0.00",
    "influence_delta_pct": "+0.00;-0.00;0.00",
    "guarantee": "0.0000",
}


def export_bench_to_excel(frame: pd.DataFrame, config: dict | None = None,
                          title: str = "GreediRIS 벤치마크") -> bytes:
    """비교 표를 엑셀로. 첫 데이터 행(순차 기준)은 배경색으로 구분한다."""
    wb = Workbook()
    ws = wb.active
    ws.title = "비교"

    header_font = Font(name="맑은 고딕", bold=True, size=14)
    header_text_font = Font(name="맑은 고딕", bold=True, color="FFFFFF", size=10)
    body_font = Font(name="맑은 고딕", size=10)

    ws.cell(row=1, column=1, value=title).font = header_font
    ws.cell(row=2, column=1, value=f"생성일: {datetime.now().strftime('%Y-%m-%d %H:%M')}")
    ws["A2"].font = Font(name="맑은 고딕", size=9, color="888888")

    top = 4
    for j, col in enumerate(frame.columns, start=1):
        cell = ws.cell(row=top, column=j, value=col)
        cell.font = header_text_font
        cell.fill = HEADER_FILL
        cell.alignment = Alignment(horizontal="center")
        ws.column_dimensions[cell.column_letter].width = max(12, len(col) + 2)

    for i, record in enumerate(frame.itertuples(index=False), start=top + 1):
        for j, (col, value) in enumerate(zip(frame.columns, record), start=1):
            if hasattr(value, "item"):
                value = value.item()
            cell = ws.cell(row=i, column=j, value=value)
            cell.font = body_font
            if col in _FLOAT_FORMATS:
                cell.number_format = _FLOAT_FORMATS[col]
            elif col in ("sampling", "shuffle", "sender_select", "receiver_select", "total"):
                cell.number_format = "0.000"
            if i == top + 1:
                cell.fill = BASELINE_FILL

    if config:
        ws_cfg = wb.create_sheet("설정")
        ws_cfg.column_dimensions["A"].width = 20
        ws_cfg.column_dimensions["B"].width = 40
        for i, (key, value) in enumerate(config.items(), start=1):
            ws_cfg.cell(row=i, column=1, value=key).font = Font(name="맑은 고딕", bold=True, size=10)
            ws_cfg.cell(row=i, column=2, value=str(value)).font = body_font

    buf = io.BytesIO()
    wb.save(buf)
    return buf.getvalue()


def write_bench_excel(frame: pd.DataFrame, path: str | Path, config: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(export_bench_to_excel(frame, config))
    return path
