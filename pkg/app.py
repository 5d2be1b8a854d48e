"""GreediRIS 영향력 최대화 대시보드: Streamlit 진입점."""

import streamlit as st

from utils.log_utils import configure_logging

# ── 페이지 설정 ──
st.set_page_config(
    page_title="GreediRIS 영향력 최대화",
    page_icon="📡",
    layout="wide",
    initial_sidebar_state="expanded",
)

# ── 로깅 (최초 1회) ──
if "logging_configured" not in st.session_state:
    configure_logging()
    st.session_state.logging_configured = True

# ── 멀티페이지 네비게이션 ──
pages = {
    "실행": [
        st.Page("pages/01_run.py", title="단일 실행", icon="▶️"),
        st.Page("pages/02_bench.py", title="벤치마크 스윕", icon="📊"),
    ],
}

nav = st.navigation(pages)
nav.run()
