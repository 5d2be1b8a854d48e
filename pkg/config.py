from pathlib import Path

# ── 경로 ──
BASE_DIR = Path(__file__).parent
DATA_DIR = BASE_DIR / "data"
UPLOAD_DIR = DATA_DIR / "uploads"

# ── 로깅 ──
LOG_ENV_VAR = "GREEDIRIS_LOG"
DEFAULT_LOG_LEVEL = "WARNING"
LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

# ── 확산 모델 ──
MODEL_IC = "ic"
MODEL_LT = "lt"
MODELS = (MODEL_IC, MODEL_LT)
LT_WEIGHT_TOLERANCE = 1e-9          # 진입 가중치 합 허용 오차

# ── 엣지 가중치 생성 ──
WEIGHT_LOW = 0.0
WEIGHT_HIGH = 0.1                   # 균등분포 [0, 0.1]

# ── 바이너리 캐시 ──
BINARY_MAGIC = b"GIRI1"

# ── IMM 기본값 ──
DEFAULT_K = 100
DEFAULT_EPSILON = 0.13
DEFAULT_DELTA = 0.077               # k=100에서 버킷 63개
DEFAULT_ALPHA = 1.0
DEFAULT_ELL = 1.0
DEFAULT_WORKERS = 2
DEFAULT_BUCKET_WORKERS = 1

# ── OPIM 기본값 ──
OPIM_K = 1000
OPIM_EPSILON = 0.01
OPIM_DELTA = 0.0562
OPIM_BUDGET = 2 ** 20

# ── 실행 모드 ──
MODE_SEQUENTIAL = "sequential"
MODE_IMM = "imm"
MODE_OPIM = "opim"
MODES = (MODE_SEQUENTIAL, MODE_IMM, MODE_OPIM)

TRANSPORT_THREAD = "thread"
TRANSPORT_PROCESS = "process"

# ── 정답 오라클 한도 ──
BRUTE_FORCE_MAX_VERTICES = 22
BRUTE_FORCE_MAX_K = 6
EXACT_INFLUENCE_MAX_EDGES = 16

# ── 영향력 평가 ──
DEFAULT_TRIALS = 64

# ── 벤치마크 ──
BENCH_WORKERS = (2, 4, 8)
BENCH_ALPHAS = (1.0, 0.5, 0.125)
