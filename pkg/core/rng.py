"""카운터 기반 난수: (시드, 인덱스)만으로 결정되는 재현 가능한 난수열.

워커 수와 무관하게 샘플 i의 난수는 항상 같아야 하므로
전역 상태를 가진 난수기 대신 키-카운터 방식을 쓴다.
"""

import numpy as np

MASK_64 = 0xFFFFFFFFFFFFFFFF

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

SEED_ROLES = ("graph_weights", "sampling", "partition", "scheduler", "evaluation")


def _splitmix(x: int) -> int:
    x = (x + _GOLDEN) & MASK_64
    z = x
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK_64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK_64
    return z ^ (z >> 31)


def mix64(*keys: int) -> int:
    """정수 키들을 하나의 64비트 값으로 섞는다."""
    h = 0
    for key in keys:
        h = _splitmix(h ^ (int(key) & MASK_64))
    return h


def uniform_by_index(seed: int, indices) -> np.ndarray:
    """각 인덱스마다 [0, 1) 균등 난수 하나. (seed, index)의 순수 함수."""
    idx = np.asarray(indices, dtype=np.uint64)
    base = np.uint64(mix64(seed))
    with np.errstate(over="ignore"):
        z = (idx ^ base) + np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def stream(seed: int, counter: int) -> np.random.Generator:
    """(seed, counter)로 키를 정한 Philox 생성기."""
    key = (mix64(seed) << 64) | (int(counter) & MASK_64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seeds(master: int) -> dict[str, int]:
    """마스터 시드 하나에서 역할별 하위 시드 도출."""
    return {role: mix64(master, i) & 0x7FFFFFFFFFFFFFFF for i, role in enumerate(SEED_ROLES)}
