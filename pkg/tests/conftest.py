import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from core.run_config import RunConfig, SeedConfig
from tests.helpers import covering_from_lists

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def abc_sets():
    """a=0, b=1, c=2 일 때 𝒮(a)={0,1}, 𝒮(b)={1,2}, 𝒮(c)={2}."""
    return covering_from_lists({0: [0, 1], 1: [1, 2], 2: [2]})


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def make_config():
    def _make(**overrides) -> RunConfig:
        values = dict(k=3, epsilon=0.3, delta=0.077, m=2, mode="imm",
                      seeds=SeedConfig.from_master(11), trials=16, deterministic=True)
        values.update(overrides)
        return RunConfig(**values)
    return _make


@pytest.fixture
def edge_file(tmp_path):
    def _write(text: str, name: str = "g.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write
