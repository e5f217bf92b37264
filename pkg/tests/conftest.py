# tests/conftest.py
import numpy as np
import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from config.settings import Settings, get_settings
from polar.channels import BscMixture, make_bec, make_bsc

# 译码内核首次调用时 JIT 编译，不设 deadline
hypothesis_settings.register_profile(
    "polar",
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
hypothesis_settings.load_profile("polar")


@pytest.fixture(autouse=True)
def settings():
    """每个测试使用重新加载的配置：关闭进度条，单进程"""
    Settings.reset_instance()
    s = get_settings(force_reload=True)
    s.simulation.show_progress = False
    s.simulation.workers = 1
    yield s
    Settings.reset_instance()


@pytest.fixture
def bec_half() -> BscMixture:
    return make_bec(0.5)


@pytest.fixture
def bsc_011() -> BscMixture:
    return make_bsc(0.11)


@pytest.fixture
def mixed_channel() -> BscMixture:
    """0.6·BSC(0) + 0.3·BSC(0.1) + 0.1·BSC(0.5)"""
    return BscMixture.from_components([(0.6, 0.0), (0.3, 0.1), (0.1, 0.5)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def random_mixture(rng: np.random.Generator, max_components: int = 8) -> BscMixture:
    """1..max_components 个分量的随机混合，约两成分量取精确的 0、1/2 或 1"""
    k = int(rng.integers(1, max_components + 1))
    masses = rng.dirichlet(np.ones(k))
    eps = rng.uniform(0.0, 1.0, size=k)
    special = rng.random(k) < 0.2
    eps[special] = rng.choice([0.0, 0.5, 1.0], size=int(special.sum()))
    return BscMixture.from_components(list(zip(masses.tolist(), eps.tolist())))


@pytest.fixture(scope='session')
def random_mixtures() -> list:
    rng = np.random.default_rng(2024)
    return [random_mixture(rng) for _ in range(100)]
