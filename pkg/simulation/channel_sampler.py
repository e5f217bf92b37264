# simulation/channel_sampler.py
from typing import Tuple

import numpy as np

from polar.channels import BscMixture, MixtureForm, canonicalize


def _canonical(W: BscMixture) -> BscMixture:
    return W if W.form == MixtureForm.CANONICAL else canonicalize(W)


def sample_outputs(W: BscMixture, x: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    对码字 x 的每个比特独立地使用一次信道

    先按质量抽取 BSC 分量，再以该分量的 ε 翻转比特。接收端知道所用分量。

    Returns:
        (components, bits): 规范分解中的分量索引与观测比特
    """
    c = _canonical(W)
    x = np.asarray(x, dtype=np.uint8)
    components = rng.choice(len(c), size=x.shape, p=c.masses)
    flips = rng.random(size=x.shape) < c.eps[components]
    return components, (x ^ flips).astype(np.uint8)


def sample_channel_output(W: BscMixture, x: int, rng: np.random.Generator) -> Tuple[int, int]:
    """单次信道使用，返回 (分量索引, 观测比特)"""
    components, bits = sample_outputs(W, np.array([x], dtype=np.uint8), rng)
    return int(components[0]), int(bits[0])
