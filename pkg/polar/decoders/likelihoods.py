# polar/decoders/likelihoods.py
from typing import Sequence, Union

import numpy as np

from polar.channels import BscMixture, MixtureForm, canonicalize
from polar.errors import LikelihoodError
from .threshold import LikelihoodPair

# 结构上非零、但数值下溢的似然被抬到最小正规数
FLOOR = float(np.finfo(np.float64).tiny)


def as_likelihood_array(likelihoods: Union[np.ndarray, Sequence], N: int) -> np.ndarray:
    """
    校验并归一化信道似然

    接受 (N, 2) 数组或 LikelihoodPair 序列；每对除以最大值，结构上非零的值不会变成 0。
    """
    if len(likelihoods) and isinstance(likelihoods[0], LikelihoodPair):
        arr = np.array([(p.l0, p.l1) for p in likelihoods], dtype=float)
    else:
        arr = np.asarray(likelihoods, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise LikelihoodError(f"似然数组形状应为 (N, 2)，实际为 {arr.shape}")
    if arr.shape[0] != N:
        raise LikelihoodError(f"似然个数应为 {N}，实际为 {arr.shape[0]}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise LikelihoodError("似然必须是非负有限数")
    mx = arr.max(axis=1)
    if np.any(mx == 0):
        bad = np.flatnonzero(mx == 0) + 1
        raise LikelihoodError(f"位置 {bad.tolist()} 的似然对同时为零")
    out = arr / mx[:, None]
    out = np.where((arr > 0) & (out < FLOOR), FLOOR, out)
    return np.ascontiguousarray(out)


def observation_likelihoods(W: BscMixture, components: Sequence[int], bits: Sequence[int]) -> np.ndarray:
    """
    由 (分量, 比特) 观测计算似然对

    分量索引指向 W 的规范分解。y = 0 时为 (p_i(1-ε_i), p_i ε_i)，y = 1 时交换；
    ε_i 带精确 0 标记时对应的似然是精确零。
    """
    c = W if W.form == MixtureForm.CANONICAL else canonicalize(W)
    comps = np.asarray(components, dtype=np.int64)
    y = np.asarray(bits, dtype=np.int64)
    if comps.shape != y.shape or comps.ndim != 1:
        raise LikelihoodError("分量索引与观测比特长度不一致")
    if np.any((comps < 0) | (comps >= len(c))):
        raise LikelihoodError(f"分量索引超出 [0, {len(c) - 1}]")
    if np.any((y != 0) & (y != 1)):
        raise LikelihoodError("观测比特只能为 0 或 1")
    match = c.masses[comps] * (1.0 - c.eps[comps])
    miss = c.masses[comps] * c.eps[comps]
    l0 = np.where(y == 0, match, miss)
    l1 = np.where(y == 0, miss, match)
    return np.stack([l0, l1], axis=1)
