# polar/codes/encoder.py
from typing import Sequence

import numpy as np

from polar.errors import CodeParameterError
from .gp_code import GpCode

F_KERNEL = np.array([[1, 1], [0, 1]], dtype=np.uint8)


def _as_bits(bits: Sequence[int], name: str) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise CodeParameterError(f"{name} 必须是一维比特向量")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise CodeParameterError(f"{name} 只能包含 0 或 1")
    return arr.astype(np.uint8)


def polar_transform(v: Sequence[int]) -> np.ndarray:
    """
    对长度 2^n 的比特向量做 F^{⊗n} 蝶形变换

    n 级，每级 N/2 次异或；F² = I，所以变换两次回到原向量。
    """
    x = _as_bits(v, "输入向量").copy()
    N = len(x)
    if N == 0 or N & (N - 1):
        raise CodeParameterError(f"向量长度必须是2的幂: {N}")
    h = N // 2
    while h >= 1:
        blocks = x.reshape(-1, 2, h)
        blocks[:, 0, :] ^= blocks[:, 1, :]
        h //= 2
    return x


def encode(code: GpCode, u: Sequence[int]) -> np.ndarray:
    """f(u) = F^{⊗n}·ũ，其中 ũ_I = u，ũ_{I^c} = b"""
    bits = _as_bits(u, "消息")
    if len(bits) != code.r:
        raise CodeParameterError(f"消息长度应为 {code.r}，实际为 {len(bits)}")
    u_tilde = code.frozen_vector
    u_tilde[code.info_mask] = bits
    return polar_transform(u_tilde)


def kron_matrix(n: int) -> np.ndarray:
    """显式的 F^{⊗n}（GF(2) 上，n ≤ 12）"""
    if not 0 <= n <= 12:
        raise CodeParameterError(f"显式矩阵只支持 0 ≤ n ≤ 12: {n}")
    G = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        G = np.kron(F_KERNEL, G)
    return G


def column_weights(n: int) -> np.ndarray:
    """F^{⊗n} 第 i 列的重量 2^{popcount(i-1)}，按 0起始位置排列"""
    idx = np.arange(1 << n, dtype=np.int64)
    popcount = np.zeros_like(idx)
    for k in range(n):
        popcount += (idx >> k) & 1
    return np.left_shift(1, popcount)
