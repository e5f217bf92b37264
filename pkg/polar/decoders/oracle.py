# polar/decoders/oracle.py
"""穷举参照实现，只用于小码长的正确性核对"""
import itertools
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from config import get_settings
from polar.channels import BscMixture, Exactness, MixtureForm, canonicalize
from polar.codes import GpCode, kron_matrix
from polar.errors import BlocklengthTooLargeError, CodeParameterError, LikelihoodError
from .likelihoods import observation_likelihoods
from .threshold import LikelihoodPair

logger = logging.getLogger(__name__)

# 信道输出组合数 × 输入组合数 的上限
MAX_ENUMERATION_CELLS = 50_000_000


def _check_blocklength(N: int) -> None:
    limit = get_settings().analysis.oracle_max_blocklength
    if N > limit:
        raise BlocklengthTooLargeError(f"穷举只支持 N ≤ {limit}，实际 N = {N}")


def posterior_from_likelihoods(likelihoods: np.ndarray, prefix: Sequence[int]) -> LikelihoodPair:
    """
    直接求和计算 P(u_i = 0/1 | y, u_1^{i-1})

    likelihoods 为 (N, 2) 信道似然；i = len(prefix) + 1，后续比特均匀。
    返回按最大值归一化的似然对。
    """
    L = np.asarray(likelihoods, dtype=float)
    if L.ndim != 2 or L.shape[1] != 2:
        raise LikelihoodError(f"似然数组形状应为 (N, 2)，实际为 {L.shape}")
    N = L.shape[0]
    if N == 0 or N & (N - 1):
        raise CodeParameterError(f"码长必须是2的幂: {N}")
    _check_blocklength(N)
    k = len(prefix)
    if k >= N:
        raise CodeParameterError(f"前缀长度 {k} 必须小于 N = {N}")
    n = N.bit_length() - 1
    G = kron_matrix(n).astype(np.int64)

    free = N - k
    tails = ((np.arange(1 << free)[:, None] >> np.arange(free - 1, -1, -1)) & 1).astype(np.int64)
    U = np.hstack([np.tile(np.asarray(prefix, dtype=np.int64), (len(tails), 1)), tails])
    X = (U @ G.T) % 2
    probs = np.prod(np.where(X == 0, L[:, 0], L[:, 1]), axis=1)
    l0 = float(probs[tails[:, 0] == 0].sum())
    l1 = float(probs[tails[:, 0] == 1].sum())
    mx = max(l0, l1)
    if mx == 0:
        raise LikelihoodError("给定前缀的后验概率为零")
    return LikelihoodPair(l0 / mx, l1 / mx)


def enumerate_synthetic_channel(W: BscMixture, n: int, i: int,
                                merge_tol: Optional[float] = None) -> BscMixture:
    """
    穷举输出 (y, u_1^{i-1}) 得到合成信道 W_i 的规范BSC分解

    每个输出贡献质量 W_i(o|0) 与交叉概率 W_i(o|1) / (W_i(o|0) + W_i(o|1))。
    W_i(o|1) 恰为零时标记精确 0，两似然相等时标记精确 1/2。
    """
    N = 1 << n
    if not 1 <= i <= N:
        raise CodeParameterError(f"索引必须在 [1, {N}] 内: {i}")
    _check_blocklength(N)
    c = canonicalize(W, merge_tol)
    outputs = 2 * len(c)
    if (outputs ** N) * (1 << N) > MAX_ENUMERATION_CELLS:
        raise BlocklengthTooLargeError(f"枚举规模过大: {outputs}^{N} 个信道输出")

    # 单次使用的转移概率表 T[o, x]，o = 2·分量 + 比特
    T = np.empty((outputs, 2))
    T[0::2, 0] = c.masses * (1.0 - c.eps)
    T[0::2, 1] = c.masses * c.eps
    T[1::2, 0] = T[0::2, 1]
    T[1::2, 1] = T[0::2, 0]

    G = kron_matrix(n).astype(np.int64)
    U = (np.arange(1 << N)[:, None] >> np.arange(N - 1, -1, -1)) & 1
    X = (U @ G.T) % 2
    Y = np.array(list(itertools.product(range(outputs), repeat=N)), dtype=np.int64)
    logger.debug(f"穷举合成信道 W_{i}: {len(Y)} 个信道输出, {len(U)} 个输入")
    # Q[y, ũ] = Π_k T[y_k, x_k(ũ)]
    Q = np.ones((len(Y), len(U)))
    for pos in range(N):
        Q *= T[Y[:, pos][:, None], X[:, pos][None, :]]

    # ũ 按高位优先编号：前 i-1 位是前缀，第 i 位是 u_i，其余求和
    scale = 2.0 ** -(N - 1)
    Q = Q.reshape(len(Y), 1 << (i - 1), 2, 1 << (N - i)).sum(axis=3) * scale
    P0 = Q[:, :, 0].ravel()
    P1 = Q[:, :, 1].ravel()

    keep = P0 > 0
    P0, P1 = P0[keep], P1[keep]
    eps = P1 / (P0 + P1)
    flags = np.full(len(P0), Exactness.NONE, dtype=np.int8)
    flags[P1 == 0] = Exactness.ZERO
    half = np.abs(P0 - P1) <= 1e-14 * (P0 + P1)
    flags[half & (P1 > 0)] = Exactness.HALF
    eps = np.where(flags == Exactness.ZERO, 0.0, np.where(flags == Exactness.HALF, 0.5, eps))
    raw = BscMixture(P0 / P0.sum(), eps, flags, MixtureForm.RAW)
    return canonicalize(raw, merge_tol)


def brute_force_posteriors(code: GpCode, W: BscMixture, y: Sequence[Tuple[int, int]],
                           decided_prefix: Sequence[int]) -> LikelihoodPair:
    """
    穷举 ũ 的全部补全，求下一个未判决比特的精确后验似然对

    y 为 N 个 (分量, 比特) 观测；decided_prefix 为已确定的 ũ_1..ũ_{i-1}（含冻结位）。
    """
    _check_blocklength(code.N)
    observations = np.asarray(y, dtype=np.int64).reshape(-1, 2)
    if len(observations) != code.N:
        raise LikelihoodError(f"观测个数应为 {code.N}，实际为 {len(observations)}")
    likelihoods = observation_likelihoods(W, observations[:, 0], observations[:, 1])
    return posterior_from_likelihoods(likelihoods, decided_prefix)
