# polar/decoders/sce_decoder.py
"""
带擦除的逐次消除（SCE）译码器

递归采用扁平缓冲：第 k 层（长度 2^k）的节点从偏移 2^k - 1 开始，共 2N - 1 个槽位。
每个似然对都按最大值归一化，结构上非零的值不会下溢为 0，
因此似然对中的精确零只可能来自信道本身。
"""
import logging
from typing import Sequence, Tuple, Union

import numpy as np
from numba import njit

from polar.codes import GpCode
from .likelihoods import FLOOR, as_likelihood_array
from .threshold import DecodeResult, ThresholdVector, decide_kernel

logger = logging.getLogger(__name__)


@njit(cache=False)
def _renormalize(r0, r1, nz0, nz1):
    mx = r0 if r0 > r1 else r1
    if mx > 0.0:
        r0 = r0 / mx
        r1 = r1 / mx
    if nz0 and r0 < FLOOR:
        r0 = FLOOR
    if nz1 and r1 < FLOOR:
        r1 = FLOOR
    return r0, r1


@njit(cache=False)
def _check_node(a0, a1, b0, b1):
    # u_left = x_a ⊕ x_b，右半未知
    r0 = a0 * b0 + a1 * b1
    r1 = a0 * b1 + a1 * b0
    nz0 = (a0 > 0.0 and b0 > 0.0) or (a1 > 0.0 and b1 > 0.0)
    nz1 = (a0 > 0.0 and b1 > 0.0) or (a1 > 0.0 and b0 > 0.0)
    return _renormalize(r0, r1, nz0, nz1)


@njit(cache=False)
def _var_node(a0, a1, b0, b1, c):
    # 左半已判决为 c 时 u_right 的似然
    if c == 1:
        a0, a1 = a1, a0
    r0 = a0 * b0
    r1 = a1 * b1
    return _renormalize(r0, r1, a0 > 0.0 and b0 > 0.0, a1 > 0.0 and b1 > 0.0)


@njit(cache=False)
def _sce_kernel(ch0, ch1, is_info, frozen, thresholds, u_hat, trace):
    """返回第一个被擦除的 0起始 位置，无擦除时返回 -1"""
    N = ch0.shape[0]
    n = 0
    while (1 << n) < N:
        n += 1
    size = 2 * N - 1
    P0 = np.empty(size)
    P1 = np.empty(size)
    left = np.zeros(size, dtype=np.uint8)
    cur = np.zeros(size, dtype=np.uint8)
    base = N - 1
    for j in range(N):
        P0[base + j] = ch0[j]
        P1[base + j] = ch1[j]

    for i in range(N):
        if i == 0:
            start = n
        else:
            p = 0
            while ((i >> p) & 1) == 0:
                p += 1
            h = 1 << p
            up = 2 * h - 1
            lo = h - 1
            for j in range(h):
                r0, r1 = _var_node(P0[up + j], P1[up + j], P0[up + h + j], P1[up + h + j], left[lo + j])
                P0[lo + j] = r0
                P1[lo + j] = r1
            start = p
        for k in range(start, 0, -1):
            h = 1 << (k - 1)
            up = 2 * h - 1
            lo = h - 1
            for j in range(h):
                r0, r1 = _check_node(P0[up + j], P1[up + j], P0[up + h + j], P1[up + h + j])
                P0[lo + j] = r0
                P1[lo + j] = r1

        a0 = P0[0]
        a1 = P1[0]
        trace[i, 0] = a0
        trace[i, 1] = a1
        if is_info[i]:
            d = decide_kernel(a0, a1, thresholds[i])
            if d < 0:
                return i
            bit = np.uint8(d)
        else:
            bit = frozen[i]
        u_hat[i] = bit

        # 部分和上传：右子节点完成后合并为 (左⊕右, 右)
        cur[0] = bit
        k = 0
        idx = i
        while (idx & 1) == 1 and k < n:
            h = 1 << k
            lo = h - 1
            up = 2 * h - 1
            for j in range(h):
                cur[up + j] = left[lo + j] ^ cur[lo + j]
                cur[up + h + j] = cur[lo + j]
            idx >>= 1
            k += 1
        if k < n:
            h = 1 << k
            lo = h - 1
            for j in range(h):
                left[lo + j] = cur[lo + j]
    return -1


def _resolve_thresholds(code: GpCode, t: Union[ThresholdVector, float, Sequence[float], None]) -> np.ndarray:
    if t is None:
        t = ThresholdVector.zero(code)
    elif isinstance(t, (int, float)):
        t = ThresholdVector.uniform(code, float(t))
    elif not isinstance(t, ThresholdVector):
        t = ThresholdVector.from_sequence(code, list(t))
    return t.to_array(code)


class SceDecoder:
    """
    固定码与阈值的 SCE 译码器

    码结构与阈值数组只准备一次，适合仿真中对大量接收字逐个译码。
    实例持有工作缓冲，不要在线程间共享同一个实例。

    示例:
        >>> code = GpCode(1, (2,))
        >>> SceDecoder(code).decode([(0.5, 0.5), (1.0, 0.0)])
        DecodeResult(message=(0,), first_erased_index=None)
    """

    def __init__(self, code: GpCode, t: Union[ThresholdVector, float, Sequence[float], None] = None):
        self.code = code
        self.thresholds = _resolve_thresholds(code, t)
        self.info_mask = code.info_mask
        self.frozen = code.frozen_vector
        self._u_hat = np.zeros(code.N, dtype=np.uint8)
        self._trace = np.zeros((code.N, 2), dtype=float)
        logger.debug(f"SCE 译码器就绪: N={code.N} r={code.r}")

    def _run(self, channel_likelihoods) -> Tuple[DecodeResult, int]:
        L = as_likelihood_array(channel_likelihoods, self.code.N)
        stop = _sce_kernel(np.ascontiguousarray(L[:, 0]), np.ascontiguousarray(L[:, 1]),
                           self.info_mask, self.frozen, self.thresholds, self._u_hat, self._trace)
        if stop >= 0:
            return DecodeResult.erasure(int(stop) + 1), int(stop) + 1
        message = self._u_hat[self.info_mask]
        return DecodeResult(message=tuple(int(b) for b in message)), self.code.N

    def decode(self, channel_likelihoods: Union[np.ndarray, Sequence]) -> DecodeResult:
        result, _ = self._run(channel_likelihoods)
        return result

    def decode_trace(self, channel_likelihoods: Union[np.ndarray, Sequence]) -> Tuple[DecodeResult, np.ndarray]:
        result, visited = self._run(channel_likelihoods)
        return result, self._trace[:visited].copy()


def sce_decode(code: GpCode, channel_likelihoods: Union[np.ndarray, Sequence],
               t: Union[ThresholdVector, float, Sequence[float], None] = None) -> DecodeResult:
    """
    按 i = 1..N 顺序做 SCE 译码

    冻结位取 b_i；信息位用 D_{t_i} 判决，第一次擦除即停止并返回其索引。
    t 可以是 ThresholdVector、统一阈值或按信息集顺序给出的列表，默认全零。
    """
    return SceDecoder(code, t).decode(channel_likelihoods)


def sce_decode_trace(code: GpCode, channel_likelihoods: Union[np.ndarray, Sequence],
                     t: Union[ThresholdVector, float, Sequence[float], None] = None
                     ) -> Tuple[DecodeResult, np.ndarray]:
    """同 sce_decode，另返回已处理位置（含冻结位）的归一化似然对，形状 (k, 2)"""
    return SceDecoder(code, t).decode_trace(channel_likelihoods)
