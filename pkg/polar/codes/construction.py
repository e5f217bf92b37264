# polar/codes/construction.py
import logging
import math
from enum import Enum
from typing import Optional

import numpy as np

from polar.channels import (
    BscMixture,
    bec_erasure,
    is_bec,
    make_bec,
    params,
    synthesize_all,
)
from polar.errors import CodeParameterError, RateOutOfRangeError
from .encoder import column_weights
from .gp_code import GpCode

logger = logging.getLogger(__name__)


class ConstructionKind(str, Enum):
    POLAR = "polar"
    RM = "rm"
    ZERO_UE = "zero_ue"


def _check_dimension(n: int, r: int) -> None:
    if n < 0:
        raise CodeParameterError(f"n 必须非负: {n}")
    if not 0 <= r <= (1 << n):
        raise CodeParameterError(f"维数 r={r} 超出 [0, {1 << n}]")


def bec_synthetic_erasures(eps: float, n: int) -> np.ndarray:
    """
    BEC(ε) 全部 2^n 个合成信道的擦除概率（精确标量递推）

    ε⁻ = 2ε - ε²，ε⁺ = ε²；第 k 步信道 j 的子信道位于 2j 与 2j+1。
    """
    if not 0.0 <= eps <= 1.0:
        raise CodeParameterError(f"擦除概率超出[0,1]: {eps}")
    z = np.array([float(eps)])
    for _ in range(n):
        z = np.stack([2.0 * z - z * z, z * z], axis=1).reshape(-1)
    return z


def synthetic_bhattacharyya(W: BscMixture, n: int, l_max: Optional[int] = None,
                            merge_tol: Optional[float] = None) -> np.ndarray:
    """全部合成信道的 Bhattacharyya 参数；BEC 输入走精确递推，不触发退化"""
    if is_bec(W, merge_tol):
        return bec_synthetic_erasures(bec_erasure(W, merge_tol), n)
    channels = synthesize_all(W, n, l_max, merge_tol)
    return np.array([params(ch, merge_tol).bhattacharyya for ch in channels])


def construct_polar(W: BscMixture, n: int, r: int, l_max: Optional[int] = None,
                    merge_tol: Optional[float] = None) -> GpCode:
    """选取 Bhattacharyya 参数最小的 r 个合成信道，平局取较小索引，b = 0"""
    _check_dimension(n, r)
    z = synthetic_bhattacharyya(W, n, l_max, merge_tol)
    index = np.arange(1, (1 << n) + 1)
    order = np.lexsort((index, z))
    info = sorted(int(i) for i in index[order[:r]])
    logger.debug(f"polar构造完成: n={n}, r={r}, 最差入选Z={float(z[order[r - 1]]) if r else 0.0:.3e}")
    return GpCode(n, tuple(info))


def construct_rm(n: int, r: int) -> GpCode:
    """选取 F^{⊗n} 中重量最大的 r 列，平局取较大索引，b = 0"""
    _check_dimension(n, r)
    weights = column_weights(n)
    index = np.arange(1, (1 << n) + 1)
    order = np.lexsort((-index, -weights))
    return GpCode(n, tuple(sorted(int(i) for i in index[order[:r]])))


def zero_ue_dimension(R: float, n: int) -> int:
    """满足码率至少为 R 的最小维数 ceil(R·2^n)"""
    return int(math.ceil(round(R * (1 << n), 9)))


def construct_zero_ue(W: BscMixture, n: int, R: float, l_max: Optional[int] = None,
                      merge_tol: Optional[float] = None) -> GpCode:
    """
    零漏检错误构造

    用 W' = BEC(1 - I_0^GP(W)) 作为替代信道构造极化码，配合全零阈值向量使用。
    """
    i0 = params(W, merge_tol).i0_gp
    if not 0.0 <= R < i0:
        raise RateOutOfRangeError(f"零漏检构造要求 0 ≤ R < I_0^GP(W) = {i0:.6g}，实际 R = {R}")
    surrogate = make_bec(1.0 - i0)
    r = zero_ue_dimension(R, n)
    logger.info(f"零漏检构造: 替代信道 BEC({1.0 - i0:.6g}), n={n}, r={r}")
    return construct_polar(surrogate, n, r, l_max, merge_tol)


def construct(kind: ConstructionKind, n: int, W: Optional[BscMixture] = None,
              r: Optional[int] = None, rate: Optional[float] = None,
              l_max: Optional[int] = None, merge_tol: Optional[float] = None) -> GpCode:
    """按构造类型分发；polar/rm 接受 r 或 rate，zero_ue 需要 rate"""
    kind = ConstructionKind(kind)
    if kind == ConstructionKind.ZERO_UE:
        if W is None or rate is None:
            raise CodeParameterError("zero_ue 构造需要信道与码率")
        return construct_zero_ue(W, n, rate, l_max, merge_tol)
    if r is None:
        if rate is None:
            raise CodeParameterError("需要指定 r 或 rate")
        r = zero_ue_dimension(rate, n)
    if kind == ConstructionKind.RM:
        return construct_rm(n, r)
    if W is None:
        raise CodeParameterError("polar 构造需要信道")
    return construct_polar(W, n, r, l_max, merge_tol)
