# polar/analysis/polarization.py
"""
极化随机过程与相关的标量递推

I_0 的演化：I_0(W⁻) = I_0(W)²，I_0(W⁺) = 2I_0(W) - I_0(W)²。
ε_bic 的演化：p_W(0) = 0 时 ε_bic(W⁻) = 2ε(1-ε)，否则不变；ε_bic(W⁺) = ε²/(ε² + (1-ε)²)。
ε_bic 以 log2 形式保存，双指数衰减时不会下溢。
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect
from scipy.stats import norm

from config import get_settings
from polar.channels import BscMixture, params, synthesize, synthesize_all
from polar.codes import GpCode, index_to_signs
from polar.decoders import ThresholdVector
from polar.errors import BlocklengthTooLargeError, CodeParameterError, RateOutOfRangeError
from .operating_point import info_thresholds, operating_point, ue_lower_bound

logger = logging.getLogger(__name__)

# bic_process 全枚举的上限
MAX_BIC_ENUMERATION_N = 24


@dataclass(frozen=True)
class ProcessStep:
    step: int
    sign: Optional[str]
    i0_gp: float
    eps_bic: float
    capacity: float


@dataclass(frozen=True)
class BicProcess:
    """全部 2^n 个符号序列上 (I_0, log2 ε_bic) 的精确取值，按索引顺序"""
    n: int
    i0_gp: np.ndarray
    log2_eps_bic: np.ndarray

    @property
    def eps_bic(self) -> np.ndarray:
        return np.exp2(self.log2_eps_bic)


@dataclass(frozen=True)
class ConverseWitness:
    index: int
    signs: str
    i0_gp: float
    eps_bic: float
    p_er: float
    p_ue: float
    ue_lower_bound: float


def _minus(i0: np.ndarray, L: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    with np.errstate(divide='ignore'):
        doubled = 1.0 + L + np.log1p(-np.exp2(L)) / np.log(2.0)
    return i0 * i0, np.where(i0 == 0.0, doubled, L)


def _plus(i0: np.ndarray, L: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    with np.errstate(divide='ignore'):
        log_bar = np.log1p(-np.exp2(L)) / np.log(2.0)
        L_next = 2.0 * L - np.logaddexp2(2.0 * L, 2.0 * log_bar)
    return 2.0 * i0 - i0 * i0, L_next


def _initial(W: BscMixture, merge_tol: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    prm = params(W, merge_tol)
    with np.errstate(divide='ignore'):
        L = np.log2(prm.eps_bic) if prm.eps_bic > 0 else -np.inf
    return np.array([prm.i0_gp]), np.array([float(L)])


def _enumerate(i0: np.ndarray, L: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    for _ in range(n):
        im, lm = _minus(i0, L)
        ip, lp = _plus(i0, L)
        i0 = np.stack([im, ip], axis=1).reshape(-1)
        L = np.stack([lm, lp], axis=1).reshape(-1)
    return i0, L


def _sample(i0: np.ndarray, L: np.ndarray, n: int, sequences: int,
            rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    plus = rng.integers(0, 2, size=(sequences, n)).astype(bool)
    i0 = np.full(sequences, i0[0])
    L = np.full(sequences, L[0])
    for k in range(n):
        im, lm = _minus(i0, L)
        ip, lp = _plus(i0, L)
        i0 = np.where(plus[:, k], ip, im)
        L = np.where(plus[:, k], lp, lm)
    return i0, L


def _scalar_paths(W: BscMixture, n: int, seed: int,
                  merge_tol: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    """n 不超过枚举上限时全枚举，否则蒙特卡洛抽样符号序列"""
    if n < 0:
        raise CodeParameterError(f"n 必须非负: {n}")
    cfg = get_settings().analysis
    i0, L = _initial(W, merge_tol)
    if n <= cfg.max_enumeration_n:
        return _enumerate(i0, L, n)
    logger.debug(f"n={n} 超出枚举上限，抽样 {cfg.monte_carlo_sequences} 个符号序列")
    return _sample(i0, L, n, cfg.monte_carlo_sequences, np.random.default_rng(seed))


def polarization_process(W: BscMixture, n: int, seed: int = 0, l_max: Optional[int] = None,
                         merge_tol: Optional[float] = None) -> List[ProcessStep]:
    """
    沿均匀随机符号序列 B_1..B_n 演化信道并记录参数

    返回 n + 1 个记录，第 0 个为 W 本身。
    """
    if n < 0:
        raise CodeParameterError(f"n 必须非负: {n}")
    rng = np.random.default_rng(seed)
    signs = ['+' if b else '-' for b in rng.integers(0, 2, size=n)]
    current = synthesize(W, [], l_max, merge_tol)
    prm = params(current, merge_tol)
    trajectory = [ProcessStep(0, None, prm.i0_gp, prm.eps_bic, prm.capacity)]
    for k, sign in enumerate(signs, start=1):
        current = synthesize(current, [sign], l_max, merge_tol)
        prm = params(current, merge_tol)
        trajectory.append(ProcessStep(k, sign, prm.i0_gp, prm.eps_bic, prm.capacity))
    return trajectory


def fraction_polarized(W: BscMixture, n: int, delta: float, l_max: Optional[int] = None,
                       merge_tol: Optional[float] = None, track: str = "i0",
                       seed: int = 0) -> Tuple[float, float]:
    """
    I_0(W^s) ≥ 1-δ 与 I_0(W^s) ≤ δ 的符号序列比例

    track="i0" 用 I_0 的精确标量递推；track="mixture" 实际合成各信道（受 l_max 约束）。
    """
    if not 0.0 <= delta <= 1.0:
        raise CodeParameterError(f"delta 必须在 [0, 1] 内: {delta}")
    if track == "i0":
        i0, _ = _scalar_paths(W, n, seed, merge_tol)
    elif track == "mixture":
        cfg = get_settings().analysis
        if n <= cfg.max_enumeration_n:
            channels = synthesize_all(W, n, l_max, merge_tol)
        else:
            rng = np.random.default_rng(seed)
            plus = rng.integers(0, 2, size=(cfg.monte_carlo_sequences, n))
            channels = [synthesize(W, ['+' if b else '-' for b in row], l_max, merge_tol) for row in plus]
        i0 = np.array([params(ch, merge_tol).i0_gp for ch in channels])
    else:
        raise CodeParameterError(f"未知的跟踪方式: {track!r}")
    return float(np.mean(i0 >= 1.0 - delta)), float(np.mean(i0 <= delta))


def bic_process(W: BscMixture, n: int, merge_tol: Optional[float] = None) -> BicProcess:
    """全部 2^n 个符号序列上 (I_0, ε_bic) 的精确联合递推"""
    if not 0 <= n <= MAX_BIC_ENUMERATION_N:
        raise BlocklengthTooLargeError(f"bic_process 只支持 0 ≤ n ≤ {MAX_BIC_ENUMERATION_N}: {n}")
    i0, L = _initial(W, merge_tol)
    i0, L = _enumerate(i0, L, n)
    return BicProcess(n, i0, L)


def fraction_bic_above(W: BscMixture, n: int, beta: float, merge_tol: Optional[float] = None,
                       seed: int = 0) -> float:
    """ε_bic(W^s) ≥ 2^{-2^{βn}} 的符号序列比例"""
    _, L = _scalar_paths(W, n, seed, merge_tol)
    return float(np.mean(L >= -np.exp2(beta * n)))


def converse_witnesses(code: GpCode, W: BscMixture, alpha: float, beta: float,
                       t: Optional[ThresholdVector] = None, l_max: Optional[int] = None,
                       merge_tol: Optional[float] = None) -> List[ConverseWitness]:
    """
    信息位中 p_{W^s}(0) < α/2 且 ε_bic(W^s) > 2^{-2^{βn}} 的索引

    对每个这样的索引给出其工作点和漏检错误下界；码率高于 I_0 时 n 足够大必然存在。
    """
    if code.r == 0:
        return []
    ts = info_thresholds(code, t)
    floor_log2 = -np.exp2(beta * code.n)
    channels = synthesize_all(W, code.n, l_max, merge_tol)
    witnesses = []
    for i, ti in zip(code.info_set, ts):
        ch = channels[i - 1]
        prm = params(ch, merge_tol)
        if prm.i0_gp >= alpha / 2 or prm.eps_bic <= 0.0 or np.log2(prm.eps_bic) <= floor_log2:
            continue
        op = operating_point(ch, ti, merge_tol)
        witnesses.append(ConverseWitness(
            index=i,
            signs=str(index_to_signs(i, code.n)),
            i0_gp=prm.i0_gp,
            eps_bic=prm.eps_bic,
            p_er=op.p_er,
            p_ue=op.p_ue,
            ue_lower_bound=ue_lower_bound(ch, op.p_er, merge_tol),
        ))
    return witnesses


def q_inverse(x: float) -> float:
    """标准正态尾函数 Q 的反函数，二分到 1e-10"""
    if not 0.0 < x < 1.0:
        raise CodeParameterError(f"Q⁻¹ 只对 (0, 1) 定义: {x}")
    return float(bisect(lambda q: norm.sf(q) - x, -40.0, 40.0, xtol=1e-10))


def scaling_exponent(R: float, i0: float, n: int) -> float:
    """预测的双指数衰减指数 n/2 + Q⁻¹(R/I_0)·√n/2"""
    if not 0.0 < R < i0:
        raise RateOutOfRangeError(f"需要 0 < R < I_0 = {i0}，实际 R = {R}")
    return n / 2.0 + q_inverse(R / i0) * np.sqrt(n) / 2.0
