# polar/channels/transforms.py
import heapq
import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
from numba import njit
from tqdm import tqdm

from config import get_settings
from polar.errors import CodeParameterError, DegradationError
from .bsc_mixture import (
    BscMixture,
    Exactness,
    MixtureForm,
    canonicalize,
    star_arrays,
)

logger = logging.getLogger(__name__)


def _canonical(W: BscMixture, merge_tol: Optional[float]) -> BscMixture:
    return W if W.form == MixtureForm.CANONICAL else canonicalize(W, merge_tol)


def transform_minus(W: BscMixture, merge_tol: Optional[float] = None) -> BscMixture:
    """W⁻ ≡ Σ_i Σ_j p_i p_j · BSC(ε_i ∗ ε_j)，结果已规范化"""
    c = _canonical(W, merge_tol)
    p = np.outer(c.masses, c.masses)
    e, f = star_arrays(c.eps[:, None], c.exact[:, None], c.eps[None, :], c.exact[None, :])
    raw = BscMixture(p.ravel(), np.clip(e.ravel(), 0.0, 1.0), f.ravel(), MixtureForm.RAW)
    return canonicalize(raw, merge_tol)


def transform_plus(W: BscMixture, merge_tol: Optional[float] = None) -> BscMixture:
    """
    W⁺ ≡ Σ_i Σ_j p_i p_j [(ε_i∗ε_j)·BSC(ε_i ε̄_j / ε_i∗ε_j) + (ε_i∗ε̄_j)·BSC(ε_i ε_j / ε_i∗ε̄_j)]

    质量因子为零的项（ε_i = ε_j = 0 时的第一项）直接丢弃。
    """
    c = _canonical(W, merge_tol)
    ei, fi = c.eps[:, None], c.exact[:, None]
    ej, fj = c.eps[None, :], c.exact[None, :]
    pp = np.outer(c.masses, c.masses)

    zero_i, zero_j = fi == Exactness.ZERO, fj == Exactness.ZERO
    half_i, half_j = fi == Exactness.HALF, fj == Exactness.HALF

    # 第一项：质量因子 ε_i∗ε_j，交叉概率 ε_i ε̄_j / (ε_i∗ε_j)
    fac_a, _ = star_arrays(ei, fi, ej, fj)
    num_a = ei * (1.0 - ej)
    with np.errstate(divide='ignore', invalid='ignore'):
        eps_a = np.where(fac_a > 0, num_a / fac_a, 0.0)
    flag_a = np.full(pp.shape, Exactness.NONE, dtype=np.int8)
    flag_a = np.where(zero_i, Exactness.ZERO, flag_a)
    flag_a = np.where(~zero_i & zero_j, Exactness.ONE, flag_a)
    # ε_i 与 ε_j 完全相同时比值恰为 1/2
    identical = (ei == ej) & ~zero_i & ~zero_j
    flag_a = np.where(identical | (half_i & half_j), Exactness.HALF, flag_a)
    mass_a = pp * fac_a
    live_a = ~(zero_i & zero_j) & (mass_a > 0)

    # 第二项：质量因子 ε_i∗ε̄_j，交叉概率 ε_i ε_j / (ε_i∗ε̄_j)
    fac_b = ei * ej + (1.0 - ei) * (1.0 - ej)
    eps_b = ei * ej / fac_b
    flag_b = np.full(pp.shape, Exactness.NONE, dtype=np.int8)
    flag_b = np.where(zero_i | zero_j, Exactness.ZERO, flag_b)
    flag_b = np.where(half_i & half_j, Exactness.HALF, flag_b)
    mass_b = pp * fac_b
    live_b = mass_b > 0

    masses = np.concatenate([mass_a[live_a], mass_b[live_b]])
    eps = np.concatenate([eps_a[live_a], eps_b[live_b]])
    flags = np.concatenate([flag_a[live_a], flag_b[live_b]]).astype(np.int8)
    eps = np.where(flags == Exactness.ZERO, 0.0, eps)
    eps = np.where(flags == Exactness.ONE, 1.0, eps)
    eps = np.where(flags == Exactness.HALF, 0.5, eps)
    raw = BscMixture(masses / masses.sum(), np.clip(eps, 0.0, 1.0), flags, MixtureForm.RAW)
    return canonicalize(raw, merge_tol)


@njit(cache=False)
def _h2(e):
    if e <= 0.0 or e >= 1.0:
        return 0.0
    return -(e * math.log2(e) + (1.0 - e) * math.log2(1.0 - e))


@njit(cache=False)
def _pair_loss(p1, e1, p2, e2):
    """合并两个相邻分量的容量损失，以及合并后的 (质量, ε)"""
    mp = p1 + p2
    me = (p1 * e1 + p2 * e2) / mp
    loss = p1 * (1.0 - _h2(e1)) + p2 * (1.0 - _h2(e2)) - mp * (1.0 - _h2(me))
    return max(loss, 0.0), mp, me


@njit(cache=False)
def _greedy_merge(p, e, target):
    """
    逐对贪心合并：每次合并当前损失最小的相邻对（同损失取靠左者），只重算两侧邻对

    p、e 原地更新，返回存活掩码与总损失。堆中条目带两端的版本号，过期条目弹出后丢弃。
    """
    k = len(p)
    nxt = np.arange(1, k + 1)
    nxt[k - 1] = -1
    prv = np.arange(-1, k - 1)
    alive = np.ones(k, dtype=np.bool_)
    stamp = np.zeros(k, dtype=np.int64)

    heap = [(0.0, 0, 0, 0, 0)]
    heap.pop()
    for i in range(k - 1):
        loss, _, _ = _pair_loss(p[i], e[i], p[i + 1], e[i + 1])
        heapq.heappush(heap, (loss, i, i + 1, 0, 0))

    count = k
    lost = 0.0
    while count > target and len(heap) > 0:
        loss, i, j, si, sj = heapq.heappop(heap)
        if not alive[i] or not alive[j] or nxt[i] != j or stamp[i] != si or stamp[j] != sj:
            continue
        _, mp, me = _pair_loss(p[i], e[i], p[j], e[j])
        p[i] = mp
        e[i] = me
        alive[j] = False
        nxt[i] = nxt[j]
        if nxt[j] >= 0:
            prv[nxt[j]] = i
        stamp[i] += 1
        count -= 1
        lost += loss

        a = prv[i]
        if a >= 0:
            la, _, _ = _pair_loss(p[a], e[a], p[i], e[i])
            heapq.heappush(heap, (la, a, i, stamp[a], stamp[i]))
        b = nxt[i]
        if b >= 0:
            lb, _, _ = _pair_loss(p[i], e[i], p[b], e[b])
            heapq.heappush(heap, (lb, i, b, stamp[i], stamp[b]))
    return alive, lost


def degrade(W: BscMixture, l_max: Optional[int] = None,
            merge_tol: Optional[float] = None) -> Tuple[BscMixture, float]:
    """
    退化合并量化器

    分量数超过 l_max 时，每次合并容量损失最小的一对相邻非标记分量
    （质量相加，ε 取质量加权平均），再重算受影响的邻对。精确 0 与 1/2 分量
    从不参与合并，因此 I_0^GP 保持精确。

    Returns:
        (退化后的规范分解, 损失的容量)
    """
    l_max = get_settings().channel.l_max if l_max is None else int(l_max)
    if l_max < 2:
        raise CodeParameterError(f"l_max 必须至少为2: {l_max}")
    c = _canonical(W, merge_tol)
    if len(c) <= l_max:
        return c, 0.0

    plain = c.exact == Exactness.NONE
    n_flagged = int((~plain).sum())
    target = max(1, l_max - n_flagged)
    p = np.ascontiguousarray(c.masses[plain], dtype=float)
    e = np.ascontiguousarray(c.eps[plain], dtype=float)
    lost = 0.0
    if len(p) > target:
        alive, lost = _greedy_merge(p, e, target)
        p, e = p[alive], e[alive]
    if len(p) + n_flagged > l_max:
        raise DegradationError(f"标记分量过多，无法退化到 {l_max} 个分量以内")

    logger.debug(f"退化合并: {len(c)} -> {len(p) + n_flagged} 个分量, 容量损失 {lost:.3e}")

    out_p = np.concatenate([c.masses[c.exact == Exactness.ZERO], p, c.masses[c.exact == Exactness.HALF]])
    out_e = np.concatenate([np.zeros(int((c.exact == Exactness.ZERO).sum())), np.clip(e, 0.0, 0.5),
                            np.full(int((c.exact == Exactness.HALF).sum()), 0.5)])
    out_f = np.concatenate([np.full(int((c.exact == Exactness.ZERO).sum()), Exactness.ZERO),
                            np.full(len(p), Exactness.NONE),
                            np.full(int((c.exact == Exactness.HALF).sum()), Exactness.HALF)]).astype(np.int8)
    try:
        degraded = BscMixture(out_p / out_p.sum(), out_e, out_f, MixtureForm.CANONICAL)
    except Exception as e_:
        raise DegradationError(f"退化合并结果无效: {str(e_)}") from e_
    return degraded, lost


def _apply(W: BscMixture, sign: str, l_max: Optional[int],
           merge_tol: Optional[float]) -> Tuple[BscMixture, bool, float]:
    """一步变换加退化；返回 (信道, 是否触发退化, 损失容量)"""
    if sign == '-':
        nxt = transform_minus(W, merge_tol)
    elif sign == '+':
        nxt = transform_plus(W, merge_tol)
    else:
        raise CodeParameterError(f"无效的符号: {sign!r}，只允许 '-' 或 '+'")
    degraded, lost = degrade(nxt, l_max, merge_tol)
    return degraded, len(degraded) < len(nxt), lost


def _warn_degraded(merges: int, lost: float, l_max: Optional[int]) -> None:
    if merges:
        limit = get_settings().channel.l_max if l_max is None else l_max
        logger.warning(f"l_max={limit} 触发退化合并 {merges} 次，累计容量损失 {lost:.3e}")


def synthesize(W: BscMixture, s: Iterable[str], l_max: Optional[int] = None,
               merge_tol: Optional[float] = None) -> BscMixture:
    """
    合成信道 W^s = ((W^{s_1})^{s_2} ...)^{s_n}

    每一步变换后分量数若超过 l_max 就做退化合并，整条路径只告警一次。空序列返回规范化的 W。
    """
    current = canonicalize(W, merge_tol)
    merges, total_lost = 0, 0.0
    for sign in s:
        current, triggered, lost = _apply(current, sign, l_max, merge_tol)
        merges += triggered
        total_lost += lost
    _warn_degraded(merges, total_lost, l_max)
    return current


def synthesize_all(W: BscMixture, n: int, l_max: Optional[int] = None,
                   merge_tol: Optional[float] = None,
                   show_progress: Optional[bool] = None) -> List[BscMixture]:
    """
    按索引顺序返回全部 2^n 个合成信道

    逐层展开，第 k 层的信道 j 的两个子信道位于 2j（'-'）与 2j+1（'+'），
    因此最终顺序与 index_to_signs 的高位优先约定一致。
    """
    if n < 0:
        raise CodeParameterError(f"n 必须非负: {n}")
    if show_progress is None:
        show_progress = get_settings().simulation.show_progress
    level = [canonicalize(W, merge_tol)]
    merges, total_lost = 0, 0.0
    steps = tqdm(range(n), desc="合成信道", disable=not show_progress or n < 8)
    for _ in steps:
        nxt = []
        for channel in level:
            for sign in '-+':
                child, triggered, lost = _apply(channel, sign, l_max, merge_tol)
                merges += triggered
                total_lost += lost
                nxt.append(child)
        level = nxt
    _warn_degraded(merges, total_lost, l_max)
    return level
