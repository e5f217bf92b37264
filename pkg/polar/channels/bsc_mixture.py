# polar/channels/bsc_mixture.py
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy.special import entr

from config import get_settings
from polar.errors import ChannelDocumentError

# 质量和的校验容差；规范化之后会重新归一到 1e-12 以内
MASS_TOLERANCE = 1e-9


class Exactness(IntEnum):
    """交叉概率的精确性标记，只由构造产生，不由舍入产生"""
    NONE = 0
    ZERO = 1
    ONE = 2
    HALF = 3


_PINNED_VALUES = {Exactness.ZERO: 0.0, Exactness.ONE: 1.0, Exactness.HALF: 0.5}


class MixtureForm(str, Enum):
    RAW = "raw"
    NATURAL = "natural"
    CANONICAL = "canonical"


@dataclass(frozen=True)
class CrossoverProb:
    """BSC交叉概率 ε，附带精确 0 / 1 / 1/2 标记"""
    value: float
    exact: Exactness = Exactness.NONE

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ChannelDocumentError(f"交叉概率超出[0,1]: {self.value}")
        pinned = _PINNED_VALUES.get(self.exact)
        if pinned is not None and self.value != pinned:
            raise ChannelDocumentError(f"精确标记{self.exact.name}与数值{self.value}不一致")

    @classmethod
    def of(cls, value: Union[float, 'CrossoverProb']) -> 'CrossoverProb':
        """由字面值构造；恰为 0、1/2、1 的字面值带上精确标记"""
        if isinstance(value, CrossoverProb):
            return value
        value = float(value)
        for flag, pinned in _PINNED_VALUES.items():
            if value == pinned:
                return cls(pinned, flag)
        return cls(value, Exactness.NONE)

    @property
    def is_exact_zero(self) -> bool:
        return self.exact == Exactness.ZERO

    @property
    def is_exact_half(self) -> bool:
        return self.exact == Exactness.HALF


def _pin(values: np.ndarray, flags: np.ndarray) -> np.ndarray:
    """按精确标记把数值钉死为 0.0 / 1.0 / 0.5"""
    values = np.where(flags == Exactness.ZERO, 0.0, values)
    values = np.where(flags == Exactness.ONE, 1.0, values)
    values = np.where(flags == Exactness.HALF, 0.5, values)
    return values


def star_arrays(e1: np.ndarray, f1: np.ndarray,
                e2: np.ndarray, f2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """逐元素计算 ε∗ε' 及其精确标记（支持广播）"""
    values = e1 * (1.0 - e2) + (1.0 - e1) * e2
    extreme1 = (f1 == Exactness.ZERO) | (f1 == Exactness.ONE)
    extreme2 = (f2 == Exactness.ZERO) | (f2 == Exactness.ONE)
    both_extreme = extreme1 & extreme2
    flags = np.full(np.broadcast(values, f1, f2).shape, Exactness.NONE, dtype=np.int8)
    flags = np.where(both_extreme & (f1 == f2), Exactness.ZERO, flags)
    flags = np.where(both_extreme & (f1 != f2), Exactness.ONE, flags)
    flags = np.where((f1 == Exactness.HALF) | (f2 == Exactness.HALF), Exactness.HALF, flags)
    flags = flags.astype(np.int8)
    return _pin(np.broadcast_to(values, flags.shape).astype(float), flags), flags


def m_arrays(values: np.ndarray, flags: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """逐元素计算 m(ε) = min(ε, 1-ε)"""
    flags = np.where(flags == Exactness.ONE, Exactness.ZERO, flags).astype(np.int8)
    values = np.minimum(values, 1.0 - values)
    return _pin(values, flags), flags


def star(e1: Union[float, CrossoverProb], e2: Union[float, CrossoverProb]) -> CrossoverProb:
    """ε∗ε' = ε(1-ε') + (1-ε)ε'"""
    a, b = CrossoverProb.of(e1), CrossoverProb.of(e2)
    values, flags = star_arrays(np.array([a.value]), np.array([a.exact], dtype=np.int8),
                                np.array([b.value]), np.array([b.exact], dtype=np.int8))
    return CrossoverProb(float(np.clip(values[0], 0.0, 1.0)), Exactness(int(flags[0])))


def m(e: Union[float, CrossoverProb]) -> CrossoverProb:
    """m(ε) = min(ε, 1-ε)，保留精确标记"""
    a = CrossoverProb.of(e)
    values, flags = m_arrays(np.array([a.value]), np.array([a.exact], dtype=np.int8))
    return CrossoverProb(float(values[0]), Exactness(int(flags[0])))


@dataclass(frozen=True, eq=False)
class BscMixture:
    """
    BMS信道的BSC分解 W ≡ Σ p_i · BSC(ε_i)

    三个等长的只读数组描述各分量：质量、交叉概率、精确标记。
    form 记录分解形式（raw / natural / canonical）。

    示例:
        >>> W = make_bec(0.3)
        >>> [(p, e.value) for p, e in W.components]
        [(0.7, 0.0), (0.3, 0.5)]
    """
    masses: np.ndarray
    eps: np.ndarray
    exact: np.ndarray
    form: MixtureForm = MixtureForm.RAW

    def __post_init__(self):
        masses = np.array(self.masses, dtype=float).reshape(-1)
        eps = np.array(self.eps, dtype=float).reshape(-1)
        exact = np.array(self.exact, dtype=np.int8).reshape(-1)
        if not (len(masses) == len(eps) == len(exact)) or len(masses) == 0:
            raise ChannelDocumentError("BSC分解的分量数组长度不一致或为空")
        if np.any(~np.isfinite(masses)) or np.any(masses < 0):
            raise ChannelDocumentError("分量质量必须是非负有限数")
        if np.any(~np.isfinite(eps)) or np.any(eps < 0) or np.any(eps > 1):
            raise ChannelDocumentError("交叉概率必须在[0,1]之间")
        total = float(masses.sum())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ChannelDocumentError(f"分量质量之和必须为1，实际为{total!r}")
        pinned = _pin(eps, exact)
        if np.any(pinned != eps):
            raise ChannelDocumentError("精确标记与交叉概率数值不一致")
        for arr in (masses, eps, exact):
            arr.setflags(write=False)
        object.__setattr__(self, 'masses', masses)
        object.__setattr__(self, 'eps', eps)
        object.__setattr__(self, 'exact', exact)
        object.__setattr__(self, 'form', MixtureForm(self.form))

    @classmethod
    def from_components(cls, components: Iterable[Tuple[float, Union[float, CrossoverProb]]],
                        form: MixtureForm = MixtureForm.RAW) -> 'BscMixture':
        """由 (p_i, ε_i) 列表构造；字面值 0、1/2、1 自动带精确标记"""
        masses, eps, exact = [], [], []
        for p, e in components:
            c = CrossoverProb.of(e)
            masses.append(float(p))
            eps.append(c.value)
            exact.append(int(c.exact))
        return cls(np.array(masses), np.array(eps), np.array(exact, dtype=np.int8), form)

    @property
    def components(self) -> List[Tuple[float, CrossoverProb]]:
        return [(float(p), CrossoverProb(float(e), Exactness(int(f))))
                for p, e, f in zip(self.masses, self.eps, self.exact)]

    def __len__(self) -> int:
        return len(self.masses)

    def __repr__(self) -> str:
        parts = ", ".join(f"({p:.6g}, {e.value:.6g}{'!' if e.exact else ''})"
                          for p, e in self.components)
        return f"BscMixture[{self.form.value}]({parts})"


@dataclass(frozen=True)
class ChannelParams:
    """信道参数：容量 I(W)、Bhattacharyya参数 Z(W)、I_0^GP(W)、ε_bic(W)"""
    capacity: float
    bhattacharyya: float
    i0_gp: float
    eps_bic: float

    def as_dict(self) -> dict:
        return {'capacity': self.capacity, 'bhattacharyya': self.bhattacharyya,
                'i0_gp': self.i0_gp, 'eps_bic': self.eps_bic}


def make_bsc(e: Union[float, CrossoverProb]) -> BscMixture:
    """BSC(ε) 的单分量分解 {(1, ε)}"""
    return BscMixture.from_components([(1.0, e)])


def make_bec(e: float) -> BscMixture:
    """BEC(ε) ≡ (1-ε)·BSC(0) + ε·BSC(1/2)，规范形式"""
    e = float(e)
    if not 0.0 <= e <= 1.0:
        raise ChannelDocumentError(f"擦除概率超出[0,1]: {e}")
    if e == 0.0:
        return BscMixture.from_components([(1.0, 0.0)], MixtureForm.CANONICAL)
    if e == 1.0:
        return BscMixture.from_components([(1.0, 0.5)], MixtureForm.CANONICAL)
    return BscMixture.from_components([(1.0 - e, 0.0), (e, 0.5)], MixtureForm.CANONICAL)


def naturalize(W: BscMixture) -> BscMixture:
    """逐分量把 ε 替换为 m(ε)，质量不变"""
    values, flags = m_arrays(W.eps, W.exact)
    return BscMixture(W.masses, values, flags, MixtureForm.NATURAL)


def _resolve_merge_tol(merge_tol: Optional[float]) -> float:
    return get_settings().channel.merge_tol if merge_tol is None else float(merge_tol)


def canonicalize(W: BscMixture, merge_tol: Optional[float] = None) -> BscMixture:
    """
    规范BSC分解

    先自然化，按 ε 升序排列，合并 ε 相差不超过 merge_tol 的相邻分量
    （质量相加，ε 取质量加权平均），丢弃零质量分量。带精确 0 或 1/2 标记的
    分量只与同标记分量合并，不受 merge_tol 影响。
    """
    tol = _resolve_merge_tol(merge_tol)
    values, flags = m_arrays(W.eps, W.exact)
    masses = np.asarray(W.masses)

    keep = masses > 0
    values, flags, masses = values[keep], flags[keep], masses[keep]

    blocks_p, blocks_e, blocks_f = [], [], []

    zero = flags == Exactness.ZERO
    if zero.any():
        blocks_p.append([masses[zero].sum()])
        blocks_e.append([0.0])
        blocks_f.append([Exactness.ZERO])

    plain = flags == Exactness.NONE
    if plain.any():
        p, e = masses[plain], values[plain]
        order = np.argsort(e, kind='stable')
        p, e = p[order], e[order]
        # 相邻差超过容差处开新组；组内平均值彼此仍相距 > tol，保证幂等
        starts = np.flatnonzero(np.concatenate(([True], np.diff(e) > tol)))
        group_p = np.add.reduceat(p, starts)
        sizes = np.diff(np.append(starts, len(e)))
        # 单元素组保留原值，p·ε/p 会引入一个 ulp 的偏差
        group_e = np.where(sizes == 1, e[starts], np.add.reduceat(p * e, starts) / group_p)
        group_e = np.clip(group_e, 0.0, 0.5)
        blocks_p.append(group_p)
        blocks_e.append(group_e)
        blocks_f.append(np.full(len(group_p), Exactness.NONE))

    half = flags == Exactness.HALF
    if half.any():
        blocks_p.append([masses[half].sum()])
        blocks_e.append([0.5])
        blocks_f.append([Exactness.HALF])

    out_p = np.concatenate([np.asarray(b, dtype=float) for b in blocks_p])
    out_e = np.concatenate([np.asarray(b, dtype=float) for b in blocks_e])
    out_f = np.concatenate([np.asarray(b, dtype=np.int8) for b in blocks_f])
    out_p = out_p / out_p.sum()
    return BscMixture(out_p, out_e, out_f, MixtureForm.CANONICAL)


def _as_canonical(W: BscMixture, merge_tol: Optional[float] = None) -> BscMixture:
    return W if W.form == MixtureForm.CANONICAL else canonicalize(W, merge_tol)


def p_w(W: BscMixture, e: Union[float, CrossoverProb], merge_tol: Optional[float] = None) -> float:
    """
    规范分解中 BSC(ε) 的质量 p_W(ε)

    带标记的 0 与 1/2 只匹配同标记分量；其余数值在 merge_tol 内视为相等。
    """
    query = CrossoverProb.of(e)
    if query.value > 0.5:
        raise ChannelDocumentError(f"p_W(ε) 只对 ε∈[0,1/2] 定义: {query.value}")
    c = _as_canonical(W, merge_tol)
    if query.exact in (Exactness.ZERO, Exactness.HALF):
        match = c.exact == query.exact
    else:
        tol = _resolve_merge_tol(merge_tol)
        match = (c.exact == Exactness.NONE) & (np.abs(c.eps - query.value) <= tol)
    return float(c.masses[match].sum())


def binary_entropy(e: np.ndarray) -> np.ndarray:
    """二元熵 h₂(ε)，以比特为单位"""
    e = np.asarray(e, dtype=float)
    return (entr(e) + entr(1.0 - e)) / np.log(2.0)


def params(W: BscMixture, merge_tol: Optional[float] = None) -> ChannelParams:
    """计算 I(W)、Z(W)、I_0^GP(W)=p_W(0) 与 ε_bic(W)"""
    c = _as_canonical(W, merge_tol)
    capacity = float(np.sum(c.masses * (1.0 - binary_entropy(c.eps))))
    bhattacharyya = float(np.sum(c.masses * 2.0 * np.sqrt(c.eps * (1.0 - c.eps))))
    zero = c.exact == Exactness.ZERO
    i0_gp = float(c.masses[zero].sum())
    imperfect = ~zero
    # 规范形式中非精确零分量按 ε 升序排列，第一个即最佳非完美分量
    eps_bic = float(c.eps[imperfect][0]) if imperfect.any() else 0.0
    return ChannelParams(
        capacity=float(np.clip(capacity, 0.0, 1.0)),
        bhattacharyya=float(np.clip(bhattacharyya, 0.0, 1.0)),
        i0_gp=float(np.clip(i0_gp, 0.0, 1.0)),
        eps_bic=eps_bic,
    )


def is_bec(W: BscMixture, merge_tol: Optional[float] = None) -> bool:
    """全部质量都落在精确 0 与精确 1/2 分量上时为BEC"""
    c = _as_canonical(W, merge_tol)
    return bool(np.all((c.exact == Exactness.ZERO) | (c.exact == Exactness.HALF)))


def bec_erasure(W: BscMixture, merge_tol: Optional[float] = None) -> float:
    """BEC的擦除概率，即精确 1/2 分量的质量"""
    return p_w(W, 0.5, merge_tol)


def total_variation(W1: BscMixture, W2: BscMixture, tol: float = 1e-9) -> float:
    """两个规范分解作为 ε 上分布的全变差距离，支撑点在 tol 内视为同一点"""
    c1, c2 = canonicalize(W1), canonicalize(W2)
    values = np.concatenate([c1.eps, c2.eps])
    signed = np.concatenate([c1.masses, -c2.masses])
    order = np.argsort(values, kind='stable')
    values, signed = values[order], signed[order]
    starts = np.flatnonzero(np.concatenate(([True], np.diff(values) > tol)))
    return float(0.5 * np.abs(np.add.reduceat(signed, starts)).sum())
