# polar/decoders/threshold.py
from dataclasses import dataclass
from enum import IntEnum
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from polar.codes import GpCode
from polar.errors import CodeParameterError, LikelihoodError


class Decision(IntEnum):
    ZERO = 0
    ONE = 1
    ERASURE = -1


@njit(cache=False)
def decide_kernel(l0: float, l1: float, t: float) -> int:
    """D_t 判决：π₁ ≥ 1-t 判 1，π₁ ≤ t 判 0，否则擦除（-1）

    用交叉相乘比较，避免 π₁ 的舍入在 t = 0 时把非零似然当成确定。
    """
    if l0 == 0.0 and l1 == 0.0:
        return -1
    if t * l1 >= (1.0 - t) * l0:
        return 1
    if (1.0 - t) * l1 <= t * l0:
        return 0
    return -1


@dataclass(frozen=True)
class LikelihoodPair:
    """比特为 0 / 1 的未归一化似然（零值是精确的）"""
    l0: float
    l1: float

    def __post_init__(self):
        if not (np.isfinite(self.l0) and np.isfinite(self.l1)) or self.l0 < 0 or self.l1 < 0:
            raise LikelihoodError(f"似然必须是非负有限数: ({self.l0}, {self.l1})")
        if self.l0 == 0 and self.l1 == 0:
            raise LikelihoodError("似然对不能同时为零")

    def normalized(self) -> 'LikelihoodPair':
        mx = max(self.l0, self.l1)
        return LikelihoodPair(self.l0 / mx, self.l1 / mx)


def dt_decide(p: LikelihoodPair, t: float) -> Decision:
    """单比特 D_t 判决器，边界 π₁ = t 与 π₁ = 1-t 均判决"""
    if not 0.0 <= t <= 0.5:
        raise CodeParameterError(f"阈值必须在 [0, 1/2] 内: {t}")
    return Decision(decide_kernel(float(p.l0), float(p.l1), float(t)))


@dataclass(frozen=True)
class ThresholdVector:
    """每个信息位的擦除阈值 t_i ∈ [0, 1/2]，键为信息位索引（1起始）"""
    t: Mapping[int, float]

    def __post_init__(self):
        values = {int(i): float(v) for i, v in dict(self.t).items()}
        bad = {i: v for i, v in values.items() if not 0.0 <= v <= 0.5}
        if bad:
            raise CodeParameterError(f"阈值必须在 [0, 1/2] 内: {bad}")
        object.__setattr__(self, 't', MappingProxyType(values))

    @classmethod
    def zero(cls, code: GpCode) -> 'ThresholdVector':
        return cls({i: 0.0 for i in code.info_set})

    @classmethod
    def uniform(cls, code: GpCode, t: float) -> 'ThresholdVector':
        return cls({i: float(t) for i in code.info_set})

    @classmethod
    def from_sequence(cls, code: GpCode, values: Sequence[float]) -> 'ThresholdVector':
        if len(values) != code.r:
            raise CodeParameterError(f"阈值个数应为 {code.r}，实际为 {len(values)}")
        return cls(dict(zip(code.info_set, values)))

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.t.values())

    def check_code(self, code: GpCode) -> None:
        if set(self.t) != set(code.info_set):
            raise CodeParameterError("阈值向量的索引必须与信息集一致")

    def to_array(self, code: GpCode) -> np.ndarray:
        """按 0起始位置展开为长度 N 的数组，冻结位处为 0"""
        self.check_code(code)
        arr = np.zeros(code.N, dtype=float)
        for i, v in self.t.items():
            arr[i - 1] = v
        return arr

    def as_list(self, code: GpCode) -> list:
        self.check_code(code)
        return [self.t[i] for i in code.info_set]


@dataclass(frozen=True)
class DecodeResult:
    """译码结果：消息或擦除（附第一个擦除的信息位索引）"""
    message: Optional[Tuple[int, ...]] = None
    first_erased_index: Optional[int] = None

    def __post_init__(self):
        if (self.message is None) == (self.first_erased_index is None):
            raise ValueError("DecodeResult 必须且只能包含消息或擦除标记之一")
        if self.message is not None:
            object.__setattr__(self, 'message', tuple(int(b) for b in self.message))

    @property
    def is_erasure(self) -> bool:
        return self.first_erased_index is not None

    @classmethod
    def erasure(cls, index: int) -> 'DecodeResult':
        return cls(first_erased_index=int(index))
