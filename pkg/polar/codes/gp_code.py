# polar/codes/gp_code.py
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from polar.errors import CodeParameterError


@dataclass(frozen=True)
class SignSequence:
    """{-,+}^n 中的符号序列，同时标识合成信道 W^s 与 F^{⊗n} 的一列"""
    signs: Tuple[str, ...]

    def __post_init__(self):
        signs = tuple(self.signs)
        if any(sgn not in ('-', '+') for sgn in signs):
            raise CodeParameterError(f"符号序列只能包含 '-' 或 '+': {signs}")
        object.__setattr__(self, 'signs', signs)

    def __iter__(self) -> Iterator[str]:
        return iter(self.signs)

    def __len__(self) -> int:
        return len(self.signs)

    def __str__(self) -> str:
        return ''.join(self.signs)

    def to_index(self) -> int:
        """index_to_signs 的逆映射（1起始）"""
        i = 0
        for sgn in self.signs:
            i = (i << 1) | (sgn == '+')
        return i + 1


def index_to_signs(i: int, n: int) -> SignSequence:
    """
    索引 i∈[2^n]（1起始）到符号序列

    i-1 的二进制展开 b_1…b_n（b_1 为最高位），b_k=0 对应 '-'，b_k=1 对应 '+'。
    """
    if n < 0:
        raise CodeParameterError(f"n 必须非负: {n}")
    if not 1 <= i <= (1 << n):
        raise CodeParameterError(f"索引 {i} 超出范围 [1, {1 << n}]")
    bits = i - 1
    return SignSequence(tuple('+' if (bits >> (n - 1 - k)) & 1 else '-' for k in range(n)))


@dataclass(frozen=True)
class GpCode:
    """
    广义极化码 GP(n, r, I, b)

    属性:
        n: 极化步数，码长 N = 2^n
        info_set: 升序的信息位索引集合 I ⊂ [N]（1起始）
        frozen_bits: 冻结位取值 b，按冻结索引升序排列，长度 N - r
    """
    n: int
    info_set: Tuple[int, ...]
    frozen_bits: Tuple[int, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise CodeParameterError(f"n 必须是非负整数: {self.n}")
        N = 1 << int(self.n)
        info = tuple(int(i) for i in self.info_set)
        if len(set(info)) != len(info):
            raise CodeParameterError("信息集包含重复索引")
        if any(not 1 <= i <= N for i in info):
            raise CodeParameterError(f"信息集索引必须在 [1, {N}] 内")
        info = tuple(sorted(info))
        frozen = tuple(int(b) for b in self.frozen_bits)
        if len(frozen) == 0:
            frozen = (0,) * (N - len(info))
        if len(frozen) != N - len(info):
            raise CodeParameterError(f"冻结位长度应为 {N - len(info)}，实际为 {len(frozen)}")
        if any(b not in (0, 1) for b in frozen):
            raise CodeParameterError("冻结位只能取 0 或 1")
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'info_set', info)
        object.__setattr__(self, 'frozen_bits', frozen)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def r(self) -> int:
        return len(self.info_set)

    @property
    def rate(self) -> float:
        return self.r / self.N

    @property
    def frozen_set(self) -> Tuple[int, ...]:
        info = set(self.info_set)
        return tuple(i for i in range(1, self.N + 1) if i not in info)

    @property
    def info_mask(self) -> np.ndarray:
        """长度 N 的布尔数组（0起始位置），信息位为 True"""
        mask = np.zeros(self.N, dtype=bool)
        mask[np.asarray(self.info_set, dtype=np.int64) - 1] = True
        return mask

    @property
    def frozen_vector(self) -> np.ndarray:
        """长度 N 的冻结值数组，信息位处为 0"""
        vec = np.zeros(self.N, dtype=np.uint8)
        vec[~self.info_mask] = np.asarray(self.frozen_bits, dtype=np.uint8)
        return vec

    def signs(self, i: int) -> SignSequence:
        return index_to_signs(i, self.n)

    def with_frozen(self, frozen_bits: Optional[Sequence[int]]) -> 'GpCode':
        return GpCode(self.n, self.info_set, tuple(frozen_bits or ()))

    def to_document(self, construction=None, channel=None):
        """转为码描述文档（polar.documents.CodeDocument）"""
        from polar.documents import CodeDocument
        return CodeDocument.from_code(self, construction, channel)

    @classmethod
    def from_document(cls, doc) -> 'GpCode':
        from polar.documents import CodeDocument
        return CodeDocument.parse(doc).to_code() if not isinstance(doc, CodeDocument) else doc.to_code()
