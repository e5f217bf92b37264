# polar/analysis/operating_point.py
import logging
from typing import List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from polar.channels import (
    BscMixture,
    MixtureForm,
    bec_erasure,
    canonicalize,
    is_bec,
    p_w,
    params,
    synthesize_all,
)
from polar.codes import GpCode, bec_synthetic_erasures, index_to_signs
from polar.decoders import ThresholdVector
from polar.errors import CodeParameterError

logger = logging.getLogger(__name__)


class OperatingPoint(BaseModel):
    """单比特 D_t 判决器的 (擦除概率, 漏检错误概率)"""
    model_config = ConfigDict(frozen=True)

    p_er: float = Field(ge=0.0, le=1.0)
    p_ue: float = Field(ge=0.0, le=1.0)

    @model_validator(mode='after')
    def check_total(self) -> 'OperatingPoint':
        if self.p_er + self.p_ue > 1.0 + 1e-12:
            raise ValueError(f"p_er + p_ue 超过 1: {self.p_er} + {self.p_ue}")
        return self


class AnalysisRow(BaseModel):
    """逐索引分析表的一行"""
    index: int
    signs: str
    i0_gp: float
    eps_bic: float
    bhattacharyya: float
    capacity: float
    components: int
    p_er: Optional[float] = None
    p_ue: Optional[float] = None


def _check_threshold(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 0.5:
        raise CodeParameterError(f"阈值必须在 [0, 1/2] 内: {t}")
    return t


def operating_point(Ws: BscMixture, t: float, merge_tol: Optional[float] = None) -> OperatingPoint:
    """
    D_t 作用在信道 Ws 上的工作点

    p_er = Σ_{ε > t} p(ε)，p_ue = Σ_{ε ≤ t} ε·p(ε)，对规范分量求和。
    """
    t = _check_threshold(t)
    c = Ws if Ws.form == MixtureForm.CANONICAL else canonicalize(Ws, merge_tol)
    undecided = c.eps > t
    p_er = float(c.masses[undecided].sum())
    p_ue = float((c.eps * c.masses)[~undecided].sum())
    return OperatingPoint(p_er=min(p_er, 1.0), p_ue=min(p_ue, 1.0))


def ue_lower_bound(Ws: BscMixture, p_er: float, merge_tol: Optional[float] = None) -> float:
    """漏检错误概率下界 max(0, ε_bic·(1 - p_W(0) - p_er))"""
    if not 0.0 <= p_er <= 1.0:
        raise CodeParameterError(f"p_er 必须在 [0, 1] 内: {p_er}")
    prm = params(Ws, merge_tol)
    return max(0.0, prm.eps_bic * (1.0 - p_w(Ws, 0.0, merge_tol) - p_er))


def info_thresholds(code: GpCode, t: Union[ThresholdVector, float, Sequence[float], None]) -> np.ndarray:
    """按信息集顺序展开阈值；None 表示全零"""
    if t is None:
        return np.zeros(code.r)
    if isinstance(t, (list, tuple, np.ndarray)):
        t = ThresholdVector.from_sequence(code, list(t))
    if isinstance(t, ThresholdVector):
        return np.asarray(t.as_list(code), dtype=float)
    return np.full(code.r, _check_threshold(t))


def per_index_erasures(code: GpCode, W: BscMixture, t: Union[ThresholdVector, float, None] = None,
                       l_max: Optional[int] = None, merge_tol: Optional[float] = None) -> np.ndarray:
    """
    信息位各自合成信道上的 p_er（按信息集顺序）

    BEC 输入走精确标量递推：t < 1/2 时擦除概率即 p_er，t = 1/2 时为 0。
    """
    ts = info_thresholds(code, t)
    if code.r == 0:
        return np.zeros(0)
    info = np.asarray(code.info_set, dtype=np.int64) - 1
    if is_bec(W, merge_tol):
        z = bec_synthetic_erasures(bec_erasure(W, merge_tol), code.n)[info]
        return np.where(ts < 0.5, z, 0.0)
    channels = synthesize_all(W, code.n, l_max, merge_tol)
    return np.array([operating_point(channels[k], ti, merge_tol).p_er for k, ti in zip(info, ts)])


def union_bound_erasure(code: GpCode, W: BscMixture, t: Union[ThresholdVector, float, None] = None,
                        l_max: Optional[int] = None, merge_tol: Optional[float] = None) -> float:
    """min(1, Σ_{i∈I} p_er^{(i)})，按索引顺序求和"""
    terms = per_index_erasures(code, W, t, l_max, merge_tol)
    total = float(np.sum(terms))
    logger.debug(f"联合界: r={code.r}, Σp_er={total:.6e}")
    return min(1.0, total)


def analysis_table(W: BscMixture, n: int, t: Optional[float] = None,
                   l_max: Optional[int] = None, merge_tol: Optional[float] = None) -> List[AnalysisRow]:
    """全部 2^n 个合成信道的参数表；给定 t 时附加该阈值下的工作点"""
    if n < 0:
        raise CodeParameterError(f"n 必须非负: {n}")
    channels = synthesize_all(W, n, l_max, merge_tol)
    rows = []
    for k, ch in enumerate(channels, start=1):
        prm = params(ch, merge_tol)
        row = AnalysisRow(
            index=k,
            signs=str(index_to_signs(k, n)),
            i0_gp=prm.i0_gp,
            eps_bic=prm.eps_bic,
            bhattacharyya=prm.bhattacharyya,
            capacity=prm.capacity,
            components=len(ch),
        )
        if t is not None:
            op = operating_point(ch, t, merge_tol)
            row = row.model_copy(update={'p_er': op.p_er, 'p_ue': op.p_ue})
        rows.append(row)
    return rows
