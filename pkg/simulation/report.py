# simulation/report.py
import math
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator
from scipy.stats import norm

from polar.analysis import OperatingPoint

# 95% 双侧区间
Z95 = float(norm.ppf(0.975))


def wilson_half_width(count: int, trials: int, z: float = Z95) -> float:
    """
    Wilson 区间半宽；count = 0 时按三分法则返回上界 3/trials
    """
    if trials <= 0:
        return 0.0
    if count == 0:
        return 3.0 / trials
    phat = count / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    return z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom


class SimReport(BaseModel):
    """一次 (码, 信道, 阈值) 蒙特卡洛仿真的计数与估计"""
    trials: int = Field(ge=0)
    erasures: int = Field(ge=0)
    undetected_errors: int = Field(ge=0)
    correct: int = Field(ge=0)
    p_er_hat: float
    p_ue_hat: float
    p_er_ci: float
    p_ue_ci: float
    seed: int
    wallclock: float = 0.0
    thresholds: List[float] = Field(default_factory=list)
    first_erasure_counts: Dict[int, int] = Field(default_factory=dict)

    @model_validator(mode='after')
    def check_tally(self) -> 'SimReport':
        if self.erasures + self.undetected_errors + self.correct != self.trials:
            raise ValueError("擦除、漏检错误与正确译码次数之和必须等于试验次数")
        if sum(self.first_erasure_counts.values()) != self.erasures:
            raise ValueError("首个擦除位置的计数之和必须等于擦除次数")
        return self

    @classmethod
    def from_counts(cls, trials: int, erasures: int, undetected_errors: int, seed: int,
                    thresholds: Optional[List[float]] = None,
                    first_erasure_counts: Optional[Dict[int, int]] = None,
                    wallclock: float = 0.0) -> 'SimReport':
        denom = max(trials, 1)
        return cls(
            trials=trials,
            erasures=erasures,
            undetected_errors=undetected_errors,
            correct=trials - erasures - undetected_errors,
            p_er_hat=erasures / denom,
            p_ue_hat=undetected_errors / denom,
            p_er_ci=wilson_half_width(erasures, trials),
            p_ue_ci=wilson_half_width(undetected_errors, trials),
            seed=seed,
            wallclock=wallclock,
            thresholds=list(thresholds or []),
            first_erasure_counts=dict(sorted((first_erasure_counts or {}).items())),
        )

    @property
    def measured(self) -> OperatingPoint:
        return OperatingPoint(p_er=self.p_er_hat, p_ue=self.p_ue_hat)

    def summary_line(self) -> str:
        return (f"trials={self.trials} p_er={self.p_er_hat:.6g} ±{self.p_er_ci:.3g} "
                f"p_ue={self.p_ue_hat:.6g} ±{self.p_ue_ci:.3g}")


class TradeoffPoint(BaseModel):
    label: str
    t: float
    measured: OperatingPoint
    p_er_ci: float
    p_ue_ci: float
    predicted: OperatingPoint
    report: SimReport


class TradeoffCurve(BaseModel):
    """阈值扫描得到的 (p_er, p_ue) 权衡曲线，按实测 p_er 排序"""
    points: List[TradeoffPoint]

    @model_validator(mode='after')
    def sort_points(self) -> 'TradeoffCurve':
        self.points.sort(key=lambda pt: (pt.measured.p_er, pt.t))
        return self

    def rows(self) -> List[dict]:
        return [
            {
                't': pt.t,
                'p_er_hat': pt.measured.p_er,
                'p_er_ci': pt.p_er_ci,
                'p_ue_hat': pt.measured.p_ue,
                'p_ue_ci': pt.p_ue_ci,
                'p_er_predicted': pt.predicted.p_er,
            }
            for pt in self.points
        ]
