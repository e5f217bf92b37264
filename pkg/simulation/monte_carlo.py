# simulation/monte_carlo.py
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from config import get_settings
from polar.analysis import info_thresholds, operating_point, per_index_erasures, union_bound_erasure
from polar.channels import BscMixture, MixtureForm, canonicalize, is_bec, synthesize_all
from polar.codes import GpCode, encode
from polar.decoders import SceDecoder, ThresholdVector, observation_likelihoods
from polar.errors import BlocklengthTooLargeError, ChannelDocumentError, CodeParameterError
from .channel_sampler import sample_outputs
from .report import SimReport, TradeoffCurve, TradeoffPoint

ThresholdLike = Union[ThresholdVector, float, Sequence[float], None]


def trial_rng(seed: int, k: int) -> np.random.Generator:
    """第 k 次试验的独立随机流：PCG64 以 SeedSequence(seed, spawn_key=(k,)) 播种"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))


@dataclass
class Tally:
    erasures: int = 0
    undetected_errors: int = 0
    trials: int = 0
    first_erasures: Counter = field(default_factory=Counter)

    def merge(self, other: 'Tally') -> 'Tally':
        self.erasures += other.erasures
        self.undetected_errors += other.undetected_errors
        self.trials += other.trials
        self.first_erasures.update(other.first_erasures)
        return self


def _run_range(code: GpCode, W: BscMixture, thresholds: List[float], seed: int,
               start: int, stop: int) -> Tally:
    """试验 [start, stop) 的计数；工作进程入口，参数必须可 pickle"""
    decoder = SceDecoder(code, thresholds)
    tally = Tally()
    for k in range(start, stop):
        rng = trial_rng(seed, k)
        u = rng.integers(0, 2, size=code.r, dtype=np.uint8)
        x = encode(code, u)
        components, y = sample_outputs(W, x, rng)
        result = decoder.decode(observation_likelihoods(W, components, y))
        tally.trials += 1
        if result.is_erasure:
            tally.erasures += 1
            tally.first_erasures[result.first_erased_index] += 1
        elif result.message != tuple(int(b) for b in u):
            tally.undetected_errors += 1
    return tally


class MonteCarloSimulator:
    """
    SCE 方案的蒙特卡洛仿真器

    每次试验：均匀抽取消息、编码、逐比特过信道、SCE 译码，并归类为正确 / 擦除 / 漏检错误。
    第 k 次试验只使用由 (seed, k) 派生的随机流，因此结果与工作进程数无关。

    属性:
        code (GpCode): 待测码
        channel (BscMixture): 规范化后的信道
        settings (Settings): 全局配置对象
        logger (Logger): 日志记录器

    示例:
        >>> sim = MonteCarloSimulator(GpCode(1, (2,)), make_bec(0.5))
        >>> report = sim.run_trials(ThresholdVector.zero(sim.code), trials=1000, seed=1)
        >>> report.undetected_errors
        0
    """

    def __init__(self, code: GpCode, channel: BscMixture, workers: Optional[int] = None,
                 show_progress: Optional[bool] = None):
        self.logger = logging.getLogger(__name__)
        self.settings = get_settings()
        self.code = code
        self.channel = channel if channel.form == MixtureForm.CANONICAL else canonicalize(channel)
        self.workers = workers if workers is not None else self.settings.simulation.workers
        self.show_progress = (self.settings.simulation.show_progress
                              if show_progress is None else show_progress)

    def _ranges(self, trials: int) -> List[Tuple[int, int]]:
        chunk = self.settings.simulation.chunk_trials
        return [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]

    def _tally(self, thresholds: List[float], trials: int, seed: int) -> Tally:
        ranges = self._ranges(trials)
        total = Tally()
        bar = tqdm(total=trials, desc="仿真", unit="trial", disable=not self.show_progress)
        try:
            if self.workers <= 1 or len(ranges) <= 1:
                for start, stop in ranges:
                    total.merge(_run_range(self.code, self.channel, thresholds, seed, start, stop))
                    bar.update(stop - start)
                return total

            results: Dict[int, Tally] = {}
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = {
                    pool.submit(_run_range, self.code, self.channel, thresholds, seed, start, stop): (start, stop)
                    for start, stop in ranges
                }
                for future in as_completed(futures):
                    start, stop = futures[future]
                    results[start] = future.result()
                    bar.update(stop - start)
            # 按区间起点合并
            for start in sorted(results):
                total.merge(results[start])
            return total
        finally:
            bar.close()

    def run_trials(self, t: ThresholdLike = None, trials: Optional[int] = None,
                   seed: Optional[int] = None) -> SimReport:
        """
        执行 trials 次试验并汇总为 SimReport

        异常:
            CodeParameterError: 试验次数小于 1 或阈值向量与信息集不符
        """
        cfg = self.settings.simulation
        trials = cfg.trials if trials is None else int(trials)
        seed = cfg.seed if seed is None else int(seed)
        if trials < 1:
            raise CodeParameterError(f"试验次数必须至少为 1: {trials}")
        thresholds = [float(v) for v in info_thresholds(self.code, t)]

        began = time.perf_counter()
        try:
            tally = self._tally(thresholds, trials, seed)
        except Exception as e:
            self.logger.error(f"蒙特卡洛仿真失败: {str(e)}")
            raise
        elapsed = time.perf_counter() - began

        report = SimReport.from_counts(
            trials=tally.trials,
            erasures=tally.erasures,
            undetected_errors=tally.undetected_errors,
            seed=seed,
            thresholds=thresholds,
            first_erasure_counts=dict(tally.first_erasures),
            wallclock=elapsed,
        )
        self.logger.info(f"仿真完成 ({elapsed:.2f}s): {report.summary_line()}")
        return report

    def _predicted(self, t: float, l_max: Optional[int], channels: Optional[List[BscMixture]]):
        if channels is None:
            p_er = union_bound_erasure(self.code, self.channel, t, l_max)
            # BEC：t = 1/2 时擦除分量全部判决，错判概率 1/2
            p_ue = 0.0 if t < 0.5 else 0.5 * float(per_index_erasures(self.code, self.channel, 0.0).sum())
        else:
            ops = [operating_point(channels[i - 1], t) for i in self.code.info_set]
            p_er = min(1.0, sum(op.p_er for op in ops))
            p_ue = sum(op.p_ue for op in ops)
        # 漏检错误的联合界截到可行域 p_er + p_ue ≤ 1 内
        return p_er, min(p_ue, 1.0 - p_er)

    def sweep_thresholds(self, grid: Sequence[float], trials: Optional[int] = None,
                         seed: Optional[int] = None, l_max: Optional[int] = None) -> TradeoffCurve:
        """对每个统一阈值 t 运行 run_trials，并给出联合界预测"""
        grid = [float(t) for t in grid]
        if not grid:
            raise CodeParameterError("阈值网格不能为空")
        channels = None
        if self.code.r and not is_bec(self.channel):
            channels = synthesize_all(self.channel, self.code.n, l_max, show_progress=False)
        points = []
        for t in grid:
            report = self.run_trials(t, trials, seed)
            p_er_pred, p_ue_pred = self._predicted(t, l_max, channels)
            points.append(TradeoffPoint(
                label=f"t={t!r}",
                t=t,
                measured=report.measured,
                p_er_ci=report.p_er_ci,
                p_ue_ci=report.p_ue_ci,
                predicted={'p_er': p_er_pred, 'p_ue': p_ue_pred},
                report=report,
            ))
        return TradeoffCurve(points=points)


def run_trials(code: GpCode, W: BscMixture, t: ThresholdLike = None, trials: Optional[int] = None,
               seed: Optional[int] = None, workers: Optional[int] = None) -> SimReport:
    return MonteCarloSimulator(code, W, workers).run_trials(t, trials, seed)


def sweep_thresholds(code: GpCode, W: BscMixture, grid: Sequence[float], trials: Optional[int] = None,
                     seed: Optional[int] = None, workers: Optional[int] = None,
                     l_max: Optional[int] = None) -> TradeoffCurve:
    return MonteCarloSimulator(code, W, workers).sweep_thresholds(grid, trials, seed, l_max)


def exact_bec_erasure(code: GpCode, eps: float, t: float = 0.0) -> float:
    """
    BEC(ε) 上 SCE 的精确擦除概率

    枚举全部 2^N 种擦除图样；BEC 上的后验只有确定与 1/2 两种，擦除与否只取决于图样，
    因此任意 t < 1/2 结果相同，t = 1/2 时从不擦除。
    """
    limit = get_settings().analysis.oracle_max_blocklength
    if code.N > limit:
        raise BlocklengthTooLargeError(f"擦除图样枚举只支持 N ≤ {limit}，实际 N = {code.N}")
    if not 0.0 <= eps <= 1.0:
        raise ChannelDocumentError(f"擦除概率超出[0,1]: {eps}")
    if not 0.0 <= t <= 0.5:
        raise CodeParameterError(f"阈值必须在 [0, 1/2] 内: {t}")
    if code.r == 0 or t == 0.5:
        return 0.0
    decoder = SceDecoder(code)
    x = encode(code, np.zeros(code.r, dtype=np.uint8))
    certain = np.where(x[:, None] == 0, [1.0, 0.0], [0.0, 1.0])
    N = code.N
    total = 0.0
    for pattern in range(1 << N):
        erased = ((pattern >> np.arange(N)) & 1).astype(bool)
        k = int(erased.sum())
        weight = eps ** k * (1.0 - eps) ** (N - k)
        if weight == 0.0:
            continue
        L = np.where(erased[:, None], 1.0, certain)
        if decoder.decode(L).is_erasure:
            total += weight
    return total
