# gp-codes/main.py
import argparse
import json
import logging
import sys
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ValidationError

from config.settings import get_settings
from polar.analysis import AnalysisRow, analysis_table, scaling_exponent
from polar.channels import BscMixture, ChannelParams, make_bec, make_bsc, params
from polar.codes import ConstructionKind, GpCode, construct, encode
from polar.decoders import ThresholdVector, observation_likelihoods, sce_decode_trace
from polar.documents import ChannelDocument, CodeDocument, DecodeResultDocument, load_json
from polar.errors import (
    BlocklengthTooLargeError,
    ChannelDocumentError,
    CodeParameterError,
    LikelihoodError,
    PolarCodeError,
    ValidationFailure,
)
from reporting import MessageFormatter, ReportWriter
from simulation import MonteCarloSimulator

logger = logging.getLogger(__name__)


class AnalysisReport(BaseModel):
    channel: ChannelDocument
    n: int
    summary: dict
    rows: List[AnalysisRow]


class CodewordDocument(BaseModel):
    codeword: List[int]


class CliArgumentParser(argparse.ArgumentParser):
    """参数错误抛出 ValidationFailure，与其他输入错误走同一条报告路径"""

    def error(self, message: str):
        raise ValidationFailure(f"{self.prog}: {message}")


def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """全局选项；子命令上重复定义时默认值为 SUPPRESS，不覆盖主解析器的值"""
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument('-v', '--verbose', action='store_true', default=default(False), help='显示详细日志')
    parser.add_argument('--l-max', type=int, default=default(None), help='合成信道的最大分量数')
    parser.add_argument('--merge-tol', type=float, default=default(None), help='规范化合并容差')
    parser.add_argument('--workers', type=int, default=default(None), help='仿真工作进程数')
    parser.add_argument('-o', '--output', default=default(None), help='输出文件，缺省为标准输出')
    parser.add_argument('--format', choices=['json', 'csv'], default=default('json'), help='输出格式')


def _add_channel(parser: argparse.ArgumentParser, required: bool = False) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--bec', type=float, help='BEC(ε) 的擦除概率')
    group.add_argument('--bsc', type=float, help='BSC(ε) 的交叉概率')
    group.add_argument('--channel', help='信道描述 JSON（内联或文件路径）')


def build_parser() -> argparse.ArgumentParser:
    parser = CliArgumentParser(description='广义极化码与 SCE 译码工具')
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', help='逐索引分析合成信道')
    _add_common(p, suppress=True)
    _add_channel(p, required=True)
    p.add_argument('-n', type=int, required=True, help='极化步数')
    p.add_argument('--thresholds', type=float, help='附加该阈值下的工作点列')
    p.add_argument('--rate', type=float, help='给出码率时附加缩放指数预测')

    p = sub.add_parser('construct', help='构造 GP 码')
    _add_common(p, suppress=True)
    p.add_argument('kind', choices=[k.value for k in ConstructionKind])
    _add_channel(p)
    p.add_argument('-n', type=int, required=True)
    dim = p.add_mutually_exclusive_group(required=True)
    dim.add_argument('-r', type=int, help='维数')
    dim.add_argument('--rate', type=float, help='码率，维数取 ceil(R·2^n)')
    p.add_argument('--frozen', help='冻结比特 b_i（按冻结位索引升序），缺省全零')

    p = sub.add_parser('encode', help='编码消息')
    _add_common(p, suppress=True)
    p.add_argument('--code', required=True, help='码描述 JSON（内联或文件路径）')
    p.add_argument('--bits', required=True, help='消息比特，如 0101 或 JSON 列表')

    p = sub.add_parser('decode', help='SCE 译码')
    _add_common(p, suppress=True)
    p.add_argument('--code', required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument('--likelihoods', help='JSON 列表 [[l0, l1], ...]')
    src.add_argument('--observations', help='JSON 列表 [[分量, 比特], ...]')
    _add_channel(p)
    p.add_argument('--thresholds', default='zero', help='zero、统一阈值或 JSON 文件')
    p.add_argument('--trace', action='store_true', help='输出每个位置的似然对')

    for name, help_text in (('simulate', '蒙特卡洛仿真'), ('sweep', '阈值扫描')):
        p = sub.add_parser(name, help=help_text)
        _add_common(p, suppress=True)
        p.add_argument('--code', required=True)
        _add_channel(p)
        p.add_argument('--trials', type=int)
        p.add_argument('--seed', type=int)
        if name == 'simulate':
            p.add_argument('--thresholds', default='zero')
        else:
            p.add_argument('--grid', required=True, help='start:step:stop，含端点')
    return parser


def _apply_overrides(args: argparse.Namespace) -> None:
    """命令行选项写入全局配置，库函数在调用时读取"""
    settings = get_settings()
    try:
        if args.l_max is not None:
            settings.channel.l_max = args.l_max
        if args.merge_tol is not None:
            settings.channel.merge_tol = args.merge_tol
        if args.workers is not None:
            settings.simulation.workers = args.workers
        if getattr(args, 'trials', None) is not None:
            settings.simulation.trials = args.trials
        if getattr(args, 'seed', None) is not None:
            settings.simulation.seed = args.seed
    except ValidationError as e:
        raise ValidationFailure(f"参数无效: {e.errors()[0]['msg']}") from e


def _channel_from_args(args: argparse.Namespace, code_doc: Optional[CodeDocument] = None) -> BscMixture:
    if getattr(args, 'bec', None) is not None:
        return make_bec(args.bec)
    if getattr(args, 'bsc', None) is not None:
        return make_bsc(args.bsc)
    if getattr(args, 'channel', None) is not None:
        return ChannelDocument.parse(args.channel).to_mixture()
    if code_doc is not None and code_doc.channel is not None:
        return code_doc.channel.to_mixture()
    raise ChannelDocumentError("需要通过 --bec / --bsc / --channel 或码描述指定信道")


def parse_thresholds(value: Optional[str], code: GpCode) -> ThresholdVector:
    """zero、统一阈值、或 JSON（长度 r 的列表，或 索引→阈值 的对象）"""
    if value is None or value == 'zero':
        return ThresholdVector.zero(code)
    try:
        return ThresholdVector.uniform(code, float(value))
    except ValueError:
        pass
    data = load_json(value)
    if isinstance(data, list):
        return ThresholdVector.from_sequence(code, [float(v) for v in data])
    if isinstance(data, dict):
        return ThresholdVector({int(k): float(v) for k, v in data.items()})
    raise CodeParameterError("阈值文件必须是列表或对象")


def parse_grid(text: str) -> List[float]:
    """start:step:stop，含端点"""
    try:
        start, step, stop = (float(v) for v in text.split(':'))
    except ValueError as e:
        raise CodeParameterError(f"网格格式应为 start:step:stop: {text}") from e
    if step <= 0 or stop < start:
        raise CodeParameterError(f"网格参数无效: {text}")
    count = int(round((stop - start) / step)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _parse_bits(text: str) -> np.ndarray:
    text = text.strip()
    if text.startswith('['):
        return np.asarray(load_json(text), dtype=np.int64)
    if not text or any(ch not in '01' for ch in text):
        raise CodeParameterError(f"消息比特只能由 0 和 1 组成: {text!r}")
    return np.array([int(ch) for ch in text], dtype=np.int64)


def cmd_analyze(args: argparse.Namespace, writer: ReportWriter) -> None:
    settings = get_settings()
    if not 0 <= args.n <= settings.analysis.max_analyze_n:
        raise BlocklengthTooLargeError(f"analyze 只支持 0 ≤ n ≤ {settings.analysis.max_analyze_n}: {args.n}")
    W = _channel_from_args(args)
    rows = analysis_table(W, args.n, args.thresholds)
    prm: ChannelParams = params(W)
    summary = {'n': args.n, **prm.as_dict()}
    if args.rate is not None and 0.0 < args.rate < prm.i0_gp:
        summary['rate'] = args.rate
        summary['scaling_exponent'] = scaling_exponent(args.rate, prm.i0_gp, args.n)
    report = AnalysisReport(channel=ChannelDocument.from_mixture(W), n=args.n, summary=summary, rows=rows)
    # CSV 末行为信道 W 本身的汇总，索引列记为 summary
    summary_row = {'index': 'summary', 'signs': '', **summary}
    columns = list(AnalysisRow.model_fields) + ['rate', 'scaling_exponent']
    writer.write_model(report, [row.model_dump() for row in rows] + [summary_row], columns)
    logger.info(MessageFormatter().format(summary, 'analysis'))


def cmd_construct(args: argparse.Namespace, writer: ReportWriter) -> None:
    kind = ConstructionKind(args.kind)
    W = None
    if kind != ConstructionKind.RM or any(getattr(args, k) is not None for k in ('bec', 'bsc', 'channel')):
        W = _channel_from_args(args)
    code = construct(kind, args.n, W, r=args.r, rate=args.rate)
    if args.frozen is not None:
        code = code.with_frozen(_parse_bits(args.frozen).tolist())
    writer.write_model(code.to_document(kind, W))
    logger.info(f"构造完成: {kind.value} n={code.n} r={code.r} 信息集={list(code.info_set)}")


def cmd_encode(args: argparse.Namespace, writer: ReportWriter) -> None:
    code = GpCode.from_document(args.code)
    x = encode(code, _parse_bits(args.bits))
    writer.write_model(CodewordDocument(codeword=[int(b) for b in x]))


def cmd_decode(args: argparse.Namespace, writer: ReportWriter) -> None:
    code_doc = CodeDocument.parse(args.code)
    code = code_doc.to_code()
    if args.likelihoods is not None:
        likelihoods = np.asarray(load_json(args.likelihoods), dtype=float)
    else:
        observations = np.asarray(load_json(args.observations), dtype=np.int64)
        if observations.ndim != 2 or observations.shape[1] != 2:
            raise LikelihoodError("观测必须是 [[分量, 比特], ...] 形式")
        W = _channel_from_args(args, code_doc)
        likelihoods = observation_likelihoods(W, observations[:, 0], observations[:, 1])
    t = parse_thresholds(args.thresholds, code)
    result, trace = sce_decode_trace(code, likelihoods, t)
    writer.write_model(DecodeResultDocument.from_result(result, trace if args.trace else None))


def cmd_simulate(args: argparse.Namespace, writer: ReportWriter) -> str:
    code_doc = CodeDocument.parse(args.code)
    code = code_doc.to_code()
    W = _channel_from_args(args, code_doc)
    report = MonteCarloSimulator(code, W).run_trials(parse_thresholds(args.thresholds, code))
    return writer.write_simulation(report)


def cmd_sweep(args: argparse.Namespace, writer: ReportWriter) -> str:
    code_doc = CodeDocument.parse(args.code)
    code = code_doc.to_code()
    W = _channel_from_args(args, code_doc)
    curve = MonteCarloSimulator(code, W).sweep_thresholds(parse_grid(args.grid))
    return "\n".join(writer.write_sweep(curve))


COMMANDS = {
    'analyze': cmd_analyze,
    'construct': cmd_construct,
    'encode': cmd_encode,
    'decode': cmd_decode,
    'simulate': cmd_simulate,
    'sweep': cmd_sweep,
}


def _report_error(e: Exception, exit_code: int) -> int:
    line = json.dumps({'error': str(e), 'type': type(e).__name__, 'exit_code': exit_code}, ensure_ascii=False)
    print(line, file=sys.stderr)
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """命令行入口，返回退出码"""
    # 首先初始化全局配置
    settings = get_settings()

    args = None
    try:
        args = build_parser().parse_args(argv)

        # 配置日志
        log_level = logging.DEBUG if args.verbose else settings.logging.level
        logging.basicConfig(level=log_level, format=settings.logging.format)

        _apply_overrides(args)
        writer = ReportWriter(args.output, args.format)
        summary = COMMANDS[args.command](args, writer)
        if summary:
            # 报告写到标准输出时，摘要改走标准错误
            print(summary, file=sys.stdout if args.output else sys.stderr)
        return 0
    except PolarCodeError as e:
        logger.debug(f"{getattr(args, 'command', '参数解析')} 失败", exc_info=True)
        return _report_error(e, e.exit_code)
    except Exception as e:
        logger.exception(f"程序执行失败: {str(e)}")
        return _report_error(e, 1)


if __name__ == "__main__":
    sys.exit(main())
