# reporting/report_writer.py
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel

from simulation.report import SimReport, TradeoffCurve

# 权衡曲线 CSV 的固定列顺序
SWEEP_COLUMNS = ['t', 'p_er_hat', 'p_er_ci', 'p_ue_hat', 'p_ue_ci', 'p_er_predicted']
SIMULATION_COLUMNS = ['trials', 'erasures', 'undetected_errors', 'correct',
                      'p_er_hat', 'p_er_ci', 'p_ue_hat', 'p_ue_ci', 'seed']


class ReportWriterError(Exception):
    pass


class MessageFormatter:
    """多模板摘要格式化"""

    TEMPLATES = {
        'sweep_point': "t={t:<8g} p_er={p_er_hat:.6g} ±{p_er_ci:.3g} p_ue={p_ue_hat:.6g} ±{p_ue_ci:.3g} "
                       "p_er_pred={p_er_predicted:.6g}",
        'analysis': "n={n} I(W)={capacity:.6g} I0_GP(W)={i0_gp:.6g} ε_bic(W)={eps_bic:.6g}",
    }

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def format(self, data: Dict[str, Any], msg_type: str) -> str:
        try:
            return self.TEMPLATES[msg_type].format(**data)
        except KeyError as e:
            self.logger.error(f"格式化 {msg_type} 摘要失败: 缺少字段 {str(e)}")
            raise ReportWriterError(f"无法格式化 {msg_type} 摘要") from e


def _cell(value: Any) -> str:
    # repr 保证浮点数往返精确，重复运行逐字节一致
    if isinstance(value, float):
        return repr(float(value))
    if value is None:
        return ''
    return str(value)


def rows_to_csv(rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


class ReportWriter:
    """
    把报告写成 JSON 或 CSV

    输出路径为空时写到标准输出。
    """

    def __init__(self, output: Optional[Union[str, Path]] = None, fmt: str = 'json'):
        self.logger = logging.getLogger(__name__)
        if fmt not in ('json', 'csv'):
            raise ReportWriterError(f"未知的输出格式: {fmt}")
        self.output = Path(output) if output else None
        self.fmt = fmt
        self.formatter = MessageFormatter()

    def _emit(self, text: str) -> None:
        if self.output is None:
            sys.stdout.write(text if text.endswith('\n') else text + '\n')
            return
        self.output.parent.mkdir(parents=True, exist_ok=True)
        self.output.write_text(text, encoding='utf-8')
        self.logger.info(f"报告已写入: {self.output}")

    def write_model(self, model: BaseModel, rows: Optional[List[Dict[str, Any]]] = None,
                    columns: Optional[Sequence[str]] = None) -> None:
        """JSON 模式写整个模型；CSV 模式写给定的行"""
        if self.fmt == "csv" and rows is not None:
            if columns is None:
                columns = list(rows[0].keys()) if rows else []
            self._emit(rows_to_csv(rows, columns))
        else:
            self._emit(model.model_dump_json(indent=2))

    def write_simulation(self, report: SimReport) -> str:
        row = report.model_dump(include=set(SIMULATION_COLUMNS))
        self.write_model(report, [row], SIMULATION_COLUMNS)
        return report.summary_line()

    def write_sweep(self, curve: TradeoffCurve) -> List[str]:
        rows = curve.rows()
        self.write_model(curve, rows, SWEEP_COLUMNS)
        return [self.formatter.format(row, 'sweep_point') for row in rows]
