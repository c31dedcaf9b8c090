# sweeps.py - 격자 스윕과 CSV 출력 (그림 재현용)
import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, TextIO, Tuple

from domain_models import EvalPoint, FunctionId, Method, SweepAxis, SweepSpec
from evaluation import build_order, certify, evaluate
from utils.config import get_config
from utils.error_handler import DomainError
from utils.helpers import axis_grid, create_directory, format_real, parse_real

logger = logging.getLogger(__name__)

config = get_config()


class SweepRow(NamedTuple):
    """한 격자점 결과 - 정의역 오류 칸은 NaN"""
    axis: float
    value: float
    lower: float
    upper: float
    method: str
    est_error: float
    domain_error: bool


class SweepResult(NamedTuple):
    spec: SweepSpec
    rows: List[SweepRow]

    @property
    def domain_errors(self) -> int:
        return sum(1 for row in self.rows if row.domain_error)


def _arguments_at(spec: SweepSpec, x: float) -> Tuple[float, Optional[float], EvalPoint]:
    """축 값 x 에서의 (M, N, 점)"""
    if spec.vary == SweepAxis.BETA:
        return spec.m, spec.n, EvalPoint(alpha=spec.alpha, beta=x)
    if spec.vary == SweepAxis.ORDER_SUM:
        return (x + spec.diff) / 2.0, (x - spec.diff) / 2.0, EvalPoint(alpha=spec.alpha, beta=spec.beta)
    return x, spec.n, EvalPoint(alpha=spec.alpha, beta=spec.beta)


def evaluate_row(spec: SweepSpec, x: float) -> SweepRow:
    """격자점 하나 평가 (DomainError 만 칸 비움으로 처리, 수렴 실패는 전파)"""
    value = est_error = lower = upper = math.nan
    method = ""
    failed = False
    try:
        m, n, point = _arguments_at(spec, x)
        report = evaluate(spec.function, build_order(spec.function, m, n), point, spec.method, spec.tol)
        value, est_error, method = report.value, report.est_error, report.method.value
        if spec.with_bounds:
            interval = certify(spec.function, m, n, point).interval
            lower, upper = interval.lower, interval.upper
    except DomainError as e:
        logger.debug(f"sweep {spec.function.value} x={x!r}: {e.reason} - {e.message}")
        failed = True
    return SweepRow(x, value, lower, upper, method, est_error, failed)


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """
    🧮 스윕 실행

    격자점은 스레드 풀에서 병렬 평가하지만 결과는 항상 축 오름차순.
    """
    grid = axis_grid(spec.start, spec.stop, spec.step)
    workers = workers or config.get_sweep_workers()
    logger.info(f"스윕 시작: {spec.function.value} {spec.vary.value} {len(grid)}점, 작업자 {workers}")

    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = list(executor.map(lambda x: evaluate_row(spec, x), grid))

    result = SweepResult(spec, rows)
    if result.domain_errors:
        logger.warning(f"⚠️ 정의역 오류 {result.domain_errors}점 (빈 칸으로 기록)")
    return result


def _cell(value: float) -> str:
    return "" if math.isnan(value) else format_real(value)


def write_csv(result: SweepResult, stream: TextIO) -> None:
    """axis,value[,lower,upper],method,est_error + 정의역 오류 시 '# domain_errors=<n>'"""
    with_bounds = result.spec.with_bounds
    writer = csv.writer(stream, lineterminator='\n')
    header = ['axis', 'value'] + (['lower', 'upper'] if with_bounds else []) + ['method', 'est_error']
    writer.writerow(header)
    for row in result.rows:
        cells = [format_real(row.axis), _cell(row.value)]
        if with_bounds:
            cells += [_cell(row.lower), _cell(row.upper)]
        cells += [row.method, _cell(row.est_error)]
        writer.writerow(cells)
    if result.domain_errors:
        stream.write(f"# domain_errors={result.domain_errors}\n")


def read_csv(path: str) -> List[Dict[str, float]]:
    """스윕 CSV 읽기 ('#' 주석 줄 무시, 빈 칸은 NaN)"""
    with open(path, newline='', encoding='utf-8') as f:
        lines = [line for line in f if not line.startswith('#')]
    rows = []
    for record in csv.DictReader(lines):
        rows.append({key: (text if key == 'method' else parse_real(text)) for key, text in record.items()})
    return rows


def save_csv(result: SweepResult, path: str) -> str:
    create_directory(os.path.dirname(path))
    with open(path, 'w', newline='', encoding='utf-8') as f:
        write_csv(result, f)
    logger.info(f"💾 CSV 저장: {path} ({len(result.rows)}행)")
    return path


# ---------------------------------------------------------------- figure presets

def _nuttall_sum_curves(diff: float, pairs) -> List[SweepSpec]:
    return [SweepSpec(function=FunctionId.NUTTALL_NORM, vary=SweepAxis.ORDER_SUM, start=3.0, stop=18.0,
                      step=0.25, diff=diff, alpha=alpha, beta=beta) for alpha, beta in pairs]


def figure_specs(name: str, method: Method = Method.AUTO, tol: float = 1e-12) -> List[SweepSpec]:
    """그림별 곡선 정의 목록"""
    if name == 'fig1a':
        specs = _nuttall_sum_curves(1.0, [(7.5, 6.5), (5.5, 5.5), (0.5, 3.5)])
    elif name == 'fig1b':
        specs = _nuttall_sum_curves(2.0, [(3.5, 1.5), (2.0, 2.0), (1.5, 3.5)])
    elif name == 'fig2a':
        specs = [SweepSpec(function=FunctionId.NUTTALL_NORM, vary=SweepAxis.BETA, start=0.25, stop=12.0,
                           step=0.25, m=5.0, n=3.0, alpha=alpha, with_bounds=True) for alpha in (0.5, 4.0, 6.5)]
    elif name == 'fig2b':
        specs = [SweepSpec(function=FunctionId.NUTTALL_NORM, vary=SweepAxis.BETA, start=3.0, stop=8.0,
                           step=0.125, m=m, n=2.7, alpha=3.5, with_bounds=True) for m in (3.7, 4.7, 5.7)]
    elif name == 'fig3a':
        specs = [SweepSpec(function=FunctionId.MARCUM, vary=SweepAxis.BETA, start=0.25, stop=12.0,
                           step=0.25, m=4.0, alpha=alpha, with_bounds=True) for alpha in (0.5, 3.5, 5.5)]
    elif name == 'fig3b':
        specs = [SweepSpec(function=FunctionId.MARCUM, vary=SweepAxis.BETA, start=0.25, stop=12.0,
                           step=0.25, m=m, alpha=2.5, with_bounds=True) for m in (2.7, 8.3)]
    else:
        raise DomainError(f"unknown figure preset: {name}", reason="unknown_figure", field="figure")
    return [spec.model_copy(update={'method': method, 'tol': tol}) for spec in specs]


FIGURES = ('fig1a', 'fig1b', 'fig2a', 'fig2b', 'fig3a', 'fig3b')


def run_figure(name: str, out_dir: str, method: Method = Method.AUTO, tol: float = 1e-12) -> List[str]:
    """그림 하나의 모든 곡선을 <out_dir>/<name>_<index>.csv 로 저장"""
    paths = []
    for index, spec in enumerate(figure_specs(name, method, tol)):
        paths.append(save_csv(run_sweep(spec), os.path.join(out_dir, f"{name}_{index}.csv")))
    return paths
