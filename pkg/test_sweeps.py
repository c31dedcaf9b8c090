# test_sweeps.py - 스윕 / CSV / 그림 프리셋 테스트
import io
import math

import pytest

from domain_models import EvalPoint, FunctionId, OrderSpec, SweepAxis, SweepSpec
from oracle import marcum_series
from sweeps import figure_specs, read_csv, run_figure, run_sweep, save_csv, write_csv
from utils.error_handler import DomainError
from utils.helpers import axis_grid


def marcum_beta_sweep(**overrides):
    fields = dict(function=FunctionId.MARCUM, vary=SweepAxis.BETA, start=0.5, stop=3.0, step=0.5,
                  m=2.7, alpha=2.5)
    fields.update(overrides)
    return SweepSpec(**fields)


def test_axis_grid_has_no_drift():
    grid = axis_grid(3.0, 18.0, 0.25)
    assert len(grid) == 61
    assert grid[0] == 3.0 and grid[-1] == 18.0
    assert axis_grid(0.0, 1.0, 0.3) == [0.0, 0.3, 0.6, 0.8999999999999999]


def test_beta_sweep_rows_are_ordered():
    result = run_sweep(marcum_beta_sweep(), workers=3)
    axes = [row.axis for row in result.rows]
    assert axes == [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    values = [row.value for row in result.rows]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[2] == marcum_series(OrderSpec.marcum(2.7), EvalPoint(alpha=2.5, beta=1.5)).value
    assert result.domain_errors == 0


def test_sweep_with_bounds():
    result = run_sweep(marcum_beta_sweep(with_bounds=True))
    for row in result.rows:
        assert row.lower < row.value < row.upper


def test_order_sum_sweep_is_increasing():
    spec = SweepSpec(function=FunctionId.NUTTALL_NORM, vary=SweepAxis.ORDER_SUM, start=3.0, stop=8.0, step=0.5,
                     diff=1.0, alpha=7.5, beta=6.5)
    values = [row.value for row in run_sweep(spec).rows]
    assert len(values) == 11
    assert all(b > a for a, b in zip(values, values[1:]))


def test_domain_errors_leave_blank_cells():
    spec = SweepSpec(function=FunctionId.MARCUM, vary=SweepAxis.ORDER, start=0.0, stop=2.0, step=0.5,
                     alpha=1.0, beta=1.0)
    result = run_sweep(spec)
    assert result.domain_errors == 1
    assert math.isnan(result.rows[0].value)

    stream = io.StringIO()
    write_csv(result, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == "axis,value,method,est_error"
    assert lines[1] == "0.0,,,"
    assert lines[-1] == "# domain_errors=1"


def test_csv_without_errors_has_no_footer():
    stream = io.StringIO()
    write_csv(run_sweep(marcum_beta_sweep(with_bounds=True)), stream)
    text = stream.getvalue()
    assert text.startswith("axis,value,lower,upper,method,est_error\n")
    assert "#" not in text


def test_saved_csv_reads_back(tmp_path):
    result = run_sweep(marcum_beta_sweep())
    path = save_csv(result, str(tmp_path / "curves" / "marcum.csv"))
    rows = read_csv(path)
    assert [row['axis'] for row in rows] == [row.axis for row in result.rows]
    assert [row['value'] for row in rows] == [row.value for row in result.rows]
    assert rows[0]['method'] == "series"


@pytest.mark.parametrize("overrides,reason", [
    ({'start': 3.0, 'stop': 0.5}, "sweep_range"),
    ({'step': 0.0}, "sweep_range"),
    ({'alpha': None}, "missing_parameter"),
    ({'function': FunctionId.NUTTALL}, "missing_parameter"),
    ({'vary': SweepAxis.ORDER_SUM, 'diff': 1.0, 'beta': 1.0}, "sweep_axis"),
])
def test_sweep_spec_validation(overrides, reason):
    with pytest.raises(DomainError) as info:
        marcum_beta_sweep(**overrides)
    assert info.value.reason == reason


def test_figure_presets():
    specs = figure_specs('fig3b')
    assert [spec.m for spec in specs] == [2.7, 8.3]
    assert all(spec.function == FunctionId.MARCUM and spec.with_bounds for spec in specs)
    assert len(figure_specs('fig1a')) == 3
    with pytest.raises(DomainError) as info:
        figure_specs('fig9')
    assert info.value.reason == "unknown_figure"


def test_run_figure_writes_one_csv_per_curve(tmp_path):
    paths = run_figure('fig3b', str(tmp_path))
    assert [p.rsplit('/', 1)[-1] for p in paths] == ["fig3b_0.csv", "fig3b_1.csv"]
    rows = read_csv(paths[0])
    assert len(rows) == 48
    assert rows[-1]['axis'] == 12.0
    assert all(row['lower'] < row['value'] < row['upper'] for row in rows)
    # M = 8.3 은 작은 β 에서 세 값 모두 1 로 반올림됨
    for row in read_csv(paths[1]):
        assert row['lower'] - 1e-12 <= row['value'] <= row['upper'] + 1e-12
