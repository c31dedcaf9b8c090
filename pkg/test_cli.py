# test_cli.py - 명령행 진입점 / 종료 코드 테스트
import math

import pytest

from main import main
from sweeps import read_csv


def output_fields(text):
    """'key=value' 줄을 딕셔너리로"""
    return dict(line.split('=', 1) for line in text.splitlines() if '=' in line and not line.startswith('#'))


def test_eval_marcum_trivial(capsys):
    assert main(['eval', 'marcum', '--m', '1', '--alpha', '0', '--beta', '2']) == 0
    fields = output_fields(capsys.readouterr().out)
    assert float(fields['value']) == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert fields['method'] == "closed"
    assert float(fields['est_error']) >= 0.0


def test_eval_series_method(capsys):
    assert main(['eval', 'nuttall', '--m', '5', '--n', '3', '--alpha', '4', '--beta', '6',
                 '--method', 'series']) == 0
    fields = output_fields(capsys.readouterr().out)
    assert fields['method'] == "series"
    assert float(fields['value']) > 0.0


def test_eval_missing_order_is_domain_error(capsys):
    assert main(['eval', 'nuttall', '--m', '5', '--alpha', '4', '--beta', '6']) == 2
    assert "missing_order" in capsys.readouterr().err


def test_eval_negative_beta_is_domain_error(capsys):
    assert main(['eval', 'marcum', '--m', '2', '--alpha', '1', '--beta', '-1']) == 2
    assert "nonpositive_argument" in capsys.readouterr().err


def test_eval_convergence_failure(monkeypatch, capsys):
    monkeypatch.setenv('SERIES_MAX_TERMS', '2')
    assert main(['eval', 'marcum', '--m', '2.7', '--alpha', '3', '--beta', '2', '--method', 'series']) == 3
    assert "convergence_error" in capsys.readouterr().err


def test_invalid_configuration(monkeypatch, capsys):
    monkeypatch.setenv('CONDITIONING_LIMIT', '0.5')
    assert main(['eval', 'marcum', '--m', '1', '--alpha', '0', '--beta', '2']) == 1
    assert "configuration_error" in capsys.readouterr().err


def test_unknown_log_level_is_configuration_error(capsys):
    assert main(['--log-level', 'verbose', 'eval', 'marcum', '--m', '1', '--alpha', '0', '--beta', '2']) == 1
    assert "configuration_error" in capsys.readouterr().err


def test_non_numeric_setting_is_configuration_error(monkeypatch, capsys):
    monkeypatch.setenv('SWEEP_WORKERS', 'four')
    assert main(['sweep', 'marcum', '--m', '2.7', '--alpha', '2.5',
                 '--from', '0.5', '--to', '1', '--step', '0.5']) == 1
    assert "configuration_error" in capsys.readouterr().err


def test_bounds_with_value(capsys):
    assert main(['bounds', 'nuttall-std', '--m', '5', '--n', '3', '--alpha', '2', '--beta', '2',
                 '--with-value']) == 0
    fields = output_fields(capsys.readouterr().out)
    assert float(fields['lower']) < float(fields['value']) < float(fields['upper'])
    assert fields['degenerate'] == "false"
    assert fields['contained'] == "true"


def test_bounds_alpha_below_one(capsys):
    assert main(['bounds', 'nuttall-std', '--m', '5', '--n', '3', '--alpha', '0.9', '--beta', '2']) == 2
    err = capsys.readouterr().err
    assert "alpha below 1" in err
    assert "alpha_below_one" in err


def test_bounds_fractional_mismatch(capsys):
    assert main(['bounds', 'nuttall-norm', '--m', '4.7', '--n', '2.5', '--alpha', '2', '--beta', '2']) == 2
    assert "fractional_mismatch" in capsys.readouterr().err


def test_sweep_to_stdout(capsys):
    assert main(['sweep', 'marcum', '--vary', 'beta', '--m', '2.7', '--alpha', '2.5',
                 '--from', '0.5', '--to', '2', '--step', '0.5', '--with-bounds']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "axis,value,lower,upper,method,est_error"
    assert len(lines) == 5


def test_sweep_to_file(tmp_path):
    out = tmp_path / "order_sum.csv"
    assert main(['sweep', 'nuttall-norm', '--vary', 'order-sum', '--diff', '1', '--alpha', '7.5',
                 '--beta', '6.5', '--from', '3', '--to', '6', '--step', '0.5', '--out', str(out)]) == 0
    rows = read_csv(str(out))
    assert len(rows) == 7
    assert rows[0]['axis'] == 3.0


def test_sweep_needs_range(capsys):
    assert main(['sweep', 'marcum', '--m', '2', '--alpha', '1']) == 2
    assert "missing_parameter" in capsys.readouterr().err


def test_sweep_figure(tmp_path, capsys):
    assert main(['sweep', '--figure', 'fig3b', '--out', str(tmp_path)]) == 0
    printed = capsys.readouterr().out.split()
    assert [p.rsplit('/', 1)[-1] for p in printed] == ["fig3b_0.csv", "fig3b_1.csv"]
    assert (tmp_path / "fig3b_1.csv").exists()


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(['plot'])
