# test_evaluation.py - 평가 경로 선택 / 인증 / 응용 함수 테스트
import math

import pytest
from scipy import stats

from domain_models import BoundInterval, EvalPoint, EvalReport, FunctionId, Method, OrderSpec
from evaluation import (
    _require_containment,
    build_order,
    certify,
    closed_form_result,
    detection_probability,
    evaluate,
    noncentral_chi2_sf,
)
from oracle import marcum_series, norm_nuttall_series, nuttall_series
from utils.error_handler import ContainmentError, DomainError


def test_auto_uses_closed_form_at_zero_alpha():
    report = evaluate(FunctionId.MARCUM, OrderSpec.marcum(1.0), EvalPoint(alpha=0.0, beta=2.0))
    assert report.method == Method.CLOSED
    assert report.value == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert report.warning is None


def test_auto_uses_series_for_real_order():
    point = EvalPoint(alpha=2.5, beta=3.0)
    report = evaluate(FunctionId.MARCUM, OrderSpec.marcum(2.7), point)
    assert report.method == Method.SERIES
    assert report.value == marcum_series(OrderSpec.marcum(2.7), point).value


def test_auto_uses_closed_form_for_half_odd_nuttall():
    point = EvalPoint(alpha=3.5, beta=4.0)
    report = evaluate(FunctionId.NUTTALL_NORM, OrderSpec.nuttall(5.5, 3.5), point)
    assert report.method == Method.CLOSED
    assert report.conditioning is not None
    assert report.value == pytest.approx(norm_nuttall_series(OrderSpec.nuttall(5.5, 3.5), point).value, rel=1e-9)


def test_auto_falls_back_when_conditioning_is_poor(monkeypatch):
    monkeypatch.setenv('CONDITIONING_LIMIT', '1.0000001')
    point = EvalPoint(alpha=0.5, beta=3.5)
    report = evaluate(FunctionId.NUTTALL_NORM, OrderSpec.nuttall(5.5, 3.5), point)
    assert report.method == Method.SERIES


@pytest.mark.parametrize("method", [Method.CLOSED, Method.SERIES, Method.QUADRATURE])
def test_methods_agree_on_standard_nuttall(method):
    order = OrderSpec.nuttall(4.5, 2.5)
    point = EvalPoint(alpha=4.0, beta=6.0)
    report = evaluate(FunctionId.NUTTALL, order, point, method)
    assert report.method == method
    assert report.value == pytest.approx(nuttall_series(order, point).value, rel=1e-9)


def test_quadrature_normalization():
    order = OrderSpec.nuttall(5.0, 3.0)
    point = EvalPoint(alpha=4.0, beta=6.0)
    report = evaluate(FunctionId.NUTTALL_NORM, order, point, Method.QUADRATURE)
    assert report.value == pytest.approx(norm_nuttall_series(order, point).value, rel=1e-9)


def test_closed_method_needs_half_odd_orders():
    with pytest.raises(DomainError) as info:
        evaluate(FunctionId.NUTTALL, OrderSpec.nuttall(5.0, 3.0), EvalPoint(alpha=4.0, beta=6.0), Method.CLOSED)
    assert info.value.reason == "not_half_odd"
    with pytest.raises(DomainError) as info:
        closed_form_result(FunctionId.NUTTALL, OrderSpec.nuttall(2.5, 3.5), EvalPoint(alpha=1.0, beta=1.0))
    assert info.value.reason == "not_half_odd"


def test_nuttall_requires_second_order_and_positive_alpha():
    with pytest.raises(DomainError) as info:
        build_order(FunctionId.NUTTALL, 5.0)
    assert info.value.reason == "missing_order"
    with pytest.raises(DomainError) as info:
        evaluate(FunctionId.NUTTALL, OrderSpec.nuttall(5.0, 3.0), EvalPoint(alpha=0.0, beta=1.0))
    assert info.value.reason == "nonpositive_argument"


@pytest.mark.parametrize("kwargs,reason", [
    ({'alpha': -1.0, 'beta': 1.0}, "nonpositive_argument"),
    ({'alpha': 1.0, 'beta': math.inf}, "not_finite"),
])
def test_point_validation(kwargs, reason):
    with pytest.raises(DomainError) as info:
        EvalPoint(**kwargs)
    assert info.value.reason == reason


def test_order_validation():
    with pytest.raises(DomainError) as info:
        OrderSpec.marcum(0.0)
    assert info.value.reason == "order_floor"
    with pytest.raises(DomainError) as info:
        OrderSpec.nuttall(2.0, -1.0)
    assert info.value.reason == "order_floor"
    spec = OrderSpec.from_sum(8.0, 2.0)
    assert (spec.m, spec.n, spec.order_sum, spec.order_diff) == (5.0, 3.0, 8.0, 2.0)


def test_error_threshold_warning(monkeypatch):
    monkeypatch.setenv('ERROR_WARNING_THRESHOLD', '0')
    report = evaluate(FunctionId.MARCUM, OrderSpec.marcum(2.7), EvalPoint(alpha=1.0, beta=2.0))
    assert report.warning is not None
    assert "exceeds" in report.warning


def test_certify_without_value_reports_midpoint():
    point = EvalPoint(alpha=2.5, beta=3.0)
    report = certify(FunctionId.MARCUM, 2.7, None, point)
    interval = report.interval
    assert report.value == pytest.approx(0.5 * (interval.lower + interval.upper))
    assert report.est_error == pytest.approx(0.5 * interval.width)


def test_certify_with_value_checks_containment():
    point = EvalPoint(alpha=2.0, beta=2.0)
    report = certify(FunctionId.NUTTALL, 5.0, 3.0, point, with_value=True)
    assert report.method == Method.SERIES
    assert report.interval.contains(report.value)


def test_certify_needs_second_order():
    with pytest.raises(DomainError) as info:
        certify(FunctionId.NUTTALL_NORM, 5.0, None, EvalPoint(alpha=2.0, beta=2.0))
    assert info.value.reason == "missing_order"


def test_containment_violation():
    report = EvalReport(function=FunctionId.MARCUM, value=0.9, method=Method.SERIES, est_error=1e-13)
    interval = BoundInterval(lower=0.2, upper=0.3, degenerate=False)
    with pytest.raises(ContainmentError) as info:
        _require_containment(report, interval)
    assert info.value.details['value'] == 0.9


@pytest.mark.parametrize("x,dof,noncentrality", [(5.0, 3.0, 2.0), (12.0, 4.0, 6.5), (0.5, 1.0, 0.0)])
def test_noncentral_chi2_sf(x, dof, noncentrality):
    expected = stats.ncx2.sf(x, dof, noncentrality) if noncentrality > 0 else stats.chi2.sf(x, dof)
    assert noncentral_chi2_sf(x, dof, noncentrality) == pytest.approx(expected, rel=1e-8)


def test_noncentral_chi2_domain():
    with pytest.raises(DomainError):
        noncentral_chi2_sf(1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        noncentral_chi2_sf(-1.0, 2.0, 1.0)


def test_detection_probability():
    """P_M(snr, thr) = Q_M(√(2M·snr), √(2·thr))"""
    pulses, snr, threshold = 4, 1.5, 6.0
    point = EvalPoint(alpha=math.sqrt(2.0 * pulses * snr), beta=math.sqrt(2.0 * threshold))
    expected = marcum_series(OrderSpec.marcum(4.0), point).value
    assert detection_probability(pulses, snr, threshold) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        detection_probability(0, snr, threshold)
