# evaluation.py - 평가 경로 선택 (closed / series / quadrature / auto)
import logging
import math
import sys
from typing import Optional

from bounds import marcum_bounds, norm_nuttall_bounds, std_nuttall_bounds
from closed_form import marcum_half_odd, marcum_zero_alpha, norm_nuttall_half_odd, nuttall_half_odd
from domain_models import (
    BoundInterval,
    ClosedFormResult,
    EvalPoint,
    EvalReport,
    FunctionId,
    HalfOddPair,
    Method,
    OrderSpec,
    require_finite,
)
from oracle import marcum_quadrature, marcum_series, norm_nuttall_series, nuttall_quadrature, nuttall_series
from special_core import is_half_odd
from utils.config import get_config
from utils.error_handler import ContainmentError, DomainError

logger = logging.getLogger(__name__)

config = get_config()

_EPS = sys.float_info.epsilon


def build_order(function: FunctionId, m: float, n: Optional[float] = None) -> OrderSpec:
    """함수 종류에 맞는 OrderSpec 생성"""
    if function == FunctionId.MARCUM:
        return OrderSpec.marcum(m)
    if n is None:
        raise DomainError(f"{function.value} needs --n", reason="missing_order", field="n")
    return OrderSpec.nuttall(m, n)


def _closed_report(function: FunctionId, result: ClosedFormResult) -> EvalReport:
    est_error = result.conditioning * _EPS * abs(result.value)
    warning = None
    if result.degraded(config.get_conditioning_limit()):
        warning = f"closed form conditioning {result.conditioning:.3e} exceeds the limit; series is advised"
    return _with_warning(EvalReport(function=function, value=result.value, method=Method.CLOSED,
                                    est_error=est_error, conditioning=result.conditioning, warning=warning))


def _with_warning(report: EvalReport) -> EvalReport:
    """추정 오차가 기준을 넘으면 경고 문구 부착"""
    threshold = config.get_error_warning_threshold()
    if report.warning is None and not report.est_error <= threshold:
        text = f"estimated error {report.est_error:.3e} exceeds {threshold:.0e}"
        logger.warning(f"⚠️ {report.function.value}: {text}")
        return report.model_copy(update={'warning': text})
    return report


def _half_odd_pair(order: OrderSpec) -> Optional[HalfOddPair]:
    """닫힌 형식 적용 가능하면 HalfOddPair, 아니면 None"""
    if not (is_half_odd(order.m) and is_half_odd(order.n)) or order.m < order.n:
        return None
    return HalfOddPair.from_orders(order.m, order.n)


def closed_form_result(function: FunctionId, order: OrderSpec, point: EvalPoint) -> ClosedFormResult:
    """닫힌 형식 평가 - 반홀수 격자 밖이면 DomainError"""
    if function == FunctionId.MARCUM:
        if point.alpha == 0:
            return ClosedFormResult(value=marcum_zero_alpha(order.m, point.beta), conditioning=1.0)
        return marcum_half_odd(order.m, point)

    order.require_n("closed form")
    pair = _half_odd_pair(order)
    if pair is None:
        raise DomainError(f"closed form needs half-odd orders with M >= N (M={order.m}, N={order.n})",
                          reason="not_half_odd", field="m")
    if function == FunctionId.NUTTALL:
        return nuttall_half_odd(pair, point)
    return norm_nuttall_half_odd(pair, point)


def _series_report(function: FunctionId, order: OrderSpec, point: EvalPoint, tol: float) -> EvalReport:
    if function == FunctionId.MARCUM:
        result = marcum_series(order, point, tol)
    elif function == FunctionId.NUTTALL:
        result = nuttall_series(order, point, tol)
    else:
        result = norm_nuttall_series(order, point, tol)
    return _with_warning(EvalReport(function=function, value=result.value, method=Method.SERIES,
                                    est_error=result.tail_bound))


def _quadrature_report(function: FunctionId, order: OrderSpec, point: EvalPoint, tol: float) -> EvalReport:
    if function == FunctionId.MARCUM:
        result = marcum_quadrature(order, point, tol)
        value, error = result.value, result.abs_error
    else:
        result = nuttall_quadrature(order, point, tol)
        value, error = result.value, result.abs_error
        if function == FunctionId.NUTTALL_NORM:
            scale = point.alpha ** order.n
            value, error = value / scale, error / scale
    return _with_warning(EvalReport(function=function, value=value, method=Method.QUADRATURE, est_error=error))


def evaluate(function: FunctionId, order: OrderSpec, point: EvalPoint,
             method: Method = Method.AUTO, tol: Optional[float] = None) -> EvalReport:
    """
    📐 평가 진입점

    auto: 반홀수 차수이고 조건수가 한계 이내면 닫힌 형식, 아니면 급수.
    적분은 명시적으로 요청할 때만 사용한다.
    """
    tol = config.get_default_tol() if tol is None else tol
    if function != FunctionId.MARCUM:
        order.require_n(function.value)
        point.require_positive_alpha(function.value)

    if method == Method.CLOSED:
        return _closed_report(function, closed_form_result(function, order, point))
    if method == Method.SERIES:
        return _series_report(function, order, point, tol)
    if method == Method.QUADRATURE:
        return _quadrature_report(function, order, point, tol)

    if _closed_form_applies(function, order, point):
        result = closed_form_result(function, order, point)
        if not result.degraded(config.get_conditioning_limit()):
            return _closed_report(function, result)
        logger.info(f"{function.value}: 닫힌 형식 조건수 {result.conditioning:.3e} - 급수로 전환")
    return _series_report(function, order, point, tol)


def _closed_form_applies(function: FunctionId, order: OrderSpec, point: EvalPoint) -> bool:
    if function == FunctionId.MARCUM:
        return point.alpha == 0 or is_half_odd(order.m)
    return _half_odd_pair(order) is not None


def certify(function: FunctionId, m: float, n: Optional[float], point: EvalPoint,
            with_value: bool = False, tol: Optional[float] = None) -> EvalReport:
    """
    🔒 상/하한 구간 계산

    with_value 이면 급수 값이 구간 안에 있는지 확인하고, 벗어나면 ContainmentError.
    그렇지 않으면 값은 구간 중점, 추정 오차는 반폭.
    """
    if function == FunctionId.MARCUM:
        interval = marcum_bounds(m, point)
    elif n is None:
        raise DomainError(f"{function.value} bounds need --n", reason="missing_order", field="n")
    elif function == FunctionId.NUTTALL:
        interval = std_nuttall_bounds(m, n, point)
    else:
        interval = norm_nuttall_bounds(m, n, point)

    if not with_value:
        return EvalReport(function=function, value=0.5 * (interval.lower + interval.upper),
                          method=Method.CLOSED, est_error=0.5 * interval.width, interval=interval)

    report = _series_report(function, build_order(function, m, n), point,
                            config.get_default_tol() if tol is None else tol)
    _require_containment(report, interval)
    return report.model_copy(update={'interval': interval})


def _require_containment(report: EvalReport, interval: BoundInterval) -> None:
    slack = report.est_error + 1e-9 * abs(report.value)
    if not interval.lower - slack <= report.value <= interval.upper + slack:
        raise ContainmentError(
            f"series value {report.value!r} outside [{interval.lower!r}, {interval.upper!r}]",
            value=report.value, lower=interval.lower, upper=interval.upper,
        )


# ---------------------------------------------------------------- applications

def noncentral_chi2_sf(x: float, dof: float, noncentrality: float) -> float:
    """비중심 χ² 생존함수 Pr[X > x] = Q_{dof/2}(√λ, √x)"""
    x = require_finite(x, 'x')
    dof = require_finite(dof, 'dof')
    noncentrality = require_finite(noncentrality, 'noncentrality')
    if not dof > 0:
        raise DomainError(f"dof must be positive, got {dof}", reason="order_floor", field="dof")
    if noncentrality < 0 or x < 0:
        raise DomainError("x and noncentrality must be non-negative", reason="nonpositive_argument")
    point = EvalPoint(alpha=math.sqrt(noncentrality), beta=math.sqrt(x))
    return evaluate(FunctionId.MARCUM, OrderSpec.marcum(dof / 2.0), point).value


def detection_probability(pulses: int, snr: float, threshold: float) -> float:
    """
    M 펄스 비동기 적분 검출 확률 P_M(snr, thr).

    Q_M(α,β) = P_M(α²/(2M), β²/2) 이므로 α = √(2M·snr), β = √(2·thr).
    """
    if int(pulses) != pulses or pulses < 1:
        raise DomainError(f"pulses must be a positive integer, got {pulses}", reason="order_floor",
                          field="pulses")
    snr = require_finite(snr, 'snr')
    threshold = require_finite(threshold, 'threshold')
    if snr < 0 or threshold < 0:
        raise DomainError("snr and threshold must be non-negative", reason="nonpositive_argument")
    point = EvalPoint(alpha=math.sqrt(2.0 * pulses * snr), beta=math.sqrt(2.0 * threshold))
    return evaluate(FunctionId.MARCUM, OrderSpec.marcum(float(pulses)), point).value
