# bounds.py - 반정수 반올림에 의한 상/하한
"""
Two-sided bounds for real orders.

Q_M is increasing in M, the normalized Nuttall function in M+N at fixed M−N,
and the standard Nuttall function likewise when α >= 1. Rounding the orders
down and up to the half-odd lattice therefore brackets the value between two
closed-form evaluations. Bounds never touch the series, so an interval is an
independent certificate for a series value.
"""
import logging
import math
from typing import Callable, Tuple

from closed_form import marcum_half_odd, marcum_zero_alpha, norm_nuttall_half_odd, nuttall_half_odd
from domain_models import BoundInterval, ClosedFormResult, EvalPoint, HalfOddPair, OrderSpec, require_finite
from special_core import ceil_half, floor_half, is_half_odd
from utils.error_handler import DomainError

logger = logging.getLogger(__name__)

FRACTION_TOLERANCE = 1e-12


def _marcum_at(order: float, point: EvalPoint) -> float:
    if point.alpha == 0:
        return marcum_zero_alpha(order, point.beta)
    return marcum_half_odd(order, point).value


def _snap_half(x: float) -> float:
    """반홀수 격자에서 FRACTION_TOLERANCE 이내면 격자점으로"""
    nearest = math.floor(x) + 0.5
    return nearest if abs(x - nearest) <= FRACTION_TOLERANCE else x


def marcum_bounds(m: float, point: EvalPoint) -> BoundInterval:
    """Q_{⌊M⌋_{0.5}}(α,β) <= Q_M(α,β) <= Q_{⌈M⌉_{0.5}}(α,β), M > 0.5, β > 0"""
    m = require_finite(m, 'm')
    if not m > 0.5:
        raise DomainError(f"marcum bounds need M > 0.5, got {m}", reason="order_floor", field="m")
    if not point.beta > 0:
        raise DomainError("marcum bounds need beta > 0", reason="nonpositive_argument", field="beta")

    m = _snap_half(m)
    if is_half_odd(m):
        value = _marcum_at(m, point)
        return BoundInterval(lower=value, upper=value, degenerate=True)

    lower = _marcum_at(floor_half(m), point)
    upper = _marcum_at(ceil_half(m), point)
    logger.debug(f"marcum_bounds M={m} -> [{lower!r}, {upper!r}]")
    return BoundInterval(lower=lower, upper=upper, degenerate=False)


def _check_nuttall_orders(m: float, n: float, point: EvalPoint) -> OrderSpec:
    """각 전제 조건 위반을 이름 붙은 사유로 보고"""
    m = require_finite(m, 'm')
    n = require_finite(n, 'n')
    if not m > 0.5:
        raise DomainError(f"Nuttall bounds need M > 0.5, got {m}", reason="order_floor", field="m")
    if not n > 0.5:
        raise DomainError(f"Nuttall bounds need N > 0.5, got {n}", reason="order_floor", field="n")
    if m - n < 1.0 - FRACTION_TOLERANCE:
        raise DomainError(f"Nuttall bounds need M >= N + 1 (M={m}, N={n})", reason="spacing", field="m")

    order = OrderSpec.nuttall(m, n)
    gap = abs(order.frac_m - order.frac_n)
    if min(gap, 1.0 - gap) > FRACTION_TOLERANCE:
        raise DomainError(f"fractional parts of M and N differ (M={m}, N={n})",
                          reason="fractional_mismatch", field="n")
    if not (point.alpha > 0 and point.beta > 0):
        raise DomainError("Nuttall bounds need alpha > 0 and beta > 0", reason="nonpositive_argument")
    return order


def rounded_pairs(order: OrderSpec) -> Tuple[HalfOddPair, HalfOddPair]:
    """M 을 내림/올림하고 N 은 정수 간격 M-N 을 유지해서 따라감"""
    spacing = round(order.order_diff)
    m = _snap_half(order.m)
    lower_m = floor_half(m) if not is_half_odd(m) else m
    upper_m = ceil_half(m) if not is_half_odd(m) else m
    # N ∈ (0.5, 1.5) 이면 하한 쌍은 N = 0.5
    return (HalfOddPair.from_orders(lower_m, lower_m - spacing),
            HalfOddPair.from_orders(upper_m, upper_m - spacing))


def _rounded_interval(order: OrderSpec, point: EvalPoint,
                      evaluate: Callable[[HalfOddPair, EvalPoint], ClosedFormResult]) -> BoundInterval:
    lower_pair, upper_pair = rounded_pairs(order)
    if lower_pair == upper_pair:
        value = evaluate(lower_pair, point).value
        return BoundInterval(lower=value, upper=value, degenerate=True)

    lower = evaluate(lower_pair, point).value
    upper = evaluate(upper_pair, point).value
    logger.debug(f"{evaluate.__name__} bounds M={order.m} N={order.n} -> [{lower!r}, {upper!r}]")
    return BoundInterval(lower=lower, upper=upper, degenerate=False)


def norm_nuttall_bounds(m: float, n: float, point: EvalPoint) -> BoundInterval:
    """정규화 Nuttall 상/하한 (δ_M = δ_N, M >= N+1)"""
    order = _check_nuttall_orders(m, n, point)
    return _rounded_interval(order, point, norm_nuttall_half_odd)


def std_nuttall_bounds(m: float, n: float, point: EvalPoint) -> BoundInterval:
    """표준 Nuttall 상/하한 - 추가로 α >= 1"""
    order = _check_nuttall_orders(m, n, point)
    if point.alpha < 1.0:
        raise DomainError("alpha below 1: standard-Nuttall monotonicity not guaranteed",
                          reason="alpha_below_one", field="alpha")
    return _rounded_interval(order, point, nuttall_half_odd)
