# oracle.py - 독립 평가기 (인증된 꼬리를 가진 급수, 적응형 Gauss-Kronrod 적분)
"""
General-order evaluators for the Marcum and Nuttall Q-functions.

Two routes that share nothing but the incomplete gamma function:

* series: Poisson-weighted regularized upper gamma sums, each truncated with a
  certified tail bound;
* quadrature: adaptive G7/K15 refinement of the defining integrals, with the
  exponentially scaled Bessel function from scipy inside the integrand.

They serve as public evaluators for non half-odd orders and as the ground
truth the closed forms and bounds are checked against.
"""
import heapq
import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import ive

from domain_models import EvalPoint, OrderSpec, QuadratureResult, SeriesResult
from special_core import log_reg_upper_gamma, reg_lower_gamma, reg_upper_gamma
from utils.config import get_config
from utils.error_handler import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

config = get_config()

# QUADPACK qk15 노드/가중치
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15개 노드 전체 (대칭 전개)
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5]] = _WG[:3]
_GAUSS[[13, 11, 9]] = _WG[:3]
_GAUSS[7] = _WG[3]

_INITIAL_PANELS = 8
_MAX_TAIL_EXTENSIONS = 20


def _resolve_tol(tol: Optional[float]) -> float:
    tol = config.get_default_tol() if tol is None else float(tol)
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}", reason="nonpositive_argument", field="tol")
    return tol


def _log_add(a: float, b: float) -> float:
    """ln(e^a + e^b)"""
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


# ---------------------------------------------------------------- series

def marcum_series(order: OrderSpec, point: EvalPoint, tol: Optional[float] = None) -> SeriesResult:
    """
    Q_M(α,β) = Σ_k e^{-λ} λ^k/k! · Q(k+M, β²/2), λ = α²/2.

    Truncated at K once the Poisson tail P(K+1, λ) - which bounds every
    omitted term since Q(·,·) <= 1 - drops below tol.
    """
    tol = _resolve_tol(tol)
    m = order.m
    x = point.beta ** 2 / 2.0

    if point.alpha == 0:
        return SeriesResult(value=reg_upper_gamma(m, x), terms_used=1, tail_bound=0.0)
    if x == 0:
        return SeriesResult(value=1.0, terms_used=0, tail_bound=0.0)

    lam = point.alpha ** 2 / 2.0
    log_lam = math.log(lam)
    log_x = math.log(x)
    max_terms = config.get_series_max_terms()

    q = reg_upper_gamma(m, x)
    terms = []
    for k in range(max_terms):
        weight = math.exp(-lam + k * log_lam - math.lgamma(k + 1.0))
        terms.append(weight * q)
        if k >= lam:
            tail = reg_lower_gamma(k + 1.0, lam)
            if tail <= tol:
                value = math.fsum(terms)
                logger.debug(f"marcum_series M={m} terms={k + 1} tail={tail:.3e}")
                return SeriesResult(value=value, terms_used=k + 1, tail_bound=tail)
        # Q(a+1, x) = Q(a, x) + x^a e^{-x} / Γ(a+1)
        a = k + m
        q = min(1.0, q + math.exp(a * log_x - x - math.lgamma(a + 1.0)))

    raise ConvergenceError(f"marcum_series exceeded {max_terms} terms", routine="marcum_series",
                           iterations=max_terms)


def norm_nuttall_series(order: OrderSpec, point: EvalPoint, tol: Optional[float] = None) -> SeriesResult:
    """
    𝒬_{M,N}(α,β) = e^{-α²/2} Σ_k α^{2k} / (2^{k+(N-M+1)/2} k!) · Γ(k+(M+N+1)/2, β²/2) / Γ(k+N+1)

    Stops once the current term is below tol·partial_sum past the term-ratio
    peak; the tail is majorised geometrically with the last term ratio.
    """
    tol = _resolve_tol(tol)
    point.require_positive_alpha("norm_nuttall_series")
    m = order.m
    n = order.require_n("norm_nuttall_series")

    x = point.beta ** 2 / 2.0
    log_x = math.log(x) if x > 0 else -math.inf
    log_alpha = math.log(point.alpha)
    shape = (m + n + 1.0) / 2.0
    k_min = point.alpha ** 2 / 2.0 + max(0.0, (m - n - 1.0) / 2.0) + 10.0
    max_terms = config.get_series_max_terms()

    # ln Γ(k+shape, x), 재귀 Γ(a+1,x) = aΓ(a,x) + x^a e^{-x}
    log_upper = math.lgamma(shape) + log_reg_upper_gamma(shape, x)
    base = -point.alpha ** 2 / 2.0 - (n - m + 1.0) / 2.0 * math.log(2.0)

    terms = []
    partial = 0.0
    previous_log = -math.inf
    ratio = math.inf
    for k in range(max_terms):
        log_term = (base + 2.0 * k * log_alpha - k * math.log(2.0) - math.lgamma(k + 1.0)
                    + log_upper - math.lgamma(k + n + 1.0))
        term = math.exp(log_term)
        terms.append(term)
        partial += term

        if k >= 1:
            ratio = 0.0 if log_term == -math.inf else math.exp(log_term - previous_log)
            if k >= k_min and term <= tol * partial and ratio < 1.0:
                tail = term * ratio / (1.0 - ratio)
                value = math.fsum(terms)
                logger.debug(f"norm_nuttall_series M={m} N={n} terms={k + 1} tail={tail:.3e}")
                return SeriesResult(value=value, terms_used=k + 1, tail_bound=tail)

        previous_log = log_term
        a = k + shape
        log_upper = _log_add(math.log(a) + log_upper, a * log_x - x)

    detail = "term ratio >= 1 at the cap" if ratio >= 1.0 else f"exceeded {max_terms} terms"
    raise ConvergenceError(f"norm_nuttall_series did not converge: {detail}", routine="norm_nuttall_series",
                           iterations=max_terms)


def nuttall_series(order: OrderSpec, point: EvalPoint, tol: Optional[float] = None) -> SeriesResult:
    """표준 Nuttall = 정규화 급수 × α^N (꼬리 한계도 같은 배율)"""
    normalized = norm_nuttall_series(order, point, tol)
    scale = point.alpha ** order.n
    return SeriesResult(value=normalized.value * scale, terms_used=normalized.terms_used,
                        tail_bound=normalized.tail_bound * scale)


# ---------------------------------------------------------------- quadrature

Integrand = Callable[[np.ndarray], np.ndarray]


def _gauss_kronrod(f: Integrand, a: float, b: float) -> Tuple[float, float]:
    """G7/K15 한 구간 - (K15 값, |K15 - G7|)"""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = f(center + half * _NODES)
    kronrod = half * float(np.dot(_KRONROD, fx))
    gauss = half * float(np.dot(_GAUSS, fx))
    return kronrod, abs(kronrod - gauss)


def _graded(f: Integrand, power: float) -> Tuple[Integrand, float]:
    """x = u^q, q = 1/(power+1) 치환 - 0 에서의 x^power 특이점이 u^0 이 된다"""
    q = 1.0 / (power + 1.0)

    def g(u: np.ndarray) -> np.ndarray:
        with np.errstate(under='ignore'):
            return q * u ** (q - 1.0) * f(u ** q)

    return g, q


def _adaptive_integrate(f: Integrand, a: float, b: float,
                        tol: float, routine: str, power: float = 0.0) -> Tuple[float, float, int]:
    """
    오차가 가장 큰 구간부터 이분하는 적응형 적분.

    power 는 a = 0 에서 피적분함수의 선행 지수 (f ~ x^power). 음수면 치환해서 적분한다.
    """
    if a == 0 and power < 0:
        f, q = _graded(f, power)
        b = b ** (1.0 / q)
    max_depth = config.get_quadrature_max_depth()
    max_panels = config.get_quadrature_max_panels()

    heap = []
    edges = np.linspace(a, b, _INITIAL_PANELS + 1)
    for left, right in zip(edges[:-1], edges[1:]):
        value, error = _gauss_kronrod(f, left, right)
        heapq.heappush(heap, (-error, left, right, value, 0))

    while True:
        total = math.fsum(item[3] for item in heap)
        error = math.fsum(-item[0] for item in heap)
        if error <= tol * max(abs(total), 1e-300):
            return total, error, len(heap)

        neg_error, left, right, _, depth = heapq.heappop(heap)
        if depth >= max_depth:
            raise ConvergenceError(f"{routine}: refinement depth cap ({max_depth}) exceeded near x={left:.6g}",
                                   routine=routine, iterations=depth)
        if len(heap) + 2 > max_panels:
            raise ConvergenceError(f"{routine}: panel cap ({max_panels}) exceeded", routine=routine,
                                   iterations=len(heap))

        middle = 0.5 * (left + right)
        for lo, hi in ((left, middle), (middle, right)):
            value, err = _gauss_kronrod(f, lo, hi)
            heapq.heappush(heap, (-err, lo, hi, value, depth + 1))


def _tail_extent(point: EvalPoint) -> float:
    center = max(point.beta, point.alpha)
    return center + 10.0 + 12.0 * math.sqrt(1.0 + center)


def _tail_majorant(power: float, shift: float, log_scale: float, upper: float) -> float:
    """
    ∫_U^∞ e^{log_scale} x^power e^{-(x-shift)²/2} dx 의 상한.

    지수의 기울기는 x >= U 에서 -d 이하이므로 꼬리 <= 피적분함수(U)/d.
    """
    slope = (upper - shift) - max(power, 0.0) / upper
    if slope <= 0:
        return math.inf
    return math.exp(log_scale + power * math.log(upper) - 0.5 * (upper - shift) ** 2) / slope


def _integrate_to_infinity(integrand, majorant, beta: float, upper: float, tol: float,
                           routine: str, power: float = 0.0) -> QuadratureResult:
    """[β, U] 적분 후 해석적 꼬리 상한이 tol/10 아래가 될 때까지 U 확장"""
    value, error, panels = _adaptive_integrate(integrand, beta, upper, tol, routine, power)
    for _ in range(_MAX_TAIL_EXTENSIONS):
        tail = majorant(upper)
        if tail <= tol / 10.0 * max(abs(value), 1e-300):
            logger.debug(f"{routine}: U={upper:.4g} panels={panels} err={error:.3e} tail={tail:.3e}")
            return QuadratureResult(value=value, abs_error=error + tail, panels=panels, upper_limit=upper)
        extended = upper + 5.0 + math.sqrt(upper)
        extra, extra_error, extra_panels = _adaptive_integrate(integrand, upper, extended, tol, routine)
        value += extra
        error += extra_error
        panels += extra_panels
        upper = extended
    raise ConvergenceError(f"{routine}: tail majorant did not fall below tolerance", routine=routine,
                           iterations=_MAX_TAIL_EXTENSIONS)


def _bessel_scale(nu: float, z: float) -> float:
    """x >= U 에서 Î_ν(αx) <= scale/√(2παx) 가 되도록 잡은 상수"""
    return max(2.0, 2.0 * float(ive(nu, z)) * math.sqrt(2.0 * math.pi * z))


def nuttall_quadrature(order: OrderSpec, point: EvalPoint, tol: Optional[float] = None) -> QuadratureResult:
    """Q_{M,N}(α,β) = ∫_β^∞ x^M e^{-(x²+α²)/2} I_N(αx) dx"""
    tol = _resolve_tol(tol)
    point.require_positive_alpha("nuttall_quadrature")
    m = order.m
    n = order.require_n("nuttall_quadrature")
    alpha = point.alpha

    def integrand(x: np.ndarray) -> np.ndarray:
        with np.errstate(divide='ignore', under='ignore'):
            return np.exp(m * np.log(x) - 0.5 * (x - alpha) ** 2 + np.log(ive(n, alpha * x)))

    upper = _tail_extent(point)
    scale = _bessel_scale(n, alpha * upper)

    def majorant(u: float) -> float:
        log_scale = math.log(scale / math.sqrt(2.0 * math.pi * alpha))
        return _tail_majorant(m - 0.5, alpha, log_scale, u)

    # x -> 0 에서 x^M I_N(αx) ~ x^{M+N}
    return _integrate_to_infinity(integrand, majorant, point.beta, upper, tol, "nuttall_quadrature", m + n)


def marcum_quadrature(order: OrderSpec, point: EvalPoint, tol: Optional[float] = None) -> QuadratureResult:
    """Q_M(α,β) = α^{1-M} ∫_β^∞ x^M e^{-(x²+α²)/2} I_{M-1}(αx) dx; α = 0 은 소인수 극한 피적분함수"""
    tol = _resolve_tol(tol)
    m = order.m
    alpha = point.alpha
    upper = _tail_extent(point)

    if alpha == 0:
        log_norm = -(m - 1.0) * math.log(2.0) - math.lgamma(m)

        def integrand(x: np.ndarray) -> np.ndarray:
            return np.exp((2.0 * m - 1.0) * np.log(x) - 0.5 * x ** 2 + log_norm)

        def majorant(u: float) -> float:
            return _tail_majorant(2.0 * m - 1.0, 0.0, log_norm, u)
    else:
        log_norm = -(m - 1.0) * math.log(alpha)
        scale = _bessel_scale(m - 1.0, alpha * upper)

        def integrand(x: np.ndarray) -> np.ndarray:
            with np.errstate(divide='ignore', under='ignore'):
                return np.exp(m * np.log(x) - 0.5 * (x - alpha) ** 2 + log_norm
                              + np.log(ive(m - 1.0, alpha * x)))

        def majorant(u: float) -> float:
            log_scale = log_norm + math.log(scale / math.sqrt(2.0 * math.pi * alpha))
            return _tail_majorant(m - 0.5, alpha, log_scale, u)

    return _integrate_to_infinity(integrand, majorant, point.beta, upper, tol, "marcum_quadrature",
                                  2.0 * m - 1.0)
