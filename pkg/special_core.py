# special_core.py - 기초 특수 함수 (감마, 불완전 감마, erfc, 베셀 I, 반홀수 반올림)
"""
Scalar special functions shared by every evaluator.

Anything that can overflow (Γ, Pochhammer, Bessel series) is carried in the
log domain and exponentiated once at the end.
"""
import math
import sys
from typing import NamedTuple, Tuple

from domain_models import HalfOdd
from utils.config import get_config
from utils.error_handler import ConvergenceError, DomainError, NumericOverflowError

config = get_config()

_EPS = sys.float_info.epsilon
_FPMIN = sys.float_info.min / _EPS
_LOG_MAX = math.log(sys.float_info.max)
_EXACT_LIMIT = 2 ** 53
BESSEL_DIRECT_LIMIT = 300.0


def _require_finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}", reason="not_finite", field=name)
    return value


def _guarded_exp(log_value: float, quantity: str) -> float:
    """exp(log_value), 표현 범위를 넘으면 NumericOverflowError"""
    if log_value > _LOG_MAX:
        raise NumericOverflowError(f"{quantity} exceeds the double range (log = {log_value:.6g})",
                                   quantity=quantity)
    return math.exp(log_value)


# ---------------------------------------------------------------- gamma

def ln_gamma(z: float) -> float:
    """ln Γ(z), z > 0"""
    z = _require_finite(z, 'z')
    if not z > 0:
        raise DomainError(f"ln_gamma requires z > 0, got {z}", reason="nonpositive_argument", field="z")
    return math.lgamma(z)


def _validate_gamma_args(r: float, x: float) -> Tuple[float, float]:
    r = _require_finite(r, 'r')
    x = _require_finite(x, 'x')
    if not r > 0:
        raise DomainError(f"incomplete gamma requires r > 0, got {r}", reason="nonpositive_argument", field="r")
    if x < 0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x}", reason="nonpositive_argument", field="x")
    return r, x


def _log_prefactor(r: float, x: float) -> float:
    """ln(x^r e^{-x} / Γ(r))"""
    return r * math.log(x) - x - math.lgamma(r)


def _lower_series(r: float, x: float) -> float:
    """ln P(r,x) - 급수 분기 (x < r+1)"""
    max_iter = config.get_gamma_max_iterations()
    ap = r
    delta = total = 1.0 / r
    for i in range(1, max_iter + 1):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * _EPS:
            return math.log(total) + _log_prefactor(r, x)
    raise ConvergenceError(f"P({r}, {x}) series did not converge", routine="reg_lower_gamma",
                           iterations=max_iter)


def _upper_continued_fraction(r: float, x: float) -> float:
    """ln Q(r,x) - modified Lentz 연분수 (x >= r+1)"""
    max_iter = config.get_gamma_max_iterations()
    b = x + 1.0 - r
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - r)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= _EPS:
            return math.log(h) + _log_prefactor(r, x)
    raise ConvergenceError(f"Q({r}, {x}) continued fraction did not converge", routine="reg_upper_gamma",
                           iterations=max_iter)


def log_reg_lower_gamma(r: float, x: float) -> float:
    """ln P(r,x)"""
    r, x = _validate_gamma_args(r, x)
    if x == 0:
        return -math.inf
    if x < r + 1.0:
        return _lower_series(r, x)
    return math.log1p(-math.exp(_upper_continued_fraction(r, x)))


def log_reg_upper_gamma(r: float, x: float) -> float:
    """ln Q(r,x) - x ≫ r 에서도 언더플로 없음"""
    r, x = _validate_gamma_args(r, x)
    if x == 0:
        return 0.0
    if x < r + 1.0:
        return math.log1p(-math.exp(_lower_series(r, x)))
    return _upper_continued_fraction(r, x)


def reg_lower_gamma(r: float, x: float) -> float:
    """P(r,x) = γ(r,x)/Γ(r)"""
    r, x = _validate_gamma_args(r, x)
    if x == 0:
        return 0.0
    if x < r + 1.0:
        return math.exp(_lower_series(r, x))
    return 1.0 - math.exp(_upper_continued_fraction(r, x))


def reg_upper_gamma(r: float, x: float) -> float:
    """Q(r,x) = Γ(r,x)/Γ(r)"""
    r, x = _validate_gamma_args(r, x)
    if x == 0:
        return 1.0
    if x < r + 1.0:
        return 1.0 - math.exp(_lower_series(r, x))
    return math.exp(_upper_continued_fraction(r, x))


def log_upper_inc_gamma(r: float, x: float) -> float:
    """ln Γ(r,x)"""
    return math.lgamma(r) + log_reg_upper_gamma(r, x)


def upper_inc_gamma(r: float, x: float) -> float:
    """Γ(r,x) (정규화 안 됨)"""
    return _guarded_exp(log_upper_inc_gamma(r, x), f"Gamma({r}, {x})")


def lower_inc_gamma(r: float, x: float) -> float:
    """γ(r,x) (정규화 안 됨)"""
    log_p = log_reg_lower_gamma(r, x)
    if log_p == -math.inf:
        return 0.0
    return _guarded_exp(math.lgamma(r) + log_p, f"gamma({r}, {x})")


def gamma_ratio(s: float, r: float, x: float) -> float:
    """Γ(r+s, x) / Γ(r) - r 에 대해 순증가"""
    s = _require_finite(s, 's')
    if s < 0:
        raise DomainError(f"gamma_ratio requires s >= 0, got {s}", reason="nonpositive_argument", field="s")
    r, x = _validate_gamma_args(r, x)
    if not x > 0:
        raise DomainError("gamma_ratio requires x > 0", reason="nonpositive_argument", field="x")
    log_value = math.lgamma(r + s) - math.lgamma(r) + log_reg_upper_gamma(r + s, x)
    return _guarded_exp(log_value, f"Gamma({r + s}, {x})/Gamma({r})")


# ---------------------------------------------------------------- error functions

def erfc(z: float) -> float:
    return math.erfc(z)


def gaussian_q(z: float) -> float:
    """Q(z) = erfc(z/√2)/2"""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


# ---------------------------------------------------------------- combinatorics

class Pochhammer(NamedTuple):
    value: float
    log_value: float
    exact: bool


def pochhammer(m: int, n: int) -> Pochhammer:
    """상승 계승 (m)_n = (m+n-1)!/(m-1)!"""
    if m < 1 or n < 0 or int(m) != m or int(n) != n:
        raise DomainError(f"pochhammer needs integers m >= 1, n >= 0 (got {m}, {n})",
                          reason="nonpositive_argument")
    m, n = int(m), int(n)
    log_value = math.lgamma(m + n) - math.lgamma(m)
    exact = math.perm(m + n - 1, n)
    if exact < _EXACT_LIMIT:
        return Pochhammer(float(exact), math.log(exact), True)
    value = math.exp(log_value) if log_value < _LOG_MAX else math.inf
    return Pochhammer(value, log_value, False)


def binomial(n: int, k: int) -> int:
    return math.comb(n, k)


def sgn(z: float) -> int:
    """부호 함수, sgn(0) = 0"""
    if z > 0:
        return 1
    if z < 0:
        return -1
    return 0


# ---------------------------------------------------------------- half-integer rounding

def is_half_odd(x: float) -> bool:
    twice = 2.0 * x
    return twice > 0 and twice == math.floor(twice) and int(twice) % 2 == 1


def floor_half(x: float) -> HalfOdd:
    """왼쪽으로 가장 가까운 반홀수 ⌊x-0.5⌋+0.5"""
    return HalfOdd(math.floor(x - 0.5) + 0.5)


def ceil_half(x: float) -> HalfOdd:
    """오른쪽으로 가장 가까운 반홀수 ⌈x+0.5⌉-0.5"""
    return HalfOdd(math.ceil(x + 0.5) - 0.5)


# ---------------------------------------------------------------- modified Bessel I

def _validate_bessel(nu: float, z: float) -> Tuple[float, float]:
    nu = _require_finite(nu, 'nu')
    z = _require_finite(z, 'z')
    if not nu > -1:
        raise DomainError(f"bessel_i requires nu > -1, got {nu}", reason="order_floor", field="nu")
    if z < 0:
        raise DomainError(f"bessel_i requires z >= 0, got {z}", reason="nonpositive_argument", field="z")
    if z == 0 and nu < 0:
        raise DomainError(f"I_{nu}(0) diverges for negative order", reason="nonpositive_argument", field="z")
    return nu, z


def _log_series_terms(nu: float, z: float):
    """ln 항 (z/2)^{ν+2k}/(k! Γ(ν+k+1)) 를 차례로 생성 (피크 통과 후 종료)"""
    log_half = math.log(z / 2.0)
    log_term = nu * log_half - math.lgamma(nu + 1.0)
    peak = log_term
    k = 0
    while True:
        yield log_term
        peak = max(peak, log_term)
        if k > z and log_term < peak - 40.0:
            return
        k += 1
        log_term += 2.0 * log_half - math.log(k) - math.log(nu + k)


def bessel_i(nu: float, z: float) -> float:
    """I_ν(z) 멱급수, 0 <= z <= 300"""
    nu, z = _validate_bessel(nu, z)
    if z > BESSEL_DIRECT_LIMIT:
        raise DomainError(f"bessel_i is limited to z <= {BESSEL_DIRECT_LIMIT:g}; use log_bessel_i",
                          reason="argument_range", field="z")
    if z == 0:
        return 1.0 if nu == 0 else 0.0

    quarter = (z / 2.0) ** 2
    term = math.exp(nu * math.log(z / 2.0) - math.lgamma(nu + 1.0))
    terms = [term]
    largest = term
    k = 0
    while True:
        k += 1
        term *= quarter / (k * (nu + k))
        terms.append(term)
        largest = max(largest, term)
        if k > z / 2.0 and term <= 1e-2 * _EPS * largest:
            break
    return math.fsum(terms)


def log_bessel_i(nu: float, z: float) -> float:
    """ln I_ν(z), z 상한 없음"""
    nu, z = _validate_bessel(nu, z)
    if z == 0:
        return 0.0 if nu == 0 else -math.inf
    logs = list(_log_series_terms(nu, z))
    peak = max(logs)
    return peak + math.log(math.fsum(math.exp(v - peak) for v in logs))
