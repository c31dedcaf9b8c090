# closed_form.py - 반홀수 차수의 닫힌 형식 (Nuttall Q, Marcum Q)
"""
Exact finite-sum evaluators for half-odd orders.

* nuttall_half_odd / norm_nuttall_half_odd: finite double sum over k and l of
  incomplete gamma brackets;
* marcum_half_odd: Pochhammer form built on the half-odd Bessel finite sum,
  plus the Gaussian Q pair that gives Q_0.5;
* li_kam_marcum_half_odd: elementary triple sum, kept as an independent route
  for the equivalence check.

Every evaluator returns a ClosedFormResult whose conditioning is
Σ|pieces| / |value|. Above CONDITIONING_LIMIT the value is still returned but
a warning is logged and callers are expected to fall back to the series.
"""
import logging
import math
from typing import Callable, Iterable, List, Tuple

from domain_models import ClosedFormResult, EvalPoint, HalfOdd, HalfOddPair
from special_core import (
    bessel_i,
    binomial,
    erfc,
    gaussian_q,
    log_reg_lower_gamma,
    log_upper_inc_gamma,
    pochhammer,
    reg_upper_gamma,
    sgn,
)
from utils.config import get_config
from utils.error_handler import ConvergenceError, DomainError, NumericOverflowError

logger = logging.getLogger(__name__)

config = get_config()

_LOG_MAX = 709.0
_LN2 = math.log(2.0)
_LN_PI = math.log(math.pi)

# (부호, ln|크기|) 조각
Piece = Tuple[int, float]
Bracket = Callable[[int, int, EvalPoint], List[Piece]]


def _log_power(base: float, exponent: int) -> float:
    """ln(base^exponent), 0^0 = 1"""
    if exponent == 0:
        return 0.0
    if base == 0:
        return -math.inf
    return exponent * math.log(base)


def _log_lower_inc_gamma(a: float, y: float) -> float:
    return math.lgamma(a) + log_reg_lower_gamma(a, y)


def _accumulate(pieces: Iterable[Piece], routine: str) -> Tuple[float, float]:
    """조각 합산 - (값, 조건수)"""
    signed = []
    for sign, log_magnitude in pieces:
        if sign == 0 or log_magnitude == -math.inf:
            continue
        if log_magnitude > _LOG_MAX:
            raise NumericOverflowError(f"{routine}: partial term overflows (log = {log_magnitude:.6g})",
                                       quantity=routine)
        signed.append(sign * math.exp(log_magnitude))

    value = math.fsum(signed)
    magnitude = math.fsum(abs(v) for v in signed)
    if magnitude == 0:
        return 0.0, 1.0
    if value == 0:
        return 0.0, math.inf
    return value, magnitude / abs(value)


def _finish(value: float, conditioning: float, routine: str) -> ClosedFormResult:
    limit = config.get_conditioning_limit()
    if not conditioning <= limit:
        logger.warning(f"⚠️ {routine}: 조건수 {conditioning:.3e} > {limit:.0e} - 정확도 저하, 급수 사용 권장")
    return ClosedFormResult(value=value, conditioning=conditioning)


# ---------------------------------------------------------------- Nuttall 반홀수 닫힌 형식

def incomplete_gamma_bracket(l: int, m_minus_n: int, point: EvalPoint) -> List[Piece]:
    """
    [(−1)^{m−n−l−1} Γ(a, (β+α)²/2) − sgn(β−α)^{l+1} γ(a, (β−α)²/2) + Γ(a)], a = (l+1)/2

    sgn^{l+1} = +1 이면 Γ(a) − γ(a,y) = Γ(a,y) 로 뺄셈 없이 계산.
    """
    a = (l + 1) / 2.0
    alpha, beta = point.alpha, point.beta
    parity = -1 if (m_minus_n - l - 1) % 2 else 1
    pieces = [(parity, log_upper_inc_gamma(a, (beta + alpha) ** 2 / 2.0))]

    y = (beta - alpha) ** 2 / 2.0
    sign_power = sgn(beta - alpha) ** (l + 1)
    if sign_power == 1:
        pieces.append((1, log_upper_inc_gamma(a, y)))
    else:
        pieces.append((1, math.lgamma(a)))
        if sign_power == -1:
            pieces.append((1, _log_lower_inc_gamma(a, y)))
    return pieces


def _i_mnk_pieces(pair: HalfOddPair, k: int, point: EvalPoint, bracket: Bracket) -> List[Piece]:
    """𝓘^k_{m,n} 의 조각들, 외부 부호 (−1)^{k+1} 포함"""
    m_minus_n = pair.m_index - pair.n_index
    big_l = m_minus_n + k
    outer = -1 if k % 2 == 0 else 1
    log_alpha = math.log(point.alpha)

    pieces = []
    for l in range(big_l + 1):
        log_coef = math.log(binomial(big_l, l)) + (l - 1) / 2.0 * _LN2 + (big_l - l) * log_alpha
        for sign, log_magnitude in bracket(l, m_minus_n, point):
            pieces.append((outer * sign, log_coef + log_magnitude))
    return pieces


def i_mnk_term(pair: HalfOddPair, k: int, point: EvalPoint,
               bracket: Bracket = incomplete_gamma_bracket) -> float:
    """𝓘^k_{m,n}(α,β), 0 <= k <= n−1"""
    point.require_positive_alpha("i_mnk_term")
    if not 0 <= k <= pair.n_index - 1:
        raise DomainError(f"k must lie in [0, {pair.n_index - 1}], got {k}", reason="index_range", field="k")
    value, _ = _accumulate(_i_mnk_pieces(pair, k, point, bracket), "i_mnk_term")
    return value


def _theorem_sum(pair: HalfOddPair, point: EvalPoint, log_prefactor: float,
                 bracket: Bracket, routine: str) -> ClosedFormResult:
    """(−1)^n e^{log_prefactor} Σ_k (n−k)_{n−1} (2α)^k / k! · 𝓘^k"""
    n = pair.n_index
    sign_n = -1 if n % 2 else 1
    log_two_alpha = math.log(2.0 * point.alpha)

    pieces = []
    for k in range(n):
        log_weight = (log_prefactor + pochhammer(n - k, n - 1).log_value
                      + k * log_two_alpha - math.lgamma(k + 1.0))
        for sign, log_magnitude in _i_mnk_pieces(pair, k, point, bracket):
            pieces.append((sign_n * sign, log_weight + log_magnitude))

    value, conditioning = _accumulate(pieces, routine)
    logger.debug(f"{routine} m={pair.m_index} n={n} pieces={len(pieces)} cond={conditioning:.3e}")
    return _finish(value, conditioning, routine)


def nuttall_half_odd(pair: HalfOddPair, point: EvalPoint,
                     bracket: Bracket = incomplete_gamma_bracket) -> ClosedFormResult:
    """표준 Nuttall Q_{M,N}, M = m−0.5, N = n−0.5, m >= n >= 1"""
    point.require_positive_alpha("nuttall_half_odd")
    log_prefactor = (-pair.n_index + 0.5) * math.log(2.0 * point.alpha) - 0.5 * _LN_PI
    return _theorem_sum(pair, point, log_prefactor, bracket, "nuttall_half_odd")


def norm_nuttall_half_odd(pair: HalfOddPair, point: EvalPoint,
                          bracket: Bracket = incomplete_gamma_bracket) -> ClosedFormResult:
    """정규화 Nuttall 𝒬_{M,N} - 접두 인자 2^{−n+1/2} / (√π α^{2n−1})"""
    point.require_positive_alpha("norm_nuttall_half_odd")
    n = pair.n_index
    log_prefactor = (-n + 0.5) * _LN2 - 0.5 * _LN_PI - (2 * n - 1) * math.log(point.alpha)
    return _theorem_sum(pair, point, log_prefactor, bracket, "norm_nuttall_half_odd")


# ---------------------------------------------------------------- half-odd Bessel

def _scaled_half_odd_bessel(n: int, z: float) -> Tuple[float, float]:
    """
    e^{−z} I_{n−1/2}(z) 유한합 - (값, Σ|항|).

    e^{−2z}(1 − (−1)^k e^{2z}) = e^{−2z} − (−1)^k 이므로 e^z 로 인한 오버플로 없음.
    """
    sign_n = -1 if n % 2 else 1
    log_two_z = math.log(2.0 * z)
    log_prefactor = (-n + 0.5) * log_two_z - 0.5 * _LN_PI
    decay = math.exp(-2.0 * z)

    terms = []
    for k in range(n):
        weight = math.exp(log_prefactor + pochhammer(n - k, n - 1).log_value
                          + k * log_two_z - math.lgamma(k + 1.0))
        factor = decay - 1.0 if k % 2 == 0 else decay + 1.0
        terms.append(sign_n * weight * factor)
    return math.fsum(terms), math.fsum(abs(t) for t in terms)


def bessel_i_half_odd(n_index: int, z: float) -> float:
    """I_{n−1/2}(z) 유한합, z > 0"""
    if int(n_index) != n_index or n_index < 1:
        raise DomainError(f"n_index must be an integer >= 1, got {n_index}", reason="order_floor", field="n")
    if not (math.isfinite(z) and z > 0):
        raise DomainError(f"bessel_i_half_odd requires finite z > 0, got {z}", reason="nonpositive_argument",
                          field="z")
    if z > 300.0:
        raise NumericOverflowError(f"I_{n_index - 0.5}({z}) overflows the direct finite sum; use log_bessel_i",
                                   quantity="bessel_i_half_odd")
    scaled, _ = _scaled_half_odd_bessel(int(n_index), z)
    return scaled * math.exp(z)


# ---------------------------------------------------------------- Marcum

def marcum_zero_alpha(m: float, beta: float) -> float:
    """Q_M(0,β) = Γ(M, β²/2)/Γ(M)"""
    if not (math.isfinite(m) and m > 0):
        raise DomainError(f"order M must be positive, got {m}", reason="order_floor", field="m")
    if not (math.isfinite(beta) and beta >= 0):
        raise DomainError(f"beta must be non-negative, got {beta}", reason="nonpositive_argument", field="beta")
    return reg_upper_gamma(m, beta ** 2 / 2.0)


def marcum_half_odd(m: float, point: EvalPoint) -> ClosedFormResult:
    """
    Q_M(α,β) = e^{−(α²+β²)/2} Σ_{n=1}^{M−0.5} (β/α)^{n−1/2} I_{n−1/2}(αβ) + Q(β+α) + Q(β−α)

    I_{n−1/2} 는 유한합으로 계산하고, 작은 αβ 에서 그 합의 상쇄가
    CONDITIONING_LIMIT 을 넘으면 멱급수로 대체한다. α = 0 은 marcum_zero_alpha.
    """
    order = HalfOdd(m)
    alpha, beta = point.alpha, point.beta
    if alpha == 0:
        return ClosedFormResult(value=marcum_zero_alpha(order, beta), conditioning=1.0)

    limit = config.get_conditioning_limit()
    z = alpha * beta
    # Q_{0.5} 쌍
    terms = [gaussian_q(beta + alpha), gaussian_q(beta - alpha)]
    magnitudes = list(terms)

    if z > 0:
        log_ratio = math.log(beta / alpha)
        log_gauss = -(beta - alpha) ** 2 / 2.0
        for n in range(1, order.index):
            scaled, absolute = _scaled_half_odd_bessel(n, z)
            if not (scaled > 0 and absolute / scaled <= limit):
                if z > 300.0:
                    raise NumericOverflowError(f"marcum_half_odd: Bessel factor unresolved at z={z}",
                                               quantity="marcum_half_odd")
                scaled = bessel_i(n - 0.5, z) * math.exp(-z)
                absolute = scaled
            if scaled <= 0:
                continue
            log_outer = log_gauss + (n - 0.5) * log_ratio
            if log_outer + math.log(absolute) > _LOG_MAX:
                raise NumericOverflowError(f"marcum_half_odd: term {n} overflows", quantity="marcum_half_odd")
            # 유한합 내부의 상쇄도 조건수에 반영
            terms.append(math.exp(log_outer + math.log(scaled)))
            magnitudes.append(math.exp(log_outer + math.log(absolute)))

    value = math.fsum(terms)
    magnitude = math.fsum(magnitudes)
    conditioning = magnitude / value if value > 0 else (1.0 if magnitude == 0 else math.inf)
    return _finish(min(value, 1.0), conditioning, "marcum_half_odd")


def _li_kam_zero_alpha(order: HalfOdd, beta: float) -> ClosedFormResult:
    """erfc(β/√2) + e^{−β²/2}/√(2π) Σ_k β^{2k+1}/2^{k−1} Σ_q (−1)^q / ((k−q)! q! (2q+1))"""
    head = erfc(beta / math.sqrt(2.0))
    pieces = [(1, math.log(head))] if head > 0 else []
    base = -beta ** 2 / 2.0 - 0.5 * math.log(2.0 * math.pi)
    for k in range(order.index - 1):
        log_outer = base + _log_power(beta, 2 * k + 1) - (k - 1) * _LN2
        for q in range(k + 1):
            log_inner = -math.lgamma(k - q + 1.0) - math.lgamma(q + 1.0) - math.log(2.0 * q + 1.0)
            pieces.append((-1 if q % 2 else 1, log_outer + log_inner))
    value, conditioning = _accumulate(pieces, "li_kam_marcum_half_odd")
    return ClosedFormResult(value=value, conditioning=conditioning)


def _log_folded_exponential(q: int, z: float) -> float:
    """
    ln f_{2q}(z), f_{2q}(z) = e^{z} e_{2q}(−z) − e^{−z} e_{2q}(z) = 2 Σ_{j odd > 2q} C(j−1, 2q) z^j / j!

    e_n 은 n 차까지 자른 지수 급수. 항이 모두 양수라 상쇄가 없다.
    """
    j = 2 * q + 1
    log_term = _LN2 + j * math.log(z) - math.lgamma(j + 1.0)
    log_terms = [log_term]
    log_peak = log_term
    max_terms = config.get_series_max_terms()
    while True:
        ratio = j * z * z / ((j + 1 - 2 * q) * (j - 2 * q) * (j + 2))
        j += 2
        log_term += math.log(ratio)
        log_terms.append(log_term)
        log_peak = max(log_peak, log_term)
        if ratio < 1 and log_term < log_peak - 40.0:
            break
        if len(log_terms) >= max_terms:
            raise ConvergenceError(f"folded exponential series did not settle (q={q}, z={z})",
                                   routine="li_kam_marcum_half_odd", iterations=len(log_terms))
    return log_peak + math.log(math.fsum(math.exp(t - log_peak) for t in log_terms))


def li_kam_marcum_half_odd(m: float, point: EvalPoint) -> ClosedFormResult:
    """
    erfc 쌍 + 삼중합:
    1/(α√(2π)) Σ_k β^{2k}/2^k Σ_q (−1)^q (2q)!/((k−q)! q!) Σ_i [(−1)^i e^{−(β−α)²/2} − e^{−(β+α)²/2}] / ((αβ)^{2q−i} i!)

    i 에 대한 합은 z = αβ 로 β^{2k−2q} α^{−2q} e^{−(α²+β²)/2} f_{2q}(z) 와 같아서
    (k, q) 조각마다 양수 급수 하나로 계산한다. β = 0 이면 삼중합은 0.
    """
    order = HalfOdd(m)
    alpha, beta = point.alpha, point.beta
    if alpha == 0:
        result = _li_kam_zero_alpha(order, beta)
        return _finish(result.value, result.conditioning, "li_kam_marcum_half_odd")

    pieces = []
    for argument in (beta + alpha, beta - alpha):
        half_erfc = 0.5 * erfc(argument / math.sqrt(2.0))
        if half_erfc > 0:
            pieces.append((1, math.log(half_erfc)))

    if beta > 0 and order.index > 1:
        log_alpha, log_beta = math.log(alpha), math.log(beta)
        z = alpha * beta
        folded = [_log_folded_exponential(q, z) for q in range(order.index - 1)]
        base = -log_alpha - 0.5 * math.log(2.0 * math.pi) - (alpha ** 2 + beta ** 2) / 2.0
        for k in range(order.index - 1):
            for q in range(k + 1):
                log_piece = (base - k * _LN2 + math.lgamma(2.0 * q + 1.0)
                             - math.lgamma(k - q + 1.0) - math.lgamma(q + 1.0)
                             + (2 * k - 2 * q) * log_beta - 2 * q * log_alpha + folded[q])
                pieces.append((-1 if q % 2 else 1, log_piece))

    value, conditioning = _accumulate(pieces, "li_kam_marcum_half_odd")
    return _finish(value, conditioning, "li_kam_marcum_half_odd")
