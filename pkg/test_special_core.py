# test_special_core.py - 기초 특수 함수 테스트
import math

import pytest
from scipy import special

from special_core import (
    bessel_i,
    binomial,
    ceil_half,
    erfc,
    floor_half,
    gamma_ratio,
    gaussian_q,
    is_half_odd,
    ln_gamma,
    log_bessel_i,
    log_reg_upper_gamma,
    lower_inc_gamma,
    pochhammer,
    reg_lower_gamma,
    reg_upper_gamma,
    sgn,
    upper_inc_gamma,
)
from utils.error_handler import DomainError, NumericOverflowError

GAMMA_GRID = (0.5, 1.0, 2.5, 7.0, 20.0, 60.0)


def test_ln_gamma_half():
    assert ln_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-14)


@pytest.mark.parametrize("z", [0.0, -1.0])
def test_ln_gamma_rejects_nonpositive(z):
    with pytest.raises(DomainError) as info:
        ln_gamma(z)
    assert info.value.reason == "nonpositive_argument"


def test_ln_gamma_rejects_nan():
    with pytest.raises(DomainError) as info:
        ln_gamma(math.nan)
    assert info.value.reason == "not_finite"


@pytest.mark.parametrize("r", GAMMA_GRID)
@pytest.mark.parametrize("x", GAMMA_GRID)
def test_regularized_gamma_against_scipy(r, x):
    assert reg_lower_gamma(r, x) == pytest.approx(special.gammainc(r, x), rel=1e-12, abs=1e-300)
    assert reg_upper_gamma(r, x) == pytest.approx(special.gammaincc(r, x), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("r", GAMMA_GRID + (100.0,))
@pytest.mark.parametrize("x", GAMMA_GRID + (100.0,))
def test_complements_sum_to_one(r, x):
    assert abs(reg_lower_gamma(r, x) + reg_upper_gamma(r, x) - 1.0) <= 1e-13


def test_zero_argument_edges():
    assert reg_lower_gamma(2.0, 0.0) == 0.0
    assert reg_upper_gamma(2.0, 0.0) == 1.0
    assert lower_inc_gamma(3.0, 0.0) == 0.0


def test_log_upper_gamma_far_tail():
    """Q(2, x) = e^{-x}(1+x) - x = 1000 에서도 언더플로 없이 로그값"""
    assert log_reg_upper_gamma(2.0, 1000.0) == pytest.approx(-1000.0 + math.log(1001.0), rel=1e-12)


def test_unnormalized_gamma():
    assert upper_inc_gamma(1.0, 3.0) == pytest.approx(math.exp(-3.0), rel=1e-14)
    assert lower_inc_gamma(1.0, 3.0) == pytest.approx(1.0 - math.exp(-3.0), rel=1e-14)


@pytest.mark.parametrize("r,x", [(0.0, 1.0), (1.0, -0.5)])
def test_gamma_domain(r, x):
    with pytest.raises(DomainError):
        reg_upper_gamma(r, x)


def test_gamma_ratio():
    assert gamma_ratio(0.0, 2.5, 1.5) == pytest.approx(reg_upper_gamma(2.5, 1.5), rel=1e-13)
    # Γ(3, x)/Γ(1) = Γ(3) Q(3, x)
    assert gamma_ratio(2.0, 1.0, 2.0) == pytest.approx(2.0 * special.gammaincc(3.0, 2.0), rel=1e-12)
    values = [gamma_ratio(0.5, r, 2.0) for r in (0.5, 1.0, 1.5, 2.0, 4.0)]
    assert values == sorted(values)


def test_gamma_ratio_overflow():
    with pytest.raises(NumericOverflowError):
        gamma_ratio(200.0, 1.0, 1.0)


def test_error_functions():
    assert gaussian_q(0.0) == 0.5
    assert 2.0 * gaussian_q(1.0) == pytest.approx(0.3173105078629141, rel=1e-14)
    for z in (-3.0, 0.2, 1.7, 9.5):
        assert erfc(z) == pytest.approx(special.erfc(z), rel=1e-13)
        assert gaussian_q(z) == 0.5 * math.erfc(z / math.sqrt(2.0))


def test_pochhammer():
    assert pochhammer(3, 2) == (12.0, math.log(12.0), True)
    assert pochhammer(4, 0).value == 1.0

    large = pochhammer(100, 100)
    assert not large.exact
    assert large.log_value == pytest.approx(math.lgamma(200) - math.lgamma(100), rel=1e-14)

    with pytest.raises(DomainError):
        pochhammer(0, 2)


def test_binomial_and_sign():
    assert binomial(5, 2) == 10
    assert [sgn(v) for v in (-2.0, 0.0, 3.0)] == [-1, 0, 1]


def test_half_integer_rounding():
    assert is_half_odd(0.5) and is_half_odd(2.5)
    assert not is_half_odd(2.0) and not is_half_odd(-0.5) and not is_half_odd(2.7)

    assert floor_half(2.7) == 2.5 and ceil_half(2.7) == 3.5
    assert floor_half(2.5) == ceil_half(2.5) == 2.5
    assert floor_half(0.7) == 0.5
    assert floor_half(3.0) == 2.5 and ceil_half(3.0) == 3.5
    assert floor_half(2.7).index == 3


def test_floor_half_below_lattice():
    with pytest.raises(DomainError) as info:
        floor_half(0.3)
    assert info.value.reason == "not_half_odd"


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.7])
@pytest.mark.parametrize("z", [0.1, 1.0, 10.0, 50.0])
def test_bessel_i_against_scipy(nu, z):
    assert bessel_i(nu, z) == pytest.approx(special.iv(nu, z), rel=1e-12)


def test_bessel_i_edges():
    assert bessel_i(0.0, 0.0) == 1.0
    assert bessel_i(1.5, 0.0) == 0.0
    with pytest.raises(DomainError) as info:
        bessel_i(1.0, 301.0)
    assert info.value.reason == "argument_range"
    with pytest.raises(DomainError) as info:
        bessel_i(-1.5, 1.0)
    assert info.value.reason == "order_floor"


def test_log_bessel_i_large_argument():
    expected = math.log(special.ive(1.0, 1000.0)) + 1000.0
    assert log_bessel_i(1.0, 1000.0) == pytest.approx(expected, rel=1e-12)
    assert log_bessel_i(2.5, 0.0) == -math.inf
