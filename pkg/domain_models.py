# domain_models.py - 도메인 데이터 모델
import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from utils.error_handler import DomainError


def require_finite(value: float, field: str) -> float:
    """NaN/±∞ 거부"""
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{field} must be finite, got {value}", reason="not_finite", field=field)
    return value


class HalfOdd(float):
    """k + 0.5 (k ≥ 0 정수) 형태의 실수"""

    def __new__(cls, value: float):
        value = float(value)
        twice = 2.0 * value
        if not (math.isfinite(twice) and twice > 0 and twice == math.floor(twice) and int(twice) % 2 == 1):
            raise DomainError(f"{value} is not a half-odd integer", reason="not_half_odd")
        return super().__new__(cls, value)

    @property
    def index(self) -> int:
        """정수 인덱스 m = M + 0.5"""
        return int(self + 0.5)


class Method(str, Enum):
    AUTO = "auto"
    CLOSED = "closed"
    SERIES = "series"
    QUADRATURE = "quadrature"


class FunctionId(str, Enum):
    MARCUM = "marcum"
    NUTTALL = "nuttall"
    NUTTALL_NORM = "nuttall-norm"


class SweepAxis(str, Enum):
    BETA = "beta"
    ORDER_SUM = "order-sum"
    ORDER = "order"


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class EvalPoint(_Frozen):
    """(α, β) 인자 쌍"""
    alpha: float
    beta: float

    @field_validator('alpha', 'beta')
    @classmethod
    def validate_argument(cls, v, info):
        v = require_finite(v, info.field_name)
        if v < 0:
            raise DomainError(f"{info.field_name} must be non-negative, got {v}",
                              reason="nonpositive_argument", field=info.field_name)
        return v

    def require_positive_alpha(self, routine: str) -> None:
        """Nuttall 경로는 α > 0 필요 (α^N 으로 나눔)"""
        if not self.alpha > 0:
            raise DomainError(f"{routine} requires alpha > 0", reason="nonpositive_argument", field="alpha")


class OrderSpec(_Frozen):
    """실수 차수 M (Nuttall 이면 N 포함)"""
    m: float
    n: Optional[float] = None

    @field_validator('m')
    @classmethod
    def validate_m(cls, v):
        v = require_finite(v, 'm')
        if not v > 0:
            raise DomainError(f"order M must be positive, got {v}", reason="order_floor", field="m")
        return v

    @field_validator('n')
    @classmethod
    def validate_n(cls, v):
        if v is None:
            return v
        v = require_finite(v, 'n')
        if not v > -1:
            raise DomainError(f"order N must exceed -1, got {v}", reason="order_floor", field="n")
        return v

    @classmethod
    def marcum(cls, m: float) -> "OrderSpec":
        return cls(m=m)

    @classmethod
    def nuttall(cls, m: float, n: float) -> "OrderSpec":
        return cls(m=m, n=n)

    @classmethod
    def from_sum(cls, order_sum: float, diff: float) -> "OrderSpec":
        """v = M+N, c = M-N 로부터 생성"""
        return cls(m=(order_sum + diff) / 2.0, n=(order_sum - diff) / 2.0)

    def require_n(self, routine: str) -> float:
        if self.n is None:
            raise DomainError(f"{routine} requires order N", reason="missing_order", field="n")
        return self.n

    @property
    def frac_m(self) -> float:
        return self.m - math.floor(self.m)

    @property
    def frac_n(self) -> float:
        n = self.require_n("frac_n")
        return n - math.floor(n)

    @property
    def order_sum(self) -> float:
        return self.m + self.require_n("order_sum")

    @property
    def order_diff(self) -> float:
        return self.m - self.require_n("order_diff")


class HalfOddPair(_Frozen):
    """반홀수 닫힌 형식의 정수 인덱스 m = M+0.5, n = N+0.5"""
    m_index: int
    n_index: int

    @model_validator(mode='after')
    def validate_indices(self):
        if self.n_index < 1:
            raise DomainError(f"n index must be >= 1, got {self.n_index}", reason="order_floor", field="n")
        if self.m_index < self.n_index:
            raise DomainError(f"closed form needs M >= N (m={self.m_index}, n={self.n_index})",
                              reason="spacing", field="m")
        return self

    @classmethod
    def from_orders(cls, m: float, n: float) -> "HalfOddPair":
        return cls(m_index=HalfOdd(m).index, n_index=HalfOdd(n).index)

    @property
    def m_order(self) -> float:
        return self.m_index - 0.5

    @property
    def n_order(self) -> float:
        return self.n_index - 0.5


class SeriesResult(_Frozen):
    """절단 급수 결과 + 인증된 꼬리 한계"""
    value: float
    terms_used: int
    tail_bound: float

    @field_validator('tail_bound')
    @classmethod
    def validate_tail(cls, v):
        if v < 0:
            raise ValueError("tail_bound must be non-negative")
        return v


class QuadratureResult(_Frozen):
    value: float
    abs_error: float
    panels: int
    upper_limit: float


class ClosedFormResult(_Frozen):
    """닫힌 형식 값 + 조건수 진단 (Σ|항| / |값|)"""
    value: float
    conditioning: float

    def degraded(self, limit: float) -> bool:
        return not self.conditioning <= limit


class BoundInterval(_Frozen):
    lower: float
    upper: float
    degenerate: bool

    @model_validator(mode='after')
    def validate_order(self):
        slack = 1e-12 * max(1.0, abs(self.upper))
        if self.lower > self.upper + slack:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.degenerate and self.lower != self.upper:
            raise ValueError("degenerate interval must have lower == upper")
        return self

    def contains(self, value: float, strict: bool = False) -> bool:
        if strict and not self.degenerate:
            return self.lower < value < self.upper
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


class EvalReport(_Frozen):
    """CLI 출력 단위"""
    function: FunctionId
    value: float
    method: Method
    est_error: float
    conditioning: Optional[float] = None
    interval: Optional[BoundInterval] = None
    warning: Optional[str] = None

    @field_validator('est_error')
    @classmethod
    def validate_error(cls, v):
        if not v >= 0:
            raise ValueError("est_error must be non-negative")
        return v


class SweepSpec(_Frozen):
    """스윕 정의 - 한 곡선 = 한 CSV"""
    function: FunctionId
    vary: SweepAxis
    start: float
    stop: float
    step: float
    m: Optional[float] = None
    n: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    diff: Optional[float] = None
    with_bounds: bool = False
    method: Method = Method.AUTO
    tol: float = 1e-12
    out: Optional[str] = None

    @model_validator(mode='after')
    def validate_range(self):
        if not self.start < self.stop:
            raise DomainError("sweep needs from < to", reason="sweep_range", field="from")
        if not self.step > 0:
            raise DomainError("sweep step must be positive", reason="sweep_range", field="step")
        if (self.stop - self.start) / self.step + 1e-9 < 1:
            raise DomainError("sweep range must hold at least 2 points", reason="sweep_range", field="step")
        if self.vary == SweepAxis.ORDER_SUM and self.diff is None:
            raise DomainError("order-sum sweeps need --diff", reason="missing_order", field="diff")
        if self.vary == SweepAxis.ORDER_SUM and self.function == FunctionId.MARCUM:
            raise DomainError("order-sum sweeps apply to Nuttall functions", reason="sweep_axis", field="vary")

        required = {
            SweepAxis.BETA: ['m', 'alpha'],
            SweepAxis.ORDER_SUM: ['alpha', 'beta'],
            SweepAxis.ORDER: ['alpha', 'beta'],
        }[self.vary]
        if self.function != FunctionId.MARCUM and self.vary != SweepAxis.ORDER_SUM:
            required.append('n')
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise DomainError(f"{self.vary.value} sweep needs --{', --'.join(missing)}",
                              reason="missing_parameter", field=missing[0])
        return self
