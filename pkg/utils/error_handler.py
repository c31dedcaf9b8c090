# utils/error_handler.py - 수치 계산 통합 에러 처리
import logging
import traceback
from datetime import datetime
from enum import Enum
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)


class ErrorType(Enum):
    """에러 타입 분류"""
    DOMAIN_ERROR = "domain_error"
    CONVERGENCE_ERROR = "convergence_error"
    OVERFLOW_ERROR = "overflow_error"
    CONTAINMENT_ERROR = "containment_error"
    IO_ERROR = "io_error"
    CONFIGURATION_ERROR = "configuration_error"
    SYSTEM_ERROR = "system_error"


class ErrorSeverity(Enum):
    """에러 심각도"""
    LOW = "low"           # 입력 문제, 로그만 기록
    MEDIUM = "medium"     # 수치 실패
    HIGH = "high"         # 결과 신뢰 불가
    CRITICAL = "critical"


# CLI 종료 코드 (고정 계약)
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3


class NumericsError(Exception):
    """🚨 베이스 예외 클래스"""

    def __init__(
        self,
        message: str,
        error_type: ErrorType = ErrorType.SYSTEM_ERROR,
        severity: ErrorSeverity = ErrorSeverity.MEDIUM,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.error_type = error_type
        self.severity = severity
        self.details = details or {}
        self.timestamp = datetime.now().isoformat()

        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """에러 정보를 딕셔너리로 변환"""
        return {
            'message': self.message,
            'error_type': self.error_type.value,
            'severity': self.severity.value,
            'details': self.details,
            'timestamp': self.timestamp
        }


class DomainError(NumericsError):
    """정의역 위반 (입력 조건 오류)"""
    def __init__(self, message: str, reason: str = "domain", field: str = None, **kwargs):
        details = kwargs.pop('details', {})
        details['reason'] = reason
        if field:
            details['field'] = field

        super().__init__(
            message=message,
            error_type=ErrorType.DOMAIN_ERROR,
            severity=ErrorSeverity.LOW,
            details=details,
            **kwargs
        )

    @property
    def reason(self) -> str:
        return self.details['reason']


class ConvergenceError(NumericsError):
    """반복 한도 초과 / 수렴 실패"""
    def __init__(self, message: str, routine: str = None, iterations: int = None, **kwargs):
        details = kwargs.pop('details', {})
        if routine:
            details['routine'] = routine
        if iterations is not None:
            details['iterations'] = iterations

        super().__init__(
            message=message,
            error_type=ErrorType.CONVERGENCE_ERROR,
            severity=ErrorSeverity.MEDIUM,
            details=details,
            **kwargs
        )


class NumericOverflowError(NumericsError):
    """표현 범위 초과"""
    def __init__(self, message: str, quantity: str = None, **kwargs):
        details = kwargs.pop('details', {})
        if quantity:
            details['quantity'] = quantity

        super().__init__(
            message=message,
            error_type=ErrorType.OVERFLOW_ERROR,
            severity=ErrorSeverity.MEDIUM,
            details=details,
            **kwargs
        )


class ContainmentError(NumericsError):
    """인증 구간이 값을 포함하지 못함"""
    def __init__(self, message: str, value: float = None, lower: float = None, upper: float = None):
        super().__init__(
            message=message,
            error_type=ErrorType.CONTAINMENT_ERROR,
            severity=ErrorSeverity.HIGH,
            details={'value': value, 'lower': lower, 'upper': upper},
        )


class ConfigurationError(NumericsError):
    """환경 설정 오류"""
    def __init__(self, message: str, problems: Optional[list] = None):
        super().__init__(
            message=message,
            error_type=ErrorType.CONFIGURATION_ERROR,
            severity=ErrorSeverity.HIGH,
            details={'problems': problems or []},
        )


class ErrorHandler:
    """🛡️ 통합 에러 처리기"""

    _exit_codes = {
        ErrorType.DOMAIN_ERROR: EXIT_DOMAIN,
        ErrorType.CONVERGENCE_ERROR: EXIT_CONVERGENCE,
    }

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def handle_error(
        self,
        error: Exception,
        context: Optional[Dict[str, Any]] = None
    ) -> Dict[str, Any]:
        """
        🚨 에러 처리 메인 함수

        Args:
            error: 발생한 예외
            context: 에러 발생 컨텍스트 정보 (명령, 인자 등)

        Returns:
            처리된 에러 정보 (exit_code 포함)
        """
        context = context or {}

        if isinstance(error, NumericsError):
            error_info = error.to_dict()
            error_info['handled_by'] = 'custom_handler'
        else:
            error_info = self._handle_generic_error(error)

        error_info['context'] = context
        error_info['exit_code'] = self._exit_codes.get(
            ErrorType(error_info['error_type']), EXIT_FAILURE
        )

        self._log_error(error_info)
        return error_info

    def _handle_generic_error(self, error: Exception) -> Dict[str, Any]:
        """일반 예외 처리"""
        error_type = self._classify_error(error)

        return {
            'message': str(error),
            'error_type': error_type.value,
            'severity': ErrorSeverity.HIGH.value if error_type == ErrorType.SYSTEM_ERROR
            else ErrorSeverity.MEDIUM.value,
            'details': {
                'exception_type': type(error).__name__,
            },
            'timestamp': datetime.now().isoformat(),
            'traceback': traceback.format_exc(),
            'handled_by': 'generic_handler'
        }

    def _classify_error(self, error: Exception) -> ErrorType:
        """에러 타입 자동 분류"""
        if isinstance(error, OSError):
            return ErrorType.IO_ERROR
        if isinstance(error, (OverflowError, ZeroDivisionError)):
            return ErrorType.OVERFLOW_ERROR
        if isinstance(error, ValueError):
            return ErrorType.DOMAIN_ERROR
        return ErrorType.SYSTEM_ERROR

    def _log_error(self, error_info: Dict[str, Any]):
        """심각도에 따른 로그 기록"""
        severity = error_info.get('severity', 'medium')
        log_message = f"[{error_info['error_type'].upper()}] {error_info['message']}"

        if severity == ErrorSeverity.CRITICAL.value:
            self.logger.critical(log_message)
        elif severity == ErrorSeverity.HIGH.value:
            self.logger.error(log_message)
        elif severity == ErrorSeverity.MEDIUM.value:
            self.logger.warning(log_message)
        else:
            self.logger.info(log_message)

    def exit_code_for(self, error: Exception) -> int:
        """예외에 대응하는 CLI 종료 코드"""
        if isinstance(error, NumericsError):
            return self._exit_codes.get(error.error_type, EXIT_FAILURE)
        return self._exit_codes.get(self._classify_error(error), EXIT_FAILURE)


# 전역 에러 핸들러 인스턴스
error_handler = ErrorHandler()


def handle_error(error: Exception, context: Dict[str, Any] = None) -> Dict[str, Any]:
    """에러 처리 함수"""
    return error_handler.handle_error(error, context)


def exit_code_for(error: Exception) -> int:
    """종료 코드 조회"""
    return error_handler.exit_code_for(error)
