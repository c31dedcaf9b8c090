# utils/config.py - 수치 계산 설정 관리
import os
import sys
import logging
from typing import Optional

from dotenv import load_dotenv

from utils.error_handler import ConfigurationError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
_VALID_LOG_LEVELS = {'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'}


class NumericsConfig:
    """🔧 수치 계산 설정 관리 클래스"""

    def __init__(self):
        """환경변수 로드"""
        self.load_environment()

    def load_environment(self):
        """환경변수 로드"""
        # .env 파일은 선택 사항
        env_loaded = load_dotenv()
        if env_loaded:
            logger.debug(".env 파일이 로드되었습니다.")

        self.environment = os.getenv('ENVIRONMENT', 'development')
        self.debug = os.getenv('DEBUG', 'False').lower() == 'true'

    def validate_settings(self, log_level: Optional[str] = None):
        """🔍 설정값 검증 - log_level 은 명령행 재정의 값"""
        errors = []

        def read(name, getter):
            try:
                return getter()
            except ValueError:
                errors.append(f"{name}은 숫자여야 합니다: {os.getenv(name)!r}")
                return None

        tol = read('NUMERICS_DEFAULT_TOL', self.get_default_tol)
        if tol is not None and not tol > 0:
            errors.append("NUMERICS_DEFAULT_TOL은 양수여야 합니다.")
        for name, getter in (
            ('GAMMA_MAX_ITERATIONS', self.get_gamma_max_iterations),
            ('SERIES_MAX_TERMS', self.get_series_max_terms),
            ('QUADRATURE_MAX_DEPTH', self.get_quadrature_max_depth),
            ('QUADRATURE_MAX_PANELS', self.get_quadrature_max_panels),
            ('SWEEP_WORKERS', self.get_sweep_workers),
        ):
            value = read(name, getter)
            if value is not None and value < 1:
                errors.append(f"{name}은 1 이상이어야 합니다.")
        limit = read('CONDITIONING_LIMIT', self.get_conditioning_limit)
        if limit is not None and not limit > 1:
            errors.append("CONDITIONING_LIMIT은 1보다 커야 합니다.")
        read('ERROR_WARNING_THRESHOLD', self.get_error_warning_threshold)
        level = (log_level or self.get_log_level()).upper()
        if level not in _VALID_LOG_LEVELS:
            errors.append(f"알 수 없는 LOG_LEVEL: {level}")

        if errors:
            logger.error("❌ 설정 오류:")
            for error in errors:
                logger.error(f"   - {error}")
            raise ConfigurationError("invalid numerics configuration", problems=errors)

        logger.debug("설정 검증 완료")

    # 🧮 수치 허용오차 / 반복 한도
    def get_default_tol(self) -> float:
        """기본 허용오차 (급수/적분 공통)"""
        return float(os.getenv('NUMERICS_DEFAULT_TOL', '1e-12'))

    def get_gamma_max_iterations(self) -> int:
        """불완전 감마 함수 반복 한도"""
        return int(os.getenv('GAMMA_MAX_ITERATIONS', '500'))

    def get_series_max_terms(self) -> int:
        """급수 항 수 한도"""
        return int(os.getenv('SERIES_MAX_TERMS', '1000000'))

    def get_quadrature_max_depth(self) -> int:
        """적분 구간 이분 깊이 한도"""
        return int(os.getenv('QUADRATURE_MAX_DEPTH', '50'))

    def get_quadrature_max_panels(self) -> int:
        """적분 구간 수 한도"""
        return int(os.getenv('QUADRATURE_MAX_PANELS', '4000'))

    def get_conditioning_limit(self) -> float:
        """닫힌 형식 조건수 한계 (초과 시 급수로 위임)"""
        return float(os.getenv('CONDITIONING_LIMIT', '1e6'))

    def get_error_warning_threshold(self) -> float:
        """추정 오차 경고 기준"""
        return float(os.getenv('ERROR_WARNING_THRESHOLD', '1e-8'))

    # ⚙️ 실행 설정
    def get_sweep_workers(self) -> int:
        """스윕 작업 스레드 수"""
        return int(os.getenv('SWEEP_WORKERS', '4'))

    # 📊 로깅 설정
    def get_log_level(self) -> str:
        """로그 레벨"""
        return os.getenv('LOG_LEVEL', 'WARNING').upper()

    def get_log_file(self) -> Optional[str]:
        """로그 파일 경로 (비어 있으면 stderr만 사용)"""
        return os.getenv('LOG_FILE') or None

    def get_settings_summary(self) -> dict:
        """설정 상태 요약"""
        return {
            'environment': self.environment,
            'debug_mode': self.debug,
            'default_tol': self.get_default_tol(),
            'gamma_max_iterations': self.get_gamma_max_iterations(),
            'series_max_terms': self.get_series_max_terms(),
            'quadrature_max_depth': self.get_quadrature_max_depth(),
            'conditioning_limit': self.get_conditioning_limit(),
            'sweep_workers': self.get_sweep_workers(),
        }


# 전역 설정 인스턴스
config = NumericsConfig()


def get_config() -> NumericsConfig:
    """설정 인스턴스 반환"""
    return config


def setup_logging(level: Optional[str] = None):
    """루트 로거 설정 - CLI 진입점에서만 호출"""
    handlers = [logging.StreamHandler(sys.stderr)]
    log_file = config.get_log_file()
    if log_file:
        os.makedirs(os.path.dirname(log_file) or '.', exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(
        level=(level or config.get_log_level()).upper(),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
