# 헬퍼 함수들
import math
import os
from typing import List


def format_real(value: float) -> str:
    """최단 왕복 10진 표기 (최대 17 유효자리, 로케일 무관)"""
    return repr(float(value))


def parse_real(text: str) -> float:
    """CSV 셀 파싱 - 빈 셀은 NaN"""
    text = text.strip()
    return float(text) if text else math.nan


def axis_grid(start: float, stop: float, step: float) -> List[float]:
    """[start, stop] 구간 격자 (누적 오차 없이 start + i*step)"""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def create_directory(path):
    """디렉토리 생성"""
    if path and not os.path.exists(path):
        os.makedirs(path)
        return True
    return False
