# self_check.py - 자체 검증 도구 (불변식 / 오라클 동치 / 변이 검사)
import csv
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from bounds import marcum_bounds, norm_nuttall_bounds
from closed_form import (
    Bracket,
    bessel_i_half_odd,
    incomplete_gamma_bracket,
    li_kam_marcum_half_odd,
    marcum_half_odd,
    marcum_zero_alpha,
    nuttall_half_odd,
)
from domain_models import EvalPoint, HalfOddPair, OrderSpec
from oracle import marcum_quadrature, marcum_series, norm_nuttall_series, nuttall_quadrature, nuttall_series
from special_core import (
    bessel_i,
    ceil_half,
    floor_half,
    gamma_ratio,
    is_half_odd,
    log_upper_inc_gamma,
    reg_lower_gamma,
    reg_upper_gamma,
)
from utils.config import get_config
from utils.error_handler import NumericsError
from utils.helpers import format_real

logger = logging.getLogger(__name__)

config = get_config()

ORACLE_TOLERANCE = 1e-9
DUAL_ROUTE_TOLERANCE = 1e-10
# 조각 하나의 상대 반올림 오차 상한 (ln 크기 수십까지)
ROUNDING_FACTOR = 200.0 * sys.float_info.epsilon

GRIDS = {
    'coarse': {
        'alphas': (0.5, 2.0, 6.5),
        'betas': (0.0, 1.0, 4.0, 8.0),
        'max_m': 6,
        'random_points': 25,
    },
    'fine': {
        'alphas': (0.5, 1.0, 2.0, 3.5, 6.5),
        'betas': (0.0, 0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0),
        'max_m': 12,
        'random_points': 100,
    },
}


# ---------------------------------------------------------------- mutated brackets

def flipped_parity_bracket(l: int, m_minus_n: int, point: EvalPoint):
    """(−1)^{m−n−l−1} 대신 (−1)^{m−n−l}"""
    return incomplete_gamma_bracket(l, m_minus_n + 1, point)


def dropped_sign_bracket(l: int, m_minus_n: int, point: EvalPoint):
    """sgn(β−α)^{l+1} 을 1 로 취급"""
    a = (l + 1) / 2.0
    alpha, beta = point.alpha, point.beta
    parity = -1 if (m_minus_n - l - 1) % 2 else 1
    return [(parity, log_upper_inc_gamma(a, (beta + alpha) ** 2 / 2.0)),
            (1, log_upper_inc_gamma(a, (beta - alpha) ** 2 / 2.0))]


def omitted_gamma_bracket(l: int, m_minus_n: int, point: EvalPoint):
    """γ 항 생략"""
    a = (l + 1) / 2.0
    parity = -1 if (m_minus_n - l - 1) % 2 else 1
    return [(parity, log_upper_inc_gamma(a, (point.beta + point.alpha) ** 2 / 2.0)),
            (1, math.lgamma(a))]


MUTANTS: Dict[str, Bracket] = {
    'parity': flipped_parity_bracket,
    'sgn': dropped_sign_bracket,
    'gamma': omitted_gamma_bracket,
}


def _relative(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(reference), 1e-300)


def resolvable(tolerance: float, *conditionings: float) -> bool:
    """조건수 × 반올림 오차가 허용오차 안에 들어오는 점만 판정 가능"""
    return all(ROUNDING_FACTOR * c <= tolerance for c in conditionings)


def half_odd_pairs(max_m: int, max_gap: int = 3) -> List[HalfOddPair]:
    """n <= m <= max_m, m − n ∈ [0, max_gap] 인 모든 정수 인덱스 쌍"""
    return [HalfOddPair(m_index=n + gap, n_index=n)
            for n in range(1, max_m + 1) for gap in range(max_gap + 1) if n + gap <= max_m]


class SelfChecker:
    """🔬 수치 라이브러리 자체 검증 도구"""

    def __init__(self, grid: str = 'coarse', bracket: Bracket = incomplete_gamma_bracket,
                 frontier_path: Optional[str] = None):
        self.grid_name = grid
        self.grid = GRIDS[grid]
        self.bracket = bracket
        self.frontier_path = frontier_path or 'conditioning_frontier.csv'
        self.limit = config.get_conditioning_limit()
        self.tol = config.get_default_tol()
        self._references = None

    def _outcome(self, checked: int, failures: List[str], worst: float = 0.0, skipped: int = 0) -> Dict:
        return {'checked': checked, 'failures': failures, 'worst': worst, 'skipped': skipped,
                'passed': not failures}

    def _points(self) -> List[EvalPoint]:
        return [EvalPoint(alpha=a, beta=b) for a in self.grid['alphas'] for b in self.grid['betas']]

    # 🧮 special_core
    def check_gamma_functions(self) -> Dict:
        """P + Q = 1, P 의 r 단조 감소, gamma_ratio 의 r 단조 증가"""
        failures, worst, checked = [], 0.0, 0
        values = (0.1, 0.5, 1.0, 2.5, 7.0, 20.0, 60.0, 100.0)
        for r in values:
            for x in values:
                residual = abs(reg_lower_gamma(r, x) + reg_upper_gamma(r, x) - 1.0)
                worst = max(worst, residual)
                checked += 1
                if residual > 1e-13:
                    failures.append(f"P+Q-1 = {residual:.2e} at r={r}, x={x}")

        orders = [0.25 * i for i in range(1, 41)]
        for x in (0.5, 2.0, 8.0):
            lower = [reg_lower_gamma(r, x) for r in orders]
            checked += 1
            if any(b >= a for a, b in zip(lower, lower[1:]) if a > 1e-300):
                failures.append(f"P(r, {x}) not strictly decreasing in r")
            for s in (0.0, 0.5, 2.0):
                ratios = [gamma_ratio(s, r, x) for r in orders]
                checked += 1
                if any(b <= a for a, b in zip(ratios, ratios[1:])):
                    failures.append(f"gamma_ratio({s}, r, {x}) not strictly increasing in r")
        return self._outcome(checked, failures, worst)

    def check_rounding(self) -> Dict:
        failures, checked = [], 0
        for i in range(1, 400):
            x = 0.05 * i + 0.5
            lo, hi = floor_half(x), ceil_half(x)
            checked += 1
            if not lo <= x <= hi:
                failures.append(f"rounding does not bracket {x}")
            if is_half_odd(x) != (lo == hi == x):
                failures.append(f"fixed-point mismatch at {x}")
            if not is_half_odd(x) and hi - lo != 1.0:
                failures.append(f"ceil_half - floor_half != 1 at {x}")
        return self._outcome(checked, failures)

    def check_bessel(self) -> Dict:
        """반홀수 유한합 vs 멱급수"""
        failures, worst, checked = [], 0.0, 0
        for n in (1, 2, 3):
            for z in (1.0, 2.0, 5.0, 10.0, 25.0, 50.0):
                residual = _relative(bessel_i_half_odd(n, z), bessel_i(n - 0.5, z))
                worst = max(worst, residual)
                checked += 1
                if residual > 1e-12:
                    failures.append(f"I_{n - 0.5}({z}) finite sum vs series: {residual:.2e}")
        return self._outcome(checked, failures, worst)

    # 🔁 oracle
    def check_route_agreement(self) -> Dict:
        """정규화 Nuttall 급수 vs 적분"""
        failures, worst, checked = [], 0.0, 0
        orders = [(1.5, 0.5), (2.0, 1.0), (2.7, 1.7), (5.0, 3.0), (4.5, 2.5)]
        for m, n in orders:
            for point in self._points():
                if point.beta == 0:
                    continue
                series = norm_nuttall_series(OrderSpec.nuttall(m, n), point, self.tol)
                quad = nuttall_quadrature(OrderSpec.nuttall(m, n), point, self.tol)
                scale = point.alpha ** n
                gap = abs(series.value - quad.value / scale)
                allowed = series.tail_bound + (quad.abs_error + 10 * self.tol * abs(quad.value)) / scale
                residual = gap / max(abs(series.value), 1e-300)
                worst = max(worst, residual)
                checked += 1
                if gap > allowed and residual > ORACLE_TOLERANCE:
                    failures.append(f"Q_{m},{n}{point.alpha, point.beta}: series/quadrature gap {gap:.2e}")
        return self._outcome(checked, failures, worst)

    def check_certified_tails(self) -> Dict:
        """무작위 점에서 |급수 − 적분| <= tail + 10·tol"""
        rng = np.random.default_rng(20240607)
        failures, worst = [], 0.0
        count = self.grid['random_points']
        for _ in range(count):
            m = float(rng.uniform(0.6, 8.0))
            point = EvalPoint(alpha=float(rng.uniform(0.1, 7.0)), beta=float(rng.uniform(0.0, 9.0)))
            series = marcum_series(OrderSpec.marcum(m), point, self.tol)
            quad = marcum_quadrature(OrderSpec.marcum(m), point, self.tol)
            gap = abs(series.value - quad.value)
            allowed = series.tail_bound + 10 * self.tol * abs(quad.value) + quad.abs_error
            worst = max(worst, gap / max(abs(quad.value), 1e-300))
            if gap > allowed:
                failures.append(f"Q_{m:.3f}({point.alpha:.3f}, {point.beta:.3f}): gap {gap:.2e} > {allowed:.2e}")
        return self._outcome(count, failures, worst)

    def check_monotonicity(self) -> Dict:
        """M 에 대한 Marcum 증가, M+N 에 대한 Nuttall 증가 (c 고정)"""
        failures, checked = [], 0
        orders = [0.6 + 0.2 * i for i in range(38)]
        for alpha, beta in ((0.0, 1.0), (1.0, 2.0), (2.5, 3.0), (5.5, 4.0)):
            point = EvalPoint(alpha=alpha, beta=beta)
            results = [marcum_series(OrderSpec.marcum(m), point, 1e-15) for m in orders]
            checked += 1
            for (m, a), b in zip(zip(orders, results), results[1:]):
                if not b.value - a.value > a.tail_bound + b.tail_bound:
                    failures.append(f"Q_M{alpha, beta} not increasing at M={m:.1f}")
                    break

        figure_sets = {1.0: ((7.5, 6.5), (5.5, 5.5), (0.5, 3.5)), 2.0: ((3.5, 1.5), (2.0, 2.0), (1.5, 3.5))}
        sums = [3.0 + 0.5 * i for i in range(31)]
        for diff, pairs in figure_sets.items():
            for alpha, beta in pairs:
                point = EvalPoint(alpha=alpha, beta=beta)
                specs = [OrderSpec.from_sum(v, diff) for v in sums]
                normalized = [norm_nuttall_series(spec, point, 1e-15) for spec in specs]
                checked += 1
                if any(b.value <= a.value for a, b in zip(normalized, normalized[1:])):
                    failures.append(f"normalized Nuttall not increasing in M+N (c={diff}, {alpha}, {beta})")
                if alpha >= 1:
                    standard = [nuttall_series(spec, point, 1e-15) for spec in specs]
                    checked += 1
                    if any(b.value <= a.value for a, b in zip(standard, standard[1:])):
                        failures.append(f"standard Nuttall not increasing in M+N (c={diff}, {alpha}, {beta})")
        return self._outcome(checked, failures)

    # 📐 closed_form
    def _reference_values(self) -> List[Tuple[Tuple[HalfOddPair, EvalPoint], float]]:
        """적분 오라클 값 (한 번만 계산해 변이 검사에서 재사용)"""
        if self._references is None:
            tasks = [(pair, point) for pair in half_odd_pairs(self.grid['max_m']) for point in self._points()]

            def measure(task):
                pair, point = task
                order = OrderSpec.nuttall(pair.m_order, pair.n_order)
                return nuttall_quadrature(order, point, self.tol).value

            with ThreadPoolExecutor(max_workers=config.get_sweep_workers()) as executor:
                self._references = list(zip(tasks, executor.map(measure, tasks)))
        return self._references

    def closed_form_residuals(self, bracket: Bracket) -> List[Tuple[HalfOddPair, EvalPoint, float, float]]:
        """(쌍, 점, 상대오차, 조건수)"""
        residuals = []
        for (pair, point), reference in self._reference_values():
            closed = nuttall_half_odd(pair, point, bracket)
            residuals.append((pair, point, _relative(closed.value, reference), closed.conditioning))
        return residuals

    def _oracle_failures(self, residuals) -> Tuple[List[str], float, int]:
        """(실패 목록, 최대 잔차, 정밀도 한계로 제외된 점 수)"""
        failures, worst, skipped = [], 0.0, 0
        for pair, point, residual, conditioning in residuals:
            if not (conditioning < self.limit and resolvable(ORACLE_TOLERANCE, conditioning)):
                skipped += 1
                continue
            worst = max(worst, residual)
            if not residual <= ORACLE_TOLERANCE:
                failures.append(f"Q_{pair.m_order},{pair.n_order}{point.alpha, point.beta}: "
                                f"relative error {residual:.2e} (cond {conditioning:.1e})")
        return failures, worst, skipped

    def check_closed_form_oracle(self) -> Dict:
        residuals = self.closed_form_residuals(self.bracket)
        failures, worst, skipped = self._oracle_failures(residuals)
        if self.grid_name == 'fine':
            self._write_frontier(residuals)
        return self._outcome(len(residuals) - skipped, failures, worst, skipped)

    def check_marcum_dual_route(self) -> Dict:
        """Pochhammer 형식 vs 삼중합 형식"""
        failures, worst, checked, skipped = [], 0.0, 0, 0
        for index in range(1, self.grid['max_m'] + 1):
            m = index - 0.5
            for point in self._points():
                first = marcum_half_odd(m, point)
                second = li_kam_marcum_half_odd(m, point)
                if not (max(first.conditioning, second.conditioning) < self.limit
                        and resolvable(DUAL_ROUTE_TOLERANCE, first.conditioning, second.conditioning)):
                    skipped += 1
                    continue
                residual = _relative(first.value, second.value)
                worst = max(worst, residual)
                checked += 1
                if residual > DUAL_ROUTE_TOLERANCE:
                    failures.append(f"Q_{m}{point.alpha, point.beta}: routes differ by {residual:.2e}")
        return self._outcome(checked, failures, worst, skipped)

    def check_special_values(self) -> Dict:
        failures, worst, checked = [], 0.0, 0
        for m in (0.7, 1.0, 2.5, 8.3):
            for alpha in (0.0, 1.0, 3.5):
                value = marcum_series(OrderSpec.marcum(m), EvalPoint(alpha=alpha, beta=0.0), self.tol).value
                worst = max(worst, abs(value - 1.0))
                checked += 1
                if abs(value - 1.0) > 1e-12:
                    failures.append(f"Q_{m}({alpha}, 0) = {value!r}")
        for m in (0.5, 1.5, 3.5):
            for beta in (0.5, 1.0, 2.0, 4.0):
                gap = abs(marcum_half_odd(m, EvalPoint(alpha=1e-6, beta=beta)).value - marcum_zero_alpha(m, beta))
                worst = max(worst, gap)
                checked += 1
                if gap > 1e-5:
                    failures.append(f"Q_{m}(1e-6, {beta}) departs from the alpha = 0 limit by {gap:.2e}")
        return self._outcome(checked, failures, worst)

    # 🔒 bounds
    def check_bound_sandwich(self) -> Dict:
        """비반홀수 차수에서 하한 < 급수 값 < 상한 (엄격)"""
        failures, checked = [], 0
        betas = [0.5 * i for i in range(2, 15)]
        for m in (2.7, 8.3):
            for beta in betas:
                point = EvalPoint(alpha=2.5, beta=beta)
                interval = marcum_bounds(m, point)
                value = marcum_series(OrderSpec.marcum(m), point, 1e-15).value
                checked += 1
                if not interval.contains(value, strict=True):
                    failures.append(f"Q_{m}(2.5, {beta}) = {value!r} outside ({interval.lower!r}, {interval.upper!r})")
        for m, n in ((4.7, 2.7), (5.0, 3.0)):
            for beta in betas:
                point = EvalPoint(alpha=3.5, beta=beta)
                interval = norm_nuttall_bounds(m, n, point)
                value = norm_nuttall_series(OrderSpec.nuttall(m, n), point, 1e-15).value
                checked += 1
                if not interval.contains(value, strict=True):
                    failures.append(f"Q_{m},{n}(3.5, {beta}) = {value!r} outside the interval")
        return self._outcome(checked, failures)

    def check_mutation_sanity(self) -> Dict:
        """일부러 망가뜨린 괄호 항은 오라클 동치 검사에서 반드시 실패해야 함"""
        failures = []
        for name, bracket in MUTANTS.items():
            caught, _, _ = self._oracle_failures(self.closed_form_residuals(bracket))
            if not caught:
                failures.append(f"mutation '{name}' was not detected")
        return self._outcome(len(MUTANTS), failures)

    def _write_frontier(self, residuals) -> None:
        """조건수 경계 지도 CSV"""
        with open(self.frontier_path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(['m', 'n', 'alpha', 'beta', 'conditioning', 'relative_error'])
            for pair, point, residual, conditioning in residuals:
                writer.writerow([format_real(pair.m_order), format_real(pair.n_order), format_real(point.alpha),
                                 format_real(point.beta), format_real(conditioning), format_real(residual)])
        logger.info(f"💾 조건수 경계 CSV 저장: {os.path.abspath(self.frontier_path)}")

    def run_full_check(self) -> Dict:
        """🔬 전체 검증 실행"""
        print(f"🔬 수치 라이브러리 자체 검증 시작 (grid={self.grid_name})...")
        print("=" * 60)

        checks: List[Tuple[str, Callable[[], Dict]]] = [
            ("감마 함수", self.check_gamma_functions),
            ("반정수 반올림", self.check_rounding),
            ("반홀수 베셀", self.check_bessel),
            ("급수/적분 일치", self.check_route_agreement),
            ("꼬리 한계 인증", self.check_certified_tails),
            ("단조성", self.check_monotonicity),
            ("닫힌 형식 오라클 동치", self.check_closed_form_oracle),
            ("Marcum 이중 경로", self.check_marcum_dual_route),
            ("특수값", self.check_special_values),
            ("상/하한 포함", self.check_bound_sandwich),
        ]
        if self.bracket is incomplete_gamma_bracket:
            checks.append(("변이 검출", self.check_mutation_sanity))

        results = {}
        for check_name, check_func in checks:
            print(f"\n📋 {check_name} 검사 중...")
            try:
                outcome = check_func()
            except NumericsError as e:
                outcome = self._outcome(0, [f"{e.error_type.value}: {e.message}"])
            results[check_name] = outcome

            if outcome['passed']:
                print(f"   ✅ 통과 ({outcome['checked']}건, 최대 잔차 {outcome['worst']:.2e})")
            else:
                print(f"   ❌ 실패 {len(outcome['failures'])}건 / {outcome['checked']}건 "
                      f"(최대 잔차 {outcome['worst']:.2e})")
            if outcome['skipped']:
                print(f"   ⏭️  ε·조건수 > 허용오차: 제외 {outcome['skipped']}건")

        summary = {
            'suites': results,
            'failed_suites': [name for name, outcome in results.items() if not outcome['passed']],
        }
        summary['passed'] = not summary['failed_suites']

        self._print_results(summary)
        return summary

    def _print_results(self, summary: Dict):
        """결과 출력"""
        print("\n" + "=" * 60)
        print("📊 자체 검증 결과")
        print("=" * 60)

        if summary['passed']:
            print("🎉 모든 검사를 통과했습니다!")
        else:
            for name in summary['failed_suites']:
                failures = summary['suites'][name]['failures']
                print(f"\n🚨 {name}:")
                for i, message in enumerate(failures[:5], 1):
                    print(f"   {i}. {message}")
                if len(failures) > 5:
                    print(f"   ... 그리고 {len(failures) - 5}개 더")

        print("\n" + "=" * 60)


def main(grid: str = 'coarse', mutate: Optional[str] = None, frontier_path: Optional[str] = None) -> int:
    """selfcheck 진입점 - 모든 검사 통과 시 0, 아니면 1"""
    bracket = MUTANTS[mutate] if mutate else incomplete_gamma_bracket
    summary = SelfChecker(grid, bracket, frontier_path).run_full_check()
    return 0 if summary['passed'] else 1
