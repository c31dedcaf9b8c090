# test_self_check.py - 자체 검증 도구 테스트
import pytest

import self_check
from closed_form import nuttall_half_odd
from domain_models import EvalPoint, HalfOddPair, OrderSpec
from oracle import nuttall_quadrature
from self_check import MUTANTS, SelfChecker, half_odd_pairs, resolvable

TINY_GRID = {
    'alphas': (0.5, 2.0),
    'betas': (0.0, 1.0, 4.0),
    'max_m': 4,
    'random_points': 5,
}


@pytest.fixture
def tiny_checker(monkeypatch):
    monkeypatch.setitem(self_check.GRIDS, 'tiny', TINY_GRID)
    return SelfChecker('tiny')


def test_half_odd_pairs():
    pairs = half_odd_pairs(3)
    assert HalfOddPair(m_index=3, n_index=1) in pairs
    assert all(pair.n_index <= pair.m_index <= 3 for pair in pairs)
    assert len(pairs) == 6


def test_precision_gate():
    assert resolvable(1e-10, 1.0, 100.0)
    assert not resolvable(1e-10, 1.0, 1e6)
    assert not resolvable(1e-9, 1e6)


@pytest.mark.parametrize("name", sorted(MUTANTS))
def test_mutants_disagree_with_oracle(name):
    pair = HalfOddPair(m_index=3, n_index=2)
    point = EvalPoint(alpha=2.0, beta=1.0)
    reference = nuttall_quadrature(OrderSpec.nuttall(pair.m_order, pair.n_order), point).value
    assert nuttall_half_odd(pair, point).value == pytest.approx(reference, rel=1e-9)
    mutated = nuttall_half_odd(pair, point, MUTANTS[name]).value
    assert abs(mutated - reference) > 1e-6 * abs(reference)


def test_cheap_suites_pass(tiny_checker):
    for check in (tiny_checker.check_gamma_functions, tiny_checker.check_rounding, tiny_checker.check_bessel,
                  tiny_checker.check_special_values):
        outcome = check()
        assert outcome['passed'], outcome['failures']


def test_oracle_suites_pass(tiny_checker):
    for check in (tiny_checker.check_closed_form_oracle, tiny_checker.check_marcum_dual_route,
                  tiny_checker.check_route_agreement, tiny_checker.check_certified_tails):
        outcome = check()
        assert outcome['passed'], outcome['failures']
        assert outcome['checked'] > 0


def test_mutation_suite_detects_every_mutant(tiny_checker):
    outcome = tiny_checker.check_mutation_sanity()
    assert outcome['passed'], outcome['failures']
    assert outcome['checked'] == len(MUTANTS)


def test_parity_mutant_fails_the_oracle_suite(monkeypatch):
    monkeypatch.setitem(self_check.GRIDS, 'tiny', TINY_GRID)
    outcome = SelfChecker('tiny', MUTANTS['parity']).check_closed_form_oracle()
    assert not outcome['passed']


def test_frontier_csv(monkeypatch, tmp_path):
    monkeypatch.setitem(self_check.GRIDS, 'fine', TINY_GRID)
    path = tmp_path / "frontier.csv"
    SelfChecker('fine', frontier_path=str(path)).check_closed_form_oracle()
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == "m,n,alpha,beta,conditioning,relative_error"
    assert len(lines) == 1 + len(half_odd_pairs(4)) * 6


def test_coarse_selfcheck_passes(capsys):
    assert self_check.main('coarse') == 0
    out = capsys.readouterr().out
    assert "📊 자체 검증 결과" in out
    assert "❌" not in out


def test_flipped_parity_selfcheck_fails(monkeypatch, capsys):
    monkeypatch.setitem(self_check.GRIDS, 'coarse', TINY_GRID)
    assert self_check.main('coarse', mutate='parity') == 1
    assert "닫힌 형식 오라클 동치" in capsys.readouterr().out


def test_dual_route_holds_fixed_tolerance(monkeypatch):
    """높은 차수까지 두 Marcum 닫힌 형식은 1e-10 안에서 일치, 제외한 점은 따로 셈"""
    monkeypatch.setitem(self_check.GRIDS, 'tiny', {
        'alphas': (2.0, 3.5),
        'betas': (1.0, 6.0, 8.0),
        'max_m': 11,
        'random_points': 1,
    })
    outcome = SelfChecker('tiny').check_marcum_dual_route()
    assert outcome['passed'], outcome['failures']
    assert outcome['worst'] <= 1e-10
    assert outcome['checked'] + outcome['skipped'] == 11 * 6
    assert outcome['checked'] > 0


def test_unresolvable_points_are_counted(monkeypatch):
    monkeypatch.setitem(self_check.GRIDS, 'tiny', TINY_GRID)
    monkeypatch.setattr(self_check, 'ROUNDING_FACTOR', 1.0)
    outcome = SelfChecker('tiny').check_closed_form_oracle()
    assert outcome['checked'] == 0
    assert outcome['skipped'] == len(half_odd_pairs(4)) * 6
