# main.py - Marcum / Nuttall Q 함수 수치 계산 CLI
"""
Command-line entry point.

    python main.py eval marcum --m 1 --alpha 0 --beta 2
    python main.py bounds nuttall-std --m 5 --n 3 --alpha 2 --beta 2 --with-value
    python main.py sweep nuttall-norm --vary order-sum --diff 1 --alpha 7.5 --beta 6.5 --from 3 --to 18 --step 0.5
    python main.py sweep --figure fig3b --out figures
    python main.py selfcheck --grid coarse

Exit codes: 0 success, 1 failure (selfcheck, containment, I/O), 2 domain error, 3 convergence failure.
"""
import argparse
import logging
import sys
from typing import List, Optional

from domain_models import EvalPoint, EvalReport, FunctionId, Method, SweepAxis, SweepSpec
from evaluation import build_order, certify, evaluate
from self_check import MUTANTS
from self_check import main as run_selfcheck
from sweeps import FIGURES, run_figure, run_sweep, save_csv, write_csv
from utils.config import get_config, setup_logging
from utils.error_handler import EXIT_OK, DomainError, handle_error
from utils.helpers import format_real

logger = logging.getLogger(__name__)

config = get_config()

BOUND_FUNCTIONS = {
    'marcum': FunctionId.MARCUM,
    'nuttall-std': FunctionId.NUTTALL,
    'nuttall-norm': FunctionId.NUTTALL_NORM,
}


def _print_report(report: EvalReport) -> None:
    print(f"value={format_real(report.value)}")
    print(f"method={report.method.value}")
    print(f"est_error={format_real(report.est_error)}")
    if report.conditioning is not None:
        print(f"conditioning={format_real(report.conditioning)}")
    if report.warning:
        print(f"warning: {report.warning}")


def cmd_eval(args) -> int:
    """📐 eval {marcum|nuttall|nuttall-norm}"""
    function = FunctionId(args.function)
    report = evaluate(function, build_order(function, args.m, args.n),
                      EvalPoint(alpha=args.alpha, beta=args.beta), Method(args.method), args.tol)
    _print_report(report)
    return EXIT_OK


def cmd_bounds(args) -> int:
    """🔒 bounds {marcum|nuttall-std|nuttall-norm}"""
    function = BOUND_FUNCTIONS[args.function]
    report = certify(function, args.m, args.n, EvalPoint(alpha=args.alpha, beta=args.beta),
                     with_value=args.with_value, tol=args.tol)
    interval = report.interval
    print(f"lower={format_real(interval.lower)}")
    print(f"upper={format_real(interval.upper)}")
    print(f"degenerate={str(interval.degenerate).lower()}")
    if args.with_value:
        print(f"value={format_real(report.value)}")
        print(f"est_error={format_real(report.est_error)}")
        print("contained=true")
        if report.warning:
            print(f"warning: {report.warning}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    """🧮 sweep - 한 곡선 또는 그림 프리셋"""
    if args.figure:
        paths = run_figure(args.figure, args.out or '.', Method(args.method), args.tol)
        for path in paths:
            print(path)
        return EXIT_OK

    if not args.function:
        raise DomainError("sweep needs a function or --figure", reason="missing_parameter", field="function")
    if args.start is None or args.stop is None or args.step is None:
        raise DomainError("sweep needs --from, --to and --step", reason="missing_parameter", field="from")

    spec = SweepSpec(
        function=FunctionId(args.function), vary=SweepAxis(args.vary), start=args.start, stop=args.stop,
        step=args.step, m=args.m, n=args.n, alpha=args.alpha, beta=args.beta, diff=args.diff,
        with_bounds=args.with_bounds, method=Method(args.method), tol=args.tol, out=args.out,
    )
    result = run_sweep(spec)
    if spec.out:
        save_csv(result, spec.out)
    else:
        write_csv(result, sys.stdout)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    """🔬 selfcheck --grid {coarse|fine}"""
    print(f"⚙️ 설정: {config.get_settings_summary()}")
    return run_selfcheck(args.grid, args.mutate, args.out)


def _add_point_arguments(parser: argparse.ArgumentParser, require_point: bool = True) -> None:
    parser.add_argument('--m', type=float, required=require_point, help="order M")
    parser.add_argument('--n', type=float, default=None, help="order N (Nuttall functions)")
    parser.add_argument('--alpha', type=float, required=require_point)
    parser.add_argument('--beta', type=float, required=require_point)
    parser.add_argument('--tol', type=float, default=None,
                        help="series/quadrature tolerance (default: NUMERICS_DEFAULT_TOL)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='marcum-nuttall',
        description="Generalized Marcum and Nuttall Q-functions: closed forms, series, quadrature and bounds.",
    )
    parser.add_argument('--log-level', default=None, help="override LOG_LEVEL")
    sub = parser.add_subparsers(dest='command', required=True)

    p_eval = sub.add_parser('eval', help="evaluate one function value")
    p_eval.add_argument('function', choices=[f.value for f in FunctionId])
    _add_point_arguments(p_eval)
    p_eval.add_argument('--method', choices=[m.value for m in Method], default=Method.AUTO.value)
    p_eval.set_defaults(handler=cmd_eval)

    p_bounds = sub.add_parser('bounds', help="half-integer rounding bounds")
    p_bounds.add_argument('function', choices=list(BOUND_FUNCTIONS))
    _add_point_arguments(p_bounds)
    p_bounds.add_argument('--with-value', action='store_true', dest='with_value',
                          help="also compute the series value and assert containment")
    p_bounds.set_defaults(handler=cmd_bounds)

    p_sweep = sub.add_parser('sweep', help="grid sweep to CSV")
    p_sweep.add_argument('function', nargs='?', choices=[f.value for f in FunctionId])
    _add_point_arguments(p_sweep, require_point=False)
    p_sweep.add_argument('--vary', choices=[a.value for a in SweepAxis], default=SweepAxis.BETA.value)
    p_sweep.add_argument('--from', type=float, dest='start')
    p_sweep.add_argument('--to', type=float, dest='stop')
    p_sweep.add_argument('--step', type=float)
    p_sweep.add_argument('--diff', type=float, default=None, help="fixed M-N for order-sum sweeps")
    p_sweep.add_argument('--with-bounds', action='store_true', dest='with_bounds')
    p_sweep.add_argument('--method', choices=[m.value for m in Method], default=Method.AUTO.value)
    p_sweep.add_argument('--figure', choices=FIGURES, default=None, help="reproduce a figure's curves")
    p_sweep.add_argument('--out', default=None, help="CSV path (default stdout); directory with --figure")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_check = sub.add_parser('selfcheck', help="run the invariant suites")
    p_check.add_argument('--grid', choices=['coarse', 'fine'], default='coarse')
    p_check.add_argument('--out', default=None, help="conditioning frontier CSV path (fine grid)")
    p_check.add_argument('--mutate', choices=list(MUTANTS), default=None,
                         help="run with a deliberately broken closed-form bracket")
    p_check.set_defaults(handler=cmd_selfcheck)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """메인 실행 함수 - 종료 코드 반환"""
    args = build_parser().parse_args(argv)

    try:
        config.validate_settings(args.log_level)
        setup_logging(args.log_level)
        if getattr(args, 'tol', False) is None:
            args.tol = config.get_default_tol()
        logger.debug(f"🚀 {args.command} 실행")
        return args.handler(args)
    except Exception as e:
        error_info = handle_error(e, {'command': args.command})
        reason = error_info['details'].get('reason')
        label = f"{error_info['error_type']}[{reason}]" if reason else error_info['error_type']
        print(f"error: {label}: {error_info['message']}", file=sys.stderr)
        return error_info['exit_code']


if __name__ == "__main__":
    sys.exit(main())
