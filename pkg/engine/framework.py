import time

from .config import DEFAULT_CONFIG
from .errors import BudgetExceededError, ExactnessError, PreconditionError, WordMismatchError

PASS = 'pass'
FAIL = 'fail'
INCONCLUSIVE = 'inconclusive'

_EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}

# domain errors raised inside a check and the verdict they export as
_ERROR_VERDICTS = {
    BudgetExceededError: INCONCLUSIVE,
    ExactnessError: INCONCLUSIVE,
    PreconditionError: FAIL,
    WordMismatchError: FAIL,
}


def exit_code(verdict):
    """0 = pass, 1 = fail (witness in the output), 2 = inconclusive (bound or budget hit)."""
    return _EXIT_CODES[verdict]


def _print_report(name, report, verdict, elapsed, quiet):
    if quiet:
        return
    print(f'=== check started: {name} ===')
    print("-" * 50)
    for index, (title, lines) in enumerate(report.items(), start=1):
        if index > 1:
            print()
        print(f"{index}. {title}")
        for label, value in lines.items():
            print(f"  {label}: {value}")
    print("-" * 50)
    print(f'verdict: {verdict} ({elapsed:.2f} s)')
    print('====================================\n')


def run_check(name, config=None, quiet=False, **params):
    """
    Shared runner for the registered checks.

    :param name: key of CHECKS_REGISTRY
    :param config: RunConfig, the defaults when omitted
    :param quiet: skip the printed report (JSON output keeps stdout clean)
    :param params: forwarded to the check's ``run_check_api``

    :return: export dict with check, verdict, params, config and result; a domain error raised by
        the check is exported with its verdict and an "error" entry instead of a result
    """
    from .checks import get_check

    check = get_check(name)
    if check is None:
        raise ValueError(f"unknown check {name!r}")
    config = config or DEFAULT_CONFIG
    started = time.perf_counter()
    try:
        outcome = check(config=config, **params)
    except tuple(_ERROR_VERDICTS) as e:
        verdict = next(verdict for error, verdict in _ERROR_VERDICTS.items() if isinstance(e, error))
        elapsed = time.perf_counter() - started
        _print_report(name, {type(e).__name__: {"error": str(e)}}, verdict, elapsed, quiet)
        return {"check": name, "error": str(e), "error_type": type(e).__name__, "verdict": verdict,
                "params": _plain(params), "config": config.to_dict()}
    elapsed = time.perf_counter() - started
    _print_report(name, outcome.get("report", {}), outcome["verdict"], elapsed, quiet)

    export_data = {
        "check": name,
        "verdict": outcome["verdict"],
        "params": _plain(params),
        "config": config.to_dict(),
        "result": outcome["result"],
    }
    return export_data


def _plain(params):
    return {key: value if isinstance(value, (int, float, str, bool, type(None), list, dict)) else str(value)
            for key, value in params.items()}
