import json

import pytest

from engine.checks import CHECKS_REGISTRY, get_check
from engine.config import RunConfig
from engine.errors import ExactnessError, WordMismatchError
from engine.framework import FAIL, INCONCLUSIVE, PASS, exit_code, run_check
from engine.maximality import capping_search
from engine.partitions import parse_partition

SN3 = {"kind": "SN", "N": 3}


def test_exit_codes():
    assert [exit_code(v) for v in (PASS, FAIL, INCONCLUSIVE)] == [0, 1, 2]


def test_registry():
    assert set(CHECKS_REGISTRY) == {
        "enumerate", "close", "envelope", "brauer", "level", "presentation", "verify-halflib", "maximality", "replay",
    }
    assert get_check("nope") is None


def test_unknown_check():
    with pytest.raises(ValueError, match="unknown check"):
        run_check("nope")


def test_report_is_printed(capsys):
    export = run_check("enumerate", upper='', lower='ooo')
    out = capsys.readouterr().out
    assert out.startswith('=== check started: enumerate ===')
    assert 'partitions: 5' in out
    assert 'verdict: pass' in out
    assert export["result"]["count"] == 5
    assert export["config"]["seed"] == 20240601


def test_quiet_runs_print_nothing(capsys):
    run_check("enumerate", quiet=True, upper='o', lower='o')
    assert capsys.readouterr().out == ''


def test_close_check():
    export = run_check("close", quiet=True, gens=['oo|oo:(1,4)(2,3)'], bound=4, real=True)
    assert export["verdict"] == PASS
    assert export["result"]["status"] == 'stable_within_bound'
    assert len(export["result"]["cells"]["|oooo"]) == 3
    assert export["params"]["gens"] == ['oo|oo:(1,4)(2,3)']


def test_linear_close_needs_n():
    with pytest.raises(ValueError, match="matrix size"):
        run_check("close", quiet=True, gens=[], linear=True)


def test_budget_overruns_are_inconclusive():
    export = run_check("envelope", RunConfig(memory_budget=1000), quiet=True, group=SN3, bound=4)
    assert export["verdict"] == INCONCLUSIVE
    assert "budget" in export["error"]


def test_envelope_and_brauer_checks():
    assert run_check("envelope", quiet=True, group=SN3, bound=3)["result"]["is_category"]
    export = run_check("brauer", quiet=True, group=SN3, bound=3)
    assert export["verdict"] == PASS
    assert export["result"]["expected"] == 'P'


def test_envelope_of_a_non_homogeneous_group_fails():
    export = run_check("envelope", quiet=True, group={"kind": "trivial", "N": 3}, bound=3)
    assert export["verdict"] == FAIL
    assert export["error_type"] == 'PreconditionError'
    assert "result" not in export


@pytest.mark.parametrize("error, verdict", [(ExactnessError, INCONCLUSIVE), (WordMismatchError, FAIL)])
def test_domain_errors_become_verdicts(monkeypatch, capsys, error, verdict):
    def failing(config, **params):
        raise error("no exact entries")

    monkeypatch.setitem(CHECKS_REGISTRY, "failing", failing)
    export = run_check("failing", n=3)
    assert export["verdict"] == verdict
    assert export["error"] == "no exact entries"
    assert f"verdict: {verdict}" in capsys.readouterr().out


def test_level_and_presentation_checks():
    export = run_check("level", quiet=True, group=SN3, harvest_bound=3, closure_bound=3)
    assert export["verdict"] == PASS
    assert export["result"]["level_within_bound"] == 1
    export = run_check("presentation", quiet=True, group=SN3, rmax=1, bound=4)
    assert export["verdict"] == INCONCLUSIVE


def test_halflib_check():
    export = run_check("verify-halflib", quiet=True, n=3)
    assert export["verdict"] == PASS
    assert export["result"]["documented_expectations"]["BNo_presentation_level"] == 6


def test_halflib_check_needs_n():
    with pytest.raises(ValueError):
        run_check("verify-halflib", quiet=True)


def test_maximality_check():
    export = run_check("maximality", quiet=True, series='O', n=3, bound=4, coefficients=[(1, 1)], budget=2)
    assert export["verdict"] == PASS
    assert export["result"]["instances"] == 2


def test_replay_check(tmp_path):
    certificate = capping_search(parse_partition('oo|oooo:(1,4)(2,3)(5,6)'))
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(certificate.to_json()))
    export = run_check("replay", quiet=True, cert=str(path))
    assert export["verdict"] == PASS
    assert export["result"]["valid"]

    data = certificate.to_json()
    data["end"] = 'oo|oo:(1,2)(3,4)'
    assert run_check("replay", quiet=True, cert=data)["verdict"] == FAIL
