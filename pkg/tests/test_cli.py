import argparse
import json
from fractions import Fraction

import pytest

from cli import USAGE_ERROR, _bounds, _coefficients, run


def test_enumerate_prints_json(capsys):
    assert run(['enumerate', '', 'oooo']) == 0
    export = json.loads(capsys.readouterr().out)
    assert export["check"] == 'enumerate'
    assert export["result"]["count"] == 15


def test_text_output_prints_the_report(capsys):
    assert run(['enumerate', 'o', 'o', '--output', 'text']) == 0
    assert capsys.readouterr().out.startswith('=== check started: enumerate ===')


def test_close_reads_a_partition_file(tmp_path, capsys):
    path = tmp_path / "gens.txt"
    path.write_text("oo|oo:(1,4)(2,3)\n")
    assert run(['close', '--gens', str(path), '--bound', '4', '--real']) == 0
    assert json.loads(capsys.readouterr().out)["result"]["status"] == 'stable_within_bound'


def test_level_with_bounds(capsys):
    assert run(['level', '--group', '{"kind": "SN", "N": 3}', '--bounds', '3,3']) == 0
    assert json.loads(capsys.readouterr().out)["result"]["level_within_bound"] == 1


def test_presentation_level_search_is_inconclusive():
    assert run(['presentation', '--group', '{"kind": "SN", "N": 3}', '--bound', '4']) == 2


def test_maximality_series():
    assert run(['maximality', '--series', 'O', '--n', '3', '--bound', '4', '--coeffs', '1:1', '--budget', '2']) == 0


@pytest.mark.parametrize("argv", [
    ['frobnicate'],
    ['close'],
    ['level', '--group', '{}', '--bounds', '3'],
    ['maximality', '--series', 'Q', '--n', '3'],
    ['enumerate', '', 'oo', '--output', 'xml'],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == USAGE_ERROR
    assert capsys.readouterr().err


def test_malformed_group_is_a_usage_error(capsys):
    assert run(['brauer', '--group', '{"kind": ']) == USAGE_ERROR
    assert 'malformed group spec' in capsys.readouterr().err


def test_missing_certificate_is_a_usage_error(tmp_path):
    assert run(['replay', '--cert', str(tmp_path / "missing.json")]) == USAGE_ERROR


def test_bad_environment_is_a_usage_error(monkeypatch, capsys):
    monkeypatch.setenv('PARTITIONS_SEED', 'x')
    assert run(['enumerate', '', 'o']) == USAGE_ERROR
    assert 'PARTITIONS_SEED' in capsys.readouterr().err


def test_argument_types():
    assert _bounds('2,5') == (2, 5)
    assert _coefficients('1:1,2/3:-5') == [(Fraction(1), Fraction(1)), (Fraction(2, 3), Fraction(-5))]
    with pytest.raises(argparse.ArgumentTypeError):
        _coefficients('1-1')
    with pytest.raises(argparse.ArgumentTypeError):
        _bounds('1,2,3')


def test_domain_failures_are_not_usage_errors(capsys):
    assert run(['envelope', '--group', '{"kind": "trivial", "N": 3}', '--bound', '3']) == 1
    captured = capsys.readouterr()
    assert json.loads(captured.out)["error_type"] == 'PreconditionError'
    assert not captured.err


def test_invalid_group_parameters_are_usage_errors(capsys):
    assert run(['brauer', '--group', '{"kind": "HNsd", "N": 3, "s": 4, "d": 3}']) == USAGE_ERROR
    assert 'lcm' in capsys.readouterr().err
