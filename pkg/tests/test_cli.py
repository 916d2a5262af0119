import json

import pytest
from click.testing import CliRunner

from src.cli import cli
from src.pencil import factored_pencil, identity_pairing


@pytest.fixture
def runner():
    return CliRunner()


def _json(result) -> dict:
    return json.loads(result.stdout)


def test_chern_all_s(runner):
    result = runner.invoke(cli, ['--seed', '3', 'chern', '--d', '2', '--k', '2'])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload['intersections'] == [1, -2]
    assert payload['dual_intersections'] == [1, 2]
    assert payload['seed'] == 3


def test_chern_single_s(runner):
    payload = _json(runner.invoke(cli, ['chern', '--d', '4', '--k', '3', '--s', '3']))
    assert payload['intersection'] == -1
    assert payload['dual_intersection'] == 1
    top = payload['intersection_class']
    assert (top['d'], top['r']) == (4, 4)
    assert top['coeffs'][3][3] == -1
    assert sum(abs(c) for row in top['coeffs'] for c in row) == 1


def test_chern_bad_shape_exits_two(runner):
    result = runner.invoke(cli, ['chern', '--d', '1', '--k', '2'])
    assert result.exit_code == 2
    assert _json(result)['error']['type'] == 'PreconditionError'


def test_splitting_from_file(runner, tmp_path):
    path = tmp_path / 'pencil.json'
    path.write_text(json.dumps(identity_pairing(2, 2).to_pencil().to_json()))
    result = runner.invoke(cli, ['splitting', str(path)])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload['splitting_type'] == [1, 1]
    assert payload['hirzebruch_e'] == 0


def test_splitting_rejects_degenerate_pencil(runner, tmp_path):
    path = tmp_path / 'pencil.json'
    path.write_text(json.dumps({'dprime': 2, 'k': 1, 'A': [[1], [0]], 'B': [[1], [0]], 'field': 'Q'}))
    result = runner.invoke(cli, ['splitting', str(path)])
    assert result.exit_code == 2
    assert _json(result)['error']['type'] == 'NotOneGenericError'


def test_splitting_invalid_json(runner):
    result = runner.invoke(cli, ['splitting', '-'], input='{not json')
    assert result.exit_code == 2
    assert _json(result)['error']['type'] == 'ParseError'


def test_classify(runner):
    result = runner.invoke(cli, ['classify', '--curve', '0,1@Fp:10007', '--D', 'O:2', '--Dprime', 'O:4'])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload['surface'] == 'Sigma_2'
    assert payload['splitting_type'] == [2, 0]
    assert payload['match']


def test_classify_text_mode(runner):
    result = runner.invoke(cli, ['--text', 'classify', '--curve', '0,1@Fp:10007', '--D', 'O:2', '--Dprime', 'O:5'])
    assert result.exit_code == 0
    assert result.stdout.startswith('✅ Sigma_1')


def test_classify_bad_curve(runner):
    result = runner.invoke(cli, ['classify', '--curve', '0,0@Fp:10007', '--D', 'O:2', '--Dprime', 'O:5'])
    assert result.exit_code == 2


def test_secant_single_probe(runner):
    result = runner.invoke(cli, ['--seed', '7', 'secant', '--n', '8', '--d', '3', '--probe', 'sec2-off-curve'])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload['verdict'] == 'smooth'
    assert payload['codim'] == 3


def test_secant_is_deterministic(runner):
    args = ['--seed', '11', 'secant', '--n', '8', '--d', '3', '--probe', 'generic-slice', '--probe', 'curve-point']
    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)
    assert first.stdout == second.stdout
    verdicts = [p['verdict'] for p in _json(first)['probes']]
    assert verdicts == ['smooth', 'singular']


def test_secant_rejects_bad_dimensions(runner):
    result = runner.invoke(cli, ['secant', '--n', '6', '--d', '3'])
    assert result.exit_code == 2


def test_verify_chow_suite(runner):
    result = runner.invoke(cli, ['verify', '--suite', 'chow', '--workers', '2'])
    assert result.exit_code == 0
    payload = _json(result)
    assert payload['passed']
    assert [c['name'] for c in payload['checks']] == [
        'chow.anticanonical',
        'chow.hirzebruch_lattice',
        'chow.intersection_sweep',
        'chow.multiplicative_sequence',
    ]


def test_verify_output_is_byte_identical(runner):
    first = runner.invoke(cli, ['--seed', '5', 'verify', '--suite', 'chow', '--workers', '1'])
    second = runner.invoke(cli, ['--seed', '5', 'verify', '--suite', 'chow', '--workers', '3'])
    assert first.exit_code == 0
    assert first.stdout == second.stdout


# === 分母為 0 的輸入 ===
def test_classify_zero_denominator_in_curve(runner):
    result = runner.invoke(cli, ['classify', '--curve', '1/0,1@Q', '--D', 'O:2', '--Dprime', 'O:5'])
    assert result.exit_code == 2
    assert _json(result)['error']['type'] == 'ParseError'


def test_splitting_zero_denominator_in_entry(runner, tmp_path):
    path = tmp_path / 'pencil.json'
    path.write_text(json.dumps({'dprime': 2, 'k': 1, 'A': [['1/0'], [0]], 'B': [[0], [1]], 'field': 'Q'}))
    result = runner.invoke(cli, ['splitting', str(path)])
    assert result.exit_code == 2
    assert _json(result)['error']['type'] == 'ParseError'


def test_secant_zero_denominator_in_divisor(runner):
    result = runner.invoke(cli, ['secant', '--curve', '0,1@Q', '--n', '7', '--d', '2', '--z', '1/0,1:2'])
    assert result.exit_code == 2
    assert _json(result)['error']['type'] == 'ParseError'


def test_splitting_reports_cross_checked_counts(runner, tmp_path):
    path = tmp_path / 'pencil.json'
    path.write_text(json.dumps(factored_pencil().to_json()))
    payload = _json(runner.invoke(cli, ['splitting', str(path)]))
    assert payload['splitting_type'] == [2, 0]
    assert payload['trivial_summands'] == 1
    assert payload['hirzebruch_e'] == 2
    assert payload['image_rank'] == 3
