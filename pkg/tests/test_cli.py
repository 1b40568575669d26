import json

from app.cli import cli


def invoke(runner, *args):
    result = runner.invoke(cli, ['--env', 'testing', *args])
    return result, json.loads(result.stdout) if result.stdout.strip() else None


def test_swan(runner):
    result, doc = invoke(runner, 'swan', '-p', '3', '-e', '1', '-dR', '4', '-m', '3')
    assert result.exit_code == 0
    assert doc == {'swan': 3}


def test_report(runner):
    result, doc = invoke(runner, 'report', '-p', '3', '-R', '1', '-e', '1')
    assert result.exit_code == 0
    assert doc['verdict'] == 'primitive'
    assert doc['swan'] == 1
    assert doc['input']['modulus'] == [0, 1]


def test_report_is_deterministic(runner):
    first = runner.invoke(cli, ['--env', 'testing', 'report', '-p', '3', '-f', '2', '-R', '1', '-e', '1', '-m', '2'])
    second = runner.invoke(cli, ['--env', 'testing', '--workers', '2', 'report',
                                 '-p', '3', '-f', '2', '-R', '1', '-e', '1', '-m', '2'])
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout


def test_report_from_input_file(runner, tmp_path):
    path = tmp_path / 'input.json'
    path.write_text(json.dumps({'p': 3, 'f': 1, 'R': ['1'], 'e': 1, 'm': 2}), encoding='utf-8')
    result, doc = invoke(runner, 'report', '--input', str(path))
    assert result.exit_code == 0
    assert doc['input']['m'] == 2
    assert doc['verdict'] == 'primitive_unramified_unstable'


def test_validation_errors_exit_with_2(runner, tmp_path):
    result, doc = invoke(runner, 'report', '-p', '3', '-R', '1', '-e', '1', '-m', '3')
    assert result.exit_code == 2
    assert doc['kind'] == 'validation'
    result, doc = invoke(runner, 'report', '-p', '3')
    assert result.exit_code == 2
    path = tmp_path / 'input.txt'
    path.write_text('p = 3', encoding='utf-8')
    result, doc = invoke(runner, 'report', '--input', str(path))
    assert result.exit_code == 2
    assert 'Unsupported input format' in doc['error']


def test_unknown_command_exits_with_1(runner):
    result = runner.invoke(cli, ['--env', 'testing', 'frobnicate'])
    assert result.exit_code == 1


def test_primitivity_and_quotient(runner):
    args = ['-p', '3', '-f', '2', '-R', '1', '-e', '1', '-m', '2']
    result, doc = invoke(runner, 'primitivity', *args)
    assert result.exit_code == 0
    assert doc['verdict'] == 'imprimitive'
    result, doc = invoke(runner, 'quotient', *args)
    assert result.exit_code == 0
    assert doc['verified'] is True
    assert doc['problems'] == []
    assert doc['induction_data']['F_prime_degree'] == 3


def test_quotient_of_an_anisotropic_module(runner):
    result, doc = invoke(runner, 'quotient', '-p', '3', '-R', '1', '-e', '1')
    assert result.exit_code == 2


def test_rootsystem(runner):
    result, doc = invoke(runner, 'rootsystem', '-p', '3', '-e', '1')
    assert result.exit_code == 0
    system = doc['root_system']
    assert (system['a'], system['b'], system['c']) == (2, 1, 1)
    assert system['type'] == 'A'
    assert system['matches_VR'] is True


def test_count(runner):
    result, doc = invoke(runner, 'count', '-p', '3', '-R', '1', '-e', '1', '--max-k', '3', '--oracle')
    assert result.exit_code == 0
    assert doc['counts'][0] == 3
    assert doc['pairs'] == doc['counts']
    result, doc = invoke(runner, 'count', '-p', '3', '-R', '1', '-e', '1', '--zeta')
    assert result.exit_code == 0
    assert len(doc['zeta_numerator']) == 7


def test_anisotropy_of_direct_sums(runner):
    base = ['anisotropy', '-p', '3', '-R', '1', '-e', '1', '--e2', '1', '--m2', '5']
    result, doc = invoke(runner, *base, '--R2', '1')
    assert result.exit_code == 0
    assert doc['completely_anisotropic'] is True
    assert doc['dim'] == 4
    result, doc = invoke(runner, *base, '--R2', '2', '--oracle')
    assert result.exit_code == 0
    assert doc['completely_anisotropic'] is False
    assert doc['subspace_oracle'] is False
    assert doc['nu_label'] in ('(M(W),0)', '(M(W),2)', 'n/a')


def test_prime(runner):
    result, doc = invoke(runner, 'prime', '-p', '3', '-R', '1;0;1', '-t', '1')
    assert result.exit_code == 0
    assert doc['prime'] is True
    assert doc['phi']['irreducible'] is True
    result, doc = invoke(runner, 'prime', '-p', '2', '-f', '2', '-R', '1;0;1', '-t', '2')
    assert doc['prime'] is False
    assert doc['phi']['irreducible'] is True
    assert doc['left_factor'] is not None


def test_scan(runner):
    result, doc = invoke(runner, 'scan', '-p', '3', '-e', '1', '-m', '1', '-m', '3')
    assert result.exit_code == 0
    assert doc['skipped_m'] == [3]
    assert doc['polynomials'] == 6
