import pytest

from src.main import build_parser, main, resolve_config
from src.services.campaign import SUITES

SMALL = ['--max-degree', '2', '--max-weight', '2']


def run(capsys, *argv):
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


class TestValidate:
    def test_fixture_passes(self, capsys):
        status, out, _ = run(capsys, 'validate', '--fixture', 'K1', *SMALL)
        assert status == 0
        assert '# command: validate' in out

    def test_mutant_is_falsified(self, capsys):
        status, out, _ = run(capsys, 'validate', '--fixture', 'mutant-face',
                             '--max-degree', '3', '--max-weight', '1', '--out', 'record')
        assert status == 1
        assert 'd_i d_j = d_{j-1} d_i' in out
        assert out.endswith('status 1\n')

    def test_input_file(self, capsys, tmp_path):
        path = tmp_path / 'point.schema'
        path.write_text("field q\ntruncation 1 1\nbasis 1 a 1\n")
        status, out, _ = run(capsys, 'validate', '--input', str(path), '--out', 'csv')
        assert status == 0
        assert 'suite,fixture,check,key,measure,value,verdict,witness' in out

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / 'broken.schema'
        path.write_text("field q\ntruncation 1 1\nbasis one a 1\n")
        status, out, err = run(capsys, 'validate', '--input', str(path))
        assert status == 2
        assert out == ''
        assert 'line 3, column 7' in err

    def test_missing_file(self, capsys, tmp_path):
        status, _, err = run(capsys, 'validate', '--input', str(tmp_path / 'absent.schema'))
        assert status == 2
        assert 'FileNotFoundError' in err


class TestCommands:
    def test_pi_records(self, capsys):
        status, out, _ = run(capsys, 'pi', '--fixture', 'K2', '--max-degree', '3', '--max-weight', '1',
                             '--out', 'record')
        assert status == 0
        assert out.splitlines() == ['pi K2 0 1 0', 'pi K2 1 1 0', 'pi K2 2 1 1']

    def test_pi_of_bar(self, capsys):
        status, out, _ = run(capsys, 'pi', '--fixture', 'K1', '--bar', '1', *SMALL, '--out', 'csv')
        assert status == 0
        assert out.splitlines()[0] == 'object,q,w,dim'
        assert 'b(K1),1,1,1' in out

    def test_fixtures_listing(self, capsys):
        status, out, _ = run(capsys, 'fixtures', *SMALL)
        assert status == 0
        assert 'mutant-face' in out
        assert 'unavailable' in out

    def test_export(self, capsys):
        status, out, _ = run(capsys, 'export', '--fixture', 'K1', *SMALL)
        assert status == 0
        assert out.startswith('# K1\nfield q\ntruncation 2 2\n')

    def test_unknown_fixture_is_usage_error(self):
        with pytest.raises(SystemExit) as info:
            main(['validate', '--fixture', 'K9'])
        assert info.value.code == 2


class TestVerify:
    def test_dold_puppe(self, capsys):
        status, out, _ = run(capsys, 'verify', 'dold-puppe', '--max-degree', '3', '--max-weight', '2')
        assert status == 0
        assert 'dold-puppe' in out

    def test_convergence(self, capsys):
        status, _, _ = run(capsys, 'verify', 'convergence', '--fixture', 'K1',
                           '--max-degree', '1', '--max-weight', '2', '--t', '1', '--q', '0')
        assert status == 0

    def test_record_output_is_deterministic(self, capsys):
        argv = ['verify', 'e0', '--max-degree', '2', '--max-weight', '2', '--out', 'record', '--seed', '7']
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second
        assert 'header seed 7' in first
        assert 'header suite.e0 1.0' in first

    def test_truncation_too_small(self, capsys):
        status, _, err = run(capsys, 'verify', 'convergence', '--fixture', 'K1',
                             '--max-degree', '1', '--max-weight', '1', '--q', '1')
        assert status == 2
        assert 'TruncationError' in err


class TestConfig:
    def test_flags_resolve(self):
        args = build_parser().parse_args(['verify', 'tower', '--fixture', 'K1', '--fixture', 'free1',
                                          '--field', 'fp:3', '--seed', '5', *SMALL])
        config = resolve_config(args)
        assert config.command == 'verify tower'
        assert config.fixtures == ('K1', 'free1')
        assert config.field.characteristic == 3
        assert (config.N, config.W, config.seed) == (2, 2, 5)

    def test_bad_field_is_usage_error(self, capsys):
        status, _, err = run(capsys, 'validate', '--fixture', 'K1', '--field', 'fp:4', *SMALL)
        assert status == 2
        assert 'ValueError' in err


@pytest.mark.slow
class TestAcceptanceRun:
    def test_verify_all(self, capsys):
        status, out, err = run(capsys, 'verify', 'all', '--max-degree', '4', '--max-weight', '4',
                               '--out', 'csv', '--seed', '3')
        assert status == 0, err
        lines = out.splitlines()
        header = lines.index('suite,fixture,check,key,measure,value,verdict,witness')
        rows = lines[header + 1:]
        assert {row.split(',')[0] for row in rows} == set(SUITES)
        assert not any(',FALSIFICATION,' in row for row in rows)
        assert '# seed: 3' in out
        for suite in SUITES:
            assert f"# suite.{suite}: " in out
