import pytest

from config.settings import AcceptanceSettings, DevelopmentSettings, Settings
from src.models.errors import SchemaError
from src.models.report import CheckReport, RunReport
from utils.helpers import (
    create_error_message, export_to_csv, format_record, pi_table_frame, safe_filename,
)


class TestSettings:
    def test_defaults_validate(self):
        DevelopmentSettings.validate()
        assert Settings.get_truncation() == (Settings.ADAMS_MAX_DEGREE, Settings.ADAMS_MAX_WEIGHT)

    def test_run_defaults(self):
        defaults = Settings.get_run_defaults()
        assert set(defaults) == {'field', 'max_degree', 'max_weight', 'cap', 'seed', 'out'}

    def test_bad_cap(self, monkeypatch):
        monkeypatch.setattr(Settings, 'ADAMS_BLOCK_CAP', 0)
        with pytest.raises(ValueError):
            Settings.validate()

    def test_acceptance_needs_full_truncation(self, monkeypatch):
        monkeypatch.setattr(AcceptanceSettings, 'ADAMS_MAX_DEGREE', 2)
        with pytest.raises(ValueError):
            AcceptanceSettings.validate()


def sample_run():
    run = RunReport('validate', 'q', 2, 2, 0)
    report = CheckReport('validate')
    report.measure('dim', 3, n=1, w=1)
    report.fail('f s_i = s_i f', 'x.01', i=0, q=1, w=1)
    run.add_check('validate', 'K1', report)
    return run


class TestHelpers:
    def test_record_format(self):
        text = format_record(sample_run())
        lines = text.splitlines()
        assert lines[0] == 'header command validate'
        assert ('record suite=validate fixture=K1 check=validate key="i=0,q=1,w=1" '
                'measure="f s_i = s_i f" value="" verdict=FALSIFICATION witness=x.01') in lines
        assert lines[-1] == 'status 1'

    def test_pi_grid(self):
        grid = pi_table_frame({(0, 1): 0, (1, 1): 1, (1, 2): 2})
        assert list(grid.columns) == ['w=1', 'w=2']
        assert grid.loc[1, 'w=2'] == 2
        assert grid.loc[0, 'w=2'] == 0
        assert pi_table_frame({}).empty

    def test_csv(self):
        text = export_to_csv([{'a': 1, 'b': 2}], ['b', 'a'])
        assert text == 'b,a\n2,1\n'
        assert export_to_csv([]) == ''

    def test_error_message_has_position(self):
        message = create_error_message(SchemaError('unknown label', 4, 10), 'running validate')
        assert message == 'error (SchemaError) while running validate at line 4, column 10: unknown label'

    def test_safe_filename(self):
        assert safe_filename('verify dold-puppe_7.txt') == 'verify_dold-puppe_7.txt'
