import json

import pytest
from pydantic import ValidationError

from src.core.config import Settings
from src.core.exceptions import InsufficientDataError, SchemaVersionError, SidDmdError
from src.core.logging import configure_logging, get_logger


class TestSettings:
    def test_defaults(self):
        settings = Settings(_env_file=None)
        assert settings.DEFAULT_DT == 1.0
        assert settings.MODEL_SCHEMA_VERSION == 1
        assert settings.DEGENERACY_REL_TOL == 1e-10

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("LOG_FORMAT", "JSON")
        monkeypatch.setenv("ORACLE_SAMPLES", "200")
        settings = Settings(_env_file=None)
        assert settings.LOG_FORMAT == "json"
        assert settings.ORACLE_SAMPLES == 200

    def test_rejects_non_positive_tolerance(self, monkeypatch):
        monkeypatch.setenv("CONSISTENCY_REL_TOL", "0")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)


class TestErrors:
    def test_machine_readable_payload(self):
        error = InsufficientDataError("not enough samples", required=5, available=3)
        assert error.to_dict() == {"error": "insufficient_data", "detail": "not enough samples (required at least 5, got 3)"}
        assert isinstance(error, SidDmdError)

    def test_codes_are_distinct(self):
        assert SchemaVersionError("x").code == "schema_version"
        assert SidDmdError("x", code="custom").code == "custom"


class TestLogging:
    def test_json_lines_on_stderr(self, capsys):
        configure_logging("INFO", "json")
        try:
            get_logger("test").info("event_name", value=3)
            record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
            assert record["event"] == "event_name" and record["value"] == 3
            assert record["level"] == "info"
        finally:
            configure_logging()

    def test_level_filtering(self, capsys):
        configure_logging("ERROR", "console")
        try:
            get_logger("test").info("hidden")
            assert "hidden" not in capsys.readouterr().err
        finally:
            configure_logging()
