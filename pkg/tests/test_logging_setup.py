import json
import logging

import pytest

from config import Config
from logging_setup import StructuredJSONFormatter, get_logger, setup_logging


@pytest.fixture
def file_config(monkeypatch, tmp_path):
    monkeypatch.setenv("FQGEOM_ENABLE_FILE_LOGGING", "true")
    monkeypatch.setenv("FQGEOM_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.delenv("FQGEOM_LOG_LEVEL", raising=False)
    yield Config()
    for name in ("", "verify_suites", "batch_runs"):
        logger = logging.getLogger(name)
        for handler in [h for h in logger.handlers if getattr(h, "_fqgeom", False)]:
            logger.removeHandler(handler)
            handler.close()


class TestFormatter:
    def test_extra_fields(self):
        record = logging.LogRecord("batch_runs", logging.INFO, __file__, 10, "cell %s", ("q=3",), None)
        record.cell = 42
        entry = json.loads(StructuredJSONFormatter().format(record))
        assert entry["message"] == "cell q=3"
        assert entry["level"] == "INFO"
        assert entry["cell"] == 42
        assert entry["timestamp"].endswith("Z")


class TestSetup:
    def test_split_files(self, file_config, tmp_path):
        loggers = setup_logging(file_config)
        assert set(loggers) == {"root", "verify_suites", "batch_runs"}
        get_logger("verify_suites").info("suite done")
        get_logger("gf").error("bad field")
        for handler in logging.getLogger().handlers + loggers["verify_suites"].handlers:
            handler.flush()

        logs = tmp_path / "logs"
        verify_lines = (logs / "verify.log").read_text().splitlines()
        assert json.loads(verify_lines[-1])["message"] == "suite done"
        assert "bad field" in (logs / "error.log").read_text()
        assert "suite done" not in (logs / "error.log").read_text()
        assert "suite done" in (logs / "fqgeom.log").read_text()

    def test_repeated_setup_does_not_stack(self, file_config):
        setup_logging(file_config)
        setup_logging(file_config)
        assert len([h for h in logging.getLogger("batch_runs").handlers if getattr(h, "_fqgeom", False)]) == 1
        assert len([h for h in logging.getLogger().handlers if getattr(h, "_fqgeom", False)]) == 3
