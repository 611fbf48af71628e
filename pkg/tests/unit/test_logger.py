# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
import uuid
from pathlib import Path

import pytest

from pseudofinite_workbench.logger import setup_logger


@pytest.fixture()
def log_path(tmp_path: Path) -> Path:
    return tmp_path / "pfw.log"


def _fresh_logger(log_path: Path) -> logging.Logger:
    return setup_logger(name=f"test_logger_{uuid.uuid4().hex}", log_file_path=str(log_path))


@pytest.mark.parametrize(
    "log_level, log_message, expected_prefix",
    [
        (logging.DEBUG, "Eliminated x over 2 branch(es)", "[DEBUG]"),
        (logging.INFO, "Report written to out.csv", "] Report written"),
        (logging.WARNING, "Sampled 2000 of 9261 parameter tuples", "[WARNING]"),
        (logging.ERROR, "Corpus run failed", "[ERROR]"),
    ],
)
def test_file_logs(log_path, log_level, log_message, expected_prefix):
    """Every level reaches the file with its level name and call site."""
    logger = _fresh_logger(log_path)
    logger.log(log_level, log_message)

    content = log_path.read_text()
    assert log_message in content
    assert expected_prefix in content
    assert "[test_logger:test_file_logs]" in content


@pytest.mark.parametrize(
    "log_level, log_message, expected_prefix",
    [
        (logging.INFO, "sa_tree chain of depth 2: PASS", ""),
        (logging.WARNING, "Watch out!", "[WARNING]"),
        (logging.ERROR, "Big issue", "[ERROR]"),
    ],
)
def test_console_logs(log_path, capfd, log_level, log_message, expected_prefix):
    """INFO lines are printed bare; other levels carry their name."""
    logger = _fresh_logger(log_path)
    logger.log(log_level, log_message)

    captured = capfd.readouterr()
    assert log_message in captured.out
    if expected_prefix:
        assert captured.out.startswith(expected_prefix)
    else:
        assert captured.out == f"{log_message}\n"


def test_debug_stays_off_the_console(log_path, capfd):
    logger = _fresh_logger(log_path)
    logger.debug("Intermediate form of x at k=2")

    assert capfd.readouterr().out == ""
    assert "Intermediate form of x at k=2" in log_path.read_text()


def test_setup_is_idempotent(log_path):
    """A second setup of the same name reuses the handlers instead of adding more."""
    name = f"test_logger_{uuid.uuid4().hex}"
    first = setup_logger(name=name, log_file_path=str(log_path))
    second = setup_logger(name=name, log_file_path=str(log_path.with_name("other.log")))

    assert first is second
    assert len(second.handlers) == 2
    assert not log_path.with_name("other.log").exists()


def test_log_directory_comes_from_the_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("PFW_LOG_DIR", str(tmp_path / "logs"))
    logger = setup_logger(name=f"test_logger_{uuid.uuid4().hex}")
    logger.info("Checked 200 formulas")

    assert (tmp_path / "logs" / "pfw.log").read_text().endswith("Checked 200 formulas\n")


def test_console_level_comes_from_the_environment(log_path, capfd, monkeypatch):
    monkeypatch.setenv("PFW_LOG_LEVEL", "debug")
    logger = _fresh_logger(log_path)
    logger.debug("Anchor of x moved to f(y)")

    assert capfd.readouterr().out == "[DEBUG] Anchor of x moved to f(y)\n"


def test_unknown_console_level_is_rejected(log_path, monkeypatch):
    monkeypatch.setenv("PFW_LOG_LEVEL", "chatty")
    with pytest.raises(ValueError, match="PFW_LOG_LEVEL"):
        _fresh_logger(log_path)
