"""Tests for environment driven settings."""

import importlib

import pytest

import src.core.config as config


@pytest.fixture
def reload_config(monkeypatch):
    """Reload the settings module under a patched environment and restore it afterwards."""

    def _reload(**env):
        for key, value in env.items():
            monkeypatch.setenv(key, value)
        return importlib.reload(config)

    yield _reload
    monkeypatch.undo()
    importlib.reload(config)


def test_defaults(reload_config, monkeypatch):
    """Verify the built-in defaults."""
    for key in ("RKM_OUTPUT_DIR", "RKM_WORKERS", "RKM_CHEEGER_MAX_N", "RKM_CP", "RKM_CG_SAMPLES"):
        monkeypatch.delenv(key, raising=False)
    cfg = reload_config()
    assert cfg.OUTPUT_DIR == "./runs"
    assert cfg.get_workers() == 1
    assert cfg.CHEEGER_MAX_N == 20
    assert cfg.DEFAULT_CP == 1.0
    assert cfg.CG_SAMPLES == 10000


def test_environment_overrides(reload_config, tmp_path):
    """Verify RKM_* variables override the defaults."""
    cfg = reload_config(RKM_OUTPUT_DIR=str(tmp_path), RKM_WORKERS="4", RKM_CP="0.5")
    assert cfg.OUTPUT_DIR == str(tmp_path)
    assert cfg.get_workers() == 4
    assert cfg.DEFAULT_CP == 0.5


def test_invalid_worker_count(reload_config):
    """Verify a non-positive worker count is reported on use."""
    cfg = reload_config(RKM_WORKERS="0")
    with pytest.raises(ValueError, match="RKM_WORKERS"):
        cfg.get_workers()


def test_debug_flag(reload_config):
    """Verify RKM_DEBUG accepts true-like values."""
    assert reload_config(RKM_DEBUG="true").DEBUG


def test_debug_only_from_rkm_variable(reload_config):
    """Verify CI environment variables neither enable debugging nor leave a setting behind."""
    cfg = reload_config(CI="true", GITHUB_ACTIONS="true", RKM_DEBUG="0")
    assert cfg.DEBUG is False
    assert not hasattr(cfg, "CI_ENV")
    assert reload_config(RKM_DEBUG="1").DEBUG is True
