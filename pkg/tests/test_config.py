"""Configuration tests"""

from pathlib import Path

from src.core.config import (LEDGER_ENV_VAR, PROJECT_ROOT, Settings, get_settings,
                             interpolate_env_vars, reload_settings)


class TestSettings:
    """Test defaults, the YAML overlay and environment overrides"""

    def test_defaults(self, fresh_settings):
        assert fresh_settings.search.order_cap == 24
        assert fresh_settings.primes.jacobian_primes == [3, 5, 7, 11, 17, 29, 41, 47]
        assert fresh_settings.density.default_t == 2 ** 14

    def test_data_files_exist(self, fresh_settings):
        assert fresh_settings.ledger_file.exists()
        assert fresh_settings.fixtures_file.exists()

    def test_yaml_overlay(self, tmp_path):
        path = tmp_path / "quadtorsion.yaml"
        path.write_text("search:\n  max_u: 7\nprimes:\n  max_abs_disc: 40\n")
        settings = Settings(yaml_path=path)
        assert settings.search.max_u == 7
        assert settings.primes.max_abs_disc == 40
        assert settings.search.max_v == 50

    def test_yaml_interpolation(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DATA_LEDGER_PATH", "/tmp/facts.jsonl")
        path = tmp_path / "quadtorsion.yaml"
        path.write_text("data:\n  ledger_path: \"${data:ledger_path}\"\n")
        settings = Settings(yaml_path=path)
        assert settings.data.ledger_path == "/tmp/facts.jsonl"

    def test_ledger_env_override(self, monkeypatch):
        monkeypatch.setenv(LEDGER_ENV_VAR, "/elsewhere/facts.jsonl")
        settings = reload_settings()
        assert settings.ledger_file == Path("/elsewhere/facts.jsonl")
        monkeypatch.delenv(LEDGER_ENV_VAR)
        reload_settings()

    def test_singleton(self, fresh_settings):
        assert get_settings() is get_settings()
        assert reload_settings() is not fresh_settings

    def test_relative_paths_resolve_to_project(self, fresh_settings):
        resolved = fresh_settings.resolve_path("no/such/file.txt")
        assert resolved == PROJECT_ROOT / "no/such/file.txt"


def test_interpolate_env_vars():
    assert interpolate_env_vars("${data:ledger_path}", {"DATA_LEDGER_PATH": "x"}) == "x"
    assert interpolate_env_vars("${missing}", {}) == "${missing}"
    assert interpolate_env_vars(3, {}) == 3
