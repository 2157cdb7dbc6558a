"""
Tests for TOML settings
"""

import pytest

from src.phase_annihilator.core.quadrature import QuadConfig
from src.phase_annihilator.core.zerofind import ZeroFindConfig
from src.phase_annihilator.errors import MalformedDocumentError
from src.phase_annihilator.utils import settings as settings_module
from src.phase_annihilator.utils.settings import Settings, dump_settings, load_settings, write_settings


class TestLoadSettings:
    """Test cases for reading settings"""

    def test_defaults_without_file(self, tmp_path, monkeypatch):
        """Test that a missing default file gives built-in defaults"""
        monkeypatch.setattr(settings_module, "get_settings_path", lambda: tmp_path / "absent.toml")
        settings = load_settings()
        assert settings == Settings()
        assert settings.to_solver_config().abs_tol is None

    def test_explicit_missing_file(self, tmp_path):
        with pytest.raises(IOError):
            load_settings(tmp_path / "absent.toml")

    def test_write_and_load(self, tmp_path):
        original = Settings(
            quadrature=QuadConfig(rel_tol=1e-9, max_depth=30),
            zerofind=ZeroFindConfig(seed=3, workers=2),
            abs_tol=1e-7,
            max_retries=4,
        )
        path = tmp_path / "conf" / "settings.toml"
        write_settings(original, path)
        assert load_settings(path) == original

    def test_partial_file(self, tmp_path):
        path = tmp_path / "settings.toml"
        path.write_text("[zerofind]\nmax_refine_level = 3\n", encoding="utf-8")
        settings = load_settings(path)
        assert settings.zerofind.max_refine_level == 3
        assert settings.quadrature == QuadConfig()

    @pytest.mark.parametrize("text", [
        "[quadrature]\nspeed = 2\n",
        "[quadrature]\nrel_tol = 0.1\n",
        "[plotting]\ncolor = 'red'\n",
        "[solver]\nverbose = true\n",
        "[quadrature\n",
    ])
    def test_invalid_files(self, tmp_path, text):
        path = tmp_path / "settings.toml"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(MalformedDocumentError):
            load_settings(path)


class TestSettings:
    """Test cases for the Settings object"""

    def test_overrides(self):
        settings = Settings().with_overrides(abs_tol=1e-6, seed=5, max_level=2)
        cfg = settings.to_solver_config()
        assert cfg.abs_tol == 1e-6
        assert cfg.zero.seed == 5
        assert cfg.zero.max_refine_level == 2

    def test_none_keeps_values(self):
        base = Settings(abs_tol=1e-5)
        assert base.with_overrides() == base

    def test_dump(self):
        text = dump_settings(Settings())
        assert "[quadrature]" in text
        assert "[zerofind]" in text
        assert "abs_tol" not in text.split("[solver]")[1]
