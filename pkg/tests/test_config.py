"""Tests for configuration loading."""

import tomllib

import pytest

from sacoder.config import CONFIG_FILENAME, SacSettings, generate_config, load_config
from sacoder.errors import SacError


class TestSettingsDefaults:
    """Test default configuration values."""

    def test_model_defaults(self):
        settings = SacSettings()
        assert settings.model_total == 65536
        assert settings.model_source == "pooled"

    def test_coder_defaults(self):
        settings = SacSettings()
        assert settings.mode == "semantic"
        assert settings.partition is None
        assert settings.export_policy == "canonical"

    def test_verify_defaults(self):
        settings = SacSettings()
        assert (settings.max_m, settings.alphabet, settings.trials) == (8, 4, 500)


class TestLoadConfig:
    """Test TOML config file loading."""

    def test_load_nonexistent_file(self, tmp_path):
        """Loading from a directory without config gives the defaults."""
        assert load_config(tmp_path) == SacSettings()

    def test_load_config_none_root(self):
        assert load_config(None) == SacSettings()

    def test_load_config_sets_values(self, tmp_path):
        """Config file values override defaults."""
        (tmp_path / CONFIG_FILENAME).write_text(
            "[coder]\n"
            'mode = "syntactic"\n'
            'partition = "parts/mine.txt"\n'
            "\n"
            "[export]\n"
            'export_policy = "random"\n'
            "seed = 99\n"
            "\n"
            "[bench]\n"
            "workers = 4\n"
        )
        settings = load_config(tmp_path)
        assert settings.mode == "syntactic"
        assert settings.partition == "parts/mine.txt"
        assert settings.export_policy == "random"
        assert settings.seed == 99
        assert settings.workers == 4
        assert settings.width == 1280

    def test_unknown_keys_ignored(self, tmp_path):
        (tmp_path / CONFIG_FILENAME).write_text("[coder]\ncolour = 'blue'\n[extra]\nx = 1\n")
        assert load_config(tmp_path) == SacSettings()

    def test_key_in_wrong_section_ignored(self, tmp_path):
        (tmp_path / CONFIG_FILENAME).write_text("[bench]\nseed = 5\n")
        assert load_config(tmp_path).seed == 0

    def test_invalid_toml(self, tmp_path):
        (tmp_path / CONFIG_FILENAME).write_text("[coder\n")
        with pytest.raises(SacError, match="Invalid"):
            load_config(tmp_path)

    @pytest.mark.parametrize(
        "body", ["[edgemap]\nwidth = '1280'\n", "[bench]\nworkers = true\n", "[coder]\nmode = 1\n"]
    )
    def test_wrong_type(self, tmp_path, body):
        (tmp_path / CONFIG_FILENAME).write_text(body)
        with pytest.raises(SacError, match="must be"):
            load_config(tmp_path)

    @pytest.mark.parametrize(
        "body,key",
        [
            ("[coder]\nmode = 'bogus'\n", "mode"),
            ("[export]\nexport_policy = 'first'\n", "export_policy"),
            ("[model]\nmodel_source = 'shared'\n", "model_source"),
        ],
    )
    def test_unknown_choice(self, tmp_path, body, key):
        (tmp_path / CONFIG_FILENAME).write_text(body)
        with pytest.raises(SacError, match=f"{key} must be one of"):
            load_config(tmp_path)

    def test_valid_choices(self, tmp_path):
        body = "[coder]\nmode = 'syntactic'\n[export]\nexport_policy = 'random'\n[model]\nmodel_source = 'per-file'\n"
        (tmp_path / CONFIG_FILENAME).write_text(body)
        settings = load_config(tmp_path)
        assert (settings.mode, settings.export_policy, settings.model_source) == ("syntactic", "random", "per-file")


class TestGenerateConfig:
    """Test config file generation."""

    def test_defaults_parse_back(self, tmp_path):
        (tmp_path / CONFIG_FILENAME).write_text(generate_config())
        assert load_config(tmp_path) == SacSettings()

    def test_custom_values_parse_back(self, tmp_path):
        settings = SacSettings(mode="syntactic", partition="p.txt", seed=3, width=640, trials=10)
        (tmp_path / CONFIG_FILENAME).write_text(generate_config(settings))
        assert load_config(tmp_path) == settings

    def test_valid_toml(self):
        data = tomllib.loads(generate_config())
        assert set(data) == {"model", "coder", "export", "edgemap", "bench", "verify"}
