import pytest

from src.config import Config, get_config
from src.errors import ConfigError


@pytest.fixture
def env(tmp_path, monkeypatch):
    monkeypatch.setenv("AUTOCAL_OUTPUT_DIR", str(tmp_path / "runs"))
    monkeypatch.setenv("AUTOCAL_BUNDLE_DIR", str(tmp_path / "bundles"))
    monkeypatch.setattr("src.config.config", None)
    return monkeypatch


def test_defaults(env, tmp_path):
    config = Config.from_env()
    assert config.output_dir == tmp_path / "runs"
    assert config.output_dir.is_dir()
    assert (config.image_width, config.image_height) == (640, 480)


def test_environment_overrides(env):
    env.setenv("AUTOCAL_THREADS", "4")
    env.setenv("AUTOCAL_SEED", "17")
    env.setenv("AUTOCAL_LOG_LEVEL", "debug")
    config = Config.from_env()
    assert (config.threads, config.seed, config.log_level) == (4, 17, "DEBUG")


@pytest.mark.parametrize("name, value", [("AUTOCAL_THREADS", "0"), ("AUTOCAL_SEED", "seven")])
def test_invalid_values(env, name, value):
    env.setenv(name, value)
    with pytest.raises(ConfigError):
        Config.from_env()


def test_config_is_cached(env):
    assert get_config() is get_config()
