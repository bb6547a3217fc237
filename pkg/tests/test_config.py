"""Unit tests for layered run settings."""

import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from src.jetcheck.config import Settings, load_settings
from src.jetcheck.enums import OutputFormat


class TestSettings(unittest.TestCase):
    """Defaults, config file, flags and environment."""

    def setUp(self):
        self.directory = Path(tempfile.mkdtemp())
        self.config = self.directory / "jetcheck.yaml"
        self.config.write_text("seed: 42\npass-limit: 16\noutput_format: json\n", encoding="utf-8")

    def tearDown(self):
        self.config.unlink()
        self.directory.rmdir()

    def test_defaults(self):
        settings = Settings()
        self.assertEqual(settings.seed, 1729)
        self.assertEqual(settings.pass_limit, 64)
        self.assertIs(settings.output_format, OutputFormat.TEXT)

    def test_config_file(self):
        with mock.patch.dict(os.environ, {"JETCHECK_CONFIG": str(self.config)}, clear=False):
            os.environ.pop("JETCHECK_SEED", None)
            settings = load_settings()
        self.assertEqual(settings.seed, 42)
        self.assertEqual(settings.pass_limit, 16)
        self.assertIs(settings.output_format, OutputFormat.JSON)

    def test_flags_override_file_and_environment_overrides_flags(self):
        env = {"JETCHECK_CONFIG": str(self.config), "JETCHECK_SEED": "7"}
        with mock.patch.dict(os.environ, env):
            settings = load_settings(seed=3, pass_limit=8, points=None)
        self.assertEqual(settings.seed, 7)
        self.assertEqual(settings.pass_limit, 8)

    def test_invalid_values(self):
        with self.assertRaises(ValueError):
            Settings(pass_limit=0)
        with self.assertRaises(ValueError):
            Settings().merged(points=0)
        with self.assertRaises(KeyError):
            Settings().merged(colour="blue")


if __name__ == "__main__":
    unittest.main()
