"""Settings for a jetcheck run.

Values are layered: built-in defaults, then ``jetcheck.yaml`` in the working
directory (or the file named by ``JETCHECK_CONFIG``), then command-line
flags, then the ``JETCHECK_SEED`` environment variable.
"""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml

from src.jetcheck.enums import OutputFormat

CATALOG_DIR = Path(__file__).resolve().parent / "catalog"
CONFIG_FILE = "jetcheck.yaml"


@dataclass(frozen=True)
class Settings:
    """Run settings.

    Parameters
    ----------
    seed : int
        Seed for every random draw.
    pass_limit : int
        Maximum rewriting passes of one reduction.
    points : int
        Sample points for closed-form checks.
    output_format : OutputFormat
        Text or JSON output.
    out : str or None
        Report file; stdout when None.
    tolerance : float
        Float-mode tolerance of numeric checks.
    catalog_dir : Path
        Directory with the catalog index and definition files.
    """

    seed: int = 1729
    pass_limit: int = 64
    points: int = 20
    output_format: OutputFormat = OutputFormat.TEXT
    out: str | None = None
    tolerance: float = 1e-9
    catalog_dir: Path = CATALOG_DIR

    def __post_init__(self) -> None:
        if self.pass_limit < 1:
            raise ValueError("pass_limit must be at least 1.")
        if self.points < 1:
            raise ValueError("points must be at least 1.")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative.")

    def merged(self, **overrides: object) -> "Settings":
        """Return settings with every non-None override applied."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"Unknown settings: {', '.join(sorted(unknown))}")
        values = {k: v for k, v in overrides.items() if v is not None}
        if "output_format" in values:
            values["output_format"] = OutputFormat(values["output_format"])
        if "catalog_dir" in values:
            values["catalog_dir"] = Path(str(values["catalog_dir"]))
        return replace(self, **values)


def load_config_file(path: Path | None = None) -> dict:
    """Read the YAML config file; a missing default file gives an empty mapping."""
    if path is None:
        env_path = os.environ.get("JETCHECK_CONFIG")
        path = Path(env_path) if env_path else Path.cwd() / CONFIG_FILE
        if not env_path and not path.exists():
            return {}
    with open(path, encoding="utf-8") as handle:
        data = yaml.safe_load(handle) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path} must contain a mapping of settings.")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def load_settings(**flags: object) -> Settings:
    """Build settings from defaults, the config file, flags and the environment.

    Parameters
    ----------
    **flags : object
        Command-line values; None means "not given".

    Returns
    -------
    Settings
        The layered settings.
    """
    settings = Settings().merged(**load_config_file())
    settings = settings.merged(**flags)
    env_seed = os.environ.get("JETCHECK_SEED")
    if env_seed:
        settings = settings.merged(seed=int(env_seed))
    return settings
