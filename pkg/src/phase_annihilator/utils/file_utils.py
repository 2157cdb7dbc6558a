"""
File and path utilities
"""

from pathlib import Path


def get_settings_path() -> Path:
    """Get the default settings file path."""
    return Path.home() / '.phase_annihilator.toml'


def ensure_parent_dir(path: Path) -> Path:
    """Create the parent directory of an output file if needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
