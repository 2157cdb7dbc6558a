"""Solver settings stored as TOML (sections [quadrature], [zerofind], [solver])."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

try:  # Python 3.11+
    import tomllib  # type: ignore[attr-defined]
except ModuleNotFoundError:  # pragma: no cover - fallback for older Python
    import tomli as tomllib  # type: ignore

import toml

from ..core.quadrature import QuadConfig
from ..core.solver import SolverConfig
from ..core.zerofind import ZeroFindConfig
from ..errors import MalformedDocumentError
from .file_utils import ensure_parent_dir, get_settings_path

logger = logging.getLogger(__name__)


def _section(cls: type, data: Dict[str, Any], name: str) -> Any:
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise MalformedDocumentError(f"Unknown keys in [{name}]: {', '.join(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise MalformedDocumentError(f"Invalid [{name}] settings: {exc}") from exc


@dataclass
class Settings:
    """Effective solver settings."""

    quadrature: QuadConfig = field(default_factory=QuadConfig)
    zerofind: ZeroFindConfig = field(default_factory=ZeroFindConfig)
    abs_tol: Optional[float] = None
    max_retries: int = 10

    def to_solver_config(self) -> SolverConfig:
        return SolverConfig(self.quadrature, self.zerofind, self.abs_tol, self.max_retries)

    def with_overrides(
        self,
        abs_tol: Optional[float] = None,
        seed: Optional[int] = None,
        max_level: Optional[int] = None,
    ) -> "Settings":
        """Copy with command-line overrides applied (None keeps the current value)."""
        zerofind = self.zerofind
        if seed is not None:
            zerofind = replace(zerofind, seed=seed)
        if max_level is not None:
            zerofind = replace(zerofind, max_refine_level=max_level)
        return replace(self, zerofind=zerofind, abs_tol=self.abs_tol if abs_tol is None else abs_tol)

    def to_dict(self) -> Dict[str, Any]:
        solver: Dict[str, Any] = {"max_retries": self.max_retries}
        if self.abs_tol is not None:
            solver["abs_tol"] = self.abs_tol
        return {
            "quadrature": self.quadrature.to_dict(),
            "zerofind": self.zerofind.to_dict(),
            "solver": solver,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Settings":
        unknown = sorted(set(data) - {"quadrature", "zerofind", "solver"})
        if unknown:
            raise MalformedDocumentError(f"Unknown settings sections: {', '.join(unknown)}")
        solver = dict(data.get("solver", {}))
        extra = sorted(set(solver) - {"abs_tol", "max_retries"})
        if extra:
            raise MalformedDocumentError(f"Unknown keys in [solver]: {', '.join(extra)}")
        return cls(
            quadrature=_section(QuadConfig, data.get("quadrature", {}), "quadrature"),
            zerofind=_section(ZeroFindConfig, data.get("zerofind", {}), "zerofind"),
            abs_tol=solver.get("abs_tol"),
            max_retries=int(solver.get("max_retries", 10)),
        )


def load_settings(path: Optional[Path] = None) -> Settings:
    """Read settings; a missing default file yields the built-in defaults.

    An explicitly given path must exist.
    """
    explicit = path is not None
    path = Path(path) if explicit else get_settings_path()
    if not path.exists():
        if explicit:
            raise IOError(f"Settings file not found: {path}")
        return Settings()
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except (tomllib.TOMLDecodeError, ValueError) as exc:  # type: ignore[attr-defined]
        raise MalformedDocumentError(f"Invalid TOML in settings {path}: {exc}") from exc
    except OSError as exc:
        raise IOError(f"Error reading settings {path}: {exc}") from exc
    logger.debug("Loaded settings from %s", path)
    return Settings.from_dict(data)


def dump_settings(settings: Settings) -> str:
    return toml.dumps(settings.to_dict())


def write_settings(settings: Settings, path: Path) -> None:
    try:
        with ensure_parent_dir(path).open("w", encoding="utf-8") as handle:
            toml.dump(settings.to_dict(), handle)
    except OSError as exc:
        raise IOError(f"Error writing settings {path}: {exc}") from exc
