"""
Base class for document parsers
"""

import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Generic, TypeVar

from ..errors import MalformedDocumentError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

T = TypeVar("T")


class BaseDocumentParser(ABC, Generic[T]):
    """Abstract base class for JSON document parsers"""

    #: human readable document name used in error messages
    document_name = "document"

    def parse(self, path: Path) -> T:
        """Read a file and return the parsed object"""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise IOError(f"Error reading {self.document_name} {path}: {e}") from e
        return self.parse_text(text)

    def parse_text(self, text: str) -> T:
        """Parse a JSON string"""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedDocumentError(f"Invalid JSON in {self.document_name}: {e}") from e
        if not self.validate(data):
            raise MalformedDocumentError(f"Unexpected {self.document_name} structure")
        self._check_schema(data)
        return self.from_data(data)

    def write(self, obj: T, output_path: Path) -> None:
        """Write the object as a JSON document"""
        try:
            output_path = Path(output_path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            output_path.write_text(self.dumps(obj), encoding="utf-8")
        except OSError as e:
            raise IOError(f"Error writing {self.document_name} {output_path}: {e}") from e
        logger.debug("Wrote %s to %s", self.document_name, output_path)

    def dumps(self, obj: T) -> str:
        return json.dumps(self.to_data(obj), indent=2) + "\n"

    def _check_schema(self, data: Dict[str, Any]) -> None:
        schema = data.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise MalformedDocumentError(f"Unsupported {self.document_name} schema {schema!r}")

    @abstractmethod
    def validate(self, data: Any) -> bool:
        """Validate top-level document structure"""
        pass

    @abstractmethod
    def from_data(self, data: Dict[str, Any]) -> T:
        """Build the object from decoded JSON"""
        pass

    @abstractmethod
    def to_data(self, obj: T) -> Dict[str, Any]:
        """Encode the object for JSON"""
        pass
