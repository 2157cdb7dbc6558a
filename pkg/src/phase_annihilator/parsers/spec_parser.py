"""
Parser for functional spec documents

{"schema": 1, "linear": [fn...], "mode": "complex"|"real-part",
 "odd_terms": [{"base": fn, "exponent": 3, "weight": w}]}
"""

from typing import Any, Dict

from ..core.quadrature import FunctionalSpec
from .base_parser import BaseDocumentParser


class FunctionalSpecParser(BaseDocumentParser[FunctionalSpec]):
    """Parser for functional spec JSON files"""

    document_name = "functional spec"

    def validate(self, data: Any) -> bool:
        return isinstance(data, dict) and isinstance(data.get("linear"), list)

    def from_data(self, data: Dict[str, Any]) -> FunctionalSpec:
        return FunctionalSpec.from_dict(data)

    def to_data(self, obj: FunctionalSpec) -> Dict[str, Any]:
        return obj.to_dict()
