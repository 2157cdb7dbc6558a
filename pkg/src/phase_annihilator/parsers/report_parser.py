"""
Parser for solve report documents
"""

from typing import Any, Dict

from ..core.solver import SolveReport
from .base_parser import BaseDocumentParser


class ReportParser(BaseDocumentParser[SolveReport]):
    """Parser for report JSON files

    Wall time is written only when ``include_timing`` is set, so two runs with
    the same seed give byte-identical files.
    """

    document_name = "report"

    def __init__(self, include_timing: bool = False):
        self.include_timing = include_timing

    def validate(self, data: Any) -> bool:
        return isinstance(data, dict) and "phase_tree" in data

    def _check_schema(self, data: Dict[str, Any]) -> None:
        # SolveReport.from_dict requires the schema field
        return None

    def from_data(self, data: Dict[str, Any]) -> SolveReport:
        return SolveReport.from_dict(data)

    def to_data(self, obj: SolveReport) -> Dict[str, Any]:
        return obj.to_dict(include_timing=self.include_timing)
