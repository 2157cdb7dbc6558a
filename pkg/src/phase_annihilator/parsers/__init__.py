"""Document parsers"""

from .base_parser import BaseDocumentParser
from .problem_parser import ProblemParser, parse_problem
from .report_parser import ReportParser
from .spec_parser import FunctionalSpecParser

__all__ = ["BaseDocumentParser", "ProblemParser", "parse_problem", "ReportParser", "FunctionalSpecParser"]
