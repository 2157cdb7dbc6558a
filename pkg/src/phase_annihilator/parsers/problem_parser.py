"""
Parser for problem documents

{"schema": 1, "functions": [{"kind", "breakpoints", "values"}], "real_valued": bool}
"""

import logging
from typing import Any, Dict

from ..core.funcspace import PiecewiseFn, Problem
from ..errors import EmptyProblemError, MalformedDocumentError
from .base_parser import BaseDocumentParser

logger = logging.getLogger(__name__)


class ProblemParser(BaseDocumentParser[Problem]):
    """Parser for problem JSON files"""

    document_name = "problem"

    def validate(self, data: Any) -> bool:
        return isinstance(data, dict) and isinstance(data.get("functions"), list)

    def from_data(self, data: Dict[str, Any]) -> Problem:
        if not data["functions"]:
            raise EmptyProblemError("Problem document has an empty 'functions' list")
        functions = tuple(PiecewiseFn.from_dict(entry) for entry in data["functions"])
        real_valued = data.get("real_valued")
        if real_valued is not None and not isinstance(real_valued, bool):
            raise MalformedDocumentError("'real_valued' must be a boolean")
        problem = Problem(functions, real_valued)
        logger.debug("Parsed problem with %d functions (real=%s)", problem.n, problem.real_valued)
        return problem

    def to_data(self, obj: Problem) -> Dict[str, Any]:
        return obj.to_dict()


def parse_problem(text: str) -> Problem:
    """Parse a problem document given as a JSON string"""
    return ProblemParser().parse_text(text)
