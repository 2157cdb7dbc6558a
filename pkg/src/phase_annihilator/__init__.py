"""
Phase Annihilator

Smooth circle-valued functions h = exp(i g) on [0,1], with g nondecreasing,
that annihilate prescribed linear and odd functionals, together with
W1,1 norm bounds. Zeros are located by searching an odd map on a sphere.
"""

__version__ = "0.1.0"
__author__ = "Phase Annihilator Contributors"

from .core.funcspace import FunctionKind, PiecewiseFn, Problem, l1_norm, mu_f
from .core.phase import Blend, Const, HardSwitch, IntConst, PhaseTree, eval_g, eval_h
from .core.quadrature import FunctionalSpec, LinearMode, OddTerm, QuadConfig, psi_eval
from .core.solver import (
    SolveMode,
    SolveReport,
    SolverConfig,
    solve_complex,
    solve_generic,
    solve_hobby_rice,
    solve_improved_real,
    solve_real_part,
    verify,
)
from .parsers.problem_parser import parse_problem

__all__ = [
    "FunctionKind",
    "PiecewiseFn",
    "Problem",
    "l1_norm",
    "mu_f",
    "Blend",
    "Const",
    "HardSwitch",
    "IntConst",
    "PhaseTree",
    "eval_g",
    "eval_h",
    "FunctionalSpec",
    "LinearMode",
    "OddTerm",
    "QuadConfig",
    "psi_eval",
    "SolveMode",
    "SolveReport",
    "SolverConfig",
    "solve_complex",
    "solve_generic",
    "solve_hobby_rice",
    "solve_improved_real",
    "solve_real_part",
    "verify",
    "parse_problem",
]
