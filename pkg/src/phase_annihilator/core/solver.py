"""
Solve modes and reports

Every mode builds an equivariant map over a sphere, composes it with the
functional and hands the resulting odd map to the zero finder. Reports carry
the phase tree, the residual, the W1,1 norm (or sign changes) and the bound
the construction guarantees.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import MalformedDocumentError, ProblemFormatError
from .construct import ConstructionConfig, ConstructionMode, EquivariantMap, pinkus_partition
from .funcspace import FunctionKind, PiecewiseFn, Problem
from .phase import Const, IntConst, PhaseTree, sign_changes, tree_from_dict, w11_norm
from .quadrature import Functional, FunctionalSpec, LinearMode, QuadConfig, psi_eval
from .sphere import SpherePoint
from .zerofind import OddMap, ZeroFindConfig, ZeroResult, find_zero

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1
BOUND_SLACK = 1e-9
SHORTCUT_RATIO = 1e-12
DEFAULT_TOL_SCALE = 1e-8


class SolveMode(Enum):
    """Report modes, matching the CLI --mode values."""
    COMPLEX = "complex"
    REAL_PART = "real-part"
    GENERIC = "generic"
    HOBBY_RICE = "hobby-rice"
    IMPROVED = "improved"


class Partition(Enum):
    """Parameterisation used by the sign-change solver."""
    LIFTED = "lifted"
    PINKUS = "pinkus"


@dataclass(frozen=True)
class SolverConfig:
    """Quadrature and search controls shared by all modes.

    ``abs_tol`` of None means the scale-aware default 1e-8 * (1 + sum ||f_j||_1).
    """

    quad: QuadConfig = field(default_factory=QuadConfig)
    zero: ZeroFindConfig = field(default_factory=ZeroFindConfig)
    abs_tol: Optional[float] = None
    max_retries: int = 10

    def tolerance_for(self, scale: float) -> float:
        if self.abs_tol is not None:
            return float(self.abs_tol)
        return DEFAULT_TOL_SCALE * (1.0 + scale)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve; ``to_dict`` gives the JSON report."""

    mode: str
    sphere_point: Optional[Tuple[float, ...]]
    phase_tree: PhaseTree
    residuals: Tuple[float, ...]
    residual_norm: float
    abs_tol: float
    converged: bool
    w11: Optional[float]
    bound: float
    bound_satisfied: bool
    sign_changes: Optional[int] = None
    evaluations: int = 0
    wall_time_ms: float = 0.0
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    schema: int = REPORT_SCHEMA

    @property
    def succeeded(self) -> bool:
        return self.converged and self.bound_satisfied

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "schema": self.schema,
            "mode": self.mode,
            "sphere_point": list(self.sphere_point) if self.sphere_point is not None else None,
            "phase_tree": self.phase_tree.to_dict(),
            "residuals": list(self.residuals),
            "residual_norm": self.residual_norm,
            "abs_tol": self.abs_tol,
            "converged": self.converged,
            "w11": self.w11,
            "bound": self.bound,
            "bound_satisfied": self.bound_satisfied,
            "sign_changes": self.sign_changes,
            "evaluations": self.evaluations,
            "diagnostics": dict(self.diagnostics),
        }
        if include_timing:
            data["wall_time_ms"] = self.wall_time_ms
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolveReport":
        if not isinstance(data, dict):
            raise MalformedDocumentError("Report must be a JSON object")
        if data.get("schema") != REPORT_SCHEMA:
            raise MalformedDocumentError(f"Unsupported report schema: {data.get('schema')!r}")
        required = ("mode", "phase_tree", "residuals", "residual_norm", "abs_tol", "bound")
        missing = [key for key in required if key not in data]
        if missing:
            raise MalformedDocumentError(f"Report misses {', '.join(missing)}")
        try:
            SolveMode(data["mode"])
            point = data.get("sphere_point")
            return cls(
                mode=data["mode"],
                sphere_point=tuple(float(c) for c in point) if point is not None else None,
                phase_tree=tree_from_dict(data["phase_tree"]),
                residuals=tuple(float(r) for r in data["residuals"]),
                residual_norm=float(data["residual_norm"]),
                abs_tol=float(data["abs_tol"]),
                converged=bool(data.get("converged", False)),
                w11=None if data.get("w11") is None else float(data["w11"]),
                bound=float(data["bound"]),
                bound_satisfied=bool(data.get("bound_satisfied", False)),
                sign_changes=None if data.get("sign_changes") is None else int(data["sign_changes"]),
                evaluations=int(data.get("evaluations", 0)),
                wall_time_ms=float(data.get("wall_time_ms", 0.0)),
                diagnostics=dict(data.get("diagnostics") or {}),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, MalformedDocumentError):
                raise
            raise MalformedDocumentError(f"Invalid report field: {exc}") from exc


@dataclass(frozen=True)
class Verification:
    residuals: Tuple[float, ...]
    residual_norm: float
    w11: Optional[float]
    sign_changes: Optional[int]


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------
def integrals_vanish(functions: Sequence[PiecewiseFn]) -> bool:
    """|integral f_j| <= 1e-12 ||f_j||_1 for every j."""
    return all(abs(f.integral()) <= SHORTCUT_RATIO * f.l1_norm() for f in functions)


def lower_bound(problem: Problem) -> Optional[float]:
    """pi*n + 1 for nonzero multiples of indicators of disjoint intervals, else None."""
    supports: List[Tuple[float, float]] = []
    for f in problem.functions:
        if f.kind is not FunctionKind.CONSTANT_CELLS:
            return None
        nonzero = np.flatnonzero(f.values != 0)
        if nonzero.size == 0:
            return None
        if np.unique(f.values[nonzero]).size != 1 or np.any(np.diff(nonzero) != 1):
            return None
        supports.append((float(f.breakpoints[nonzero[0]]), float(f.breakpoints[nonzero[-1] + 1])))
    supports.sort()
    if any(b0 > a1 for (_, b0), (a1, _) in zip(supports, supports[1:])):
        return None
    return math.pi * problem.n + 1.0


def functional_for(problem: Problem, mode: SolveMode, split_complex: bool = False) -> FunctionalSpec:
    """Linear functional a problem induces in the given mode."""
    if mode in (SolveMode.COMPLEX, SolveMode.GENERIC, SolveMode.IMPROVED):
        return FunctionalSpec(problem.functions, LinearMode.COMPLEX)
    if mode is SolveMode.HOBBY_RICE and split_complex:
        parts: List[PiecewiseFn] = []
        for f in problem.functions:
            parts.extend((f.real_part(), f.imag_part()))
        return FunctionalSpec(tuple(parts), LinearMode.REAL_PART)
    return FunctionalSpec(problem.functions, LinearMode.REAL_PART)


def _odd_map(spec: Functional, emap: EquivariantMap, quad: QuadConfig) -> OddMap:
    return OddMap(spec.output_dim, lambda x: psi_eval(spec, emap.alpha(x), quad))


def _search(fmap: OddMap, cfg: SolverConfig, tol: float) -> ZeroResult:
    return find_zero(fmap, replace(cfg.zero, abs_tol=tol))


def _smooth_report(
    mode: SolveMode,
    tree: PhaseTree,
    spec: Functional,
    cfg: SolverConfig,
    tol: float,
    bound: float,
    started: float,
    point: Optional[SpherePoint] = None,
    evaluations: int = 0,
    converged: Optional[bool] = None,
    residuals: Optional[np.ndarray] = None,
    diagnostics: Optional[Dict[str, Any]] = None,
) -> SolveReport:
    if residuals is None:
        residuals = psi_eval(spec, tree, cfg.quad)
    norm = float(np.linalg.norm(residuals))
    w11 = w11_norm(tree)
    return SolveReport(
        mode=mode.value,
        sphere_point=point.coords if point is not None else None,
        phase_tree=tree,
        residuals=tuple(float(r) for r in residuals),
        residual_norm=norm,
        abs_tol=tol,
        converged=(norm <= tol) if converged is None else converged,
        w11=w11,
        bound=bound,
        bound_satisfied=w11 <= bound + BOUND_SLACK,
        evaluations=evaluations,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        diagnostics=diagnostics or {},
    )


# ----------------------------------------------------------------------
# solve modes
# ----------------------------------------------------------------------
def solve_generic(
    spec: Functional,
    cfg: Optional[SolverConfig] = None,
    mode: SolveMode = SolveMode.GENERIC,
) -> SolveReport:
    """h = exp(i g) with psi(h) = 0 and W1,1 <= 1 + pi*m for an odd functional psi."""
    cfg = cfg or SolverConfig()
    started = time.perf_counter()
    m = spec.output_dim
    tol = cfg.tolerance_for(spec.scale())
    bound = 1.0 + math.pi * m

    constant = Const(0.0)
    residuals = psi_eval(spec, constant, cfg.quad)
    if np.linalg.norm(residuals) <= tol:
        logger.info("Constant phase already annihilates the functional")
        return _smooth_report(mode, constant, spec, cfg, tol, bound, started,
                              residuals=residuals, diagnostics={"shortcut": True})

    emap = EquivariantMap(m, ConstructionConfig(ConstructionMode.STANDARD))
    fmap = _odd_map(spec, emap, cfg.quad)
    result = _search(fmap, cfg, tol)
    tree = emap.alpha(result.point)
    logger.info("%s solve: residual %.3e (tol %.3e), %d evaluations",
                mode.value, result.residual_norm, tol, result.evaluations)
    return _smooth_report(
        mode, tree, spec, cfg, tol, bound, started,
        point=result.point,
        evaluations=result.evaluations,
        converged=result.converged,
        residuals=np.asarray(result.residual),
        diagnostics={"shortcut": False},
    )


def solve_complex(problem: Problem, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """W1,1 <= 1 + 2*pi*n with integral f_j h = 0 for complex f_j."""
    cfg = cfg or SolverConfig()
    spec = functional_for(problem, SolveMode.COMPLEX)
    started = time.perf_counter()
    diagnostics = {"lower_bound": lower_bound(problem)}
    if integrals_vanish(problem.functions):
        tol = cfg.tolerance_for(spec.scale())
        return _smooth_report(SolveMode.COMPLEX, Const(0.0), spec, cfg, tol,
                              1.0 + 2.0 * math.pi * problem.n, started,
                              diagnostics={**diagnostics, "shortcut": True})
    report = solve_generic(spec, cfg, SolveMode.COMPLEX)
    return replace(report, diagnostics={**report.diagnostics, **diagnostics})


def solve_real_part(problem: Problem, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Re integral f_j h = 0 with W1,1 <= 1 + pi*n."""
    cfg = cfg or SolverConfig()
    spec = functional_for(problem, SolveMode.REAL_PART)
    return solve_generic(spec, cfg, SolveMode.REAL_PART)


def solve_hobby_rice(
    problem: Problem,
    cfg: Optional[SolverConfig] = None,
    partition: Partition = Partition.LIFTED,
    split_complex: bool = False,
) -> SolveReport:
    """+-1 valued h with integral f_j h = 0 and at most m sign changes.

    m is the number of real functions: n, or 2n with ``split_complex``.
    """
    cfg = cfg or SolverConfig()
    partition = Partition(partition)
    if not problem.real_valued and not split_complex:
        raise ProblemFormatError("Sign-change mode needs real-valued functions (or split_complex=True)")
    started = time.perf_counter()
    spec = functional_for(problem, SolveMode.HOBBY_RICE, split_complex)
    m = spec.output_dim
    tol = cfg.tolerance_for(spec.scale())
    diagnostics: Dict[str, Any] = {"partition": partition.value, "split_complex": split_complex}

    point: Optional[SpherePoint] = None
    evaluations = 0
    if integrals_vanish(spec.linear):
        tree: PhaseTree = IntConst(0)
        residuals = psi_eval(spec, tree, cfg.quad)
        converged = bool(np.linalg.norm(residuals) <= tol)
        diagnostics["shortcut"] = True
    else:
        if partition is Partition.PINKUS:
            fmap = OddMap(m, lambda x: psi_eval(spec, pinkus_partition(x), cfg.quad))
        else:
            emap = EquivariantMap(m, ConstructionConfig(ConstructionMode.HOBBY_RICE))
            fmap = _odd_map(spec, emap, cfg.quad)
        result = _search(fmap, cfg, tol)
        point = result.point
        tree = pinkus_partition(point) if partition is Partition.PINKUS else emap.alpha(point)
        residuals = np.asarray(result.residual)
        converged = result.converged
        evaluations = result.evaluations
        diagnostics["shortcut"] = False

    changes = sign_changes(tree)
    norm = float(np.linalg.norm(residuals))
    logger.info("hobby-rice solve: %d sign changes, residual %.3e", changes, norm)
    return SolveReport(
        mode=SolveMode.HOBBY_RICE.value,
        sphere_point=point.coords if point is not None else None,
        phase_tree=tree,
        residuals=tuple(float(r) for r in residuals),
        residual_norm=norm,
        abs_tol=tol,
        converged=converged,
        w11=None,
        bound=float(m),
        bound_satisfied=changes <= m,
        sign_changes=changes,
        evaluations=evaluations,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        diagnostics=diagnostics,
    )


def improved_width_cap(problem: Problem, delta: float) -> float:
    """delta / (2 * sum ||f_j||_inf * window count), window count 2^L - 1 for L = 2n - 1 levels."""
    levels = 2 * problem.n - 1
    windows = 2 ** levels - 1
    sup_total = sum(f.sup_norm() for f in problem.functions)
    if windows == 0 or sup_total == 0.0:
        return 0.5
    return min(0.5, delta / (2.0 * sup_total * windows))


def solve_improved_real(problem: Problem, epsilon: float, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Real f_j: W1,1 < 1 + pi(2n - 1) + epsilon, enforced by shrinking the width cap."""
    cfg = cfg or SolverConfig()
    if not problem.real_valued:
        raise ProblemFormatError("Improved mode needs real-valued functions")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    started = time.perf_counter()
    spec = functional_for(problem, SolveMode.IMPROVED)
    tol = cfg.tolerance_for(spec.scale())
    bound = 1.0 + math.pi * (2 * problem.n - 1) + epsilon
    diagnostics: Dict[str, Any] = {"lower_bound": lower_bound(problem), "epsilon": epsilon}

    if integrals_vanish(problem.functions):
        return _smooth_report(SolveMode.IMPROVED, Const(0.0), spec, cfg, tol, bound, started,
                              diagnostics={**diagnostics, "shortcut": True})

    eps_half = epsilon / 2.0
    delta = eps_half * max(abs(f.integral()) for f in problem.functions) / 4.0
    report: Optional[SolveReport] = None
    evaluations = 0
    for attempt in range(cfg.max_retries + 1):
        cap = improved_width_cap(problem, delta)
        emap = EquivariantMap(2 * problem.n, ConstructionConfig(ConstructionMode.IMPROVED, cap))
        fmap = _odd_map(spec, emap, cfg.quad)
        result = _search(fmap, cfg, tol)
        evaluations += result.evaluations
        tree = emap.alpha(result.point)
        report = _smooth_report(
            SolveMode.IMPROVED, tree, spec, cfg, tol, bound, started,
            point=result.point,
            evaluations=evaluations,
            converged=result.converged,
            residuals=np.asarray(result.residual),
            diagnostics={**diagnostics, "shortcut": False, "width_cap": cap, "retries": attempt},
        )
        if not result.converged:
            logger.warning("Improved solve did not converge at width cap %.3e", cap)
            break
        if report.bound_satisfied:
            break
        logger.info("W1,1 %.6f exceeds %.6f; halving delta (attempt %d)", report.w11, bound, attempt + 1)
        delta /= 2.0
    assert report is not None
    return report


# ----------------------------------------------------------------------
# verification
# ----------------------------------------------------------------------
def verify(tree: PhaseTree, spec: Functional, cfg: Optional[QuadConfig] = None) -> Verification:
    """Re-evaluate psi at a ten times tighter tolerance."""
    quad = (cfg or QuadConfig()).tightened(10.0)
    residuals = psi_eval(spec, tree, quad)
    return Verification(
        residuals=tuple(float(r) for r in residuals),
        residual_norm=float(np.linalg.norm(residuals)),
        w11=None if tree.is_integer else w11_norm(tree),
        sign_changes=sign_changes(tree) if tree.is_integer else None,
    )


def verify_report(report: SolveReport, spec: Functional, cfg: Optional[QuadConfig] = None) -> Verification:
    """verify() with a dimension check against the stored residual vector."""
    if spec.output_dim != len(report.residuals):
        raise ProblemFormatError(
            f"Report has {len(report.residuals)} residual components, functional has {spec.output_dim}"
        )
    return verify(report.phase_tree, spec, cfg)
