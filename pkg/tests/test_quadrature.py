"""
Tests for functionals and window-aware adaptive quadrature
"""

import math

import numpy as np
import pytest

from src.phase_annihilator.core.construct import EquivariantMap
from src.phase_annihilator.core.funcspace import FunctionKind, PiecewiseFn
from src.phase_annihilator.core.phase import Blend, Const, HardSwitch, IntConst, eval_h, shift
from src.phase_annihilator.core.quadrature import (
    FunctionalSpec,
    LinearMode,
    OddTerm,
    QuadConfig,
    adaptive_integrate,
    integrate,
    integrate_many,
    lipschitz_check,
    lipschitz_sides,
    psi_eval,
    split_points,
)
from src.phase_annihilator.core.sphere import SpherePoint
from src.phase_annihilator.errors import AccuracyError, MalformedDocumentError
from tests.conftest import per_cell_midpoint, random_function

ONE = PiecewiseFn.constant(1.0)


def _random_tree(rng, dimension=2):
    emap = EquivariantMap(dimension)
    return emap.alpha(SpherePoint.normalized(rng.normal(size=dimension + 1)))


class TestQuadConfig:
    """Accuracy controls"""

    def test_defaults(self):
        cfg = QuadConfig()
        assert (cfg.rel_tol, cfg.max_depth, cfg.panel_order) == (1e-10, 40, 15)

    def test_rel_tol_range(self):
        with pytest.raises(ValueError):
            QuadConfig(rel_tol=1e-3)
        with pytest.raises(ValueError):
            QuadConfig(rel_tol=0.0)

    def test_tightened(self):
        assert QuadConfig().tightened(10.0).rel_tol == pytest.approx(1e-11)


class TestIntegrate:
    """Integrals of f times h"""

    def test_constant_phase(self):
        for c in (0.0, 0.3, math.pi / 2, 2.0):
            assert integrate(ONE, Const(c), QuadConfig()) == pytest.approx(complex(math.cos(c), math.sin(c)), abs=1e-14)

    def test_half_switch(self):
        tree = HardSwitch(IntConst(0), IntConst(1), 0.5)
        assert abs(integrate(ONE, tree, QuadConfig())) <= 1e-14

    def test_blend_against_midpoint_oracle(self):
        tree = Blend(Const(0.0), Const(math.pi), 0.5, 0.1)
        value = integrate(ONE, tree, QuadConfig())
        oracle = per_cell_midpoint(ONE, lambda xs: eval_h(tree, xs))
        assert abs(value - oracle) <= 1e-9
        assert value.real == pytest.approx(0.0, abs=1e-10)

    def test_random_pairs_against_midpoint_oracle(self, rng):
        for _ in range(5):
            f = random_function(rng, FunctionKind.CONSTANT_CELLS, cells=4)
            tree = _random_tree(rng)
            value = integrate(f, tree, QuadConfig())
            oracle = per_cell_midpoint(f, lambda xs: f.evaluate(xs) * eval_h(tree, xs))
            assert abs(value - oracle) <= 1e-7 * (1.0 + f.l1_norm())

    def test_linear_in_f(self, rng):
        f = random_function(rng, FunctionKind.CONSTANT_CELLS)
        g = random_function(rng, FunctionKind.CONSTANT_CELLS)
        tree = _random_tree(rng)
        cfg = QuadConfig()
        total = integrate(f + g, tree, cfg)
        assert abs(total - integrate(f, tree, cfg) - integrate(g, tree, cfg)) <= 1e-8

    def test_integrate_many_matches_single(self, rng):
        functions = [random_function(rng, kind) for kind in FunctionKind]
        tree = _random_tree(rng)
        cfg = QuadConfig()
        batch = integrate_many(functions, tree, cfg)
        for f, value in zip(functions, batch):
            assert abs(value - integrate(f, tree, cfg)) <= 1e-8

    def test_split_points(self):
        f = PiecewiseFn([0.0, 0.3, 1.0], [1.0, 2.0])
        tree = Blend(Const(0.0), Const(math.pi), 0.5, 0.25)
        edges = split_points([f], tree)
        for point in (0.0, 0.25, 0.3, 0.5, 0.75, 1.0):
            assert np.any(np.isclose(edges, point))
        assert np.all(np.diff(edges) > 0)

    def test_depth_limit_raises_with_estimate(self):
        cfg = QuadConfig(max_depth=2)

        def step(xs):
            return (xs > 0.3).astype(float)[None, :]

        with pytest.raises(AccuracyError) as excinfo:
            adaptive_integrate(step, np.array([0.0, 1.0]), np.array([1e-12]), cfg)
        assert excinfo.value.estimate is not None
        assert excinfo.value.estimate[0].real == pytest.approx(0.7, abs=0.1)


class TestFunctionalSpec:
    """psi evaluation, oddness and serialization"""

    def test_output_dim(self):
        assert FunctionalSpec((ONE, ONE)).output_dim == 4
        assert FunctionalSpec((ONE,), LinearMode.REAL_PART).output_dim == 1
        assert FunctionalSpec((ONE,), LinearMode.REAL_PART, (OddTerm(ONE),)).output_dim == 2

    def test_empty_functional_rejected(self):
        with pytest.raises(ValueError):
            FunctionalSpec(())

    def test_odd_exponent_required(self):
        with pytest.raises(ValueError):
            OddTerm(ONE, exponent=2)

    def test_complex_parts(self):
        spec = FunctionalSpec((ONE,))
        assert psi_eval(spec, Const(math.pi / 2), QuadConfig()) == pytest.approx([0.0, 1.0], abs=1e-15)
        assert psi_eval(spec, Const(0.0), QuadConfig()) == pytest.approx([1.0, 0.0], abs=1e-15)

    def test_odd_term(self):
        spec = FunctionalSpec((ONE,), LinearMode.REAL_PART, (OddTerm(ONE, 3, 2.0),))
        assert psi_eval(spec, Const(0.0), QuadConfig()) == pytest.approx([1.0, 2.0])
        assert psi_eval(spec, Const(math.pi), QuadConfig()) == pytest.approx([-1.0, -2.0])

    def test_psi_is_odd_for_constant_phase(self):
        spec = FunctionalSpec((PiecewiseFn([0.0, 0.4, 1.0], [1.0 + 2.0j, -0.5]),))
        tree = Const(0.7)
        cfg = QuadConfig()
        assert np.max(np.abs(psi_eval(spec, shift(tree, 1), cfg) + psi_eval(spec, tree, cfg))) <= 1e-12

    def test_psi_is_odd(self, rng):
        spec = FunctionalSpec(tuple(random_function(rng) for _ in range(2)), odd_terms=(OddTerm(random_function(rng)),))
        cfg = QuadConfig()
        for _ in range(5):
            tree = _random_tree(rng)
            flipped = psi_eval(spec, shift(tree, 1), cfg)
            assert np.max(np.abs(flipped + psi_eval(spec, tree, cfg))) <= 1e-9

    def test_scale(self):
        spec = FunctionalSpec((PiecewiseFn.constant(2.0),), odd_terms=(OddTerm(PiecewiseFn.constant(-3.0)),))
        assert spec.scale() == pytest.approx(5.0)

    def test_dict_round_trip(self, rng):
        spec = FunctionalSpec((random_function(rng),), LinearMode.REAL_PART, (OddTerm(random_function(rng), 5, 0.5),))
        again = FunctionalSpec.from_dict(spec.to_dict())
        assert again.mode is LinearMode.REAL_PART
        assert again.odd_terms[0].exponent == 5
        assert again.to_dict() == spec.to_dict()

    def test_from_dict_rejects_bad_mode(self):
        with pytest.raises(MalformedDocumentError):
            FunctionalSpec.from_dict({"linear": [ONE.to_dict()], "mode": "imaginary"})

    def test_from_dict_rejects_even_exponent(self):
        data = {"linear": [], "odd_terms": [{"base": ONE.to_dict(), "exponent": 4}]}
        with pytest.raises(MalformedDocumentError):
            FunctionalSpec.from_dict(data)


class TestLipschitz:
    """|psi_j(h_b) - psi_j(h_a)| against the mu_f distance"""

    def test_identical_trees(self):
        spec = FunctionalSpec((ONE,))
        lhs, rhs = lipschitz_sides(spec, Const(0.4), Const(0.4), QuadConfig())
        assert lhs[0] == 0.0
        assert rhs[0] == 0.0
        assert lipschitz_check(spec, Const(0.4), Const(0.4), QuadConfig())

    def test_constant_phases_closed_form(self):
        spec = FunctionalSpec((ONE,))
        lhs, rhs = lipschitz_sides(spec, Const(0.0), Const(0.1), QuadConfig())
        expected = 2.0 * math.sin(0.05)
        assert lhs[0] == pytest.approx(expected, rel=1e-12)
        assert rhs[0] == pytest.approx(expected, rel=1e-12)
        assert expected <= 0.1
        assert lipschitz_check(spec, Const(0.0), Const(0.1), QuadConfig())

    def test_random_pairs(self, rng):
        spec = FunctionalSpec(tuple(random_function(rng) for _ in range(2)))
        for _ in range(10):
            assert lipschitz_check(spec, _random_tree(rng), _random_tree(rng), QuadConfig())

    def test_nonlinear_rejected(self):
        spec = FunctionalSpec((ONE,), odd_terms=(OddTerm(ONE),))
        with pytest.raises(ValueError):
            lipschitz_check(spec, Const(0.0), Const(1.0), QuadConfig())
