"""
Tests for phase trees
"""

import math

import numpy as np
import pytest

from src.phase_annihilator.core.construct import EquivariantMap
from src.phase_annihilator.core.phase import (
    Blend,
    Const,
    HardSwitch,
    IntConst,
    blend,
    eval_g,
    eval_h,
    leq,
    shift,
    sign_changes,
    switch_points,
    transition_windows,
    tree_from_dict,
    w11_norm,
)
from src.phase_annihilator.core.sphere import SpherePoint, mirror
from src.phase_annihilator.errors import MalformedDocumentError, OrderViolationError, UnsupportedKindError

GRID = np.linspace(0.0, 1.0, 10_001)


def _nested():
    inner = Blend(Const(0.0), Const(math.pi), 0.3, 0.2)
    return Blend(inner, shift(inner, 1), 0.6, 0.15)


class TestEvaluation:
    """eval_g and eval_h on all node kinds"""

    def test_const(self):
        assert eval_g(Const(0.0), 0.42) == 0.0
        assert eval_h(Const(math.pi), 0.1) == pytest.approx(-1.0)
        assert eval_h(Const(math.pi / 2), 0.7) == pytest.approx(1.0j)

    def test_blend_center(self):
        tree = Blend(Const(0.0), Const(math.pi), 0.5, 0.25)
        assert eval_g(tree, tree.center) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_blend_endpoint_times(self):
        """t = 0 gives lo and t = 1 gives hi on all of [0,1]"""
        at_zero = Blend(Const(0.0), Const(math.pi), 0.0, 0.25)
        at_one = Blend(Const(0.0), Const(math.pi), 1.0, 0.25)
        assert eval_g(at_zero, 1.0) == 0.0
        assert np.all(eval_g(at_zero, GRID) == 0.0)
        assert np.all(eval_g(at_one, GRID) == math.pi)

    def test_blend_of_equal_children(self):
        inner = Blend(Const(0.0), Const(1.0), 0.4, 0.1)
        tree = Blend(inner, inner, 0.5, 0.3)
        assert np.allclose(eval_g(tree, GRID), eval_g(inner, GRID), atol=1e-15)

    def test_integer_parity(self):
        assert eval_h(IntConst(2), 0.3) == 1.0
        assert eval_h(IntConst(-3), 0.3) == -1.0

    def test_hard_switch(self):
        tree = HardSwitch(IntConst(0), IntConst(1), 0.25)
        assert eval_g(tree, 0.7) == 0.0
        assert eval_g(tree, 0.75) == 1.0
        assert eval_h(tree, 0.9) == -1.0

    def test_array_input_keeps_shape(self):
        values = eval_g(_nested(), np.zeros((2, 5)))
        assert values.shape == (2, 5)

    def test_monotone(self, rng):
        tree = _nested()
        pairs = np.sort(rng.uniform(0.0, 1.0, size=(10_000, 2)), axis=1)
        low = eval_g(tree, pairs[:, 0])
        high = eval_g(tree, pairs[:, 1])
        assert np.all(low <= high + 1e-12)

    def test_unit_modulus(self):
        assert np.allclose(np.abs(eval_h(_nested(), GRID)), 1.0, atol=1e-14)


class TestBlendAndShift:
    """Path construction and the half-turn action"""

    def test_shift_const(self):
        assert shift(Const(0.0), 1) == Const(math.pi)
        assert shift(IntConst(0), 3) == IntConst(3)

    def test_shift_blend_adds_pi(self):
        tree = Blend(Const(0.0), Const(math.pi), 0.4, 0.2)
        assert np.allclose(eval_g(shift(tree, 1), GRID), eval_g(tree, GRID) + math.pi, atol=1e-14)

    def test_shift_negates_h(self):
        tree = _nested()
        assert np.allclose(eval_h(shift(tree, 1), GRID), -eval_h(tree, GRID), atol=1e-14)

    def test_blend_checks_order(self):
        with pytest.raises(OrderViolationError):
            blend(Const(math.pi), Const(0.0), 0.5, 0.1)

    def test_blend_of_integer_trees_is_a_switch(self):
        tree = blend(IntConst(0), IntConst(1), 0.5, 0.3)
        assert isinstance(tree, HardSwitch)
        assert tree.switch_point == 0.5

    def test_blend_mixed_kinds_rejected(self):
        with pytest.raises(UnsupportedKindError):
            blend(Const(0.0), IntConst(1), 0.5, 0.1)

    def test_blend_sandwich(self):
        lo = Blend(Const(0.0), Const(math.pi), 0.3, 0.2)
        hi = shift(lo, 1)
        for t in (0.0, 0.2, 0.5, 0.9, 1.0):
            tree = blend(lo, hi, t, 0.1)
            assert leq(lo, tree)
            assert leq(tree, hi)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            Blend(Const(0.0), Const(1.0), 1.5, 0.1)
        with pytest.raises(ValueError):
            Blend(Const(0.0), Const(1.0), 0.5, 0.0)
        with pytest.raises(UnsupportedKindError):
            HardSwitch(Const(0.0), IntConst(1), 0.5)


class TestLeq:
    """Grid certificate for the pointwise order"""

    def test_constants(self):
        assert leq(Const(0.0), Const(math.pi))
        assert not leq(Const(math.pi), Const(0.0))

    def test_narrow_violation_found_through_windows(self):
        """A violation narrower than the uniform grid spacing is caught at a window edge"""
        width = 1e-6

        def step_at(center):
            return Blend(Const(0.0), Const(1.0), (1.0 + width - center) / (1.0 + 2.0 * width), width)

        assert leq(step_at(0.5), step_at(0.49999))
        assert not leq(step_at(0.49999), step_at(0.5))

    def test_hard_switches(self):
        early = HardSwitch(IntConst(0), IntConst(1), 0.5)
        late = HardSwitch(IntConst(0), IntConst(1), 0.4)
        assert leq(late, early)
        assert not leq(early, late)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(UnsupportedKindError):
            leq(Const(0.0), IntConst(0))


class TestNormsAndWindows:
    """W1,1 norm, transition windows and sign changes"""

    def test_w11_const(self):
        assert w11_norm(Const(1.3)) == 1.0

    def test_w11_blend(self):
        assert w11_norm(Blend(Const(0.0), Const(math.pi), 0.5, 0.1)) == pytest.approx(1.0 + math.pi)

    def test_w11_full_turn(self):
        tree = Blend(Const(0.0), Const(2.0 * math.pi), 0.5, 0.5)
        assert w11_norm(tree) == pytest.approx(1.0 + 2.0 * math.pi)

    def test_w11_integer_rejected(self):
        with pytest.raises(UnsupportedKindError):
            w11_norm(IntConst(0))

    def test_windows(self):
        assert transition_windows(Const(1.0)) == []
        windows = transition_windows(Blend(Const(0.0), Const(math.pi), 0.5, 0.25))
        assert len(windows) == 1
        assert windows[0].half_width == 0.25
        assert windows[0].center == pytest.approx(0.5)

    def test_window_outside_unit_interval_dropped(self):
        assert transition_windows(Blend(Const(0.0), Const(math.pi), 0.0, 0.25)) == []

    def test_nested_windows_sorted(self):
        windows = transition_windows(_nested())
        assert 1 <= len(windows) <= 3
        centers = [w.center for w in windows]
        assert centers == sorted(centers)

    def test_g_constant_outside_windows(self):
        tree = _nested()
        windows = transition_windows(tree)
        covered = np.zeros(GRID.shape, dtype=bool)
        for w in windows:
            covered |= (GRID >= w.left) & (GRID <= w.right)
        values = eval_g(tree, GRID)
        runs = np.flatnonzero(np.diff(covered.astype(int)) != 0)
        for segment in np.split(np.arange(GRID.size), runs + 1):
            if not covered[segment[0]]:
                assert np.ptp(values[segment]) <= 1e-12

    def test_sign_changes(self):
        assert sign_changes(IntConst(5)) == 0
        assert sign_changes(HardSwitch(IntConst(0), IntConst(1), 0.5)) == 1
        assert sign_changes(HardSwitch(IntConst(0), IntConst(2), 0.5)) == 0

    def test_sign_changes_nested(self):
        tree = HardSwitch(IntConst(0), HardSwitch(IntConst(1), IntConst(2), 0.25), 0.75)
        assert list(switch_points(tree)) == [0.25, 0.75]
        assert sign_changes(tree) == 2

    def test_sign_changes_smooth_rejected(self):
        with pytest.raises(UnsupportedKindError):
            sign_changes(Const(0.0))


class TestSerialization:
    """Nested JSON records"""

    def test_round_trip(self):
        tree = Blend(_nested(), shift(_nested(), 2), 0.7, 0.05)
        assert tree_from_dict(tree.to_dict()) == tree

    def test_integer_round_trip(self):
        tree = HardSwitch(IntConst(0), HardSwitch(IntConst(1), IntConst(2), 0.25), 0.75)
        assert tree_from_dict(tree.to_dict()) == tree

    def test_unknown_tag(self):
        with pytest.raises(MalformedDocumentError):
            tree_from_dict({"spline": 1.0})

    def test_incomplete_node(self):
        with pytest.raises(MalformedDocumentError):
            tree_from_dict({"blend": {"lo": {"const": 0.0}, "t": 0.5, "w": 0.1}})

    def test_integer_child_in_blend(self):
        with pytest.raises(MalformedDocumentError):
            tree_from_dict({"blend": {"lo": {"int": 0}, "hi": {"int": 1}, "t": 0.5, "w": 0.1}})


def _sphere_trees(rng, count):
    emap = EquivariantMap(3)
    for _ in range(count):
        x = SpherePoint.normalized(rng.normal(size=4))
        if x.coords[-1] < 0:
            x = x.antipode()
        yield emap.alpha(x), emap.alpha(mirror(x))


class TestPhaseMap:
    """The map g -> exp(i g) on trees from the three-sphere"""

    PANELS = 4000
    MIDS = (np.arange(PANELS) + 0.5) / PANELS

    def test_one_lipschitz(self, rng):
        emap = EquivariantMap(3)
        for _ in range(1000):
            first = emap.alpha(SpherePoint.normalized(rng.normal(size=4)))
            second = emap.alpha(SpherePoint.normalized(rng.normal(size=4)))
            h_gap = np.abs(eval_h(first, self.MIDS) - eval_h(second, self.MIDS))
            g_gap = np.abs(eval_g(first, self.MIDS) - eval_g(second, self.MIDS))
            assert np.all(h_gap <= g_gap + 1e-12)
            assert h_gap.mean() <= g_gap.mean() + 1e-12

    def test_blend_moves_at_most_four_w(self, rng):
        """A blend of ordered trees stays within 4w of its endpoints in L1 after exp(i.)"""
        emap = EquivariantMap(3)
        slack = 4.0 / self.PANELS
        for low, high in _sphere_trees(rng, 200):
            reference = emap.alpha(SpherePoint.normalized(rng.normal(size=4)))
            t = rng.uniform(0.0, 1.0)
            w = rng.uniform(0.01, 1.0)
            mixed = blend(low, high, t, w)
            target = eval_h(reference, self.MIDS)

            def distance(tree):
                return np.abs(eval_h(tree, self.MIDS) - target).mean()

            assert distance(mixed) <= distance(low) + distance(high) + 4.0 * w + slack
