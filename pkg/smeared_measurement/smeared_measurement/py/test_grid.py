import math
import unittest

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from smeared_measurement.exceptions import GridError
from smeared_measurement.smeared_measurement.py.grid import (
    conjugate_grid,
    make_grid,
    recommended_half_width,
    symmetric_grid,
)


class TestGrid(unittest.TestCase):
    def test_points_and_spacing(self):
        g = make_grid(-1.0, 1.0, 5)
        np.testing.assert_allclose(g.points, [-1.0, -0.5, 0.0, 0.5, 1.0])
        self.assertEqual(g.spacing, 0.5)

    def test_trapezoid_weights_sum_to_span(self):
        g = make_grid(-3.0, 5.0, 101)
        self.assertAlmostEqual(g.weights.sum(), 8.0, places=12)
        self.assertAlmostEqual(g.weights[0], 0.5 * g.spacing)

    def test_rejects_bad_bounds(self):
        for args in ((1.0, 1.0, 10), (2.0, 1.0, 10), (-math.inf, 1.0, 10), (0.0, 1.0, 1), (0.0, 1.0, 2.5), (-1.0, 1.0, math.inf), (-1.0, 1.0, math.nan)):
            with self.subTest(args=args), self.assertRaises(GridError):
                make_grid(*args)

    def test_points_are_readonly(self):
        g = make_grid(0.0, 1.0, 4)
        with self.assertRaises(ValueError):
            g.points[0] = 3.0

    def test_mirror_index_of_symmetric_grid(self):
        g = symmetric_grid(4.0, 9)
        m = g.mirror_index()
        np.testing.assert_allclose(g.points[m], -g.points)

    def test_mirror_index_needs_symmetry(self):
        with self.assertRaises(GridError):
            make_grid(0.0, 2.0, 8).mirror_index()

    def test_recommended_half_width(self):
        self.assertEqual(recommended_half_width(1.0, 2.0), 16.0)
        self.assertEqual(recommended_half_width(3.0, 0.5, factor=10), 30.0)


class TestMomentumGrid(unittest.TestCase):
    def test_reciprocity(self):
        g = make_grid(-12.0, 12.0, 512)
        mg = conjugate_grid(g)
        self.assertAlmostEqual(mg.spacing * g.spacing * g.n, 2 * math.pi, places=12)
        self.assertAlmostEqual(g.period * mg.spacing, 2 * math.pi, places=12)
        self.assertAlmostEqual(mg.period * g.spacing, 2 * math.pi, places=12)

    def test_range_is_nyquist_band(self):
        g = make_grid(-1.0, 1.0, 4)
        mg = conjugate_grid(g)
        self.assertAlmostEqual(mg.points[0], -math.pi / g.spacing)
        self.assertLess(mg.points[-1], math.pi / g.spacing)

    def test_zero_momentum_on_even_grid(self):
        mg = conjugate_grid(symmetric_grid(10.0, 64))
        self.assertEqual(np.count_nonzero(np.isclose(mg.points, 0.0, atol=1e-12)), 1)

    def test_mirror_leaves_first_point_unpaired(self):
        mg = conjugate_grid(symmetric_grid(5.0, 16))
        m = mg.mirror_index()
        self.assertEqual(m[0], -1)
        np.testing.assert_allclose(mg.points[m[1:]], -mg.points[1:], atol=1e-12)

    @given(
        st.floats(min_value=-50, max_value=50),
        st.floats(min_value=0.1, max_value=100),
        st.integers(min_value=2, max_value=2048),
    )
    def test_reciprocity_property(self, x_min, span, n):
        g = make_grid(x_min, x_min + span, n)
        mg = conjugate_grid(g)
        self.assertAlmostEqual(mg.spacing * g.spacing * n / (2 * math.pi), 1.0, places=10)
        self.assertEqual(mg.points.size, n)
