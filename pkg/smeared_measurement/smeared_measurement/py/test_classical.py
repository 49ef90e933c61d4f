import math
import unittest

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from smeared_measurement.exceptions import BasisMismatchError, ValidationError
from smeared_measurement.smeared_measurement.py.classical import (
    HBAR,
    CoarseGraining,
    cell_mass,
    coarse_grain_cells,
    dimensionless_bin_consistency,
    gaussian_cell_mass,
    momentum_bin_scale,
    occupied_cells,
    proton_equivalent,
)
from smeared_measurement.smeared_measurement.py.grid import symmetric_grid
from smeared_measurement.smeared_measurement.py.qstate import gaussian_packet, pure_density, to_momentum

THREE_SIGMA_MASS = math.erf(3 / math.sqrt(2))


class TestCellMass(unittest.TestCase):
    def setUp(self):
        self.s = 0.5
        self.psi = gaussian_packet(symmetric_grid(8.0, 1024), self.s)

    def test_six_widths_at_mean(self):
        self.assertAlmostEqual(cell_mass(self.psi, 0.0, 6 * self.s), THREE_SIGMA_MASS, delta=1e-3)
        self.assertAlmostEqual(gaussian_cell_mass(self.s, 6 * self.s), THREE_SIGMA_MASS, places=12)

    def test_packet_narrower_than_cell(self):
        sigma = 6 * self.s
        self.assertAlmostEqual(cell_mass(self.psi, 0.0, sigma), THREE_SIGMA_MASS, delta=1e-3)

    def test_density_matrix_input(self):
        rho = pure_density(self.psi)
        self.assertAlmostEqual(cell_mass(rho, 0.2, 1.0), cell_mass(self.psi, 0.2, 1.0), places=12)

    def test_whole_grid(self):
        self.assertAlmostEqual(cell_mass(self.psi, 0.0, 16.0), 1.0, places=10)

    def test_monotone_in_width(self):
        masses = [cell_mass(self.psi, 0.0, w) for w in np.linspace(0.01, 16.0, 40)]
        self.assertTrue(all(b >= a - 1e-15 for a, b in zip(masses, masses[1:])))

    def test_invalid_cells(self):
        with self.assertRaises(ValidationError):
            cell_mass(self.psi, 0.0, 0.0)
        with self.assertRaises(ValidationError):
            cell_mass(self.psi, 7.5, 2.0)

    def test_momentum_state_rejected(self):
        with self.assertRaises(BasisMismatchError):
            cell_mass(to_momentum(pure_density(self.psi)), 0.0, 1.0)


class TestCoarseGrainedCells(unittest.TestCase):
    def test_cells_partition_the_probability(self):
        psi = gaussian_packet(symmetric_grid(10.0, 1024), 1.0)
        centres, masses = coarse_grain_cells(psi, 0.7)
        self.assertAlmostEqual(masses.sum(), 1.0, places=10)
        np.testing.assert_allclose(np.diff(centres), 0.7)

    def test_narrow_packet_occupies_one_cell(self):
        psi = gaussian_packet(symmetric_grid(8.0, 1024), 1 / 8)
        _, masses = coarse_grain_cells(psi, 1.0, center=0.0)
        self.assertEqual(occupied_cells(masses), 1)

    def test_wide_packet_spreads_over_cells(self):
        psi = gaussian_packet(symmetric_grid(10.0, 1024), 1.0)
        _, masses = coarse_grain_cells(psi, 0.5)
        self.assertGreater(occupied_cells(masses), 5)

    def test_cell_size_must_be_positive(self):
        psi = gaussian_packet(symmetric_grid(8.0, 256), 1.0)
        with self.assertRaises(ValidationError):
            coarse_grain_cells(psi, 0.0)


class TestMomentumBinScale(unittest.TestCase):
    def test_micrometre_example(self):
        scale = momentum_bin_scale(CoarseGraining(1e-6, 3))
        self.assertAlmostEqual(scale / 3.80e-28, 1.0, delta=0.005)
        self.assertLess(abs(math.log10(scale / 1e-27)), 1.0)

    def test_sharp_limit(self):
        self.assertAlmostEqual(momentum_bin_scale(CoarseGraining(1e-6, 1e-9)) / (2 * HBAR / 1e-6), 1.0, places=12)

    def test_scaling(self):
        base = momentum_bin_scale(CoarseGraining(1e-6, 3))
        self.assertAlmostEqual(momentum_bin_scale(CoarseGraining(2e-6, 3)) / base, 0.5)
        self.assertGreater(momentum_bin_scale(CoarseGraining(1e-6, 4)), base)

    def test_invalid_coarse_graining(self):
        with self.assertRaises(ValidationError):
            CoarseGraining(0.0, 3)
        with self.assertRaises(ValidationError):
            CoarseGraining(1e-6, -1)

    def test_proton_equivalent(self):
        scale = momentum_bin_scale(CoarseGraining(1e-6, 3))
        self.assertGreater(proton_equivalent(scale), 1e5)
        self.assertAlmostEqual(proton_equivalent(scale, velocity=2e-6) * 2, proton_equivalent(scale))

    def test_unit_examples(self):
        self.assertAlmostEqual(dimensionless_bin_consistency(1 / 3, 1.0), 2.0, places=12)
        self.assertAlmostEqual(dimensionless_bin_consistency(1.0, 1.0), 2.0, places=12)

    @given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-3, max_value=1e3))
    def test_bin_scale_is_twice_the_width(self, s, sigma):
        self.assertAlmostEqual(dimensionless_bin_consistency(s, sigma), 2.0, places=10)
