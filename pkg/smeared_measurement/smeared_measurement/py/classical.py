"""
Coarse-grained classicality estimates.

Position is only meaningful on cells of size sigma; momentum then bins on the
scale hbar sqrt(4 + N^2) / sigma for a packet of width s = sigma / N. This is
the only module that works in SI units.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.constants
import scipy.special
from scipy.integrate import trapezoid

from smeared_measurement.exceptions import BasisMismatchError, ValidationError
from smeared_measurement.smeared_measurement.py.qstate import Basis, DensityMatrix, WaveFunction
from smeared_measurement.smeared_measurement.py.smear import sectional_widths
from smeared_measurement.utils import throw

HBAR = scipy.constants.hbar
PROTON_MASS = scipy.constants.proton_mass


@dataclass(frozen=True)
class CoarseGraining:
    """Cell size ``sigma`` (m) and sharpness N = sigma / s."""

    sigma: float
    N: float
    hbar: float = HBAR

    def __post_init__(self):
        if not (self.sigma > 0 and self.N > 0):
            throw(f"Coarse graining needs sigma > 0 and N > 0, got sigma={self.sigma}, N={self.N}", exc=ValidationError)

    @property
    def s(self):
        return self.sigma / self.N


def _position_density(state):
    if isinstance(state, WaveFunction):
        return state.grid, np.abs(state.amp) ** 2
    if isinstance(state, DensityMatrix) and state.basis is Basis.POSITION:
        return state.grid, np.real(np.diag(state.mat))
    throw("Cell masses need a wavefunction or a position-basis density matrix", exc=BasisMismatchError)


def _interval_mass(x, f, a, b):
    """Integral over [a, b] of the piecewise-linear interpolant of f."""
    inner = (x > a) & (x < b)
    xs = np.concatenate(([a], x[inner], [b]))
    fs = np.concatenate(([np.interp(a, x, f)], f[inner], [np.interp(b, x, f)]))
    return float(trapezoid(fs, xs))


def cell_mass(state, center, width):
    """
    Probability inside [center - width/2, center + width/2].

    Args:
        state (WaveFunction | DensityMatrix): Position-space state
        center (float): Cell centre
        width (float): Cell width, positive

    Returns:
        float: Quadrature of the position density over the cell

    Raises:
        ValidationError: If width <= 0 or the cell leaves the grid
    """
    if not width > 0:
        throw(f"Cell width must be positive, got {width}", exc=ValidationError)
    g, density = _position_density(state)
    a, b = center - 0.5 * width, center + 0.5 * width
    slack = 1e-12 * (g.x_max - g.x_min)
    if a < g.x_min - slack or b > g.x_max + slack:
        throw(f"Cell [{a:.6g}, {b:.6g}] lies outside the grid [{g.x_min}, {g.x_max}]", exc=ValidationError)
    a, b = max(a, g.x_min), min(b, g.x_max)
    return _interval_mass(g.points, density, a, b)


def gaussian_cell_mass(s, width):
    """Exact mass of a centred Gaussian of width s in a cell of the given width."""
    return float(scipy.special.erf(width / (2.0 * math.sqrt(2.0) * s)))


def coarse_grain_cells(state, sigma, center=None):
    """
    Cell probabilities on a lattice of spacing sigma aligned on ``center``.

    Args:
        state (WaveFunction | DensityMatrix): Position-space state
        sigma (float): Lattice spacing (measurement accuracy)
        center (float, optional): Centre of the middle cell, the mean position by default

    Returns:
        tuple: (cell centres, cell masses) for every cell overlapping the grid
    """
    if not sigma > 0:
        throw(f"Cell size must be positive, got {sigma}", exc=ValidationError)
    g, density = _position_density(state)
    x = g.points
    if center is None:
        center = float(trapezoid(x * density, x) / trapezoid(density, x))
    k_min = math.floor((g.x_min - center) / sigma + 0.5)
    k_max = math.ceil((g.x_max - center) / sigma - 0.5)
    centres = center + sigma * np.arange(k_min, k_max + 1)
    masses = np.array(
        [
            _interval_mass(x, density, max(c - 0.5 * sigma, g.x_min), min(c + 0.5 * sigma, g.x_max))
            for c in centres
        ]
    )
    return centres, masses


def occupied_cells(masses, threshold=1e-3):
    """Number of cells holding more than ``threshold`` of the probability."""
    return int(np.count_nonzero(np.asarray(masses) > threshold))


def momentum_bin_scale(cg):
    """hbar sqrt(4 + N^2) / sigma, in kg m / s when hbar is SI."""
    return cg.hbar * math.sqrt(4.0 + cg.N**2) / cg.sigma


def dimensionless_bin_consistency(s, sigma):
    """
    Ratio of the momentum bin scale (hbar = 1) to the analytic p-diagonal width.

    The bin scale is twice the standard deviation along p = pbar, so this is 2.
    """
    scale = momentum_bin_scale(CoarseGraining(sigma, sigma / s, hbar=1.0))
    return scale / sectional_widths(s, sigma).p_diag


def proton_equivalent(scale, velocity=1e-6):
    """How many protons moving at ``velocity`` (m/s) carry momentum ``scale``."""
    return scale / (PROTON_MASS * velocity)
