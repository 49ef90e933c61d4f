"""
Uniform 1-D position lattice and its Fourier-conjugate momentum lattice.

Conventions fixed here for the whole package:
    hbar = 1, <p|x> is proportional to exp(-i p x),
    x_j = x_min + j dx,   p_j = -pi/dx + j dp,   dp = 2 pi / (n dx).
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from smeared_measurement.config import BOX_HALF_WIDTH_FACTOR
from smeared_measurement.exceptions import GridError
from smeared_measurement.utils import throw


@dataclass(frozen=True)
class Grid:
    """Position lattice with trapezoidal quadrature weights."""

    x_min: float
    x_max: float
    n: int

    @property
    def spacing(self):
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def period(self):
        """n * dx, the span seen by the discrete Fourier transform."""
        return self.n * self.spacing

    @property
    def is_symmetric(self):
        return self.x_min == -self.x_max

    @cached_property
    def points(self):
        pts = self.x_min + np.arange(self.n) * self.spacing
        if self.is_symmetric:
            # ? EXACT REFLECTION x_{n-1-j} = -x_j
            pts = 0.5 * (pts - pts[::-1])
        pts.setflags(write=False)
        return pts

    @cached_property
    def weights(self):
        w = np.full(self.n, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        w.setflags(write=False)
        return w

    def mirror_index(self):
        """
        Index array m with x_{m[j]} = -x_j.

        Raises:
            GridError: If the grid is not symmetric about the origin
        """
        if not self.is_symmetric:
            throw(
                f"Grid [{self.x_min}, {self.x_max}] is not symmetric; anti-diagonal cuts need x_min = -x_max",
                exc=GridError,
            )
        return np.arange(self.n)[::-1].copy()


@dataclass(frozen=True)
class MomentumGrid:
    """Momentum lattice conjugate to ``grid`` under the discrete Fourier transform."""

    grid: Grid

    @property
    def n(self):
        return self.grid.n

    @property
    def spacing(self):
        return 2.0 * math.pi / (self.grid.n * self.grid.spacing)

    @property
    def period(self):
        return self.n * self.spacing

    @cached_property
    def points(self):
        pts = -math.pi / self.grid.spacing + np.arange(self.n) * self.spacing
        pts.setflags(write=False)
        return pts

    @cached_property
    def weights(self):
        # periodic rule: the DFT dual has no endpoints
        w = np.full(self.n, self.spacing)
        w.setflags(write=False)
        return w

    def mirror_index(self):
        """
        Index array m with p_{m[j]} = -p_j, or -1 where -p_j is not on the lattice.

        Only p_0 = -pi/dx is unpaired: its mirror +pi/dx is the aliased copy of itself.
        """
        j = np.arange(self.n)
        m = (self.n - j) % self.n
        m[0] = -1
        return m


def make_grid(x_min, x_max, n):
    """
    Build a uniform position grid.

    Args:
        x_min (float): Left endpoint
        x_max (float): Right endpoint, strictly greater than x_min
        n (int): Number of points, at least 2

    Returns:
        Grid: Immutable grid

    Raises:
        GridError: On non-finite bounds, empty domain or n < 2
    """
    if not (math.isfinite(x_min) and math.isfinite(x_max)):
        throw(f"Grid bounds must be finite, got [{x_min}, {x_max}]", exc=GridError)
    if not x_max > x_min:
        throw(f"Grid needs x_max > x_min, got [{x_min}, {x_max}]", exc=GridError)
    if not (math.isfinite(n) and int(n) == n and n >= 2):
        throw(f"Grid needs an integer n >= 2, got {n}", exc=GridError)
    return Grid(float(x_min), float(x_max), int(n))


def conjugate_grid(g):
    """Momentum grid of ``g``; dp * dx * n = 2 pi."""
    return MomentumGrid(g)


def symmetric_grid(half_width, n):
    return make_grid(-half_width, half_width, n)


def recommended_half_width(s, sigma, factor=BOX_HALF_WIDTH_FACTOR):
    """Box half-width that keeps Gaussian truncation error negligible: factor * max(s, sigma)."""
    return factor * max(s, sigma)
