"""
Smeared von Neumann channel.

An apparatus that reads position with finite accuracy sigma leaves read-off
states with overlap <alpha_x|alpha_xbar> = exp(-(x - xbar)^2 / 2 sigma^2), so
the reduced state is the elementwise product of that kernel with rho(x, xbar).
sigma -> 0 is the exact von Neumann measurement, sigma -> inf leaves rho alone.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from smeared_measurement.config import DEFAULT_REGIME_FACTOR, MIN_RESOLVED_SIGMA_STEPS
from smeared_measurement.exceptions import BasisMismatchError, ValidationError
from smeared_measurement.smeared_measurement.py.grid import conjugate_grid
from smeared_measurement.smeared_measurement.py.qstate import Basis, DensityMatrix, trace
from smeared_measurement.utils import msgprint, throw


class Convention(enum.Enum):
    """
    TRACE_PRESERVING: k(x, x) = 1, the overlap of unit-norm read-off states.
    PAPER_PREFACTOR: k carries 1/sqrt(2 pi sigma^2) as printed; Tr rho is not kept.
    """

    TRACE_PRESERVING = "trace_preserving"
    PAPER_PREFACTOR = "paper_prefactor"


class Flag(enum.Enum):
    SPREAD = "spread"
    LOCALIZED = "localized"
    INTERMEDIATE = "intermediate"


class RegimeRow(enum.Enum):
    SIGMA_SMALL_S_LARGE = "sigma->0/s->large"
    SIGMA_SMALL_S_SMALL = "sigma->0/s->0"
    SIGMA_LARGE_S_SMALL = "sigma->large/s->0"
    SIGMA_LARGE_S_LARGE = "sigma->large/s->large"
    INTERMEDIATE = "intermediate"


S, L = Flag.SPREAD, Flag.LOCALIZED

# (sigma limit, s limit) -> (x-diag, x-antidiag, p-diag, p-antidiag)
REGIME_TABLE = {
    RegimeRow.SIGMA_SMALL_S_LARGE: ((L, S), (S, L, S, L)),
    RegimeRow.SIGMA_SMALL_S_SMALL: ((L, L), (L, L, S, S)),
    RegimeRow.SIGMA_LARGE_S_SMALL: ((S, L), (L, L, S, S)),
    RegimeRow.SIGMA_LARGE_S_LARGE: ((S, S), (S, S, L, L)),
}


class SectionalWidths(NamedTuple):
    x_diag: float
    x_anti: float
    p_diag: float
    p_anti: float

    @property
    def products(self):
        """(x-diag * p-antidiag, x-antidiag * p-diag); both 1/2 for the smeared Gaussian."""
        return self.x_diag * self.p_anti, self.x_anti * self.p_diag


@dataclass(frozen=True)
class SmearKernel:
    sigma: float
    convention: Convention = Convention.TRACE_PRESERVING

    def __post_init__(self):
        if not self.sigma > 0:
            throw(f"Smearing width sigma must be positive, got {self.sigma}", exc=ValidationError)
        object.__setattr__(self, "convention", Convention(self.convention))

    @property
    def prefactor(self):
        if self.convention is Convention.PAPER_PREFACTOR:
            return 1.0 / math.sqrt(2.0 * math.pi * self.sigma**2)
        return 1.0

    def __call__(self, x, xbar):
        return self.prefactor * np.exp(-((np.asarray(x) - np.asarray(xbar)) ** 2) / (2.0 * self.sigma**2))

    def matrix(self, points):
        return self(points[:, None], points[None, :])


def smearing_function(x, y, sigma):
    """
    g(x, y, sigma) = exp(-(x - y)^2 / 2 sigma^2) / sqrt(2 pi sigma^2).

    sigma = 0 is the delta-function limit: returned pointwise as inf at x = y
    and 0 elsewhere, for symbolic use only.

    Raises:
        ValidationError: If sigma < 0
    """
    if sigma < 0:
        throw(f"Smearing width sigma must be non-negative, got {sigma}", exc=ValidationError)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if sigma == 0:
        msgprint("sigma = 0 is the distributional limit g = delta(x - y)", title="Delta Limit", indicator="orange")
        return np.where(x == y, np.inf, 0.0)
    return np.exp(-((x - y) ** 2) / (2.0 * sigma**2)) / math.sqrt(2.0 * math.pi * sigma**2)


def _warn_if_unresolved(sigma, spacing):
    if sigma < MIN_RESOLVED_SIGMA_STEPS * spacing:
        msgprint(
            f"sigma = {sigma:.6g} is below {MIN_RESOLVED_SIGMA_STEPS:g} grid steps ({spacing:.6g}); "
            "the channel acts as an exact von Neumann measurement on this grid",
            title="Sub-resolution Smearing",
            indicator="orange",
        )


def _apply_kernel(rho, kern, basis):
    if rho.basis is not basis:
        throw(
            f"Smeared channel in the {basis.value} basis got a {rho.basis.value}-basis matrix",
            exc=BasisMismatchError,
        )
    _warn_if_unresolved(kern.sigma, rho.grid.spacing)
    out = rho.replace(kern.matrix(rho.grid.points) * rho.mat)
    if kern.convention is Convention.PAPER_PREFACTOR:
        msgprint(f"paper_prefactor convention leaves trace {trace(out):.6g}", title="Smeared Channel", indicator="blue")
    return out


def apply_smeared_channel(rho, kern):
    """
    Reduced state after a position measurement of accuracy sigma.

    Args:
        rho (DensityMatrix): Position-basis state
        kern (SmearKernel): Read-off overlap

    Returns:
        DensityMatrix: mat_jk * k(x_j, x_k); trace, Hermiticity and positivity kept
        under the trace-preserving convention

    Raises:
        BasisMismatchError: If rho is not in the position basis
    """
    return _apply_kernel(rho, kern, Basis.POSITION)


def apply_momentum_smeared_channel(rho, kern):
    """Same channel for an apparatus reading momentum; sigma is then a momentum accuracy."""
    return _apply_kernel(rho, kern, Basis.MOMENTUM)


def apply_von_neumann_channel(rho):
    """Exact (sigma = 0) position measurement on the grid: only the diagonal survives."""
    if rho.basis is not Basis.POSITION:
        throw("von Neumann channel expects a position-basis matrix", exc=BasisMismatchError)
    return rho.replace(np.diag(np.diag(rho.mat)))


def compose_sigmas(sigma_1, sigma_2):
    """Single-stage width equal to two successive channels: exponents add as 1/sigma^2."""
    if math.isinf(sigma_1):
        return sigma_2
    if math.isinf(sigma_2):
        return sigma_1
    return sigma_1 * sigma_2 / math.sqrt(sigma_1**2 + sigma_2**2)


# * GAUSSIAN CLOSED FORMS


def _check_widths(s, sigma):
    for name, value in (("s", s), ("sigma", sigma)):
        if not (value > 0 and math.isfinite(value)):
            throw(f"Closed form needs finite {name} > 0, got {value}", exc=ValidationError)


def _unit_trace(mat, weights):
    return mat / float(np.real(np.sum(weights * np.diag(mat))))


def gaussian_closed_form_x(g, s, sigma, convention=Convention.TRACE_PRESERVING):
    """
    rho(x, xbar) = A exp(-(x - xbar)^2 / 2 sigma^2 - (x^2 + xbar^2) / 4 s^2).

    A = 1 / sqrt(4 pi^2 s^2 sigma^2) under PAPER_PREFACTOR; under
    TRACE_PRESERVING the samples are rescaled to unit quadrature trace.
    """
    _check_widths(s, sigma)
    x = g.points[:, None]
    xb = g.points[None, :]
    mat = np.exp(-((x - xb) ** 2) / (2.0 * sigma**2) - (x**2 + xb**2) / (4.0 * s**2))
    if Convention(convention) is Convention.PAPER_PREFACTOR:
        mat = mat / math.sqrt(4.0 * math.pi**2 * s**2 * sigma**2)
    else:
        mat = _unit_trace(mat / math.sqrt(2.0 * math.pi * s**2), g.weights)
    return DensityMatrix(Basis.POSITION, mat.astype(complex), g)


def gaussian_closed_form_p(g, s, sigma, convention=Convention.TRACE_PRESERVING):
    """
    rho(p, pbar) = B exp(-(p - pbar)^2 2 s^4 / (4 s^2 + sigma^2) - (p^2 + pbar^2) s^2 sigma^2 / (4 s^2 + sigma^2)).

    B = 2 sqrt(s^2) / sqrt(4 s^2 + sigma^2) under PAPER_PREFACTOR; unit trace on
    conjugate_grid(g) otherwise.
    """
    _check_widths(s, sigma)
    mg = conjugate_grid(g)
    p = mg.points[:, None]
    pb = mg.points[None, :]
    denom = 4.0 * s**2 + sigma**2
    mat = np.exp(-((p - pb) ** 2) * 2.0 * s**4 / denom - (p**2 + pb**2) * s**2 * sigma**2 / denom)
    if Convention(convention) is Convention.PAPER_PREFACTOR:
        mat = mat * 2.0 * math.sqrt(s**2) / math.sqrt(denom)
    else:
        mat = _unit_trace(mat * math.sqrt(2.0 * s**2 * sigma**2 / (math.pi * denom)), mg.weights)
    return DensityMatrix(Basis.MOMENTUM, mat.astype(complex), mg)


def von_neumann_momentum_kernel(g, s, x0=0.0):
    """
    Momentum matrix of an exactly position-decohered Gaussian on ``g``.

    (dx / 2 pi) F[|psi|^2](p - pbar) = (dx / 2 pi) exp(-(p - pbar)^2 s^2 / 2 - i (p - pbar) x0);
    it depends on p - pbar only, so it is nowhere near diagonal.
    """
    _check_widths(s, 1.0)
    mg = conjugate_grid(g)
    diff = mg.points[:, None] - mg.points[None, :]
    mat = g.spacing / (2.0 * math.pi) * np.exp(-(diff**2) * s**2 / 2.0 - 1j * diff * x0)
    return DensityMatrix(Basis.MOMENTUM, mat, mg)


def sectional_widths(s, sigma):
    """
    Analytic standard deviations of the four cuts of the smeared Gaussian.

    Returns:
        SectionalWidths: (s, s sigma / sqrt(sigma^2 + 4 s^2),
        sqrt(4 s^2 + sigma^2) / (2 s sigma), 1 / (2 s))
    """
    root = math.sqrt(4.0 * s**2 + sigma**2)
    return SectionalWidths(s, s * sigma / root, root / (2.0 * s * sigma), 1.0 / (2.0 * s))


def analytic_purity(s, sigma):
    return 1.0 / math.sqrt(1.0 + 4.0 * s**2 / sigma**2)


def analytic_entropy(s, sigma):
    """
    Entropy of the smeared Gaussian, a one-mode Gaussian state with symplectic
    eigenvalue nu = 1 / purity: ((nu+1)/2) ln((nu+1)/2) - ((nu-1)/2) ln((nu-1)/2).
    """
    nu = 1.0 / analytic_purity(s, sigma)
    plus, minus = 0.5 * (nu + 1.0), 0.5 * (nu - 1.0)
    if minus <= 0:
        return 0.0
    return float(plus * math.log(plus) - minus * math.log(minus))


# * REGIMES


@dataclass(frozen=True)
class RegimeReport:
    s: float
    sigma: float
    widths: SectionalWidths
    pattern: tuple
    row: RegimeRow
    ref_x: float
    ref_p: float
    factor: float


def _flag(value, ref, factor):
    if value > factor * ref:
        return Flag.SPREAD
    if value < ref / factor:
        return Flag.LOCALIZED
    return Flag.INTERMEDIATE


def classify_regime(s, sigma, ref_x=1.0, ref_p=None, factor=DEFAULT_REGIME_FACTOR, widths=None):
    """
    Place (s, sigma) in the spread/localized regime table.

    A width is spread above factor * ref and localized below ref / factor.
    A row is assigned when both the four width flags and the row's (sigma, s)
    limits, measured against ref_x, match; the two small-s rows share one width pattern.

    Args:
        s (float): Packet width
        sigma (float): Smearing width
        ref_x (float): Observation length scale
        ref_p (float, optional): Momentum scale, 1 / ref_x by default
        factor (float): Separation factor, at least 1
        widths (SectionalWidths, optional): Measured widths to use instead of the analytic ones

    Returns:
        RegimeReport: Widths, flags and row
    """
    if not (s > 0 and sigma > 0 and ref_x > 0):
        throw("classify_regime needs positive s, sigma and ref_x", exc=ValidationError)
    if factor < 1:
        throw(f"Regime factor must be at least 1, got {factor}", exc=ValidationError)
    ref_p = 1.0 / ref_x if ref_p is None else ref_p
    widths = SectionalWidths(*widths) if widths is not None else sectional_widths(s, sigma)
    refs = (ref_x, ref_x, ref_p, ref_p)
    pattern = tuple(_flag(w, r, factor) for w, r in zip(widths, refs))
    limits = (_flag(sigma, ref_x, factor), _flag(s, ref_x, factor))

    row = RegimeRow.INTERMEDIATE
    for candidate, (row_limits, row_pattern) in REGIME_TABLE.items():
        if limits == row_limits and pattern == row_pattern:
            row = candidate
            break
    return RegimeReport(s, sigma, widths, pattern, row, ref_x, ref_p, factor)
