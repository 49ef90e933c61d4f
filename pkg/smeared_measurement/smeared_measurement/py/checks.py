"""
Oracle cross-checks run by ``validate``.

Each check builds its own grid (box +-10 max(s, sigma), n = 512 unless told
otherwise), compares a numerical result with an independent closed form and
returns a CheckResult.
"""

from dataclasses import dataclass

import numpy as np

from smeared_measurement.smeared_measurement.py.grid import symmetric_grid
from smeared_measurement.smeared_measurement.py.measure import random_unitary, verify_entangling_evolution
from smeared_measurement.smeared_measurement.py.qstate import (
    four_widths,
    gaussian_packet,
    max_relative_deviation,
    pure_density,
    purity,
    to_momentum,
)
from smeared_measurement.smeared_measurement.py.smear import (
    SectionalWidths,
    SmearKernel,
    analytic_purity,
    apply_smeared_channel,
    compose_sigmas,
    gaussian_closed_form_p,
    gaussian_closed_form_x,
    von_neumann_momentum_kernel,
)

CHECK_BOX_FACTOR = 10.0
CHECK_N = 512


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    threshold: float

    @property
    def passed(self):
        return bool(self.deviation < self.threshold)

    def as_dict(self):
        return {
            "name": self.name,
            "deviation": float(self.deviation),
            "threshold": self.threshold,
            "passed": self.passed,
        }


def _smeared_packet(s, sigma, n, box_factor=CHECK_BOX_FACTOR):
    g = symmetric_grid(box_factor * max(s, sigma), n)
    rho = pure_density(gaussian_packet(g, s))
    return g, rho, apply_smeared_channel(rho, SmearKernel(sigma))


def check_closed_form_x(s=1.0, sigma=1.0, n=CHECK_N):
    g, _, rho_x = _smeared_packet(s, sigma, n)
    deviation = max_relative_deviation(rho_x.mat, gaussian_closed_form_x(g, s, sigma).mat)
    return CheckResult("closed_form_x", deviation, 1e-8)


def check_closed_form_p(s=1.0, sigma=1.0, n=CHECK_N):
    g, _, rho_x = _smeared_packet(s, sigma, n)
    deviation = max_relative_deviation(to_momentum(rho_x).mat, gaussian_closed_form_p(g, s, sigma).mat)
    return CheckResult("closed_form_p", deviation, 1e-6)


def check_fast_transform(s=1.0, sigma=1.0, n=CHECK_N):
    """Direct quadrature and phase-corrected FFT give the same momentum matrix."""
    _, _, rho_x = _smeared_packet(s, sigma, n)
    deviation = max_relative_deviation(to_momentum(rho_x, "fft").mat, to_momentum(rho_x, "direct").mat)
    return CheckResult("fast_transform", deviation, 1e-10)


def check_purity_law(s=1.0, sigma=1.0, n=CHECK_N):
    _, _, rho_x = _smeared_packet(s, sigma, n)
    return CheckResult("purity_law", abs(purity(rho_x) - analytic_purity(s, sigma)), 1e-4)


def check_width_products(s=1.0, sigma=1.0, n=CHECK_N):
    """Both cross-products of measured sectional widths equal 1/2 within 2%."""
    _, _, rho_x = _smeared_packet(s, sigma, n)
    widths = SectionalWidths(*four_widths(rho_x, to_momentum(rho_x)))
    deviation = max(abs(product - 0.5) / 0.5 for product in widths.products)
    return CheckResult("width_products", deviation, 0.02)


def check_composition_law(s=1.0, sigma_1=1.5, sigma_2=2.0, n=CHECK_N):
    _, _, rho_1 = _smeared_packet(s, sigma_1, n)
    two_stage = apply_smeared_channel(rho_1, SmearKernel(sigma_2))
    one_stage = apply_smeared_channel(pure_density(gaussian_packet(rho_1.grid, s)), SmearKernel(compose_sigmas(sigma_1, sigma_2)))
    return CheckResult("composition_law", float(np.max(np.abs(two_stage.mat - one_stage.mat))), 1e-10)


def check_sigma_zero_position(s=1.0, n=CHECK_N):
    """At sigma = dx / 10, entries with |x - xbar| >= 3 dx keep under 1e-3 of their pure values."""
    g = symmetric_grid(CHECK_BOX_FACTOR * s, n)
    rho = pure_density(gaussian_packet(g, s))
    smeared = apply_smeared_channel(rho, SmearKernel(g.spacing / 10.0))
    idx = np.arange(n)
    pure = np.abs(rho.mat)
    far = (np.abs(idx[:, None] - idx[None, :]) >= 3) & (pure > 1e-12 * pure.max())
    deviation = float(np.max(np.abs(smeared.mat)[far] / pure[far]))
    return CheckResult("sigma_zero_position", deviation, 1e-3)


def check_sigma_zero_momentum(s=1.0, n=CHECK_N, offsets=(0, 1, 2)):
    """
    At sigma = dx / 10 the momentum matrix is constant along fixed p - pbar lines
    and matches the exact von Neumann kernel there.
    """
    g = symmetric_grid(CHECK_BOX_FACTOR * s, n)
    rho = pure_density(gaussian_packet(g, s))
    rho_p = to_momentum(apply_smeared_channel(rho, SmearKernel(g.spacing / 10.0)))
    exact = von_neumann_momentum_kernel(g, s)
    deviation = 0.0
    for k in offsets:
        line = np.diagonal(rho_p.mat, offset=-k)
        reference = np.diagonal(exact.mat, offset=-k)
        deviation = max(deviation, max_relative_deviation(line, reference))
    return CheckResult("sigma_zero_momentum", deviation, 1e-2)


def check_entangling_evolution(seed=0):
    rng = np.random.default_rng(seed)
    c = np.array([0.6, 0.8j])
    readoff = random_unitary(2, rng)
    return CheckResult("entangling_evolution", verify_entangling_evolution(c, readoff), 1e-10)
