"""
Subcommand handlers. Each takes the validated RunConfig and the parsed CLI
arguments and returns a process exit code.
"""

import itertools
import math
import os
from multiprocessing.pool import ThreadPool

import numpy as np

from smeared_measurement import hooks
from smeared_measurement.exceptions import CheckFailedError, ConfigError, ValidationError
from smeared_measurement.smeared_measurement.py import output
from smeared_measurement.smeared_measurement.py.classical import (
    CoarseGraining,
    cell_mass,
    coarse_grain_cells,
    dimensionless_bin_consistency,
    gaussian_cell_mass,
    momentum_bin_scale,
    occupied_cells,
    proton_equivalent,
)
from smeared_measurement.smeared_measurement.py.grid import make_grid, recommended_half_width, symmetric_grid
from smeared_measurement.smeared_measurement.py.measure import (
    joint_projective_probabilities,
    povm_from_ancilla,
    povm_probabilities,
    random_finite_state,
    random_unitary,
)
from smeared_measurement.smeared_measurement.py.qstate import (
    entropy,
    four_widths,
    gaussian_packet,
    pure_density,
    purity,
    to_momentum,
    trace,
)
from smeared_measurement.smeared_measurement.py.smear import (
    Convention,
    SectionalWidths,
    SmearKernel,
    analytic_entropy,
    analytic_purity,
    apply_smeared_channel,
    classify_regime,
    sectional_widths,
)
from smeared_measurement.utils import get_attr, log_error, msgprint, throw

POVM_AGREEMENT_TOL = 1e-10


def _configured_grid(config):
    return make_grid(config.grid.x_min, config.grid.x_max, config.grid.n)


def _regime(config, s, sigma, widths):
    return classify_regime(
        s, sigma, ref_x=config.regime.ref_x, ref_p=config.regime.ref_p, factor=config.regime.factor, widths=widths
    )


def _row(s, sigma, tr, pur, ent, widths, regime):
    prod1, prod2 = widths.products if widths is not None else (None, None)
    widths = widths if widths is not None else (None,) * 4
    return {
        "s": s,
        "sigma": sigma,
        "trace": tr,
        "purity": pur,
        "entropy": ent,
        "w_x_diag": widths[0],
        "w_x_anti": widths[1],
        "w_p_diag": widths[2],
        "w_p_anti": widths[3],
        "prod1": prod1,
        "prod2": prod2,
        "regime": regime.row.value if regime is not None else None,
    }


def run_point(config, s, sigma, g):
    """
    Packet -> pure density -> channel -> both bases -> diagnostics.

    Purity, entropy and widths are taken from the trace-preserving state; under
    the paper_prefactor convention only the reported trace differs.
    A cut that vanishes on the grid leaves the width columns empty and the
    regime is classified from the closed-form widths.

    Returns:
        tuple: (row dict in CSV column order, position matrix, momentum matrix or None)
    """
    analysis = config.analysis
    psi = gaussian_packet(g, s, config.wavefunction.x0, config.wavefunction.p0)
    rho_x = apply_smeared_channel(pure_density(psi), SmearKernel(sigma, config.channel.convention))
    tr = trace(rho_x)
    physical = rho_x if Convention(config.channel.convention) is Convention.TRACE_PRESERVING else rho_x.replace(rho_x.mat / tr)

    rho_p = to_momentum(physical, config.channel.transform) if analysis.momentum else None
    widths = None
    if analysis.widths and rho_p is not None:
        try:
            widths = SectionalWidths(*four_widths(physical, rho_p))
        except ValidationError as e:
            # sigma far below the grid spacing empties the anti-diagonal
            msgprint(
                f"s={s:g}, sigma={sigma:g}: {e}; widths left empty, regime from closed forms",
                title="Unresolved Cut",
                indicator="orange",
            )
    regime = _regime(config, s, sigma, widths) if analysis.classify else None
    row = _row(
        s,
        sigma,
        tr,
        purity(physical) if analysis.purity else None,
        entropy(physical) if analysis.entropy else None,
        widths,
        regime,
    )
    return row, rho_x, rho_p


def analytic_point(config, s, sigma):
    """Closed-form row: no grid, so every corner of a sweep is reachable."""
    widths = sectional_widths(s, sigma)
    regime = _regime(config, s, sigma, widths) if config.analysis.classify else None
    return _row(s, sigma, 1.0, analytic_purity(s, sigma), analytic_entropy(s, sigma), widths, regime)


def classical_summary(cg, velocity):
    """Coarse-graining estimates of a packet of width sigma / N, in SI and hbar = 1 units."""
    scale = momentum_bin_scale(cg)
    protons = proton_equivalent(scale, velocity)
    commentary = (
        f"momentum bin {scale:.3g} kg m/s for sigma = {cg.sigma:g} m, N = {cg.N:g}: "
        f"the momentum of {protons:.3g} protons moving at {velocity:g} m/s"
    )
    # ? DIMENSIONLESS PACKET: sigma = 1, s = 1 / N
    s = 1.0 / cg.N
    g = symmetric_grid(recommended_half_width(s, 1.0), 1024)
    psi = gaussian_packet(g, s)
    _, masses = coarse_grain_cells(psi, 1.0, center=0.0)
    return {
        "sigma": cg.sigma,
        "N": cg.N,
        "s": cg.s,
        "momentum_bin_scale": scale,
        "proton_equivalent": protons,
        "velocity": velocity,
        "cell_mass": cell_mass(psi, 0.0, 1.0),
        "cell_mass_exact": gaussian_cell_mass(s, 1.0),
        "occupied_cells": occupied_cells(masses),
        "bin_to_width_ratio": dimensionless_bin_consistency(s, 1.0),
        "commentary": commentary,
    }


def _output_path(config):
    return config.output.path or None


def _output_format(config, command):
    return config.output.format or hooks.default_formats[command]


def _emit(config, command, body, rows=None):
    header = output.build_header(config, command)
    fmt = _output_format(config, command)
    if fmt == "bin":
        raise ConfigError(f"'{command}' writes no matrices, use csv or report", fieldname="output.format")
    if fmt == "csv":
        if rows is None:
            throw(f"'{command}' has no tabular output", exc=ConfigError)
        output.write_text(_output_path(config), output.render_csv(header, rows))
    else:
        output.write_text(_output_path(config), output.render_report(header, body))


def _dump_matrices(config, matrices):
    path = _output_path(config)
    if not path:
        raise ConfigError("required for the bin format", fieldname="output.path")
    root, ext = os.path.splitext(path)
    for tag, rho in matrices.items():
        if rho is not None:
            output.write_matrix_bin(f"{root}_{tag}{ext or '.bin'}", rho)


# * SUBCOMMANDS


def cmd_simulate(config, args=None):
    s, sigma = config.wavefunction.s, config.channel.sigma
    row, rho_x, rho_p = run_point(config, s, sigma, _configured_grid(config))
    if _output_format(config, "simulate") == "bin":
        _dump_matrices(config, {"position": rho_x, "momentum": rho_p})
        return 0

    body = {
        "grid": {"x_min": config.grid.x_min, "x_max": config.grid.x_max, "n": config.grid.n},
        "diagnostics": row,
        "analytic": {
            "purity": analytic_purity(s, sigma),
            "entropy": analytic_entropy(s, sigma),
            "widths": sectional_widths(s, sigma)._asdict(),
        },
    }
    if config.analysis.classical:
        psi = gaussian_packet(rho_x.grid, s, config.wavefunction.x0, config.wavefunction.p0)
        _, masses = coarse_grain_cells(psi, sigma)
        body["classical"] = {
            "occupied_cells": occupied_cells(masses),
            "cell_mass": gaussian_cell_mass(s, sigma),
            "bin_to_width_ratio": dimensionless_bin_consistency(s, sigma),
        }
    _emit(config, "simulate", body, rows=[row])
    return 0


def _sweep_point(config, s, sigma):
    try:
        if config.sweep.mode == "analytic":
            return analytic_point(config, s, sigma)
        if config.sweep.adaptive_grid:
            g = symmetric_grid(config.sweep.box_factor * s, config.grid.n)
        else:
            g = _configured_grid(config)
        return run_point(config, s, sigma, g)[0]
    except ValidationError as e:
        log_error(message=str(e), title="Sweep Point Error")
        raise type(e)(f"sweep point (s={s:g}, sigma={sigma:g}): {e}") from e


def cmd_sweep(config, args=None):
    """One row per (s, sigma), s-major, whatever order the workers finish in."""
    points = list(itertools.product(config.sweep.s_values, config.sweep.sigma_values))
    threads = max(1, config.run.threads)
    if threads == 1:
        rows = [_sweep_point(config, s, sigma) for s, sigma in points]
    else:
        with ThreadPool(processes=threads) as pool:
            rows = pool.starmap(lambda s, sigma: _sweep_point(config, s, sigma), points)
    msgprint(f"{len(rows)} sweep points ({config.sweep.mode})", title="Sweep", indicator="green")
    _emit(config, "sweep", {"rows": rows}, rows=rows)
    return 0


def run_checks():
    results = []
    for name, method in hooks.validation_checks.items():
        result = get_attr(method)()
        if not result.passed:
            msgprint(
                f"deviation {result.deviation:.3e} exceeds {result.threshold:.0e}",
                title=f"Check {name} failed",
                indicator="red",
            )
        results.append(result)
    return results


def cmd_validate(config, args=None):
    results = run_checks()
    failed = [r.name for r in results if not r.passed]
    body = {"checks": [r.as_dict() for r in results], "passed": not failed}
    _emit(config, "validate", body)
    if failed:
        log_error(message=", ".join(failed), title="Validation Failed")
        return CheckFailedError.exit_code
    return 0


def cmd_classify(config, args=None):
    s, sigma = config.wavefunction.s, config.channel.sigma
    report = _regime(config, s, sigma, None)
    body = {
        "s": s,
        "sigma": sigma,
        "ref_x": report.ref_x,
        "ref_p": report.ref_p,
        "factor": report.factor,
        "widths": report.widths._asdict(),
        "pattern": dict(zip(SectionalWidths._fields, (flag.value for flag in report.pattern))),
        "row": report.row.value,
    }
    _emit(config, "classify", body, rows=[analytic_point(config, s, sigma)])
    return 0


def cmd_classical(config, args=None):
    cg = CoarseGraining(config.coarse_graining.sigma_si, config.coarse_graining.N)
    body = classical_summary(cg, config.coarse_graining.velocity)
    msgprint(body["commentary"], title="Classical Estimate", indicator="blue")
    _emit(config, "classical", body)
    return 0


def povm_trial(dim_s, dim_a, rng, unitary="random"):
    """
    Realize a POVM through an ancilla and check it against the joint projective readout.

    Returns:
        dict: effects, projectivity and the probability deviation of one trial
    """
    if unitary == "identity":
        u = np.eye(dim_s * dim_a, dtype=complex)
    else:
        u = random_unitary(dim_s * dim_a, rng)
    alpha = np.eye(dim_a, dtype=complex)[0]
    state = random_finite_state(dim_s, rng)
    povm = povm_from_ancilla(u, alpha)
    deviation = float(
        np.max(np.abs(povm_probabilities(povm, state) - joint_projective_probabilities(u, alpha, state)))
    )
    return {"povm": povm, "projective": povm.is_projective(), "deviation": deviation}


def cmd_povm_demo(config, args=None):
    settings = config.povm
    rng = np.random.default_rng(settings.seed)
    trials = []
    for _ in range(settings.trials):
        try:
            trials.append(povm_trial(settings.dim_s, settings.dim_a, rng, settings.unitary))
        except ValidationError as e:
            log_error(message=str(e), title="POVM Invariant Failure")
            trials.append({"povm": None, "projective": False, "deviation": math.inf})

    valid = sum(t["povm"] is not None and t["deviation"] <= POVM_AGREEMENT_TOL for t in trials)
    last = trials[-1]["povm"]
    body = {
        "dim_s": settings.dim_s,
        "dim_a": settings.dim_a,
        "seed": settings.seed,
        "unitary": settings.unitary,
        "trials": settings.trials,
        "passed": valid,
        "projective": bool(trials[-1]["projective"]),
        "max_deviation": max(t["deviation"] for t in trials),
        "effects": [np.array2string(e, precision=6, suppress_small=True) for e in last.effects] if last else [],
    }
    _emit(config, "povm-demo", body)
    return 0 if valid == settings.trials else CheckFailedError.exit_code
