"""Report, CSV and flat-binary writers. Every output starts with a header block."""

import csv
import io
import json

import numpy as np
import yaml

from smeared_measurement import __version__, hooks
from smeared_measurement.smeared_measurement.py.qstate import Basis

CSV_COLUMNS = (
    "s",
    "sigma",
    "trace",
    "purity",
    "entropy",
    "w_x_diag",
    "w_x_anti",
    "w_p_diag",
    "w_p_anti",
    "prod1",
    "prod2",
    "regime",
)

MATRIX_MAGIC = b"SMRDMAT\x00"
BASIS_TAGS = {Basis.POSITION: 0, Basis.MOMENTUM: 1, Basis.FINITE: 2}
MATRIX_HEADER = np.dtype([("magic", "S8"), ("n", "<u8"), ("basis", "<u4"), ("reserved", "V12")])


def _header_config(config):
    """The run config without output.path: a run's bytes do not depend on where they are written."""
    data = config.to_dict()
    data["output"] = {k: v for k, v in data["output"].items() if k != "path"}
    return data


def build_header(config, command):
    """Self-describing header: program, version, command, conventions and the full config."""
    return {
        "program": hooks.app_name,
        "version": __version__,
        "command": command,
        "units": "hbar = 1 (SI only in coarse-graining estimates)",
        "fourier": "<p|x> ~ exp(-i p x); rho(p,pbar) = (1/2pi) int exp(-i p x + i pbar xbar) rho(x,xbar)",
        "convention": config.channel.convention,
        "config": _header_config(config),
    }


def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def render_csv(header, rows):
    """CSV table with ``# `` header lines, then the fixed column order."""
    buffer = io.StringIO()
    for key, value in header.items():
        if isinstance(value, dict):
            value = json.dumps(value, sort_keys=True)
        buffer.write(f"# {key}: {value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_format_value(row[column]) for column in CSV_COLUMNS])
    return buffer.getvalue()


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def render_report(header, body):
    """Structured-text (YAML) report: a header mapping followed by the result body."""
    return yaml.safe_dump({"header": _plain(header), "result": _plain(body)}, sort_keys=False, default_flow_style=False)


def write_text(path, text):
    if path:
        with open(path, "w", newline="") as f:
            f.write(text)
    else:
        print(text, end="")


def write_matrix_bin(path, rho):
    """
    Dump rho.mat as a 32-byte header then little-endian complex128, row-major.

    Header: 8-byte magic, uint64 n, uint32 basis tag, 12 reserved bytes.
    """
    header = np.zeros(1, dtype=MATRIX_HEADER)
    header["magic"] = MATRIX_MAGIC
    header["n"] = rho.n
    header["basis"] = BASIS_TAGS[rho.basis]
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(rho.mat, dtype="<c16").tobytes())


def read_matrix_bin(path):
    """Inverse of write_matrix_bin: returns (basis tag, matrix)."""
    with open(path, "rb") as f:
        raw = f.read(MATRIX_HEADER.itemsize)
        # S8 fields drop trailing NULs on read
        if raw[: len(MATRIX_MAGIC)] != MATRIX_MAGIC:
            raise ValueError(f"{path} is not a matrix dump")
        header = np.frombuffer(raw, dtype=MATRIX_HEADER)[0]
        n = int(header["n"])
        mat = np.frombuffer(f.read(16 * n * n), dtype="<c16").reshape(n, n)
    return int(header["basis"]), mat
