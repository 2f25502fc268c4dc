"""Snapshot and CSV writers with stable, documented text formats.

Snapshot files carry one header line

    M=<int> components=<1|2> time=<float>

followed by the row-major grid values of each component in turn, one grid
row per line, space separated, printed with 17 significant digits so a
read-back is bit exact.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .spectral import PhysicalField, PhysicalGrid
from .stepping import DiagnosticsRecord

_FMT = "%.17g"


def write_snapshot(path: str | Path, field: PhysicalField, time: float) -> None:
    path = Path(path)
    comps = field.values if field.num_components == 2 else field.values[np.newaxis]
    with path.open("w", encoding="ascii") as handle:
        handle.write(
            f"M={field.grid.points_per_axis} components={field.num_components} time={_FMT % time}\n"
        )
        for comp in comps:
            for row in comp:
                handle.write(" ".join(_FMT % v for v in row))
                handle.write("\n")


def read_snapshot(path: str | Path) -> tuple[PhysicalField, float]:
    path = Path(path)
    with path.open("r", encoding="ascii") as handle:
        header = handle.readline().strip()
        fields = dict(item.split("=", 1) for item in header.split())
        try:
            m = int(fields["M"])
            components = int(fields["components"])
            time = float(fields["time"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed snapshot header {header!r}") from exc
        if components not in (1, 2):
            raise ValueError(f"snapshot must carry 1 or 2 components, header says {components}")
        data = np.loadtxt(handle, dtype=np.float64)
    expected_rows = components * m
    if data.shape != (expected_rows, m):
        raise ValueError(f"snapshot body has shape {data.shape}, expected ({expected_rows}, {m})")
    grid = PhysicalGrid(m)
    values = data if components == 1 else data.reshape(2, m, m)
    return PhysicalField(grid, values), time


def _config_comment(config: Mapping[str, object]) -> str:
    return "# " + " ".join(f"{key}={value}" for key, value in config.items())


def _hs_label(s: float) -> str:
    return f"norm_H{s:g}"


def write_diagnostics_csv(
    path: str | Path,
    records: Sequence[DiagnosticsRecord],
    config: Mapping[str, object],
) -> None:
    """One row per recorded step, preceded by a comment echoing the run config."""
    path = Path(path)
    hs_keys = sorted({s for record in records for s in record.hs_norms})
    header = (
        ["step", "time", "energy_L2", "norm_H1"]
        + [_hs_label(s) for s in hs_keys]
        + ["picard_iterations", "final_residual"]
    )
    with path.open("w", newline="", encoding="ascii") as handle:
        handle.write(_config_comment(config) + "\n")
        writer = csv.writer(handle)
        writer.writerow(header)
        for record in records:
            row = [record.step, _FMT % record.time, _FMT % record.l2_energy, _FMT % record.h1_norm]
            row += [_FMT % record.hs_norms[s] for s in hs_keys]
            row += [record.picard_iterations, _FMT % record.final_residual]
            writer.writerow(row)


def write_sweep_csv(path: str | Path, result, config: Mapping[str, object]) -> None:
    """Swept value, one error column per norm, then observed-order columns.

    The order entry on a row compares that row's error with the previous
    row's; the first row leaves it blank.
    """
    path = Path(path)
    spec = result.spec
    header = [spec.vary] + list(spec.norms) + [f"order_{n}" for n in spec.norms]
    with path.open("w", newline="", encoding="ascii") as handle:
        handle.write(_config_comment(config) + "\n")
        writer = csv.writer(handle)
        writer.writerow(header)
        for index, (value, errors) in enumerate(result.rows):
            row = [_FMT % value] + [_FMT % errors[n] for n in spec.norms]
            if index == 0:
                row += ["" for _ in spec.norms]
            else:
                row += [_FMT % result.orders[n][index - 1] for n in spec.norms]
            writer.writerow(row)
        if result.failure is not None:
            handle.write(f"# PARTIAL: sweep aborted at {result.failure}\n")


def format_sweep_table(result) -> str:
    spec = result.spec
    norms = spec.norms
    lines = []
    head = f"{spec.vary:>12} " + " ".join(f"{n:>12}" for n in norms) + " " + " ".join(
        f"{'ord_' + n:>8}" for n in norms
    )
    lines.append(head)
    for index, (value, errors) in enumerate(result.rows):
        cells = f"{value:>12.6g} " + " ".join(f"{errors[n]:>12.6g}" for n in norms)
        if index == 0:
            cells += " " + " ".join(f"{'':>8}" for _ in norms)
        else:
            cells += " " + " ".join(f"{result.orders[n][index - 1]:>8.3f}" for n in norms)
        lines.append(cells)
    if result.failure is not None:
        lines.append(f"PARTIAL RESULTS: sweep aborted at {result.failure}")
    return "\n".join(lines)


def write_manifest(path: str | Path, config: Mapping[str, object]) -> None:
    path = Path(path)
    with path.open("w", encoding="ascii") as handle:
        for key, value in config.items():
            handle.write(f"{key}={value}\n")
