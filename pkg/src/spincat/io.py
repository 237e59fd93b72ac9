"""Flat-file serialization: CSV for states and wavefunctions, JSON for
summaries and reports.  All writes are atomic (temp file then rename) and
numeric fields carry 17 significant digits, enough to round-trip doubles.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .state import NumberState, QuadratureWavefunction


def fmt(x: float) -> str:
    return f"{x:.17g}"


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_number_state_csv(state: NumberState, path: str) -> None:
    lines = ["n,re,im"]
    for n, amp in enumerate(state.amplitudes):
        lines.append(f"{n},{fmt(amp.real)},{fmt(amp.imag)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_number_state_csv(path: str) -> NumberState:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return NumberState(data[:, 1] + 1j * data[:, 2])


def write_wavefunction_csv(wf: QuadratureWavefunction, path: str) -> None:
    lines = ["coord,re,im,abs2"]
    for coord, val in zip(wf.grid.points(), wf.values):
        lines.append(
            f"{fmt(coord)},{fmt(val.real)},{fmt(val.imag)},{fmt(abs(val) ** 2)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_wavefunction_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """(coords, complex values); grid and basis metadata are not stored."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def write_json(obj, path: str) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_json_lines(records, path: str) -> None:
    text = "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in records)
    atomic_write_text(path, text)


def write_histogram_csv(edges: np.ndarray, counts: np.ndarray, path: str) -> None:
    lines = ["bin_left,bin_right,count"]
    for left, right, count in zip(edges[:-1], edges[1:], counts):
        lines.append(f"{fmt(left)},{fmt(right)},{int(count)}")
    atomic_write_text(path, "\n".join(lines) + "\n")
