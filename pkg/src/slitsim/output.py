"""CSV and binary PGM artifact writers.

CSV files carry full double precision (17 significant digits, so values
round-trip bit-exactly).  Heatmaps are 16-bit binary PGM (P5, maxval 65535):
one row per frame with y = v_y * t increasing upward, i.e. the top row is the
latest frame; intensities are mapped linearly from [0, global max].
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .core import ScalarField, ValidationError
from .dynamics import TrajectorySet

PGM_MAXVAL = 65535


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_csv(obj, path) -> Path:
    """Write a ScalarField or TrajectorySet as CSV (UTF-8, LF line endings)."""
    path = Path(path)
    if isinstance(obj, ScalarField):
        lines = ["x,value"]
        lines += [
            f"{_fmt(x)},{_fmt(v)}" for x, v in zip(obj.grid.points, obj.values)
        ]
    elif isinstance(obj, TrajectorySet):
        n = len(obj.seeds)
        lines = ["t,y," + ",".join(f"x_seed_{i}" for i in range(n))]
        y = obj.y
        for k in range(len(obj.times)):
            row = [_fmt(obj.times[k]), _fmt(y[k])]
            row += [_fmt(obj.positions[i, k]) for i in range(n)]
            lines.append(",".join(row))
    else:
        raise ValidationError(f"cannot write {type(obj).__name__} as CSV")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_field_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read back an "x,value" CSV as (x, values)."""
    rows = Path(path).read_text(encoding="utf-8").strip().splitlines()[1:]
    data = np.array([[float(cell) for cell in row.split(",")] for row in rows])
    return data[:, 0], data[:, 1]


def write_columns_csv(path, header: str, columns) -> Path:
    """Write aligned 1-D arrays as CSV columns under the given header."""
    path = Path(path)
    lines = [header]
    for row in zip(*columns):
        lines.append(",".join(_fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def write_extrema_csv(report, path) -> Path:
    """Write a fringe report as rows of kind,x,value."""
    path = Path(path)
    lines = ["kind,x,value"]
    for x, v in zip(report.minima, report.minima_values):
        lines.append(f"min,{_fmt(x)},{_fmt(v)}")
    for x, v in zip(report.maxima, report.maxima_values):
        lines.append(f"max,{_fmt(x)},{_fmt(v)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def _frame_matrix(frames: Sequence[ScalarField]) -> np.ndarray:
    if not frames:
        raise ValidationError("need at least one frame")
    grid = frames[0].grid
    for frame in frames:
        if frame.grid != grid:
            raise ValidationError("all frames must share one grid")
    return np.stack([frame.values for frame in frames])


def _quantize(matrix: np.ndarray) -> np.ndarray:
    top = matrix.max()
    if top <= 0:
        return np.zeros_like(matrix, dtype=np.uint16)
    scaled = np.clip(matrix, 0.0, None) * (PGM_MAXVAL / top)
    return np.rint(scaled).astype(np.uint16)


def _write_pgm(pixels: np.ndarray, path: Path) -> Path:
    # Row 0 of `pixels` is the first frame; PGM rows run top to bottom, so
    # flip to put the latest frame (largest y) on top.
    flipped = np.flipud(pixels)
    header = (
        f"P5\n# rows are time frames, y = v_y*t increases upward\n"
        f"{pixels.shape[1]} {pixels.shape[0]}\n{PGM_MAXVAL}\n"
    )
    with open(path, "wb") as handle:
        handle.write(header.encode("ascii"))
        handle.write(flipped.astype(">u2").tobytes())
    return path


def write_heatmap(
    frames: Sequence[ScalarField],
    path,
    trajectories: TrajectorySet | None = None,
) -> list[Path]:
    """Write the frame stack as PGM; with trajectories, also write a companion.

    The companion (suffix ``_overlay``) equals the base image except that the
    pixel nearest each trajectory sample is set to the maximum value.
    """
    path = Path(path)
    matrix = _frame_matrix(frames)
    pixels = _quantize(matrix)
    written = [_write_pgm(pixels, path)]
    if trajectories is not None:
        if len(trajectories.times) != len(frames):
            raise ValidationError("trajectory times do not match the frames")
        grid = frames[0].grid
        overlay = pixels.copy()
        for k in range(len(frames)):
            cols = np.rint(
                (trajectories.positions[:, k] - grid.x_min) / grid.dx
            ).astype(int)
            cols = cols[(cols >= 0) & (cols < grid.n_points)]
            overlay[k, cols] = PGM_MAXVAL
        overlay_path = path.with_name(path.stem + "_overlay" + path.suffix)
        written.append(_write_pgm(overlay, overlay_path))
    return written


def read_pgm(path) -> np.ndarray:
    """Read a binary 16-bit PGM written by this module (top row first)."""
    blob = Path(path).read_bytes()
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if blob[pos : pos + 1] == b"#":
            while blob[pos : pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        fields.append(blob[start:pos])
    if fields[0] != b"P5":
        raise ValidationError(f"not a binary PGM: magic {fields[0]!r}")
    width, height, maxval = (int(f) for f in fields[1:])
    if maxval != PGM_MAXVAL:
        raise ValidationError(f"unexpected maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    data = np.frombuffer(blob, dtype=">u2", count=width * height, offset=pos)
    return data.reshape(height, width).astype(np.uint16)
