"""CSV formats for point patterns, Fry points and curves.

A pattern file looks like::

    # window 0 1.6012085 0 1
    x,y,mark
    0.0207,0.0338,on
    ...

The window comment may be omitted if the window is passed explicitly.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import DataError
from .geometry import Window
from .models import PointPattern


def _fmt(v: float) -> str:
    return repr(float(v))


def write_pattern(pattern: PointPattern, path) -> None:
    w = pattern.window
    with open(path, "w", newline="") as fh:
        fh.write("# window " + " ".join(_fmt(v) for v in w.as_tuple()) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        if pattern.marks is None:
            writer.writerow(["x", "y"])
            writer.writerows([_fmt(x), _fmt(y)] for x, y in pattern.points)
        else:
            writer.writerow(["x", "y", "mark"])
            writer.writerows([_fmt(x), _fmt(y), str(m)]
                             for (x, y), m in zip(pattern.points, pattern.marks))


def read_pattern(path, window: Window | None = None) -> PointPattern:
    """Read a pattern CSV. An explicit ``window`` overrides the file's."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    lines = path.read_text().splitlines()
    file_window = None
    header = None
    rows = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            parts = text[1:].split()
            if parts and parts[0] == "window":
                try:
                    file_window = Window(*map(float, parts[1:5]))
                    if len(parts) != 5:
                        raise ValueError
                except (ValueError, TypeError) as exc:
                    raise DataError(f"{path}:{lineno}: malformed window comment") from exc
            continue
        fields = [f.strip() for f in next(csv.reader([text]))]
        if header is None:
            header = [f.lower() for f in fields]
            if header[:2] != ["x", "y"] or len(header) > 3 or (len(header) == 3 and header[2] != "mark"):
                raise DataError(f"{path}:{lineno}: expected header 'x,y[,mark]', got {text!r}")
            continue
        if len(fields) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(fields)}")
        try:
            x, y = float(fields[0]), float(fields[1])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric coordinate in {text!r}") from exc
        if not (np.isfinite(x) and np.isfinite(y)):
            raise DataError(f"{path}:{lineno}: non-finite coordinate")
        rows.append((lineno, x, y, fields[2] if len(header) == 3 else None))
    if header is None:
        raise DataError(f"{path}: empty pattern file")
    window = window or file_window
    if window is None:
        raise DataError(f"{path}: no window given (add '# window x_min x_max y_min y_max')")
    pts = np.array([(x, y) for _, x, y, _ in rows], dtype=float).reshape(-1, 2)
    outside = ~window.contains(pts)
    if outside.any():
        bad = [rows[i][0] for i in np.flatnonzero(outside)]
        raise DataError(f"{path}: {len(bad)} points outside the window (lines {bad[:20]})")
    marks = np.array([m for *_, m in rows], dtype=object) if len(header) == 3 else None
    return PointPattern(pts, window, marks)


def write_fry(fry, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dx", "dy", "group"])
        writer.writerows([_fmt(dx), _fmt(dy), int(g)]
                         for (dx, dy), g in zip(fry.vectors, fry.group_of))
