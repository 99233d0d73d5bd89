"""Reading and writing distribution files and output artifacts.

A distribution file has one entry per line, ``re im [mult]``, with ``#``
comments. Files written here start with ``# truncation_radius: R`` (and
``# source: ...`` for generated data) so that the horizon survives a round
trip; coordinates are written with 17 significant digits, which is exact.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .divisor import GeneratorSource, PointDistribution

_HEADER_KEYS = ("truncation_radius", "source")


def _parse_source(text: str) -> GeneratorSource | None:
    from .generators import parse_spec

    try:
        return parse_spec(text)
    except ValueError:
        return None


def parse_distribution(text: str) -> PointDistribution:
    truncation = math.inf
    source = None
    rows: list[tuple[float, float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("#")
        comment = comment.strip()
        if comment and ":" in comment:
            key, value = (s.strip() for s in comment.split(":", 1))
            if key == "truncation_radius":
                truncation = float(value)
            elif key == "source":
                source = _parse_source(value)
        fields = line.split()
        if not fields:
            continue
        if len(fields) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 're im [mult]', got {raw!r}")
        try:
            nums = [float(f) for f in fields]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        rows.append((nums[0], nums[1], nums[2] if len(nums) == 3 else 1.0))
    if not rows:
        return PointDistribution([], truncation_radius=truncation, source=source)
    arr = np.array(rows)
    return PointDistribution(arr[:, 0] + 1j * arr[:, 1], arr[:, 2],
                             truncation_radius=truncation, source=source)


def read_distribution(path: str | os.PathLike) -> PointDistribution:
    return parse_distribution(Path(path).read_text(encoding="utf-8"))


def format_source(source: GeneratorSource) -> str:
    return " ".join([source.kind] + [f"{k}={v!r}" for k, v in source.params])


def format_distribution(Z: PointDistribution) -> str:
    buf = io.StringIO()
    buf.write(f"# truncation_radius: {Z.truncation_radius!r}\n")
    if Z.source is not None:
        buf.write(f"# source: {format_source(Z.source)}\n")
    buf.write("# re im mult\n")
    if len(Z):
        data = np.column_stack([Z.points.real, Z.points.imag, Z.multiplicities])
        np.savetxt(buf, data, fmt=("%.17g", "%.17g", "%d"))
    return buf.getvalue()


def atomic_write(path: str | os.PathLike, data: str | bytes) -> None:
    """Write via a temporary file in the target directory, then rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_distribution(path: str | os.PathLike, Z: PointDistribution) -> None:
    atomic_write(path, format_distribution(Z))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()
