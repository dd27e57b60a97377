"""CSV/JSON serialization of scan curves, density matrices and tomography counts."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence, TextIO, Union

import numpy as np

from .experiments import ScanCurve, ScanPoint
from .tomography import BASIS, DensityMatrix

SCHEMA_VERSION = 1
SCAN_COLUMNS = ("position_um", "delay_fs", "probability", "expected_count", "simulated_count")
COUNTS_COLUMNS = ("setting", "count")

PathOrFile = Union[str, Path, TextIO]


def _write_text(target: PathOrFile, text: str) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fh:
            fh.write(text)
    else:
        target.write(text)


def _read_text(source: PathOrFile) -> str:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return fh.read()
    return source.read()


def scan_to_csv(curve: ScanCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    for p in curve.points:
        sim = "" if p.simulated_count is None else str(p.simulated_count)
        writer.writerow([repr(p.position_um), repr(p.delay_fs), repr(p.probability), repr(p.expected_count), sim])
    return buf.getvalue()


def write_scan_csv(curve: ScanCurve, target: PathOrFile) -> None:
    _write_text(target, scan_to_csv(curve))


def read_scan_csv(source: PathOrFile, kind: str = "unknown") -> ScanCurve:
    reader = csv.reader(io.StringIO(_read_text(source)))
    header = tuple(next(reader))
    if header != SCAN_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    points = []
    for row in reader:
        sim = int(row[4]) if row[4] else None
        points.append(ScanPoint(float(row[0]), float(row[1]), float(row[2]), float(row[3]), sim))
    return ScanCurve(kind, tuple(points))


def scan_to_dict(curve: ScanCurve, **metadata) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": curve.kind,
        "columns": list(SCAN_COLUMNS),
        "points": [
            [p.position_um, p.delay_fs, p.probability, p.expected_count, p.simulated_count] for p in curve.points
        ],
        **metadata,
    }


def scan_from_dict(data: dict) -> ScanCurve:
    if data.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {data.get('schema')!r}")
    points = tuple(ScanPoint(float(x), float(d), float(p), float(e), s) for x, d, p, e, s in data["points"])
    return ScanCurve(data["kind"], points)


def density_to_dict(rho: DensityMatrix, **metadata) -> dict:
    entries = np.asarray(rho.entries)
    return {
        "schema": SCHEMA_VERSION,
        "basis": list(BASIS),
        "density_matrix": [[[float(z.real), float(z.imag)] for z in row] for row in entries],
        **metadata,
    }


def density_from_dict(data: dict) -> DensityMatrix:
    if data.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {data.get('schema')!r}")
    if tuple(data["basis"]) != BASIS:
        raise ValueError(f"unsupported basis order {data['basis']}")
    return DensityMatrix([[complex(re, im) for re, im in row] for row in data["density_matrix"]])


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def write_json(data: dict, target: PathOrFile) -> None:
    _write_text(target, dumps(data))


def read_json(source: PathOrFile) -> dict:
    return json.loads(_read_text(source))


def counts_to_csv(labels: Sequence[str], counts: Sequence[int]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COUNTS_COLUMNS)
    for label, n in zip(labels, counts):
        writer.writerow([label, int(n)])
    return buf.getvalue()


def write_counts_csv(labels: Sequence[str], counts: Sequence[int], target: PathOrFile) -> None:
    _write_text(target, counts_to_csv(labels, counts))


def read_counts_csv(source: PathOrFile) -> tuple[tuple[str, ...], list[int]]:
    reader = csv.reader(io.StringIO(_read_text(source)))
    header = tuple(next(reader))
    if header != COUNTS_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = [row for row in reader if row]
    return tuple(r[0] for r in rows), [int(r[1]) for r in rows]
