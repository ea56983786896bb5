"""Loading and describing measured I-V datasets."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .model import OperatingCondition


class DatasetError(ValueError):
    """Malformed I-V data file."""


@dataclass(frozen=True)
class IVDataset:
    """Ordered (voltage, current) measurements at one operating condition.

    Voltages are in volts and currents in amperes. Negative values are legal
    and mean the reverse direction.
    """

    name: str
    voltage: np.ndarray
    current: np.ndarray
    condition: OperatingCondition

    def __post_init__(self):
        v = np.array(self.voltage, dtype=float)
        i = np.array(self.current, dtype=float)
        if v.ndim != 1 or v.shape != i.shape:
            raise DatasetError("voltage and current must be 1-D arrays of equal length")
        if v.size == 0:
            raise DatasetError(f"dataset {self.name!r} has no points")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(i))):
            raise DatasetError(f"dataset {self.name!r} contains non-finite values")
        v.flags.writeable = False
        i.flags.writeable = False
        object.__setattr__(self, "voltage", v)
        object.__setattr__(self, "current", i)

    def __len__(self) -> int:
        return self.voltage.size

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.voltage.tolist(), self.current.tolist()))

    @property
    def temperature(self) -> float:
        return self.condition.temperature


@dataclass(frozen=True)
class DatasetSummary:
    count: int
    v_min: float
    v_max: float
    i_min: float
    i_max: float
    temperature: float


def _parse_float(text: str) -> float:
    return float(text.strip())


def _is_header(row: list[str]) -> bool:
    for cell in row:
        try:
            _parse_float(cell)
        except ValueError:
            continue
        return False
    return True


def load_csv(path, temperature_celsius: float, name: str | None = None,
             ns: int = 1, np_: int = 1) -> IVDataset:
    """Read a two-column ``voltage,current`` CSV file.

    A first row in which no cell is numeric is taken as a header and skipped.
    Errors name the 1-based line number of the offending row.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    DatasetError
        On empty files, wrong column counts, or non-numeric / non-finite cells.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with path.open(newline="") as fh:
        rows = [(n, row) for n, row in enumerate(csv.reader(fh), start=1) if row and any(c.strip() for c in row)]
    if rows and _is_header(rows[0][1]):
        rows = rows[1:]
    if not rows:
        raise DatasetError(f"{path}: no data rows")

    volts, amps = [], []
    for lineno, row in rows:
        if len(row) != 2:
            raise DatasetError(f"{path}: row {lineno}: expected 2 columns, got {len(row)}")
        try:
            v, i = (_parse_float(c) for c in row)
        except ValueError:
            raise DatasetError(f"{path}: row {lineno}: non-numeric value in {row!r}") from None
        if not (math.isfinite(v) and math.isfinite(i)):
            raise DatasetError(f"{path}: row {lineno}: non-finite value in {row!r}")
        volts.append(v)
        amps.append(i)

    cond = OperatingCondition.from_celsius(temperature_celsius, ns, np_)
    return IVDataset(name or path.stem, np.array(volts), np.array(amps), cond)


def write_csv(dataset: IVDataset, path, header: bool = True) -> Path:
    """Write ``dataset`` as CSV. Values use the shortest round-trip repr."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["V", "I"])
        for v, i in dataset.points:
            w.writerow([repr(v), repr(i)])
    return path


def dataset_summary(d: IVDataset) -> DatasetSummary:
    return DatasetSummary(
        count=len(d),
        v_min=float(d.voltage.min()),
        v_max=float(d.voltage.max()),
        i_min=float(d.current.min()),
        i_max=float(d.current.max()),
        temperature=d.temperature,
    )


# name -> (file, temperature in Celsius)
BENCHMARKS = {
    "rtc_france": ("rtc_france.csv", 33.0),
    "photowatt_pwp201": ("photowatt_pwp201.csv", 45.0),
}


def benchmark_path(name: str) -> Path:
    if name not in BENCHMARKS:
        raise KeyError(f"unknown benchmark dataset {name!r}; choose from {sorted(BENCHMARKS)}")
    return Path(str(resources.files("pvextract") / "data" / BENCHMARKS[name][0]))


def load_benchmark(name: str) -> IVDataset:
    """Load one of the bundled benchmark datasets.

    ``rtc_france``: RTC France 57 mm cell, 26 points at 33 degC.
    ``photowatt_pwp201``: Photowatt-PWP201 module (36 cells in series), 25
    points at 45 degC; the first point of the original 26 is excluded, as is
    customary. Both are fitted as single lumped cells (ns = np = 1).
    """
    path = benchmark_path(name)
    return load_csv(path, BENCHMARKS[name][1], name=name)
