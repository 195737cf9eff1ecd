"""Config grammar and CSV schemas shared by the command-line pipelines.

Count files carry rates in Hz with the exact header ``power_mw,s1_hz,s2_hz,c_hz``;
compensated files append ``s1_ph_hz,s2_ph_hz,c_ph_hz``. Numeric fields are
written with 12 significant digits so outputs diff reproducibly and round-trip
through the readers at that precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .click_model import DetectionSetup
from .dark_counts import PhotonRates, RawRates
from .errors import DataError, ParameterError
from .estimation import CountRecord
from .validation import check_positive, check_unit_interval

COUNTS_HEADER = "power_mw,s1_hz,s2_hz,c_hz"
CORRECTED_HEADER = COUNTS_HEADER + ",s1_ph_hz,s2_ph_hz,c_ph_hz"

CONFIG_DEFAULTS = {
    "gate_rate_hz": 316000.0,
    "rep_rate_hz": 8.0e7,
    "wavelength_nm": 1550.0,
    "transmittivity": 1.0,
    "eta1": 1.0,
    "eta2": 1.0,
    "dark1_hz": 0.0,
    "dark2_hz": 0.0,
}


@dataclass(frozen=True)
class Config:
    """Run configuration; defaults describe an ideal, dark-free setup."""

    gate_rate_hz: float = CONFIG_DEFAULTS["gate_rate_hz"]
    rep_rate_hz: float = CONFIG_DEFAULTS["rep_rate_hz"]
    wavelength_nm: float = CONFIG_DEFAULTS["wavelength_nm"]
    transmittivity: float = CONFIG_DEFAULTS["transmittivity"]
    eta1: float = CONFIG_DEFAULTS["eta1"]
    eta2: float = CONFIG_DEFAULTS["eta2"]
    dark1_hz: float = CONFIG_DEFAULTS["dark1_hz"]
    dark2_hz: float = CONFIG_DEFAULTS["dark2_hz"]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gate_rate_hz", check_positive("gate_rate_hz", self.gate_rate_hz))
        object.__setattr__(self, "rep_rate_hz", check_positive("rep_rate_hz", self.rep_rate_hz))
        object.__setattr__(self, "wavelength_nm", check_positive("wavelength_nm", self.wavelength_nm))
        object.__setattr__(self, "transmittivity", check_unit_interval("transmittivity", self.transmittivity))
        object.__setattr__(self, "eta1", check_unit_interval("eta1", self.eta1))
        object.__setattr__(self, "eta2", check_unit_interval("eta2", self.eta2))
        for name in ("dark1_hz", "dark2_hz"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0.0 or value >= self.gate_rate_hz:
                raise ParameterError(f"{name} must lie in [0, gate_rate_hz), got {value}")
            object.__setattr__(self, name, value)

    def to_setup(self) -> DetectionSetup:
        return DetectionSetup(
            gate_rate_hz=self.gate_rate_hz,
            transmittivity=self.transmittivity,
            eta1=self.eta1,
            eta2=self.eta2,
            dark1_hz=self.dark1_hz,
            dark2_hz=self.dark2_hz,
        )


def parse_config(path) -> Config:
    """Parse a ``key = value`` config file; ``#`` starts a comment, unknown keys fail."""
    path = Path(path)
    values: dict[str, float] = {}
    for lineno, raw_line in enumerate(path.read_text().splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected 'key = value', got {raw_line.strip()!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in CONFIG_DEFAULTS:
            known = ", ".join(sorted(CONFIG_DEFAULTS))
            raise DataError(f"{path}:{lineno}: unknown key {key!r} (known keys: {known})")
        if key in values:
            raise DataError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(value_text)
        except ValueError:
            raise DataError(
                f"{path}:{lineno}: value for {key!r} is not a number: {value_text!r}"
            ) from None
    return Config(**values)


@dataclass(frozen=True)
class Dataset:
    """Ordered sweep records parsed from a counts file."""

    records: tuple[CountRecord, ...]

    def __post_init__(self) -> None:
        powers = [record.power_mw for record in self.records]
        for left, right in zip(powers, powers[1:]):
            if right <= left:
                raise DataError(
                    f"power values must be strictly increasing, got {left} then {right}"
                )

    @property
    def powers_mw(self) -> np.ndarray:
        return np.array([record.power_mw for record in self.records])

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def _parse_fields(path: Path, row: int, parts: list[str], names: tuple[str, ...]) -> list[float]:
    values = []
    for name, text in zip(names, parts):
        try:
            value = float(text)
        except ValueError:
            raise DataError(f"{path}: row {row}: field {name!r} is not a number: {text!r}") from None
        if math.isnan(value):
            raise DataError(f"{path}: row {row}: field {name!r} is NaN")
        values.append(value)
    return values


def _read_rows(path, header: str):
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != header:
        found = lines[0].strip() if lines else "<empty file>"
        raise DataError(f"{path}: expected header {header!r}, found {found!r}")
    names = tuple(header.split(","))
    for row, line in enumerate(lines[1:], start=1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(names):
            raise DataError(f"{path}: row {row}: expected {len(names)} fields, got {len(parts)}")
        yield path, row, _parse_fields(path, row, parts, names)


def read_counts_csv(path) -> Dataset:
    """Read a raw counts file (``power_mw,s1_hz,s2_hz,c_hz``)."""
    records = []
    for path_, row, values in _read_rows(path, COUNTS_HEADER):
        power, s1, s2, c = values
        if min(values) < 0.0:
            raise DataError(f"{path_}: row {row}: negative values are not allowed")
        try:
            records.append(CountRecord(power, RawRates(s1, s2, c)))
        except ParameterError as exc:
            raise DataError(f"{path_}: row {row}: {exc}") from None
    return Dataset(tuple(records))


def read_corrected_csv(path) -> Dataset:
    """Read a compensated counts file; the appended photon columns may be negative."""
    records = []
    for path_, row, values in _read_rows(path, CORRECTED_HEADER):
        power, s1, s2, c, s1_ph, s2_ph, c_ph = values
        if min(power, s1, s2, c) < 0.0:
            raise DataError(f"{path_}: row {row}: negative raw values are not allowed")
        try:
            records.append(
                CountRecord(power, RawRates(s1, s2, c), PhotonRates(s1_ph, s2_ph, c_ph))
            )
        except ParameterError as exc:
            raise DataError(f"{path_}: row {row}: {exc}") from None
    return Dataset(tuple(records))


def read_dataset(path) -> Dataset:
    """Read either counts schema, selected by the header line."""
    path = Path(path)
    lines = path.read_text().splitlines()
    header = lines[0].strip() if lines else ""
    if header == CORRECTED_HEADER:
        return read_corrected_csv(path)
    return read_counts_csv(path)


def format_number(value: float) -> str:
    """Canonical 12-significant-digit rendering used in every emitted CSV."""
    return f"{value:.12g}"


def write_counts_csv(path, rows) -> None:
    """Write (power_mw, RawRates) pairs in the raw counts schema."""
    lines = [COUNTS_HEADER]
    for power, raw in rows:
        lines.append(
            ",".join(
                format_number(v)
                for v in (power, raw.s1_raw_hz, raw.s2_raw_hz, raw.c_raw_hz)
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_corrected_csv(path, records) -> None:
    """Write CountRecords (with compensated rates) in the extended schema."""
    lines = [CORRECTED_HEADER]
    for record in records:
        if record.corrected is None:
            raise ParameterError("every record must carry compensated rates")
        raw, ph = record.raw, record.corrected
        lines.append(
            ",".join(
                format_number(v)
                for v in (
                    record.power_mw,
                    raw.s1_raw_hz,
                    raw.s2_raw_hz,
                    raw.c_raw_hz,
                    ph.s1_ph_hz,
                    ph.s2_ph_hz,
                    ph.c_ph_hz,
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")
