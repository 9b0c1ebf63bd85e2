"""
Unit-suffix parsing. Interchange files and CLI arguments always carry explicit
units ("2.4GHz", "48 mT", column "field_mT"); internal computation is SI.
Unit-less numerics are rejected as ambiguous.
"""
import math
import re

from ervo.core.errors import UnitError

UNITS: dict[str, dict[str, float]] = {
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12},
    "field": {"T": 1.0, "mT": 1e-3, "uT": 1e-6, "G": 1e-4},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "temperature": {"K": 1.0, "mK": 1e-3},
    # integrated absorption, stored internally in Hz*cm^-1
    "alpha": {"Hz_per_cm": 1.0, "MHz_per_cm": 1e6, "GHz_per_cm": 1e9},
    "dipole": {"Cm": 1.0},
    "density": {"per_m3": 1.0, "per_cm3": 1e6},
    "dimensionless": {"": 1.0, "1": 1.0},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z_]*)\s*$")


def unit_factor(unit: str, kind: str) -> float:
    """SI factor of `unit` for quantity `kind`."""
    try:
        table = UNITS[kind]
    except KeyError:
        raise UnitError(f"unknown quantity kind {kind!r}") from None
    if unit not in table:
        raise UnitError(f"unit {unit!r} is not a {kind} unit (expected one of {sorted(table)})")
    return table[unit]


def parse_quantity(value: str | float | int, kind: str) -> float:
    """Parse "2.4GHz" into 2.4e9. Bare numbers are ambiguous unless `kind` is dimensionless or the value is zero."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if kind == "dimensionless" or value == 0:
            return float(value)
        raise UnitError(f"ambiguous unit-less {kind} value {value!r}; add a unit suffix")
    match = _QUANTITY.match(str(value))
    if match is None:
        raise UnitError(f"cannot parse {kind} quantity {value!r}")
    number, unit = match.groups()
    if not unit and kind != "dimensionless" and float(number) != 0.0:
        raise UnitError(f"ambiguous unit-less {kind} value {value!r}; add a unit suffix")
    if not unit:
        return float(number)
    return float(number) * unit_factor(unit, kind)


def split_suffixed(name: str, kind: str) -> tuple[str, float]:
    """Split a header like "field_mT" into ("field", 1e-3)."""
    for unit in sorted(UNITS[kind], key=len, reverse=True):
        if unit and name.endswith("_" + unit):
            return name[: -len(unit) - 1], UNITS[kind][unit]
    raise UnitError(f"column/key {name!r} carries no {kind} unit suffix")


def find_suffixed(mapping: dict, stem: str, kind: str) -> tuple[object, float] | None:
    """Locate `stem_<unit>` in a JSON object; returns (raw value, SI factor) or None."""
    for key, raw in mapping.items():
        if key == stem:
            raise UnitError(f"key {key!r} has no unit suffix; write e.g. {stem}_<unit>")
        if key.startswith(stem + "_"):
            unit = key[len(stem) + 1:]
            if unit in UNITS[kind]:
                return raw, UNITS[kind][unit]
    return None


def read_suffixed(mapping: dict, stem: str, kind: str, default: float | None = None) -> float | None:
    """Value of `stem_<unit>` in SI units, or default when the key is absent."""
    found = find_suffixed(mapping, stem, kind)
    if found is None:
        return default
    raw, factor = found
    return None if raw is None else float(raw) * factor
