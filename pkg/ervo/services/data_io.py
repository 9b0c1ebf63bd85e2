"""
File ingestion and emission: the material profile, unit-suffixed CSV tables,
transmission spectra and run manifests. Files carry explicit units; everything
returned from here is SI (optical integrated absorption stays in Hz*cm^-1).
"""
import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError

from ervo.core.errors import (
    ConfigurationError,
    DataFormatError,
    EmptyInputError,
    UnitError,
)
from ervo.core.log import get_logger
from ervo.core.units import find_suffixed, read_suffixed, split_suffixed
from ervo.schemas.cavity import CavityParams, FMParams, SweepTrace
from ervo.schemas.fit import Observation
from ervo.schemas.optical import OpticalLevel, SelectionRuleTable, Spectrum
from ervo.schemas.photo import HostOptics
from ervo.schemas.profile import HyperfineParams, MaterialProfile, RunManifest
from ervo.schemas.spin import GTensor

logger = get_logger(__name__)

# Y2 - Y1 measured offsets vs the quoted excited-state gap
GAP_TOLERANCE_HZ = 1e9
FLOAT_FORMAT = "%.17g"


class Column(BaseModel):
    """One CSV column: header stem, quantity kind ("text" for strings) and role."""
    model_config = ConfigDict(frozen=True)

    name: str
    kind: str
    required: bool = True
    role: str | None = None


class CsvSchema(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    columns: tuple[Column, ...]


RAMP = CsvSchema(name="ramp", columns=(
    Column(name="field", kind="field", role="x"),
    Column(name="frequency", kind="frequency", role="y"),
    Column(name="sigma", kind="frequency", required=False, role="sigma"),
    Column(name="branch", kind="text", required=False, role="branch"),
))
ROTATION = CsvSchema(name="rotation", columns=(
    Column(name="angle", kind="angle", role="x"),
    Column(name="frequency", kind="frequency", role="y"),
    Column(name="sigma", kind="frequency", required=False, role="sigma"),
    Column(name="branch", kind="text", required=False, role="branch"),
))
DECAY = CsvSchema(name="decay", columns=(
    Column(name="time", kind="time", role="x"),
    Column(name="counts", kind="dimensionless", role="y"),
    Column(name="sigma", kind="dimensionless", required=False, role="sigma"),
))
EPR_SHIFT = CsvSchema(name="epr_shift", columns=(
    Column(name="field", kind="field", role="x"),
    Column(name="shift", kind="frequency", role="y"),
))
EPR_QUADRATURE = CsvSchema(name="epr_quadrature", columns=(
    Column(name="field", kind="field", role="x"),
    Column(name="signal", kind="dimensionless", role="y"),
))
SPECTRUM = CsvSchema(name="spectrum", columns=(
    Column(name="frequency", kind="frequency"),
    Column(name="transmission", kind="dimensionless"),
))
ALPHAS = CsvSchema(name="alphas", columns=(
    Column(name="transition", kind="text"),
    Column(name="wavelength", kind="length"),
    Column(name="polarization", kind="text"),
    Column(name="dipole_type", kind="text"),
    Column(name="integrated_alpha", kind="alpha"),
))

SCHEMAS = {s.name: s for s in (RAMP, ROTATION, DECAY, EPR_SHIFT, EPR_QUADRATURE, SPECTRUM, ALPHAS)}


# ---------------------------------------------------------------- profile

def _require(mapping: dict, key: str, where: str):
    try:
        return mapping[key]
    except KeyError:
        raise ConfigurationError(f"profile {where} is missing {key!r}") from None


def _required_quantity(mapping: dict, stem: str, kind: str, where: str) -> float:
    value = read_suffixed(mapping, stem, kind)
    if value is None:
        raise ConfigurationError(f"profile {where} is missing {stem}_<unit>")
    return value


def _parse_level(raw: dict) -> OpticalLevel:
    label = _require(raw, "label", "level")
    return OpticalLevel(
        label=label,
        zero_field_frequency=_required_quantity(raw, "zero_field_frequency", "frequency", label),
        g=GTensor(g_par=_require(raw, "g_par", label), g_perp=_require(raw, "g_perp", label)),
        crystal_quantum_number=_require(raw, "crystal_quantum_number", label),
        wavelength=read_suffixed(raw, "wavelength", "length"),
        optical_inhomogeneity=read_suffixed(raw, "optical_inhomogeneity", "frequency"),
    )


def _parse_hyperfine(raw: dict | None) -> HyperfineParams | None:
    if raw is None:
        return None
    return HyperfineParams(
        isotope=_require(raw, "isotope", "hyperfine"),
        nuclear_spin=_require(raw, "nuclear_spin", "hyperfine"),
        A_par=read_suffixed(raw, "A_par", "frequency"),
        A_perp=read_suffixed(raw, "A_perp", "frequency"),
        quadrupole_P=read_suffixed(raw, "quadrupole_P", "frequency", 0.0),
    )


def _check_references(profile: MaterialProfile) -> None:
    if "Z1" not in profile.levels:
        raise ConfigurationError("profile has no Z1 ground level")
    for label in profile.fluorescence_lifetimes:
        if label not in profile.levels:
            raise ConfigurationError(f"fluorescence lifetime given for unknown level {label!r}")
    ground = profile.ground
    for level in profile.levels.values():
        if level.label == "Z1":
            continue
        for pol in ("sigma", "pi"):
            for gb in "+-":
                for eb in "+-":
                    if profile.selection_rules.allowed(ground.mu(gb), level.mu(eb), pol) is None:
                        raise ConfigurationError(
                            f"selection table has no entry for ({ground.mu(gb)}, {level.mu(eb)}, {pol})"
                        )
    if "Y1" in profile.levels and "Y2" in profile.levels:
        gap = profile.levels["Y2"].zero_field_frequency - profile.levels["Y1"].zero_field_frequency
        if abs(gap - profile.excited_gap) > GAP_TOLERANCE_HZ:
            raise ConfigurationError(
                f"Y2 - Y1 offset {gap:.6g} Hz disagrees with excited_gap {profile.excited_gap:.6g} Hz"
            )


def profile_from_dict(data: dict) -> MaterialProfile:
    """Build a MaterialProfile from the parsed unit-suffixed JSON document."""
    levels = {}
    for raw in _require(data, "levels", "document"):
        level = _parse_level(raw)
        if level.label in levels:
            raise ConfigurationError(f"level {level.label!r} defined twice")
        levels[level.label] = level

    host_raw = _require(data, "host", "document")
    density = _required_quantity(host_raw, "number_density", "density", "host")
    lifetimes = find_suffixed(data, "fluorescence_lifetimes", "time")
    lifetime_values: dict[str, float] = {}
    if lifetimes is not None:
        raw, factor = lifetimes
        lifetime_values = {label: float(v) * factor for label, v in raw.items()}

    resonator = _require(data, "resonator", "document")
    fm = data.get("fm", {})
    try:
        profile = MaterialProfile(
            name=_require(data, "name", "document"),
            temperature=_required_quantity(data, "temperature", "temperature", "document"),
            levels=levels,
            host=HostOptics(
                n_c=_require(host_raw, "n_c", "host"),
                n_a=_require(host_raw, "n_a", "host"),
                number_density=density * 1e-6,
            ),
            excited_gap=_required_quantity(data, "excited_gap", "frequency", "document"),
            spin_inhomogeneity=_required_quantity(data, "spin_inhomogeneity_HWHM", "frequency", "document"),
            collective_coupling=_required_quantity(data, "collective_coupling", "frequency", "document"),
            resonator=CavityParams(
                omega0=_required_quantity(resonator, "omega0", "frequency", "resonator"),
                kappa=_required_quantity(resonator, "kappa", "frequency", "resonator"),
            ),
            fm=FMParams(
                omega_m=read_suffixed(fm, "omega_m", "frequency", 100e3),
                beta=fm.get("beta", 1.0),
            ),
            hyperfine=_parse_hyperfine(data.get("hyperfine")),
            fluorescence_lifetimes=lifetime_values,
            sample_length_cm=_required_quantity(data, "sample_length", "length", "document") * 100.0,
            filling_factor=_require(data, "filling_factor", "document"),
            selection_rules=SelectionRuleTable.from_rows(_require(data, "selection_rules", "document")),
        )
    except ValidationError as exc:
        raise ConfigurationError(f"invalid profile: {exc.errors()[0]['msg']}") from exc
    _check_references(profile)
    return profile


def load_profile(path: str | Path) -> MaterialProfile:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"profile file {str(path)!r} not found") from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"malformed profile JSON: {exc.msg}", line=exc.lineno) from exc
    profile = profile_from_dict(data)
    logger.info("Loaded profile %r from %s (%d levels)", profile.name, path, len(profile.levels))
    return profile


# ---------------------------------------------------------------- CSV

def _read_metadata(path: Path) -> tuple[dict[str, str], int]:
    """Leading "# key=value" lines; returns the mapping and how many lines they take."""
    meta: dict[str, str] = {}
    skipped = 0
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            skipped += 1
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
    return meta, skipped


def _match_header(headers: list[str], col: Column) -> tuple[str, float] | None:
    if col.kind in ("text", "dimensionless"):
        return (col.name, 1.0) if col.name in headers else None
    for header in headers:
        if header == col.name:
            raise UnitError(f"column {header!r} carries no {col.kind} unit suffix")
        if not header.startswith(col.name + "_"):
            continue
        try:
            stem, factor = split_suffixed(header, col.kind)
        except UnitError:
            continue
        if stem == col.name:
            return header, factor
    return None


def load_csv(path: str | Path, schema: CsvSchema | str) -> pd.DataFrame:
    """
    Read a unit-suffixed CSV into a frame with one SI column per schema stem.
    Optional columns that are absent are omitted. Extra columns are ignored.
    """
    if isinstance(schema, str):
        try:
            schema = SCHEMAS[schema]
        except KeyError:
            raise ConfigurationError(f"unknown CSV schema {schema!r}") from None
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"CSV file {str(path)!r} not found")
    _, skipped = _read_metadata(path)
    try:
        raw = pd.read_csv(
            path, skiprows=skipped, dtype=str, keep_default_na=False, skip_blank_lines=False
        )
    except pd.errors.EmptyDataError:
        raise EmptyInputError(f"{path.name} is empty") from None
    except pd.errors.ParserError as exc:
        raise DataFormatError(f"{path.name}: {exc}") from exc

    if raw.empty:
        raise EmptyInputError(f"{path.name} has a header but no data rows")
    raw = raw.fillna("")
    raw.columns = [str(c).strip() for c in raw.columns]
    # header sits on line skipped + 1, first data row on skipped + 2
    raw["__line"] = np.arange(len(raw)) + skipped + 2
    blank = raw.drop(columns="__line").apply(lambda r: all(str(v).strip() == "" for v in r), axis=1)
    raw = raw[~blank]
    if raw.empty:
        raise EmptyInputError(f"{path.name} has a header but no data rows")

    headers = list(raw.columns)
    out = pd.DataFrame(index=raw.index)
    for col in schema.columns:
        match = _match_header(headers, col)
        if match is None:
            if col.required:
                raise DataFormatError(f"{path.name}: missing {schema.name} column {col.name!r}", line=skipped + 1)
            continue
        header, factor = match
        cells = raw[header].astype(str).str.strip()
        if col.kind == "text":
            out[col.name] = cells
            continue
        values = pd.to_numeric(cells, errors="coerce")
        bad = values.isna() & ((cells != "") | col.required)
        if bad.any():
            first = bad.idxmax()
            raise DataFormatError(
                f"non-numeric value {cells[first]!r}", line=int(raw.at[first, "__line"]), column=header
            )
        out[col.name] = values.astype(float) * factor
    out.attrs["lines"] = raw["__line"].to_numpy()
    return out.reset_index(drop=True)


def load_observations(path: str | Path, schema: CsvSchema | str) -> list[Observation]:
    frame = load_csv(path, schema)
    schema = SCHEMAS[schema] if isinstance(schema, str) else schema
    roles = {c.role: c.name for c in schema.columns if c.role is not None}
    lines = frame.attrs.get("lines")
    observations = []
    for i, row in enumerate(frame.itertuples(index=False)):
        record = row._asdict()
        kwargs = {"x": record[roles["x"]], "y": record[roles["y"]]}
        sigma = record.get(roles.get("sigma", ""), math.nan)
        if sigma == sigma and sigma is not None:
            kwargs["sigma"] = sigma
        branch = record.get(roles.get("branch", ""), "")
        if branch:
            kwargs["branch"] = branch
        try:
            observations.append(Observation(**kwargs))
        except ValidationError as exc:
            line = int(lines[i]) if lines is not None else None
            raise DataFormatError(exc.errors()[0]["msg"], line=line) from exc
    return observations


def load_alphas(path: str | Path) -> list[dict]:
    """Rows for photophysics_table: wavelength in m, integrated_alpha in Hz*cm^-1."""
    frame = load_csv(path, ALPHAS)
    return frame.to_dict(orient="records")


def load_sweep(path: str | Path, probe: str) -> SweepTrace:
    schema = EPR_SHIFT if probe == "zero_crossing_shift" else EPR_QUADRATURE
    frame = load_csv(path, schema)
    value = "shift" if probe == "zero_crossing_shift" else "signal"
    return SweepTrace(fields=frame["field"].to_numpy(), values=frame[value].to_numpy(), probe=probe)


def read_spectrum(path: str | Path) -> Spectrum:
    path = Path(path)
    frame = load_csv(path, SPECTRUM)
    meta, _ = _read_metadata(path)
    length = read_suffixed(meta, "length", "length")
    if length is None:
        raise DataFormatError(f"{path.name}: spectrum header lacks '# length_<unit>=' metadata", line=1)
    try:
        return Spectrum(
            frequency=frame["frequency"].to_numpy(),
            transmission=frame["transmission"].to_numpy(),
            length_cm=length * 100.0,
        )
    except ValidationError as exc:
        raise DataFormatError(f"{path.name}: {exc.errors()[0]['msg']}") from exc


def write_csv(path: str | Path, columns: dict[str, np.ndarray | list], metadata: dict[str, object] | None = None) -> Path:
    """Emit columns (headers already unit-suffixed) with full float precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(columns)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}={value!r}\n" if isinstance(value, float) else f"# {key}={value}\n")
        frame.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("Wrote %s (%d rows)", path, len(frame))
    return path


def write_spectrum(path: str | Path, spec: Spectrum) -> Path:
    return write_csv(
        path,
        {"frequency_Hz": spec.frequency, "transmission": spec.transmission},
        metadata={"length_cm": float(spec.length_cm)},
    )


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serialisable")


def write_json(path: str | Path, payload: object) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, default=_json_default, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_manifest(path: str | Path, manifest: RunManifest) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def read_manifest(path: str | Path) -> RunManifest:
    path = Path(path)
    try:
        return RunManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataFormatError(f"manifest {str(path)!r} not found") from None
    except ValidationError as exc:
        raise DataFormatError(f"invalid manifest: {exc.errors()[0]['msg']}") from exc
