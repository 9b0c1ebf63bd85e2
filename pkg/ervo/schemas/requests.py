"""
Request and response bodies for the HTTP API. Physical quantities arrive as
unit-suffixed strings ("2.4GHz", "48 mT") and are parsed to SI on validation.
"""
from pydantic import BaseModel, Field

from ervo.schemas.cavity import Probe
from ervo.schemas.optical import DipoleType, Polarization
from ervo.schemas.photo import RateWeighting
from ervo.schemas.quantities import (
    Angle,
    Frequency,
    IntegratedAlpha,
    Length,
    MagneticField,
    NonNegativeFrequency,
    Temperature,
)


class GTensorBody(BaseModel):
    g_par: float = Field(..., ge=0)
    g_perp: float = Field(..., ge=0)


class ZeemanRequest(BaseModel):
    """Body for POST /levels/zeeman. g defaults to the profile's Z1 tensor."""
    g: GTensorBody | None = None
    field: MagneticField
    theta: Angle = 0.0


class ZeemanResponse(BaseModel):
    splitting_Hz: float
    g_effective: float


class CrossingsRequest(BaseModel):
    """Body for POST /levels/crossings. With A_par/A_perp the odd-isotope system is used."""
    target: Frequency
    field_min: MagneticField = 0.0
    field_max: MagneticField
    theta: Angle = 0.0
    level: str = "Z1"
    A_par: Frequency | None = None
    A_perp: Frequency | None = None


class CrossingItem(BaseModel):
    field_T: float
    lower_index: int
    upper_index: int
    frequency_Hz: float
    strength: float


class CrossingsResponse(BaseModel):
    crossings: list[CrossingItem]


class OpticalLinesRequest(BaseModel):
    excited: str = Field("Y1", pattern=r"^Y[12]$")
    field: MagneticField
    theta: Angle = 0.0
    polarization: Polarization = "sigma"
    temperature: Temperature | None = None


class OpticalLineItem(BaseModel):
    tag: str
    offset_Hz: float
    polarization: Polarization
    dipole_type: DipoleType
    relative_amplitude: float


class OpticalLinesResponse(BaseModel):
    lines: list[OpticalLineItem]


class AlphaRow(BaseModel):
    transition: str
    wavelength: Length
    polarization: Polarization
    dipole_type: DipoleType
    integrated_alpha: IntegratedAlpha


class PhotoTableRequest(BaseModel):
    """Body for POST /photo/table. Without rows the bundled measured values are used."""
    rows: list[AlphaRow] | None = None
    weighting: RateWeighting = "naive_sum"


class PhotoChannel(BaseModel):
    transition: str
    polarization: Polarization
    dipole_type: DipoleType
    refractive_index: float
    f: float
    d_Cm: float
    radiative_rate_Hz: float


class PhotoSummary(BaseModel):
    transition: str
    total_rate_Hz: float
    radiative_lifetime_s: float
    d_ED_Cm: float
    d_MD_Cm: float
    branching_ratio: float | None = None


class PhotoTableResponse(BaseModel):
    channels: list[PhotoChannel]
    summaries: list[PhotoSummary]


class EPRSweepRequest(BaseModel):
    field_min: MagneticField
    field_max: MagneticField
    points: int = Field(201, ge=2, le=20_000)
    probe: Probe = "zero_crossing_shift"
    theta: Angle = 0.0
    Omega: NonNegativeFrequency | None = None
    Delta: NonNegativeFrequency | None = None


class EPRSweepResponse(BaseModel):
    probe: Probe
    fields_T: list[float]
    values: list[float | None]
    flagged: list[int]


class ZetaRequest(BaseModel):
    d31: float = Field(..., gt=0)
    d32: float = Field(..., gt=0)
    mu21: float = Field(..., gt=0)
    rho: float = Field(..., gt=0)
    delta_o: NonNegativeFrequency
    delta_mu: NonNegativeFrequency
    reference: "ZetaRequest | None" = None


class ZetaResponse(BaseModel):
    zeta: float
    ratio: float | None = None


class SystemsRequest(BaseModel):
    resonator: Frequency
    excited: str = Field("Y2", pattern=r"^Y[12]$")
    field_max: MagneticField = 0.2
    theta: Angle = 0.0


class SystemItem(BaseModel):
    kind: str
    field_T: float
    microwave_doublet: str
    legs: tuple[str, str]
    pump_offset_Hz: float
    optical_offset_Hz: float


class SystemsResponse(BaseModel):
    systems: list[SystemItem]
