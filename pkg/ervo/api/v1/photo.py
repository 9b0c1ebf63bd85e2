"""
Photophysics API: oscillator strengths, dipole moments and radiative rates from integrated absorption.
"""
from fastapi import APIRouter

from ervo.config import settings
from ervo.dependencies import ProfileDep
from ervo.schemas.requests import PhotoChannel, PhotoSummary, PhotoTableRequest, PhotoTableResponse
from ervo.services.data_io import load_alphas
from ervo.services.photophysics import branching_ratio, photophysics_table, total_rate_and_dipoles

router = APIRouter(prefix="/photo", tags=["photo"])

BUNDLED_ALPHAS = settings.PROFILE_PATH.parent / "measured_alphas.csv"


@router.post("/table", response_model=PhotoTableResponse)
def table(body: PhotoTableRequest, profile: ProfileDep):
    """Per-channel report plus per-transition totals. No rows means the bundled measured set."""
    rows = [r.model_dump() for r in body.rows] if body.rows else load_alphas(BUNDLED_ALPHAS)
    channels = photophysics_table(rows, profile.host)
    summaries = []
    for name in dict.fromkeys(c.transition for c in channels):
        summary = total_rate_and_dipoles([c for c in channels if c.transition == name], body.weighting)
        excited = name.split("-")[-1]
        tau_f = profile.fluorescence_lifetimes.get(excited)
        summaries.append(
            PhotoSummary(
                transition=name,
                total_rate_Hz=summary.total_rate,
                radiative_lifetime_s=summary.radiative_lifetime,
                d_ED_Cm=summary.d_ED,
                d_MD_Cm=summary.d_MD,
                branching_ratio=branching_ratio(tau_f, summary.radiative_lifetime) if tau_f else None,
            )
        )
    return PhotoTableResponse(
        channels=[
            PhotoChannel(
                transition=c.transition,
                polarization=c.polarization,
                dipole_type=c.dipole_type,
                refractive_index=c.refractive_index,
                f=c.f,
                d_Cm=c.d,
                radiative_rate_Hz=c.radiative_rate,
            )
            for c in channels
        ],
        summaries=summaries,
    )
