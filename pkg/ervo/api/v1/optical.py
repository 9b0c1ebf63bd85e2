"""
Optical API: Zeeman-split line positions of Z1 -> Y1/Y2.
"""
from fastapi import APIRouter

from ervo.dependencies import ProfileDep
from ervo.schemas.requests import OpticalLineItem, OpticalLinesRequest, OpticalLinesResponse
from ervo.schemas.spin import FieldPoint
from ervo.services.optical_model import line_positions

router = APIRouter(prefix="/optical", tags=["optical"])


@router.post("/lines", response_model=OpticalLinesResponse)
def lines(body: OpticalLinesRequest, profile: ProfileDep):
    """Allowed lines in one polarization, offsets relative to the zero-field line."""
    found = line_positions(
        profile.ground,
        profile.level(body.excited),
        FieldPoint.folded(body.field, body.theta),
        body.polarization,
        profile.selection_rules,
        body.temperature if body.temperature is not None else profile.temperature,
    )
    return OpticalLinesResponse(
        lines=[
            OpticalLineItem(
                tag=line.tag,
                offset_Hz=line.offset,
                polarization=line.polarization,
                dipole_type=line.dipole_type,
                relative_amplitude=line.relative_amplitude,
            )
            for line in found
        ]
    )
