"""
Transduction figures of merit: zeta and Lambda/V system enumeration.
"""
from fastapi import APIRouter

from ervo.dependencies import ProfileDep
from ervo.schemas.fom import MaterialFoM
from ervo.schemas.requests import SystemItem, SystemsRequest, SystemsResponse, ZetaRequest, ZetaResponse
from ervo.services.transduction import enumerate_systems, zeta, zeta_ratio

router = APIRouter(prefix="/fom", tags=["fom"])


def _material(body: ZetaRequest) -> MaterialFoM:
    return MaterialFoM(**body.model_dump(exclude={"reference"}))


@router.post("/zeta", response_model=ZetaResponse)
def zeta_value(body: ZetaRequest):
    """zeta of one material; with a reference, also the ratio to it."""
    material = _material(body)
    ratio = zeta_ratio(material, _material(body.reference)) if body.reference else None
    return ZetaResponse(zeta=zeta(material), ratio=ratio)


@router.post("/systems", response_model=SystemsResponse)
def systems(body: SystemsRequest, profile: ProfileDep):
    """Lambda and V systems whose microwave transition matches the resonator."""
    configs = enumerate_systems(
        profile.ground, profile.level(body.excited), body.resonator, (0.0, body.field_max), body.theta
    )
    return SystemsResponse(
        systems=[
            SystemItem(
                kind=c.kind,
                field_T=c.field,
                microwave_doublet=c.microwave_doublet,
                legs=c.legs,
                pump_offset_Hz=c.pump_offset,
                optical_offset_Hz=c.optical_offset,
            )
            for c in configs
        ]
    )
