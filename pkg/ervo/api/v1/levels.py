"""
Levels API: Zeeman splitting and resonator crossings of the ground or excited doublets.
"""
from fastapi import APIRouter

from ervo.dependencies import ProfileDep
from ervo.schemas.requests import (
    CrossingItem,
    CrossingsRequest,
    CrossingsResponse,
    ZeemanRequest,
    ZeemanResponse,
)
from ervo.schemas.spin import FieldPoint, GTensor, SpinSystem
from ervo.services.spin_core import find_crossings, zeeman_splitting

router = APIRouter(prefix="/levels", tags=["levels"])


@router.post("/zeeman", response_model=ZeemanResponse)
def zeeman(body: ZeemanRequest, profile: ProfileDep):
    """Effective-spin-1/2 splitting g_eff mu_B B / h. g defaults to the profile's Z1 tensor."""
    g = GTensor(**body.g.model_dump()) if body.g else profile.ground.g
    field = FieldPoint.folded(body.field, body.theta)
    return ZeemanResponse(splitting_Hz=zeeman_splitting(g, field), g_effective=g.effective(field.theta))


@router.post("/crossings", response_model=CrossingsResponse)
def crossings(body: CrossingsRequest, profile: ProfileDep):
    """Fields where an allowed transition matches the target frequency."""
    if body.A_par is not None or body.A_perp is not None:
        system = profile.hyperfine_system(body.A_par, body.A_perp)
    else:
        system = SpinSystem(g=profile.level(body.level).g)
    found = find_crossings(system, body.target, (body.field_min, body.field_max), body.theta)
    return CrossingsResponse(
        crossings=[
            CrossingItem(
                field_T=c.field,
                lower_index=c.transition.lower_index,
                upper_index=c.transition.upper_index,
                frequency_Hz=c.transition.frequency,
                strength=c.transition.strength,
            )
            for c in found
        ]
    )
