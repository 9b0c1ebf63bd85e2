"""
Profile API: the material constants the server was started with.
"""
from fastapi import APIRouter

from ervo.dependencies import ProfileDep

router = APIRouter(prefix="/profile", tags=["profile"])


@router.get("")
def get_profile(profile: ProfileDep):
    """Loaded profile, SI units throughout (optical integrated absorption in Hz*cm^-1)."""
    data = profile.model_dump(mode="json", exclude={"selection_rules"})
    data["selection_rules"] = profile.selection_rules.to_rows()
    return data
