"""
Shared dependencies: the material profile loaded at startup.
"""
from typing import Annotated

from fastapi import Depends, Request

from ervo.schemas.profile import MaterialProfile


def get_profile(request: Request) -> MaterialProfile:
    """Profile loaded in the lifespan handler (settings.PROFILE_PATH)."""
    return request.app.state.profile


ProfileDep = Annotated[MaterialProfile, Depends(get_profile)]
