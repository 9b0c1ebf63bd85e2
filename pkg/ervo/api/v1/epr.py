"""
EPR API: resonator-detected field sweeps of the ground-state spin ensemble.
"""
import math

import numpy as np
from fastapi import APIRouter, HTTPException, status

from ervo.dependencies import ProfileDep
from ervo.schemas.cavity import EnsembleParams
from ervo.schemas.requests import EPRSweepRequest, EPRSweepResponse
from ervo.services.cavity_ensemble import epr_field_sweep

router = APIRouter(prefix="/epr", tags=["epr"])


@router.post("/sweep", response_model=EPRSweepResponse)
def sweep(body: EPRSweepRequest, profile: ProfileDep):
    """Field sweep with the profile's resonator and ensemble unless Omega/Delta are given."""
    if body.field_max <= body.field_min:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail="field_max must exceed field_min")
    ensemble = EnsembleParams(
        Omega=profile.collective_coupling if body.Omega is None else body.Omega,
        Delta=profile.spin_inhomogeneity if body.Delta is None else body.Delta,
    )
    fields = np.linspace(body.field_min, body.field_max, body.points)
    trace = epr_field_sweep(
        profile.resonator, ensemble, profile.ground.g, fields, body.probe, profile.fm, body.theta
    )
    return EPRSweepResponse(
        probe=trace.probe,
        fields_T=trace.fields.tolist(),
        values=[None if math.isnan(v) else float(v) for v in trace.values],
        flagged=trace.flagged,
    )
