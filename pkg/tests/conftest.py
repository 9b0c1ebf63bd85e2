"""
Test fixtures. Settings are read from the environment when ervo.config is first
imported, so test overrides go in before any ervo import.
"""
# ruff: noqa: E402  (env must be set before importing ervo)
import os

os.environ.setdefault("ERVO_LOG_LEVEL", "WARNING")

import httpx
import numpy as np
import pytest
from httpx import ASGITransport

from ervo.config import BUNDLED_PROFILE
from ervo.main import app
from ervo.services.data_io import load_alphas, load_profile
from ervo.services.photophysics import photophysics_table


@pytest.fixture
def anyio_backend():
    return "asyncio"


@pytest.fixture
async def client():
    """Async HTTP client against the FastAPI app. The lifespan loads the profile, so run it explicitly."""
    transport = ASGITransport(app=app)
    async with app.router.lifespan_context(app):
        async with httpx.AsyncClient(transport=transport, base_url="http://test") as ac:
            yield ac


@pytest.fixture(scope="session")
def profile():
    return load_profile(BUNDLED_PROFILE)


@pytest.fixture(scope="session")
def alpha_rows():
    return load_alphas(BUNDLED_PROFILE.parent / "measured_alphas.csv")


@pytest.fixture(scope="session")
def channels(profile, alpha_rows):
    return photophysics_table(alpha_rows, profile.host)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
