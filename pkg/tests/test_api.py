"""
Integration tests: /api/v1 physics endpoints. Quantities travel as unit-suffixed strings.
"""
import json

import httpx
import pytest
from pydantic import ValidationError
from starlette.requests import Request

from ervo.main import model_validation_handler
from ervo.schemas.cavity import EnsembleParams


@pytest.mark.asyncio
async def test_zeeman_default_ground(client: httpx.AsyncClient):
    r = await client.post("/api/v1/levels/zeeman", json={"field": "48mT"})
    assert r.status_code == 200, r.text
    assert r.json()["splitting_Hz"] == pytest.approx(2.3811e9, rel=1e-3)


@pytest.mark.asyncio
async def test_zeeman_custom_g_in_plane(client: httpx.AsyncClient):
    r = await client.post(
        "/api/v1/levels/zeeman",
        json={"field": "75 mT", "theta": "90deg", "g": {"g_par": 3.544, "g_perp": 7.085}},
    )
    assert r.status_code == 200, r.text
    data = r.json()
    assert data["splitting_Hz"] == pytest.approx(7.4372e9, rel=1e-3)
    assert data["g_effective"] == pytest.approx(7.085, rel=1e-9)


@pytest.mark.asyncio
async def test_unitless_field_rejected(client: httpx.AsyncClient):
    r = await client.post("/api/v1/levels/zeeman", json={"field": 0.048})
    assert r.status_code == 422


@pytest.mark.asyncio
async def test_crossings(client: httpx.AsyncClient):
    r = await client.post("/api/v1/levels/crossings", json={"target": "2.4GHz", "field_max": "120mT"})
    assert r.status_code == 200, r.text
    crossings = r.json()["crossings"]
    assert len(crossings) == 1
    assert crossings[0]["field_T"] == pytest.approx(0.04838, abs=2e-5)
    assert crossings[0]["strength"] == pytest.approx(0.25)


@pytest.mark.asyncio
async def test_crossings_hyperfine_without_constants_is_422(client: httpx.AsyncClient):
    r = await client.post(
        "/api/v1/levels/crossings",
        json={"target": "2.4GHz", "field_max": "120mT", "A_par": "-130MHz"},
    )
    assert r.status_code == 422
    assert "ConfigurationError" in r.json()["detail"]


@pytest.mark.asyncio
async def test_optical_lines(client: httpx.AsyncClient):
    r = await client.post("/api/v1/optical/lines", json={"excited": "Y2", "field": "90mT", "polarization": "pi"})
    assert r.status_code == 200, r.text
    offsets = sorted(line["offset_Hz"] for line in r.json()["lines"])
    assert offsets == pytest.approx([-3.9579e9, -0.5064e9, 0.5064e9, 3.9579e9], rel=1e-3)


@pytest.mark.asyncio
async def test_photo_table_bundled(client: httpx.AsyncClient):
    r = await client.post("/api/v1/photo/table", json={})
    assert r.status_code == 200, r.text
    data = r.json()
    assert len(data["channels"]) == 6
    y2 = next(s for s in data["summaries"] if s["transition"] == "Z1-Y2")
    assert y2["total_rate_Hz"] == pytest.approx(118.8, rel=1e-2)
    assert y2["branching_ratio"] is not None


@pytest.mark.asyncio
async def test_photo_table_custom_rows(client: httpx.AsyncClient):
    body = {
        "rows": [
            {
                "transition": "Z1-Y2",
                "wavelength": "1528.78nm",
                "polarization": "pi",
                "dipole_type": "ED",
                "integrated_alpha": "79.5GHz_per_cm",
            }
        ]
    }
    r = await client.post("/api/v1/photo/table", json=body)
    assert r.status_code == 200, r.text
    (channel,) = r.json()["channels"]
    assert channel["f"] == pytest.approx(7.552e-7, rel=2e-3)
    assert channel["radiative_rate_Hz"] == pytest.approx(75.27, rel=2e-3)


@pytest.mark.asyncio
async def test_epr_sweep(client: httpx.AsyncClient):
    r = await client.post(
        "/api/v1/epr/sweep",
        json={"field_min": "42mT", "field_max": "55mT", "points": 53},
    )
    assert r.status_code == 200, r.text
    data = r.json()
    assert len(data["fields_T"]) == 53
    assert data["flagged"] == []
    assert max(abs(v) for v in data["values"]) < 0.28e6


@pytest.mark.asyncio
async def test_epr_sweep_bad_range(client: httpx.AsyncClient):
    r = await client.post("/api/v1/epr/sweep", json={"field_min": "55mT", "field_max": "42mT"})
    assert r.status_code == 400
    assert "request_id" in r.json()


@pytest.mark.asyncio
async def test_epr_sweep_negative_coupling_is_rejected(client: httpx.AsyncClient):
    r = await client.post(
        "/api/v1/epr/sweep",
        json={"field_min": "42mT", "field_max": "55mT", "Omega": "-1MHz"},
    )
    assert r.status_code == 422, r.text


@pytest.mark.asyncio
async def test_zeta_negative_detuning_is_rejected(client: httpx.AsyncClient):
    body = {"d31": 3e-32, "d32": 2.5e-32, "mu21": 3.29e-23, "rho": 1.75e24, "delta_o": "-163MHz", "delta_mu": "58.4MHz"}
    r = await client.post("/api/v1/fom/zeta", json=body)
    assert r.status_code == 422, r.text


@pytest.mark.asyncio
async def test_zeta_zero_detuning_is_physics_error(client: httpx.AsyncClient):
    body = {"d31": 3e-32, "d32": 2.5e-32, "mu21": 3.29e-23, "rho": 1.75e24, "delta_o": "0", "delta_mu": "58.4MHz"}
    r = await client.post("/api/v1/fom/zeta", json=body)
    assert r.status_code == 422, r.text
    assert "PhysicsInputError" in r.json()["detail"]
    assert "request_id" in r.json()


@pytest.mark.asyncio
async def test_model_validation_inside_route_maps_to_422():
    request = Request({"type": "http", "method": "POST", "path": "/api/v1/epr/sweep", "headers": []})
    request.state.request_id = "rid-7"
    with pytest.raises(ValidationError) as info:
        EnsembleParams(Omega=-1.0, Delta=1e6)
    response = await model_validation_handler(request, info.value)
    assert response.status_code == 422
    body = json.loads(response.body)
    assert body["request_id"] == "rid-7"
    assert body["detail"][0]["loc"] == ["Omega"]


@pytest.mark.asyncio
async def test_zeta_ratio(client: httpx.AsyncClient):
    base = {"d31": 3e-32, "d32": 2.5e-32, "mu21": 3.29e-23, "rho": 1.75e24, "delta_o": "163MHz", "delta_mu": "58.4MHz"}
    doubled = dict(base, rho=3.5e24, reference=base)
    r = await client.post("/api/v1/fom/zeta", json=doubled)
    assert r.status_code == 200, r.text
    assert r.json()["ratio"] == pytest.approx(4.0, rel=1e-12)


@pytest.mark.asyncio
async def test_fom_systems(client: httpx.AsyncClient):
    r = await client.post("/api/v1/fom/systems", json={"resonator": "2.4GHz"})
    assert r.status_code == 200, r.text
    systems = r.json()["systems"]
    assert sorted(s["kind"] for s in systems) == ["Lambda", "Lambda", "V", "V"]
    vee = [s for s in systems if s["kind"] == "V"]
    assert vee[0]["optical_offset_Hz"] == pytest.approx(3.104e9, rel=1e-3)


@pytest.mark.asyncio
async def test_profile_endpoint(client: httpx.AsyncClient):
    r = await client.get("/api/v1/profile")
    assert r.status_code == 200, r.text
    data = r.json()
    assert data["name"] == "Er:YVO4"
    assert len(data["selection_rules"]) == 32
