"""
Integration tests: root, health and the request-ID middleware.
"""
import httpx
import pytest


@pytest.mark.asyncio
async def test_root(client: httpx.AsyncClient):
    r = await client.get("/")
    assert r.status_code == 200
    data = r.json()
    assert data.get("status") == "ok"
    assert data.get("app") == "ervo"


@pytest.mark.asyncio
async def test_health_liveness(client: httpx.AsyncClient):
    """Liveness: process is up."""
    r = await client.get("/api/v1/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


@pytest.mark.asyncio
async def test_request_id_generated(client: httpx.AsyncClient):
    r = await client.get("/api/v1/health")
    assert r.headers.get("X-Request-ID")


@pytest.mark.asyncio
async def test_request_id_echoed(client: httpx.AsyncClient):
    r = await client.get("/api/v1/health", headers={"X-Request-ID": "sweep-42"})
    assert r.headers.get("X-Request-ID") == "sweep-42"


@pytest.mark.asyncio
async def test_unknown_route_404_carries_request_id(client: httpx.AsyncClient):
    r = await client.get("/api/v1/nope", headers={"X-Request-ID": "abc"})
    assert r.status_code == 404
    assert r.json().get("request_id") == "abc"
