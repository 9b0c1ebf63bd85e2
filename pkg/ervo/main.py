"""
ervo HTTP API: FastAPI app entry point.
Run: uvicorn ervo.main:app --reload
Docs: http://localhost:8000/docs
"""
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from starlette.exceptions import HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from ervo.api.v1 import epr as epr_router
from ervo.api.v1 import fom as fom_router
from ervo.api.v1 import levels as levels_router
from ervo.api.v1 import optical as optical_router
from ervo.api.v1 import photo as photo_router
from ervo.api.v1 import profile as profile_router
from ervo.config import settings
from ervo.core.errors import ToolkitError
from ervo.core.log import configure_logging, get_logger
from ervo.middleware import REQUEST_ID_HEADER, RequestIDMiddleware
from ervo.services.data_io import load_profile

logger = get_logger(__name__)


# Lifespan: configure logging and load the material profile once
@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging(settings.LOG_LEVEL, settings.LOG_FILE)
    app.state.profile = load_profile(settings.PROFILE_PATH)
    logger.info("%s ready with profile %r", settings.APP_NAME, app.state.profile.name)
    yield


app = FastAPI(
    title="ervo",
    description="Er:YVO4 spin, optical and transduction calculations",
    version="0.1.0",
    lifespan=lifespan,
)

app.add_middleware(RequestIDMiddleware)

# CORS origins from config (comma-separated or "*")
_origins = ["*"] if settings.CORS_ORIGINS.strip() == "*" else [o.strip() for o in settings.CORS_ORIGINS.split(",") if o.strip()]
app.add_middleware(
    CORSMiddleware,
    allow_origins=_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _request_id(request: Request) -> str | None:
    return getattr(request.state, "request_id", None)


def _error_response(request: Request, status_code: int, detail) -> JSONResponse:
    body = {"detail": detail}
    if rid := _request_id(request):
        body["request_id"] = rid
    response = JSONResponse(status_code=status_code, content=body)
    if rid := _request_id(request):
        response.headers[REQUEST_ID_HEADER] = rid
    return response


@app.exception_handler(HTTPException)
async def http_exception_handler(request: Request, exc: HTTPException) -> JSONResponse:
    return _error_response(request, exc.status_code, exc.detail)


@app.exception_handler(ToolkitError)
async def toolkit_exception_handler(request: Request, exc: ToolkitError) -> JSONResponse:
    """Invalid physics input or data: 422 with the error type and message."""
    logger.info("%s: %s", type(exc).__name__, exc)
    return _error_response(request, 422, f"{type(exc).__name__}: {exc}")


@app.exception_handler(ValidationError)
async def model_validation_handler(request: Request, exc: ValidationError) -> JSONResponse:
    """Model constraints violated while a route builds derived parameters."""
    logger.info("%s failed validation: %d error(s)", exc.title, exc.error_count())
    errors = [{"loc": list(e["loc"]), "msg": e["msg"], "type": e["type"]} for e in exc.errors()]
    return _error_response(request, 422, errors)


@app.exception_handler(Exception)
async def unhandled_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    logger.exception("Unhandled error on %s %s", request.method, request.url.path)
    return _error_response(request, 500, "Internal server error")


app.include_router(levels_router.router, prefix="/api/v1")
app.include_router(optical_router.router, prefix="/api/v1")
app.include_router(photo_router.router, prefix="/api/v1")
app.include_router(epr_router.router, prefix="/api/v1")
app.include_router(fom_router.router, prefix="/api/v1")
app.include_router(profile_router.router, prefix="/api/v1")


@app.get("/")
def root():
    """Root: app name from config."""
    return {"status": "ok", "app": settings.APP_NAME}


@app.get("/api/v1/health")
def health_liveness():
    """Liveness probe: is the process up?"""
    return {"status": "ok"}
