"""
Middleware: request ID for tracing plus one access-log line per request.
Global exception handlers live in main.py.
"""
import time
import uuid

from starlette.middleware.base import BaseHTTPMiddleware
from starlette.requests import Request

from ervo.core.log import get_logger

logger = get_logger(__name__)

# Header we read (client can send) and echo back; generated if missing
REQUEST_ID_HEADER = "X-Request-ID"


class RequestIDMiddleware(BaseHTTPMiddleware):
    """
    Assigns a request ID to each request. A client-supplied X-Request-ID is kept,
    otherwise a UUID is generated. Stored on request.state and echoed in the response.
    """

    async def dispatch(self, request: Request, call_next):
        request_id = request.headers.get(REQUEST_ID_HEADER) or str(uuid.uuid4())
        request.state.request_id = request_id
        started = time.perf_counter()
        response = await call_next(request)
        response.headers[REQUEST_ID_HEADER] = request_id
        logger.info(
            "%s %s -> %d (%.1f ms) [%s]",
            request.method,
            request.url.path,
            response.status_code,
            (time.perf_counter() - started) * 1e3,
            request_id,
        )
        return response
