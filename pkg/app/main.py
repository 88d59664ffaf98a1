"""FastAPI application."""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app.core.errors import FinslerError
from app.routers.analysis import router as analysis_router
from app.routers.public import router as public_router

logger = logging.getLogger(__name__)

app = FastAPI(title="Finsler Tensors", version="1.0.0")


@app.exception_handler(FinslerError)
async def finsler_error_handler(request: Request, exc: FinslerError):
    logger.warning("%s on %s: %s", type(exc).__name__, request.url.path, exc)
    return JSONResponse(
        status_code=422,
        content={"detail": str(exc), "error": type(exc).__name__, "exit_code": exc.exit_code},
    )


app.include_router(public_router)
app.include_router(analysis_router)
