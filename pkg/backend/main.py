"""
Trispin: Main FastAPI Application

HTTP front end over the sequence builders, propagator simulation,
verification and duration analysis.
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from config import APP_DESCRIPTION, APP_NAME, APP_VERSION, settings
from errors import TrispinError
from routers.analysis_router import router as analysis_router
from routers.sequences_router import router as sequences_router
from routers.verify_router import router as verify_router

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app):
    logger.info(f"{APP_NAME} {APP_VERSION} starting (seed {settings.SEED:#x})")
    yield


app = FastAPI(
    title=APP_NAME,
    version=APP_VERSION,
    description=APP_DESCRIPTION,
    docs_url="/api/docs",
    redoc_url="/api/redoc",
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(sequences_router)
app.include_router(verify_router)
app.include_router(analysis_router)


@app.exception_handler(TrispinError)
async def trispin_error_handler(request: Request, exc: TrispinError):
    # Also reached from request-body validation (e.g. an event on spin 4 of a 3-spin sequence)
    return JSONResponse(status_code=exc.status_code, content={"detail": str(exc)})


@app.get("/api/health")
async def health_check():
    return {
        "status": "healthy",
        "app": APP_NAME,
        "version": APP_VERSION,
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run("main:app", host="0.0.0.0", port=8000, reload=True)
