"""FastAPI entry point for the report API."""

from __future__ import annotations

import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .config import Settings, get_settings
from .logging_config import setup_logging
from .routes.characters import router as characters_router
from .routes.checks import router as checks_router
from .services import SuiteRunner, build_suites

setup_logging()
logger = logging.getLogger(__name__)


def create_app(
    settings_override: Settings | None = None,
    suites_override: dict[str, SuiteRunner] | None = None,
) -> FastAPI:
    """Instantiate the FastAPI application."""

    settings = settings_override or get_settings()
    suites = suites_override if suites_override is not None else build_suites(settings)
    logger.info("Booting report API with suites: %s", ", ".join(sorted(suites)))

    app = FastAPI(title=settings.app_name, version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.settings = settings
    app.state.suites = suites

    app.include_router(characters_router)
    app.include_router(checks_router)

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    return app


app = create_app()
