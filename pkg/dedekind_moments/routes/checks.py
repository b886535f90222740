"""Run verification suites and evaluate main terms over HTTP."""

from __future__ import annotations

import logging

from fastapi import APIRouter, HTTPException, Request

from ..errors import NumericsError
from ..models import MomentReport, RunConfig, ShiftTuple, SuiteReport
from ..moment import main_term
from ..services import resolve_character

router = APIRouter(prefix="/api", tags=["checks"])
logger = logging.getLogger(__name__)


def _get_suite(request: Request, name: str):
    suites = getattr(request.app.state, "suites", None) or {}
    suite = suites.get(name)
    if not suite:
        raise HTTPException(status_code=503, detail=f"{name} suite unavailable.")
    return suite


@router.post("/checks/{suite}", response_model=SuiteReport)
def run_suite(suite: str, config: RunConfig, request: Request):
    runner = _get_suite(request, suite)
    try:
        return runner.run(config)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except NumericsError as exc:
        logger.warning("suite %s stopped: %s", suite, exc)
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@router.post("/moment/main-term", response_model=MomentReport)
def moment_main_term(config: RunConfig):
    try:
        chi = resolve_character(config)
        sh = config.shifts or ShiftTuple.generic(config.T)
        return main_term(config.h, config.k, sh, chi, config.weight())
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except NumericsError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
