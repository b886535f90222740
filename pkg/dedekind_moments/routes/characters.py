"""Character and leading-coefficient lookups."""

from __future__ import annotations

from fastapi import APIRouter, HTTPException, Query

from ..characters import kronecker_character
from ..errors import NumericsError
from ..eulerprod import corollary_c2

router = APIRouter(prefix="/api", tags=["characters"])


@router.get("/characters/kronecker/{D}")
async def kronecker_summary(D: int):
    try:
        return kronecker_character(D).summary()
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@router.get("/corollary/c2")
async def leading_c2(
    D: int = Query(..., description="Fundamental discriminant."),
    h: int = Query(1, ge=1),
    k: int = Query(1, ge=1),
):
    try:
        chi = kronecker_character(D)
        return {"D": D, "h": h, "k": k, "c2": corollary_c2(h, k, chi)}
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except NumericsError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
