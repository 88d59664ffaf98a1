from __future__ import annotations

from fastapi import APIRouter

from app.core.reporting import SCHEMA_VERSION
from app.fixtures import available
from app.models.phi import PhiFamily


router = APIRouter(prefix="/api", tags=["public"])


@router.get("/health")
def health():
    return {"ok": True, "schema": SCHEMA_VERSION}


@router.get("/catalogue")
def catalogue():
    return {"fixtures": available(), "families": [f.value for f in PhiFamily]}
