# app/routers/correlations.py
"""
Dependencia entre comentarios consecutivos:
- /pmi:                matriz PMI = log C(x_n, x_{n-1})
- /mutual-information: I(X,Y) sin barajar / barajado por hilo / barajado global
- /three-step:         C+ y C- tras dos comentarios positivos / negativos
"""
from typing import Optional

from fastapi import APIRouter, Query

from app.core.config import settings
from app.core.models import BinSpec
from app.services import reports
from app.utils.datasets import dataset_for

router = APIRouter()

FIELDS = {"pos": "p_pos", "sub": "p_sub"}

@router.get("/pmi")
def pmi(
    path: str = Query(...),
    field: str = Query("sub", pattern="^(pos|sub)$"),
    bin_width: float = Query(settings.BIN_WIDTH, gt=0, le=1),
    min_count: int = Query(settings.MIN_COUNT, ge=1),
    log_base: str = Query(settings.LOG_BASE),
    format: Optional[str] = Query(None, pattern="^(jsonl|csv)$"),
):
    table = reports.pmi_table(dataset_for(path, format), FIELDS[field], BinSpec(bin_width), min_count, log_base)
    return {"path": path, **table.as_json()}

@router.get("/mutual-information")
def mutual_information(
    path: str = Query(...),
    field: str = Query("pos", pattern="^(pos|sub)$"),
    bin_width: float = Query(settings.BIN_WIDTH, gt=0, le=1),
    seed: Optional[int] = Query(None, ge=0),
    bootstrap: int = Query(settings.BOOTSTRAP_REPS, ge=0, le=5000),
    log_base: str = Query(settings.LOG_BASE),
    format: Optional[str] = Query(None, pattern="^(jsonl|csv)$"),
):
    table = reports.mi_table(dataset_for(path, format), FIELDS[field], BinSpec(bin_width), seed, bootstrap, log_base)
    return {"path": path, **table.as_json()}

@router.get("/three-step")
def three_step(
    path: str = Query(...),
    field: str = Query("pos", pattern="^(pos|sub)$"),
    bin_width: float = Query(settings.BIN_WIDTH, gt=0, le=1),
    min_count: int = Query(settings.MIN_COUNT, ge=1),
    plus: float = Query(settings.PLUS_THRESHOLD, ge=0, le=1),
    minus: float = Query(settings.MINUS_THRESHOLD, ge=0, le=1),
    format: Optional[str] = Query(None, pattern="^(jsonl|csv)$"),
):
    table = reports.threestep_table(dataset_for(path, format), BinSpec(bin_width), min_count, plus, minus, FIELDS[field])
    return {"path": path, **table.as_json()}
