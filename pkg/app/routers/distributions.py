# app/routers/distributions.py
"""
Distribuciones de valores:
- /histogram:     histograma de P_pos o P_sub
- /thread-means:  <P_pos> por hilo (solo comentarios con P_sub >= sub_cut) vs remuestreo IID
"""
from typing import Optional

from fastapi import APIRouter, Query

from app.core.config import settings
from app.core.models import BinSpec
from app.services import reports
from app.utils.datasets import dataset_for

router = APIRouter()

FIELDS = {"pos": "p_pos", "sub": "p_sub"}

@router.get("/histogram")
def histogram(
    path: str = Query(...),
    field: str = Query("pos", pattern="^(pos|sub)$"),
    bin_width: float = Query(settings.BIN_WIDTH, gt=0, le=1),
    format: Optional[str] = Query(None, pattern="^(jsonl|csv)$"),
):
    table = reports.hist_table(dataset_for(path, format), FIELDS[field], BinSpec(bin_width))
    return {"path": path, **table.as_json()}

@router.get("/thread-means")
def thread_means(
    path: str = Query(...),
    sub_cut: Optional[float] = Query(settings.SUB_CUT, ge=0, le=1),
    all_comments: bool = False,
    bin_width: float = Query(settings.BIN_WIDTH, gt=0, le=1),
    seed: Optional[int] = Query(None, ge=0),
    format: Optional[str] = Query(None, pattern="^(jsonl|csv)$"),
):
    cut = None if all_comments else sub_cut
    table = reports.means_table(dataset_for(path, format), BinSpec(bin_width), cut, seed)
    return {"path": path, **table.as_json()}
