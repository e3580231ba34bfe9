from typing import Optional

from fastapi import APIRouter, HTTPException, Query

from app.services import reports
from app.utils.datasets import dataset_for

router = APIRouter()

@router.get("/clusters")
def clusters(
    path: str = Query(...),
    thresholds: Optional[str] = Query(None, description="T separados por comas; por defecto 0.00..1.00 cada 0.05"),
    pooling: str = Query("clusters", pattern="^(clusters|threads)$"),
    seed: Optional[int] = Query(None, ge=0),
    format: Optional[str] = Query(None, pattern="^(jsonl|csv)$"),
):
    grid = None
    if thresholds:
        try:
            grid = [float(t) for t in thresholds.split(",") if t.strip()]
        except ValueError:
            raise HTTPException(400, f"thresholds inválido: {thresholds}")
    table = reports.clusters_table(dataset_for(path, format), grid, seed, pooling)
    return {"path": path, **table.as_json()}
