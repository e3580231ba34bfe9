from typing import Optional

from fastapi import APIRouter, Query

from app.core.models import validate
from app.services.estimators import describe
from app.utils.datasets import dataset_for

router = APIRouter()

@router.get("/validate")
def validate_dataset(path: str = Query(...), format: Optional[str] = Query(None, pattern="^(jsonl|csv)$")):
    report = validate(dataset_for(path, format))
    return {"path": path, "ok": report.ok, **report.as_dict()}

@router.get("/describe")
def describe_dataset(
    path: str = Query(...),
    format: Optional[str] = Query(None, pattern="^(jsonl|csv)$"),
    sub_cut: Optional[float] = Query(None, ge=0, le=1),
):
    # sin sub_cut: settings.SUB_CUT
    return {"path": path, **describe(dataset_for(path, format), sub_cut)}
