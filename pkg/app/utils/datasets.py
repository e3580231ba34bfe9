# app/utils/datasets.py
from functools import lru_cache
from pathlib import Path
from typing import Optional

from fastapi import HTTPException

from app.core.config import settings
from app.core.models import Dataset
from app.services.ingest import read_dataset

@lru_cache(maxsize=8)
def _cached(path: str, mtime_ns: int, fmt: Optional[str]) -> Dataset:
    # mtime en la clave: si el archivo cambia se vuelve a leer
    return read_dataset(path, fmt)

def dataset_for(path: str, fmt: Optional[str] = None) -> Dataset:
    """Resuelve `path` contra DATA_DIR y devuelve el dataset (cacheado por versión del archivo)."""
    p = Path(path)
    if not p.is_absolute():
        p = settings.DATA_DIR / p
    if not p.is_file():
        raise HTTPException(404, f"No existe el archivo: {path}")
    return _cached(str(p), p.stat().st_mtime_ns, fmt)
