from fastapi import APIRouter
from app.core.config import settings

router = APIRouter()

@router.get("/health")
def health():
    return {
        "ok": True,
        "defaults": {
            "bin_width": settings.BIN_WIDTH,
            "min_count": settings.MIN_COUNT,
            "sub_cut": settings.SUB_CUT,
            "log_base": settings.LOG_BASE,
        },
    }
