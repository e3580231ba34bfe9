import os
from pathlib import Path
from typing import List

class Settings:
    # valores por defecto; los flags de la CLI y los query params los pisan
    BIN_WIDTH: float = float(os.getenv("BIN_WIDTH", "0.1"))
    MIN_COUNT: int = int(os.getenv("MIN_COUNT", "10"))
    SUB_CUT: float = float(os.getenv("SUB_CUT", "0.5"))
    THRESHOLD_STEP: float = float(os.getenv("THRESHOLD_STEP", "0.05"))
    PLUS_THRESHOLD: float = float(os.getenv("PLUS_THRESHOLD", "0.9"))
    MINUS_THRESHOLD: float = float(os.getenv("MINUS_THRESHOLD", "0.1"))
    LOG_BASE: str = os.getenv("LOG_BASE", "e")
    BOOTSTRAP_REPS: int = int(os.getenv("BOOTSTRAP_REPS", "200"))
    DEFAULT_FORMAT: str = os.getenv("DEFAULT_FORMAT", "jsonl")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    CORS_ORIGINS: List[str] = [o.strip() for o in os.getenv("CORS_ORIGINS", "*").split(",")]
    DATA_DIR: Path = Path(os.getenv("DATA_DIR", "."))

settings = Settings()
