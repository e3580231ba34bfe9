# app/utils/rng.py
import logging
from typing import List, Optional

import numpy as np

logger = logging.getLogger(__name__)

# PCG64 de numpy: algoritmo fijo y documentado, misma salida para la misma semilla
SEED_MASK = (1 << 64) - 1

def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & SEED_MASK))

def fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy) & SEED_MASK

def resolve_seed(seed: Optional[int]) -> int:
    """Semilla dada o una nueva desde la entropía del sistema (se loguea para reproducir)."""
    if seed is not None:
        return int(seed) & SEED_MASK
    seed = fresh_seed()
    logger.warning("Sin --seed: usando semilla %d", seed)
    return seed

def derive_seeds(seed: int, n: int) -> List[int]:
    state = np.random.SeedSequence(int(seed) & SEED_MASK).generate_state(n, dtype=np.uint64)
    return [int(s) for s in state]
