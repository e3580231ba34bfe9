# app/services/nullmodels.py
"""
Datasets de referencia para comparar contra los datos:

- thread_shuffle: permuta el orden de los comentarios dentro de cada hilo
- global_shuffle: redistribuye todos los comentarios entre todas las posiciones
- iid_resample:   reemplaza un campo por extracciones con reemplazo de su
                  distribución empírica ("predicción estadística")

Los barajados mueven el par (p_pos, p_sub) como unidad. Todas son funciones
puras de (Dataset, semilla) y conservan el número de hilos y sus longitudes.
"""
from typing import Callable, Dict

import numpy as np

from app.core.models import Dataset, check_field
from app.utils.rng import make_rng


def thread_shuffle(dataset: Dataset, seed: int) -> Dataset:
    if dataset.n_comments == 0:
        return dataset
    rng = make_rng(seed)
    keys = rng.random(dataset.n_comments)
    # orden por (hilo, clave aleatoria): permutación uniforme dentro de cada hilo
    perm = np.lexsort((keys, dataset.thread_codes))
    return dataset.with_values(
        dataset.p_pos[perm],
        dataset.p_sub[perm],
        f"{dataset.source_label}|thread_shuffle({seed})",
    )


def global_shuffle(dataset: Dataset, seed: int) -> Dataset:
    if dataset.n_comments == 0:
        return dataset
    perm = make_rng(seed).permutation(dataset.n_comments)
    return dataset.with_values(
        dataset.p_pos[perm],
        dataset.p_sub[perm],
        f"{dataset.source_label}|global_shuffle({seed})",
    )


def iid_resample(dataset: Dataset, field: str, seed: int) -> Dataset:
    field = check_field(field)
    if dataset.n_comments == 0:
        return dataset
    values = dataset.values(field)
    draws = values[make_rng(seed).integers(0, values.size, size=values.size)]
    label = f"{dataset.source_label}|iid_resample({field},{seed})"
    if field == "p_pos":
        return dataset.with_values(p_pos=draws, source_label=label)
    return dataset.with_values(p_sub=draws, source_label=label)


SHUFFLES: Dict[str, Callable[[Dataset, int], Dataset]] = {
    "thread shuffle": thread_shuffle,
    "global shuffle": global_shuffle,
}
