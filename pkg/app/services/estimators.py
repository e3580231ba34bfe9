# app/services/estimators.py
"""
Estadísticos de distribución:

- histogram:     histogramas de P_pos / P_sub (bimodales en los datos reales)
- thread_means:  distribución de la media <P_pos> por hilo, opcionalmente solo
                 sobre comentarios subjetivos (P_sub >= corte)
- find_clusters / cluster_curve: clusters subjetivos (rachas con P_sub >= T)
                 y tamaño medio <S(T)>
- cluster_gap:   aumento relativo (%) de <S(T)> frente a una referencia barajada
- describe:      resumen del dataset
"""
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError
from app.core.models import BinSpec, Dataset, Thread, check_field

Pooling = Literal["clusters", "threads"]


@dataclass(frozen=True, eq=False)
class Histogram:
    spec: BinSpec
    counts: np.ndarray
    total: int

    @classmethod
    def of(cls, values, spec: BinSpec) -> "Histogram":
        counts = np.bincount(spec.digitize(values), minlength=spec.n_bins).astype(np.int64)
        return cls(spec, counts, int(counts.sum()))

    @property
    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros(self.spec.n_bins)
        return self.counts / self.total

    @property
    def centers(self) -> np.ndarray:
        return self.spec.centers


@dataclass(frozen=True, eq=False)
class ThreadMeans:
    histogram: Histogram
    means: np.ndarray          # una media por hilo con comentarios que pasan el filtro
    excluded: int              # hilos sin comentarios que pasen el filtro


@dataclass(frozen=True, eq=False)
class ClusterCurve:
    thresholds: np.ndarray
    mean_sizes: np.ndarray           # NaN donde no hay clusters
    cluster_counts: np.ndarray
    clustered_comments: np.ndarray
    pooling: str = "clusters"


def histogram(dataset: Dataset, field: str, spec: BinSpec) -> Histogram:
    return Histogram.of(dataset.values(check_field(field)), spec)


def thread_means(
    dataset: Dataset,
    field: str = "p_pos",
    subjectivity_filter: Optional[float] = None,
    spec: Optional[BinSpec] = None,
) -> ThreadMeans:
    spec = spec or BinSpec(settings.BIN_WIDTH)
    values = dataset.values(check_field(field))
    codes = dataset.thread_codes
    if subjectivity_filter is None:
        keep = np.ones(dataset.n_comments, dtype=bool)
    else:
        keep = dataset.p_sub >= subjectivity_filter

    # suma en orden canónico dentro de cada hilo: la media no depende del orden
    order = np.lexsort((values, codes))
    weights = np.where(keep, values, 0.0)[order]
    sums = np.bincount(codes[order], weights=weights, minlength=dataset.n_threads)
    n = np.bincount(codes, weights=keep.astype(np.float64), minlength=dataset.n_threads)

    has = n > 0
    means = sums[has] / n[has]
    # la media de valores en [0, 1] puede salirse por redondeo en el último bit
    means = np.clip(means, 0.0, 1.0)
    return ThreadMeans(Histogram.of(means, spec), means, int((~has).sum()))


def find_clusters(thread: Thread, T: float) -> List[int]:
    """Longitudes de las rachas maximales con p_sub >= T, en orden de aparición."""
    member = np.asarray(thread.p_sub) >= T
    padded = np.concatenate(([False], member, [False])).astype(np.int8)
    d = np.diff(padded)
    starts, ends = np.flatnonzero(d == 1), np.flatnonzero(d == -1)
    return (ends - starts).tolist()


def default_thresholds(step: Optional[float] = None) -> np.ndarray:
    step = step or settings.THRESHOLD_STEP
    return np.round(np.arange(0.0, 1.0 + step / 2, step), 10)


def _check_grid(thresholds) -> np.ndarray:
    grid = np.asarray(thresholds, dtype=np.float64).ravel()
    if grid.size == 0:
        raise ArgumentError("La malla de umbrales T está vacía")
    if np.any(np.isnan(grid)) or grid.min() < 0 or grid.max() > 1:
        raise ArgumentError("Los umbrales T deben estar en [0, 1]")
    if np.any(np.diff(grid) <= 0):
        raise ArgumentError("Los umbrales T deben ser estrictamente crecientes")
    return grid


def cluster_curve(
    dataset: Dataset,
    thresholds: Optional[Sequence[float]] = None,
    pooling: Pooling = "clusters",
) -> ClusterCurve:
    """
    <S(T)> = comentarios en clusters / número de clusters, agrupando todos los
    hilos (pooling="clusters"), o media por hilo de las medias por hilo
    (pooling="threads"). Los clusters nunca cruzan el borde de un hilo.
    """
    if pooling not in ("clusters", "threads"):
        raise ArgumentError(f"pooling desconocido: {pooling!r}")
    grid = _check_grid(default_thresholds() if thresholds is None else thresholds)
    sub = dataset.p_sub
    codes = dataset.thread_codes
    first = dataset.positions == 0

    sizes = np.full(grid.size, np.nan)
    counts = np.zeros(grid.size, dtype=np.int64)
    clustered = np.zeros(grid.size, dtype=np.int64)
    for k, T in enumerate(grid):
        member = sub >= T
        prev = np.zeros_like(member)
        prev[1:] = member[:-1]
        start = member & ~(prev & ~first)
        counts[k] = int(start.sum())
        clustered[k] = int(member.sum())
        if counts[k] == 0:
            continue
        if pooling == "clusters":
            sizes[k] = clustered[k] / counts[k]
        else:
            per_n = np.bincount(codes, weights=start, minlength=dataset.n_threads)
            per_c = np.bincount(codes, weights=member, minlength=dataset.n_threads)
            ok = per_n > 0
            sizes[k] = float(np.mean(per_c[ok] / per_n[ok]))
    return ClusterCurve(grid, sizes, counts, clustered, pooling)


def cluster_gap(curve: ClusterCurve, baseline: ClusterCurve) -> np.ndarray:
    """Aumento relativo de <S(T)> sobre la referencia, en %, por umbral."""
    if not np.array_equal(curve.thresholds, baseline.thresholds):
        raise ArgumentError("Las curvas deben compartir la malla de umbrales")
    with np.errstate(invalid="ignore", divide="ignore"):
        return 100.0 * (curve.mean_sizes / baseline.mean_sizes - 1.0)


def describe(
    dataset: Dataset,
    sub_cut: Optional[float] = None,
    plus: Optional[float] = None,
    minus: Optional[float] = None,
) -> dict:
    sub_cut = settings.SUB_CUT if sub_cut is None else sub_cut
    plus = settings.PLUS_THRESHOLD if plus is None else plus
    minus = settings.MINUS_THRESHOLD if minus is None else minus
    lengths = dataset.lengths
    out = {
        "source": dataset.source_label,
        "threads": dataset.n_threads,
        "comments": dataset.n_comments,
        "positive": int((dataset.p_pos >= plus).sum()),
        "negative": int((dataset.p_pos <= minus).sum()),
        "subjective": int((dataset.p_sub >= sub_cut).sum()),
    }
    if dataset.n_threads:
        out.update({
            "length_min": int(lengths.min()),
            "length_mean": float(lengths.mean()),
            "length_median": float(np.median(lengths)),
            "length_max": int(lengths.max()),
            "mean_p_pos": float(dataset.p_pos.mean()),
            "mean_p_sub": float(dataset.p_sub.mean()),
        })
    return out
