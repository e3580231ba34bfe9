# app/services/correlations.py
"""
Dependencia secuencial entre comentarios consecutivos de un hilo.

  C(x_n, x_{n-1}) = p(x_n | x_{n-1}) / p(x_n)          (1 si son independientes)
  PMI             = log C
  I(X, Y)         = sum p(x, y) log[p(x, y) / (p(x) p(y))]
  C+(x_n)         = p(x_n | x_{n-1} >= 0.9, x_{n-2} >= 0.9) / p(x_n)
  C-(x_n)         = p(x_n | x_{n-1} <= 0.1, x_{n-2} <= 0.1) / p(x_n)

Todo se calcula sobre conteos binneados; pares y tripletes nunca cruzan el
borde de un hilo.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError, EmptyResultError, UndefinedCurveError
from app.core.models import BinSpec, Dataset, check_field
from app.services.nullmodels import global_shuffle, thread_shuffle
from app.utils.rng import derive_seeds, make_rng, resolve_seed

logger = logging.getLogger(__name__)

Base = Union[str, float]


def log_divisor(base: Optional[Base] = None) -> float:
    """ln(base); 'e' (o None con LOG_BASE=e) da nats."""
    base = settings.LOG_BASE if base is None else base
    if str(base).lower() in ("e", "nat", "nats"):
        return 1.0
    try:
        b = float(base)
    except (TypeError, ValueError):
        raise ArgumentError(f"Base de logaritmo inválida: {base!r}") from None
    if b <= 0 or b == 1:
        raise ArgumentError(f"Base de logaritmo inválida: {base!r}")
    return math.log(b)


def _min_count(min_count: Optional[int]) -> int:
    min_count = settings.MIN_COUNT if min_count is None else int(min_count)
    if min_count < 1:
        raise ArgumentError("min_count debe ser un entero positivo")
    return min_count


# ------------------------------------ Pares ------------------------------------

@dataclass(frozen=True, eq=False)
class PairCountMatrix:
    """counts[i, j] = nº de pares con x_{n-1} en el bin i y x_n en el bin j."""
    spec: BinSpec
    counts: np.ndarray
    total_pairs: int

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def joint(self) -> np.ndarray:
        if self.total_pairs == 0:
            raise EmptyResultError("No hay pares consecutivos")
        return self.counts / self.total_pairs

    def transpose(self) -> "PairCountMatrix":
        return PairCountMatrix(self.spec, self.counts.T.copy(), self.total_pairs)


def pair_counts(dataset: Dataset, field: str, spec: BinSpec) -> PairCountMatrix:
    bins = spec.digitize(dataset.values(check_field(field)))
    nxt = np.flatnonzero(dataset.positions >= 1)
    B = spec.n_bins
    flat = bins[nxt - 1] * B + bins[nxt]
    counts = np.bincount(flat, minlength=B * B).reshape(B, B).astype(np.int64)
    return PairCountMatrix(spec, counts, int(nxt.size))


# ------------------------------ Ratio de correlación ------------------------------

@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    spec: BinSpec
    values: np.ndarray          # NaN donde no está definida
    defined_mask: np.ndarray
    kind: str = "C"             # "C" | "PMI"


def correlation_ratio(pairs: PairCountMatrix, min_count: Optional[int] = None) -> CorrelationMatrix:
    min_count = _min_count(min_count)
    if pairs.total_pairs == 0:
        raise EmptyResultError("No hay pares consecutivos: C no está definida")
    counts = pairs.counts.astype(np.float64)
    row, col = pairs.row_totals, pairs.col_totals
    defined = (row >= min_count)[:, None] & (col >= min_count)[None, :] & (pairs.counts > 0)
    if not defined.any():
        raise EmptyResultError(f"Ninguna celda con al menos {min_count} conteos en fila y columna")
    with np.errstate(divide="ignore", invalid="ignore"):
        conditional = counts / row[:, None]
        marginal = col / pairs.total_pairs
        ratio = conditional / marginal[None, :]
    return CorrelationMatrix(pairs.spec, np.where(defined, ratio, np.nan), defined, "C")


def pmi_matrix(C: CorrelationMatrix, base: Optional[Base] = None) -> CorrelationMatrix:
    if C.kind != "C":
        raise ArgumentError("pmi_matrix espera una matriz de ratios C")
    safe = np.where(C.defined_mask, C.values, 1.0)
    pmi = np.log(safe) / log_divisor(base)
    return CorrelationMatrix(C.spec, np.where(C.defined_mask, pmi, np.nan), C.defined_mask.copy(), "PMI")


# ------------------------------ Información mutua ------------------------------

def _plug_in(counts: np.ndarray, total: int) -> float:
    p = counts / total
    outer = np.outer(p.sum(axis=1), p.sum(axis=0))
    nz = counts > 0
    return float(np.sum(p[nz] * np.log(p[nz] / outer[nz])))


def mutual_information(pairs: PairCountMatrix, base: Optional[Base] = None) -> float:
    """Estimador plug-in; >= 0 (se recorta el ruido de redondeo negativo)."""
    if pairs.total_pairs == 0:
        raise EmptyResultError("No hay pares consecutivos: I(X,Y) no está definida")
    return max(0.0, _plug_in(pairs.counts, pairs.total_pairs)) / log_divisor(base)


def miller_madow(pairs: PairCountMatrix, base: Optional[Base] = None) -> float:
    """Plug-in menos (celdas no nulas - filas - columnas + 1) / (2 N). Puede ser < 0."""
    if pairs.total_pairs == 0:
        raise EmptyResultError("No hay pares consecutivos: I(X,Y) no está definida")
    c = pairs.counts
    m_xy = int((c > 0).sum())
    m_x = int((pairs.row_totals > 0).sum())
    m_y = int((pairs.col_totals > 0).sum())
    bias = (m_xy - m_x - m_y + 1) / (2.0 * pairs.total_pairs)
    return (max(0.0, _plug_in(c, pairs.total_pairs)) - bias) / log_divisor(base)


def bootstrap_stderr(pairs: PairCountMatrix, reps: int, seed: int, base: Optional[Base] = None) -> float:
    """Error estándar del plug-in remuestreando la tabla conjunta (multinomial)."""
    if reps < 2 or pairs.total_pairs == 0:
        return float("nan")
    p = (pairs.counts / pairs.total_pairs).ravel()
    draws = make_rng(seed).multinomial(pairs.total_pairs, p, size=reps)
    shape = pairs.counts.shape
    values = [max(0.0, _plug_in(d.reshape(shape), pairs.total_pairs)) for d in draws]
    return float(np.std(values, ddof=1)) / log_divisor(base)


@dataclass(frozen=True)
class MIEstimate:
    label: str
    plug_in: float
    corrected: float
    stderr: float
    n_pairs: int


@dataclass(frozen=True)
class MIReport:
    field: str
    seed: int
    rows: Tuple[MIEstimate, ...]

    def row(self, label: str) -> MIEstimate:
        return next(r for r in self.rows if r.label == label)


def mi_report(
    dataset: Dataset,
    field: str,
    spec: BinSpec,
    seed: Optional[int] = None,
    reps: Optional[int] = None,
    base: Optional[Base] = None,
) -> MIReport:
    """I(X,Y) sin barajar, con barajado por hilo y con barajado global."""
    field = check_field(field)
    seed = resolve_seed(seed)
    reps = settings.BOOTSTRAP_REPS if reps is None else int(reps)
    s_thread, s_global, *boot = derive_seeds(seed, 5)

    variants = (
        ("no shuffle", dataset),
        ("thread shuffle", thread_shuffle(dataset, s_thread)),
        ("global shuffle", global_shuffle(dataset, s_global)),
    )
    rows = []
    for (label, ds), s_boot in zip(variants, boot):
        pairs = pair_counts(ds, field, spec)
        rows.append(MIEstimate(
            label=label,
            plug_in=mutual_information(pairs, base),
            corrected=miller_madow(pairs, base),
            stderr=bootstrap_stderr(pairs, reps, s_boot, base),
            n_pairs=pairs.total_pairs,
        ))
        logger.info("MI %s (%s): %.4f", label, field, rows[-1].plug_in)
    return MIReport(field, seed, tuple(rows))


# --------------------------- Correlaciones a tres pasos ---------------------------

@dataclass(frozen=True, eq=False)
class ThreeStepCurve:
    spec: BinSpec
    c_plus: np.ndarray              # NaN donde no está definida
    c_minus: np.ndarray
    plus_counts: np.ndarray         # x_n por bin tras dos comentarios positivos
    minus_counts: np.ndarray
    marginal_counts: np.ndarray     # x_n por bin sobre todos los tripletes
    plus_events: int
    minus_events: int
    triples: int
    plus_threshold: float
    minus_threshold: float

    @property
    def pair_counts(self) -> Tuple[int, int]:
        """Número de eventos condicionantes (C+, C-)."""
        return self.plus_events, self.minus_events


def three_step(
    dataset: Dataset,
    field: str = "p_pos",
    spec: Optional[BinSpec] = None,
    min_count: Optional[int] = None,
    plus: Optional[float] = None,
    minus: Optional[float] = None,
) -> ThreeStepCurve:
    spec = spec or BinSpec(settings.BIN_WIDTH)
    min_count = _min_count(min_count)
    plus = settings.PLUS_THRESHOLD if plus is None else plus
    minus = settings.MINUS_THRESHOLD if minus is None else minus

    values = dataset.values(check_field(field))
    n = np.flatnonzero(dataset.positions >= 2)
    if n.size == 0:
        raise UndefinedCurveError("No hay tripletes (todos los hilos tienen longitud < 3)")

    B = spec.n_bins
    bins_n = spec.digitize(values[n])
    # umbrales con la misma tolerancia que el binning: 0.89999999999 cuenta como 0.9
    x1, x2 = spec.scale(values[n - 1]), spec.scale(values[n - 2])
    hi, lo = spec.scale(plus), spec.scale(minus)
    marginal = np.bincount(bins_n, minlength=B)
    p_marginal = marginal / n.size
    usable = marginal >= min_count

    def curve(mask: np.ndarray):
        events = int(mask.sum())
        counts = np.bincount(bins_n[mask], minlength=B)
        if events == 0:
            return np.full(B, np.nan), counts, events
        with np.errstate(divide="ignore", invalid="ignore"):
            c = (counts / events) / p_marginal
        return np.where(usable, c, np.nan), counts, events

    c_plus, plus_counts, plus_events = curve((x1 >= hi) & (x2 >= hi))
    c_minus, minus_counts, minus_events = curve((x1 <= lo) & (x2 <= lo))
    for name, events in (("C+", plus_events), ("C-", minus_events)):
        if events == 0:
            logger.warning("%s sin eventos condicionantes: curva indefinida", name)

    return ThreeStepCurve(
        spec, c_plus, c_minus, plus_counts, minus_counts, marginal,
        plus_events, minus_events, int(n.size), plus, minus,
    )
