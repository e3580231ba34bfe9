# app/core/models.py
"""
Modelo de datos compartido por estimadores, modelos nulos y generadores.

- Comment: un comentario anotado (posición n dentro del hilo + P_pos, P_sub)
- Thread:  cadena ordenada x_1..x_N de comentarios
- Dataset: colección de hilos + etiqueta de procedencia
- BinSpec: binning uniforme de [0, 1] que usan todos los estimadores discretos

El Dataset es columnar (offsets + dos arrays float64 de solo lectura) para que
los estimadores trabajen vectorizados sobre millones de comentarios; Thread y
Comment son vistas que se materializan bajo demanda.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, List, Literal, Optional, Tuple

import numpy as np

from app.core.errors import ArgumentError, ContiguityError, DomainError, DuplicateRecordError

Field = Literal["p_pos", "p_sub"]
FIELDS: Tuple[str, ...] = ("p_pos", "p_sub")
EdgeRule = Literal["left", "right"]


def check_field(field: str) -> str:
    if field not in FIELDS:
        raise ArgumentError(f"Campo desconocido: {field!r} (usa p_pos o p_sub)")
    return field


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


# ------------------------------- Comentarios e hilos -------------------------------

@dataclass(frozen=True)
class Comment:
    index: int
    p_pos: float
    p_sub: float


@dataclass(frozen=True, eq=False)
class Thread:
    thread_id: str
    p_pos: np.ndarray
    p_sub: np.ndarray

    def __post_init__(self):
        pos, sub = _frozen(self.p_pos), _frozen(self.p_sub)
        if pos.ndim != 1 or pos.shape != sub.shape:
            raise ArgumentError(f"Hilo {self.thread_id}: p_pos y p_sub con longitudes distintas")
        if pos.size == 0:
            raise ArgumentError(f"Hilo {self.thread_id}: un hilo necesita al menos un comentario")
        object.__setattr__(self, "thread_id", str(self.thread_id))
        object.__setattr__(self, "p_pos", pos)
        object.__setattr__(self, "p_sub", sub)

    @classmethod
    def from_comments(cls, thread_id, comments: Iterable[Comment]) -> "Thread":
        """Ordena por índice y exige índices únicos y contiguos desde 0."""
        ordered = sorted(comments, key=lambda c: c.index)
        for expected, c in enumerate(ordered):
            if expected > 0 and c.index == ordered[expected - 1].index:
                raise DuplicateRecordError(f"Hilo {thread_id}: índice {c.index} repetido")
            if c.index != expected:
                raise ContiguityError(
                    f"Hilo {thread_id}: índices no contiguos (se esperaba {expected}, llegó {c.index})"
                )
        return cls(
            thread_id,
            [c.p_pos for c in ordered],
            [c.p_sub for c in ordered],
        )

    def __len__(self) -> int:
        return int(self.p_pos.size)

    @property
    def comments(self) -> Tuple[Comment, ...]:
        return tuple(
            Comment(i, float(p), float(s)) for i, (p, s) in enumerate(zip(self.p_pos, self.p_sub))
        )

    def values(self, field: str) -> np.ndarray:
        return getattr(self, check_field(field))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Thread):
            return NotImplemented
        return (
            self.thread_id == other.thread_id
            and np.array_equal(self.p_pos, other.p_pos)
            and np.array_equal(self.p_sub, other.p_sub)
        )


# ------------------------------------ Dataset ------------------------------------

@dataclass(frozen=True, eq=False)
class Dataset:
    thread_ids: Tuple[str, ...]
    offsets: np.ndarray
    p_pos: np.ndarray
    p_sub: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        ids = tuple(str(t) for t in self.thread_ids)
        offsets = np.array(self.offsets, dtype=np.int64)
        offsets.setflags(write=False)
        pos, sub = _frozen(self.p_pos), _frozen(self.p_sub)
        if pos.ndim != 1 or pos.shape != sub.shape:
            raise ArgumentError("p_pos y p_sub deben tener la misma longitud")
        if offsets.ndim != 1 or offsets.size != len(ids) + 1 or offsets[0] != 0 or offsets[-1] != pos.size:
            raise ArgumentError("offsets inconsistentes con los hilos/comentarios")
        if np.any(np.diff(offsets) < 1):
            raise ArgumentError("Todo hilo almacenado debe tener al menos un comentario")
        object.__setattr__(self, "thread_ids", ids)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "p_pos", pos)
        object.__setattr__(self, "p_sub", sub)

    # --- constructores ---
    @classmethod
    def empty(cls, source_label: str = "") -> "Dataset":
        return cls((), np.zeros(1, dtype=np.int64), np.empty(0), np.empty(0), source_label)

    @classmethod
    def from_arrays(cls, thread_ids, lengths, p_pos, p_sub, source_label: str = "") -> "Dataset":
        lengths = np.asarray(lengths, dtype=np.int64)
        offsets = np.concatenate(([0], np.cumsum(lengths))).astype(np.int64)
        return cls(tuple(thread_ids), offsets, p_pos, p_sub, source_label)

    @classmethod
    def from_threads(cls, threads: Iterable[Thread], source_label: str = "") -> "Dataset":
        threads = list(threads)
        if not threads:
            return cls.empty(source_label)
        return cls.from_arrays(
            [t.thread_id for t in threads],
            [len(t) for t in threads],
            np.concatenate([t.p_pos for t in threads]),
            np.concatenate([t.p_sub for t in threads]),
            source_label,
        )

    # --- tamaños y vistas ---
    @property
    def n_threads(self) -> int:
        return len(self.thread_ids)

    @property
    def n_comments(self) -> int:
        return int(self.p_pos.size)

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    @cached_property
    def thread_codes(self) -> np.ndarray:
        """Para cada comentario, el número de hilo al que pertenece."""
        return np.repeat(np.arange(self.n_threads, dtype=np.int64), self.lengths)

    @cached_property
    def positions(self) -> np.ndarray:
        """Índice n (base 0) de cada comentario dentro de su hilo."""
        return np.arange(self.n_comments, dtype=np.int64) - np.repeat(self.offsets[:-1], self.lengths)

    def values(self, field: str) -> np.ndarray:
        return getattr(self, check_field(field))

    def thread(self, i: int) -> Thread:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return Thread(self.thread_ids[i], self.p_pos[lo:hi], self.p_sub[lo:hi])

    @property
    def threads(self) -> Tuple[Thread, ...]:
        return tuple(self)

    def __iter__(self) -> Iterator[Thread]:
        for i in range(self.n_threads):
            yield self.thread(i)

    # --- derivados (misma estructura de hilos) ---
    def with_values(self, p_pos=None, p_sub=None, source_label: Optional[str] = None) -> "Dataset":
        return Dataset(
            self.thread_ids,
            self.offsets,
            self.p_pos if p_pos is None else p_pos,
            self.p_sub if p_sub is None else p_sub,
            self.source_label if source_label is None else source_label,
        )

    def reversed_threads(self) -> "Dataset":
        codes = self.thread_codes
        src = self.offsets[:-1][codes] + self.lengths[codes] - 1 - self.positions
        return self.with_values(self.p_pos[src], self.p_sub[src], f"{self.source_label}|reversed")

    def __eq__(self, other) -> bool:
        # source_label es procedencia, no contenido
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.thread_ids == other.thread_ids
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.p_pos, other.p_pos)
            and np.array_equal(self.p_sub, other.p_sub)
        )


# ------------------------------------ Binning ------------------------------------

@dataclass(frozen=True)
class BinSpec:
    """
    Binning uniforme de [0, 1] en ceil(1/width) bins.

    edge_rule="left": los bordes interiores van al bin superior ([a, b)), y el
    último bin es cerrado, así [0.9, 1.0] es un solo bin con width=0.1.
    edge_rule="right": los bordes interiores van al bin inferior ((a, b]).
    """
    width: float = 0.1
    edge_rule: EdgeRule = "left"

    def __post_init__(self):
        if not (0 < self.width <= 1):
            raise ArgumentError(f"bin width debe estar en (0, 1], llegó {self.width}")
        if self.edge_rule not in ("left", "right"):
            raise ArgumentError(f"edge_rule desconocida: {self.edge_rule!r}")

    @property
    def n_bins(self) -> int:
        return max(1, math.ceil(round(1.0 / self.width, 9)))

    @property
    def edges(self) -> np.ndarray:
        return np.minimum(np.arange(self.n_bins + 1) * self.width, 1.0)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return (e[:-1] + e[1:]) / 2

    def scale(self, values) -> np.ndarray:
        """Valores en unidades de bin; redondeo para que 0.3/0.1 sea 3 y no 2.999..."""
        return np.round(np.asarray(values, dtype=np.float64) / self.width, 9)

    def digitize(self, values) -> np.ndarray:
        v = np.asarray(values, dtype=np.float64)
        bad = ~((v >= 0) & (v <= 1))
        if bad.any():
            raise DomainError(f"Valor {v[bad][0]!r} fuera de [0, 1]")
        scaled = self.scale(v)
        idx = np.floor(scaled) if self.edge_rule == "left" else np.ceil(scaled) - 1
        return np.clip(idx, 0, self.n_bins - 1).astype(np.int64)


def bin_of(value: float, spec: BinSpec) -> int:
    return int(spec.digitize([value])[0])


# ---------------------------------- Validación ----------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str               # "range" | "duplicate_thread_id" | "count"
    thread_id: str
    index: Optional[int]
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    n_threads: int
    n_comments: int
    violations: Tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "threads": self.n_threads,
            "comments": self.n_comments,
            "violations": [v.__dict__ for v in self.violations],
        }


def validate(dataset: Dataset) -> ValidationReport:
    """Reporta (no lanza) cada violación de invariantes con hilo e índice."""
    found: List[Violation] = []

    seen = Counter()
    for tid in dataset.thread_ids:
        seen[tid] += 1
        if seen[tid] == 2:
            found.append(Violation("duplicate_thread_id", tid, None, f"thread_id {tid!r} repetido"))

    for field in FIELDS:
        v = dataset.values(field)
        for i in np.flatnonzero(~((v >= 0) & (v <= 1))):
            found.append(Violation(
                "range",
                dataset.thread_ids[dataset.thread_codes[i]],
                int(dataset.positions[i]),
                f"{field}={v[i]!r} fuera de [0, 1]",
            ))

    if int(dataset.lengths.sum()) != dataset.n_comments:
        found.append(Violation("count", "", None, "la suma de longitudes no coincide con el total"))

    return ValidationReport(dataset.n_threads, dataset.n_comments, tuple(found))
