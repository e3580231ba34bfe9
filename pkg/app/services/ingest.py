# app/services/ingest.py
"""
Lectura/escritura de datasets anotados.

Formato: un registro por comentario con thread_id, index, p_pos, p_sub.
  - jsonl: un objeto por línea (campos extra se ignoran)
  - csv:   mismas cuatro columnas con cabecera

Los registros pueden venir en cualquier orden; los hilos se ordenan por primera
aparición y los comentarios por índice. Una sola pasada sobre el archivo.
"""
import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import (
    ArgumentError,
    ContiguityError,
    DomainError,
    DuplicateRecordError,
    InputNotFoundError,
    ParseError,
    WriteError,
)
from app.core.models import Dataset

logger = logging.getLogger(__name__)

FORMATS = ("jsonl", "csv")
COLUMNS = ("thread_id", "index", "p_pos", "p_sub")
# los índices se guardan en int64
MAX_INDEX = 2**62


@dataclass(frozen=True)
class RecordLine:
    thread_id: str
    index: int
    p_pos: float
    p_sub: float


def infer_format(path, fmt: Optional[str] = None) -> str:
    if fmt:
        if fmt not in FORMATS:
            raise ArgumentError(f"Formato desconocido: {fmt!r} (jsonl o csv)")
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".json", ".ndjson"):
        return "jsonl"
    if suffix == ".csv":
        return "csv"
    return settings.DEFAULT_FORMAT


# ------------------------------- Parseo de campos -------------------------------

def _index(raw, path, line: int) -> int:
    if isinstance(raw, bool):
        raise ParseError(path, line, f"index no entero: {raw!r}")
    if isinstance(raw, str):
        try:
            raw = int(raw.strip())
        except ValueError:
            raise ParseError(path, line, f"index no entero: {raw!r}") from None
    if not isinstance(raw, int):
        raise ParseError(path, line, f"index no entero: {raw!r}")
    if raw < 0:
        raise ParseError(path, line, f"index negativo: {raw}")
    if raw >= MAX_INDEX:
        raise ParseError(path, line, f"index demasiado grande: {raw}")
    return raw


def _probability(raw, name: str, path, line: int) -> float:
    if isinstance(raw, bool) or raw is None:
        raise ParseError(path, line, f"{name} no numérico: {raw!r}")
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ParseError(path, line, f"{name} no numérico: {raw!r}") from None
    if math.isnan(value) or not (0.0 <= value <= 1.0):
        raise DomainError(f"{path}:{line}: {name}={value!r} fuera de [0, 1]")
    return value


def _record(obj, path, line: int) -> RecordLine:
    if not isinstance(obj, dict):
        raise ParseError(path, line, "se esperaba un objeto")
    missing = [c for c in COLUMNS if c not in obj or obj[c] in (None, "")]
    if missing:
        raise ParseError(path, line, f"faltan campos {missing}")
    return RecordLine(
        thread_id=str(obj["thread_id"]),
        index=_index(obj["index"], path, line),
        p_pos=_probability(obj["p_pos"], "p_pos", path, line),
        p_sub=_probability(obj["p_sub"], "p_sub", path, line),
    )


def _decoded_lines(fh, path) -> Iterator[str]:
    """Decodifica línea a línea para poder ubicar bytes inválidos."""
    for line_no, raw in enumerate(fh, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(path, line_no, f"UTF-8 inválido en el byte {e.start}") from None


def iter_records(path, fmt: Optional[str] = None) -> Iterator[Tuple[int, RecordLine]]:
    """Genera (número de línea, registro) leyendo el archivo una sola vez."""
    path = Path(path)
    fmt = infer_format(path, fmt)
    if not path.is_file():
        raise InputNotFoundError(f"No existe el archivo de entrada: {path}")
    with path.open("rb") as fh:
        lines = _decoded_lines(fh, path)
        if fmt == "jsonl":
            for line_no, line in enumerate(lines, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as e:
                    raise ParseError(path, line_no, e.msg) from None
                yield line_no, _record(obj, path, line_no)
        else:
            reader = csv.DictReader(lines)
            try:
                fieldnames = reader.fieldnames
                if fieldnames is None:
                    return
                missing = [c for c in COLUMNS if c not in fieldnames]
                if missing:
                    raise ParseError(path, 1, f"cabecera sin columnas {missing}")
                for row in reader:
                    # line_num cuenta líneas físicas, cabecera incluida
                    yield reader.line_num, _record(row, path, reader.line_num)
            except csv.Error as e:
                raise ParseError(path, max(reader.line_num, 1), str(e)) from None


# ----------------------------------- Lectura -----------------------------------

def read_dataset(path, fmt: Optional[str] = None, source_label: Optional[str] = None) -> Dataset:
    path = Path(path)
    codes: dict = {}
    tid_codes: List[int] = []
    indices: List[int] = []
    pos: List[float] = []
    sub: List[float] = []
    lines: List[int] = []

    for line_no, rec in iter_records(path, fmt):
        code = codes.setdefault(rec.thread_id, len(codes))
        tid_codes.append(code)
        indices.append(rec.index)
        pos.append(rec.p_pos)
        sub.append(rec.p_sub)
        lines.append(line_no)

    label = source_label if source_label is not None else str(path)
    if not tid_codes:
        logger.info("Leído %s: dataset vacío", path)
        return Dataset.empty(label)

    thread_ids = list(codes)
    c = np.asarray(tid_codes, dtype=np.int64)
    idx = np.asarray(indices, dtype=np.int64)
    order = np.lexsort((idx, c))
    c, idx = c[order], idx[order]

    same = (c[1:] == c[:-1]) & (idx[1:] == idx[:-1])
    if same.any():
        k = int(np.flatnonzero(same)[0])
        first, second = sorted((lines[order[k]], lines[order[k + 1]]))
        raise DuplicateRecordError(
            f"{path}: registro duplicado (thread_id={thread_ids[c[k]]!r}, index={idx[k]}) "
            f"en las líneas {first} y {second}"
        )

    lengths = np.bincount(c, minlength=len(thread_ids))
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    expected = np.arange(c.size) - starts[c]
    gaps = idx != expected
    if gaps.any():
        k = int(np.flatnonzero(gaps)[0])
        raise ContiguityError(
            f"{path}: hilo {thread_ids[c[k]]!r} con índices no contiguos "
            f"(falta el índice {expected[k]})"
        )

    ds = Dataset.from_arrays(
        thread_ids,
        lengths,
        np.asarray(pos)[order],
        np.asarray(sub)[order],
        label,
    )
    logger.info("Leído %s: %d hilos, %d comentarios", path, ds.n_threads, ds.n_comments)
    return ds


# ---------------------------------- Escritura ----------------------------------

def iter_rows(dataset: Dataset) -> Iterator[RecordLine]:
    positions = dataset.positions
    codes = dataset.thread_codes
    for i in range(dataset.n_comments):
        yield RecordLine(
            dataset.thread_ids[codes[i]],
            int(positions[i]),
            float(dataset.p_pos[i]),
            float(dataset.p_sub[i]),
        )


def write_dataset(dataset: Dataset, path, fmt: Optional[str] = None) -> None:
    """Un registro por comentario, hilos en el orden del dataset, comentarios por índice."""
    path = Path(path)
    fmt = infer_format(path, fmt)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            if fmt == "jsonl":
                for r in iter_rows(dataset):
                    # json usa repr(float): ida y vuelta exacta en doble precisión
                    fh.write(json.dumps(
                        {"thread_id": r.thread_id, "index": r.index, "p_pos": r.p_pos, "p_sub": r.p_sub}
                    ))
                    fh.write("\n")
            else:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(COLUMNS)
                for r in iter_rows(dataset):
                    writer.writerow((r.thread_id, r.index, repr(r.p_pos), repr(r.p_sub)))
    except OSError as e:
        raise WriteError(f"No se pudo escribir {path}: {e}") from e
    logger.info("Escrito %s (%s): %d hilos, %d comentarios", path, fmt, dataset.n_threads, dataset.n_comments)
