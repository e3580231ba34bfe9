# app/utils/tables.py
import io
import math
from pathlib import Path
from typing import Dict, Optional, TextIO

import pandas as pd

from app.core.errors import WriteError

NA = "NA"

def header_lines(header: Dict[str, object]) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in header.items())

def render_tsv(df: pd.DataFrame, header: Optional[Dict[str, object]] = None, index: bool = False) -> str:
    """TSV con cabecera de comentarios '#'; NaN se emite como NA."""
    buf = io.StringIO()
    buf.write(header_lines(header or {}))
    df.to_csv(buf, sep="\t", index=index, na_rep=NA, float_format="%.10g", lineterminator="\n")
    return buf.getvalue()

def emit(text: str, output: Optional[Path], stream: TextIO) -> None:
    if output is None:
        stream.write(text)
        return
    try:
        Path(output).write_text(text, encoding="utf-8")
    except OSError as e:
        raise WriteError(f"No se pudo escribir {output}: {e}") from e

def json_safe(value):
    """NaN/inf no son JSON válido: pasan a None."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value

def records(df: pd.DataFrame) -> list:
    return [{k: json_safe(v) for k, v in row.items()} for row in df.to_dict(orient="records")]
