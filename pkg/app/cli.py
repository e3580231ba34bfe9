# app/cli.py
"""
CLI: cada figura/tabla del análisis como subcomando que emite TSV.

  python -m app.cli hist      --input data.jsonl --field pos
  python -m app.cli means     --input data.jsonl --sub-cut 0.5 --seed 1
  python -m app.cli clusters  --input data.jsonl --thresholds 0.5,0.7,0.9
  python -m app.cli pmi       --input data.jsonl --field sub
  python -m app.cli mi        --input data.jsonl --seed 1
  python -m app.cli threestep --input data.jsonl
  python -m app.cli synth     --model markov --states 2 --stay 0.9 --output synth.jsonl
  python -m app.cli validate  --input data.jsonl
  python -m app.cli describe  --input data.jsonl

Datos a stdout (o --output), diagnósticos a stderr. Código 0 solo si no hubo errores.
"""
from dotenv import load_dotenv, find_dotenv
load_dotenv(find_dotenv(usecwd=True))  # carga .env antes de tocar settings

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from app.core.config import settings
from app.core.errors import ArgumentError, ThreadStatsError
from app.core.logs import setup_logging
from app.core.models import BinSpec, validate
from app.services import estimators, reports
from app.services.ingest import FORMATS, read_dataset, write_dataset
from app.services.synth import load_plan
from app.utils.rng import resolve_seed
from app.utils.tables import emit

logger = logging.getLogger("app.cli")

FIELD_NAMES = {"pos": "p_pos", "sub": "p_sub"}


# ---------------------------------- RunConfig ----------------------------------

def _parse_grid(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ArgumentError(f"--thresholds inválido: {text!r}") from None


def _parse_sub_cut(text: Optional[str]) -> Optional[float]:
    if text is None:
        return settings.SUB_CUT
    if text.strip().lower() in ("none", "off", "-"):
        return None
    value = float(text)
    if not (0 <= value <= 1):
        raise ArgumentError("--sub-cut debe estar en [0, 1]")
    return value


@dataclass(frozen=True)
class RunConfig:
    input: Optional[Path]
    format: Optional[str]
    field: str
    bin_width: float
    thresholds: Optional[List[float]]
    sub_cut: Optional[float]
    min_count: int
    seed: Optional[int]
    output: Optional[Path]
    log_base: str
    bootstrap: int
    pooling: str

    @classmethod
    def from_args(cls, args: argparse.Namespace, default_field: str = "pos") -> "RunConfig":
        min_count = settings.MIN_COUNT if args.min_count is None else args.min_count
        if min_count < 1:
            raise ArgumentError("--min-count debe ser un entero positivo")
        bootstrap = settings.BOOTSTRAP_REPS if getattr(args, "bootstrap", None) is None else args.bootstrap
        if bootstrap < 0:
            raise ArgumentError("--bootstrap no puede ser negativo")
        cfg = cls(
            input=Path(args.input) if getattr(args, "input", None) else None,
            format=args.format,
            field=FIELD_NAMES[args.field or default_field],
            bin_width=settings.BIN_WIDTH if args.bin_width is None else args.bin_width,
            thresholds=_parse_grid(args.thresholds),
            sub_cut=_parse_sub_cut(args.sub_cut),
            min_count=min_count,
            seed=args.seed,
            output=Path(args.output) if args.output else None,
            log_base=args.log_base or settings.LOG_BASE,
            bootstrap=bootstrap,
            pooling=args.pooling,
        )
        cfg.spec  # valida bin width
        return cfg

    @property
    def spec(self) -> BinSpec:
        return BinSpec(self.bin_width)

    def dataset(self):
        return read_dataset(self.input, self.format)


# ---------------------------------- Comandos ----------------------------------

def cmd_hist(cfg: RunConfig) -> Tuple[str, int]:
    return reports.hist_table(cfg.dataset(), cfg.field, cfg.spec).tsv(), 0


def cmd_means(cfg: RunConfig) -> Tuple[str, int]:
    seed = resolve_seed(cfg.seed)
    return reports.means_table(cfg.dataset(), cfg.spec, cfg.sub_cut, seed).tsv(), 0


def cmd_clusters(cfg: RunConfig) -> Tuple[str, int]:
    seed = resolve_seed(cfg.seed)
    return reports.clusters_table(cfg.dataset(), cfg.thresholds, seed, cfg.pooling).tsv(), 0


def cmd_pmi(cfg: RunConfig) -> Tuple[str, int]:
    table = reports.pmi_table(cfg.dataset(), cfg.field, cfg.spec, cfg.min_count, cfg.log_base)
    return table.tsv(), 0


def cmd_mi(cfg: RunConfig) -> Tuple[str, int]:
    seed = resolve_seed(cfg.seed)
    table = reports.mi_table(cfg.dataset(), cfg.field, cfg.spec, seed, cfg.bootstrap, cfg.log_base)
    return table.tsv(), 0


def cmd_threestep(cfg: RunConfig) -> Tuple[str, int]:
    return reports.threestep_table(cfg.dataset(), cfg.spec, cfg.min_count, field=cfg.field).tsv(), 0


def cmd_validate(cfg: RunConfig) -> Tuple[str, int]:
    report = validate(cfg.dataset())
    if not report.ok:
        logger.error("%d violaciones encontradas", len(report.violations))
    return json.dumps(report.as_dict(), indent=2) + "\n", 0 if report.ok else 1


def cmd_describe(cfg: RunConfig) -> Tuple[str, int]:
    summary = estimators.describe(cfg.dataset(), cfg.sub_cut)
    return json.dumps(summary, indent=2) + "\n", 0


def cmd_synth(cfg: RunConfig, args: argparse.Namespace) -> Tuple[str, int]:
    if cfg.output is None:
        raise ArgumentError("synth necesita --output para el dataset generado")
    # los flags pisan al archivo
    overrides = {
        "KIND": args.model,
        "N_STATES": args.states,
        "STAY": args.stay,
        "THREADS": args.threads,
        "MEAN_LENGTH": args.mean_length,
        "LENGTH_LAW": args.length_law,
        "COUPLING": args.coupling,
        "MARGINAL": args.marginal,
        "BIN_WIDTH": args.bin_width,
        "JITTER": "false" if args.no_jitter else None,
        "SEED": cfg.seed,
    }
    plan = load_plan(args.config, overrides)
    dataset = plan.generate()
    report = validate(dataset)
    if not report.ok:
        logger.error("El dataset generado no valida: %d violaciones", len(report.violations))
        return json.dumps(report.as_dict(), indent=2) + "\n", 1
    write_dataset(dataset, cfg.output, cfg.format)
    out = {
        "kind": plan.kind,
        "seed": plan.config.seed,
        "threads": dataset.n_threads,
        "comments": dataset.n_comments,
        "output": str(cfg.output),
        "oracles": plan.oracles(),
    }
    return json.dumps(out, indent=2) + "\n", 0


# ----------------------------------- Parser -----------------------------------

COMMANDS: Dict[str, Tuple[Callable, str, str]] = {
    # nombre: (handler, campo por defecto, ayuda)
    "hist": (cmd_hist, "pos", "histograma de P_pos / P_sub"),
    "means": (cmd_means, "pos", "distribución de <P_pos> por hilo vs remuestreo IID"),
    "clusters": (cmd_clusters, "sub", "<S(T)> con barajado por hilo y global"),
    "pmi": (cmd_pmi, "sub", "matriz PMI de pares consecutivos"),
    "mi": (cmd_mi, "pos", "información mutua: sin barajar / por hilo / global"),
    "threestep": (cmd_threestep, "pos", "correlaciones a tres pasos C+ / C-"),
    "validate": (cmd_validate, "pos", "valida invariantes del dataset"),
    "describe": (cmd_describe, "pos", "resumen del dataset"),
    "synth": (cmd_synth, "pos", "genera un dataset sintético e imprime sus oráculos"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--field", choices=sorted(FIELD_NAMES), default=None)
    common.add_argument("--bin-width", type=float, default=None)
    common.add_argument("--thresholds", default=None, help="umbrales T separados por comas")
    common.add_argument("--sub-cut", default=None, help="corte de P_sub para 'subjetivo' ('none' lo desactiva)")
    common.add_argument("--min-count", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--output", default=None)
    common.add_argument("--log-base", default=None, help="e, 2 o 10")
    common.add_argument("--log-level", default=None)

    parser = argparse.ArgumentParser(prog="python -m app.cli", description="Estadísticas emocionales de hilos de comentarios")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name != "synth":
            p.add_argument("--input", required=True)
        if name == "mi":
            p.add_argument("--bootstrap", type=int, default=None, help="réplicas bootstrap para el error")
        if name == "clusters":
            p.add_argument("--pooling", choices=("clusters", "threads"), default="clusters")
        if name == "synth":
            p.add_argument("--config", default=None, help="archivo key=value del generador")
            p.add_argument("--model", choices=("iid", "markov"), default=None)
            p.add_argument("--states", type=int, default=None)
            p.add_argument("--stay", type=float, default=None)
            p.add_argument("--threads", type=int, default=None)
            p.add_argument("--mean-length", type=float, default=None)
            p.add_argument("--length-law", choices=("fixed", "geometric"), default=None)
            p.add_argument("--coupling", choices=("independent", "shared"), default=None)
            p.add_argument("--marginal", default=None)
            p.add_argument("--no-jitter", action="store_true")
        if name != "clusters":
            p.set_defaults(pooling="clusters")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or settings.LOG_LEVEL)
    handler, default_field, _ = COMMANDS[args.command]
    try:
        cfg = RunConfig.from_args(args, default_field)
        if args.command == "synth":
            text, code = handler(cfg, args)
            emit(text, None, sys.stdout)
        else:
            text, code = handler(cfg)
            emit(text, cfg.output, sys.stdout)
    except ThreadStatsError as e:
        logger.error("%s", e)
        return 1
    except ValueError as e:
        logger.error("Argumento inválido: %s", e)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
