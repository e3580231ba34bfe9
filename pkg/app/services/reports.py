# app/services/reports.py
"""
Tablas listas para graficar, una por figura/tabla del análisis. Las usan tanto
la CLI (TSV con cabecera '#') como la API (JSON con "rows" y "params").
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from app.core.models import BinSpec, Dataset
from app.services import correlations as corr
from app.services import estimators as est
from app.services.nullmodels import global_shuffle, iid_resample, thread_shuffle
from app.utils.rng import derive_seeds, resolve_seed
from app.utils.tables import json_safe, records, render_tsv


@dataclass
class Table:
    frame: pd.DataFrame
    header: Dict[str, object] = field(default_factory=dict)
    index: bool = False

    def tsv(self) -> str:
        return render_tsv(self.frame, self.header, index=self.index)

    def as_json(self) -> dict:
        frame = self.frame.reset_index() if self.index else self.frame
        return {"params": {k: json_safe(v) for k, v in self.header.items()}, "rows": records(frame)}


def _spec_header(spec: BinSpec) -> dict:
    return {"bin_width": spec.width, "edge_rule": spec.edge_rule}


def _fmt_range(values: np.ndarray) -> str:
    v = values[np.isfinite(values)]
    if v.size == 0:
        return "NA"
    return f"{v.min():.1f}% .. {v.max():.1f}%"


def hist_table(dataset: Dataset, field: str, spec: BinSpec) -> Table:
    h = est.histogram(dataset, field, spec)
    edges = spec.edges
    frame = pd.DataFrame({
        "bin_lo": edges[:-1],
        "bin_hi": edges[1:],
        "bin_center": spec.centers,
        "count": h.counts,
        "frequency": h.frequencies,
    })
    header = {"pipeline": "histogram", "field": field, **_spec_header(spec),
              "source": dataset.source_label, "total": h.total}
    return Table(frame, header)


def means_table(dataset: Dataset, spec: BinSpec, sub_cut: Optional[float], seed: Optional[int]) -> Table:
    seed = resolve_seed(seed)
    data = est.thread_means(dataset, "p_pos", sub_cut, spec)
    baseline = est.thread_means(iid_resample(dataset, "p_pos", seed), "p_pos", sub_cut, spec)
    frame = pd.DataFrame({
        "bin_center": spec.centers,
        "data_count": data.histogram.counts,
        "data_freq": data.histogram.frequencies,
        "baseline_count": baseline.histogram.counts,
        "baseline_freq": baseline.histogram.frequencies,
    })
    header = {
        "pipeline": "thread means <p_pos> vs iid resample",
        "seed": seed,
        "sub_cut": "none" if sub_cut is None else sub_cut,
        **_spec_header(spec),
        "source": dataset.source_label,
        "threads_used": int(data.means.size),
        "threads_excluded": data.excluded,
        "baseline_threads_excluded": baseline.excluded,
    }
    return Table(frame, header)


def clusters_table(
    dataset: Dataset,
    thresholds: Optional[Sequence[float]],
    seed: Optional[int],
    pooling: est.Pooling = "clusters",
) -> Table:
    seed = resolve_seed(seed)
    s_thread, s_global = derive_seeds(seed, 2)
    data = est.cluster_curve(dataset, thresholds, pooling)
    by_thread = est.cluster_curve(thread_shuffle(dataset, s_thread), data.thresholds, pooling)
    by_global = est.cluster_curve(global_shuffle(dataset, s_global), data.thresholds, pooling)
    frame = pd.DataFrame({
        "T": data.thresholds,
        "data": data.mean_sizes,
        "thread_shuffled": by_thread.mean_sizes,
        "global_shuffled": by_global.mean_sizes,
    })
    header = {
        "pipeline": "<S(T)> subjective cluster size",
        "seed": seed,
        "pooling": pooling,
        "source": dataset.source_label,
        "gap_vs_thread_shuffle": _fmt_range(est.cluster_gap(data, by_thread)),
        "gap_vs_global_shuffle": _fmt_range(est.cluster_gap(data, by_global)),
    }
    return Table(frame, header)


def pmi_table(dataset: Dataset, field: str, spec: BinSpec, min_count: Optional[int], base=None) -> Table:
    pairs = corr.pair_counts(dataset, field, spec)
    pmi = corr.pmi_matrix(corr.correlation_ratio(pairs, min_count), base)
    labels = [f"{c:.4g}" for c in spec.centers]
    frame = pd.DataFrame(pmi.values, index=pd.Index(labels, name="x_prev\\x_next"), columns=labels)
    header = {
        "pipeline": "PMI = log C(x_n, x_n-1)",
        "field": field,
        **_spec_header(spec),
        "min_count": min_count,
        "log_base": base,
        "source": dataset.source_label,
        "total_pairs": pairs.total_pairs,
        "defined_cells": int(pmi.defined_mask.sum()),
    }
    return Table(frame, header, index=True)


def mi_table(dataset: Dataset, field: str, spec: BinSpec, seed: Optional[int], reps: Optional[int] = None, base=None) -> Table:
    report = corr.mi_report(dataset, field, spec, seed, reps, base)
    frame = pd.DataFrame({
        "model": [r.label for r in report.rows],
        "mi_plugin": [r.plug_in for r in report.rows],
        "mi_miller_madow": [r.corrected for r in report.rows],
        "stderr": [r.stderr for r in report.rows],
        "n_pairs": [r.n_pairs for r in report.rows],
    })
    header = {
        "pipeline": "mutual information of consecutive comments",
        "field": field,
        "seed": report.seed,
        **_spec_header(spec),
        "log_base": base,
        "source": dataset.source_label,
    }
    return Table(frame, header)


def threestep_table(
    dataset: Dataset,
    spec: BinSpec,
    min_count: Optional[int],
    plus: Optional[float] = None,
    minus: Optional[float] = None,
    field: str = "p_pos",
) -> Table:
    curve = corr.three_step(dataset, field, spec, min_count, plus, minus)
    frame = pd.DataFrame({
        "bin_center": spec.centers,
        "c_plus": curve.c_plus,
        "c_minus": curve.c_minus,
        "plus_count": curve.plus_counts,
        "minus_count": curve.minus_counts,
        "marginal_count": curve.marginal_counts,
    })
    header = {
        "pipeline": "three-step correlations C+ / C-",
        "field": field,
        "plus_condition": f"x_n-1 >= {curve.plus_threshold} and x_n-2 >= {curve.plus_threshold}",
        "minus_condition": f"x_n-1 <= {curve.minus_threshold} and x_n-2 <= {curve.minus_threshold}",
        "reference_level": "C = 1 (no correlation)",
        **_spec_header(spec),
        "source": dataset.source_label,
        "triples": curve.triples,
        "plus_events": curve.plus_events,
        "minus_events": curve.minus_events,
    }
    return Table(frame, header)
