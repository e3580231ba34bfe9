# app/services/synth.py
"""
Datasets sintéticos con estructura estadística conocida y sus oráculos
analíticos (para validar cada estimador).

- generate_iid:    cada valor independiente de una marginal (hipótesis nula)
- generate_markov: cadena de Markov de primer orden sobre estados = centros de bin
- mi_oracle / threestep_oracle / cluster_size_oracle: valores exactos esperados

Los generadores consumen un único flujo PCG64 en orden fijo: misma config y
misma semilla dan el mismo dataset bit a bit.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np
from dotenv import dotenv_values
from scipy import stats
from scipy.linalg import null_space

from app.core.errors import ArgumentError, InputNotFoundError, OracleError
from app.core.models import BinSpec, Dataset
from app.services.correlations import Base, log_divisor
from app.services.estimators import Histogram
from app.utils.rng import make_rng, resolve_seed

logger = logging.getLogger(__name__)

ROW_TOL = 1e-12


# ---------------------------------- Marginales ----------------------------------

@dataclass(frozen=True, eq=False)
class AtomMarginal:
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if v.size == 0 or v.shape != w.shape:
            raise ArgumentError("Marginal atómica: valores y pesos con formas distintas o vacíos")
        if np.any((v < 0) | (v > 1)) or np.any(w < 0) or w.sum() <= 0:
            raise ArgumentError("Marginal atómica: valores fuera de [0, 1] o pesos no normalizables")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w / w.sum())

    @classmethod
    def delta(cls, value: float) -> "AtomMarginal":
        return cls([value], [1.0])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.values[rng.choice(self.values.size, size=size, p=self.weights)]


@dataclass(frozen=True)
class BetaMixture:
    """Mezcla de betas: componentes (peso, a, b)."""
    components: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        comps = tuple(tuple(float(x) for x in c) for c in self.components)
        if not comps or any(len(c) != 3 for c in comps):
            raise ArgumentError("BetaMixture necesita componentes (peso, a, b)")
        if any(w < 0 or a <= 0 or b <= 0 for w, a, b in comps) or sum(c[0] for c in comps) <= 0:
            raise ArgumentError("BetaMixture: pesos >= 0 y parámetros a, b > 0")
        object.__setattr__(self, "components", comps)

    @classmethod
    def extremes(cls) -> "BetaMixture":
        # bimodal con masa en 0 y 1 y algo de fondo uniforme
        return cls(((0.45, 0.5, 3.0), (0.45, 3.0, 0.5), (0.10, 1.0, 1.0)))

    @classmethod
    def uniform(cls) -> "BetaMixture":
        return cls(((1.0, 1.0, 1.0),))

    @property
    def weights(self) -> np.ndarray:
        w = np.array([c[0] for c in self.components])
        return w / w.sum()

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        a = np.array([c[1] for c in self.components])
        b = np.array([c[2] for c in self.components])
        k = rng.choice(len(self.components), size=size, p=self.weights)
        return rng.beta(a[k], b[k])

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return sum(w * stats.beta.cdf(x, a, b) for w, (_, a, b) in zip(self.weights, self.components))

    def bin_masses(self, spec: BinSpec) -> np.ndarray:
        """Integral analítica de la densidad en cada bin."""
        return np.diff(self.cdf(spec.edges))

    def tail(self, threshold: float) -> float:
        return float(1.0 - self.cdf(threshold))


@dataclass(frozen=True, eq=False)
class HistogramMarginal:
    """Bin según la frecuencia del histograma, luego uniforme dentro del bin."""
    histogram: Histogram

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.histogram.total == 0:
            raise ArgumentError("Histograma vacío: marginal no normalizable")
        edges = self.histogram.spec.edges
        k = rng.choice(self.histogram.spec.n_bins, size=size, p=self.histogram.frequencies)
        return rng.uniform(edges[k], edges[k + 1])


Marginal = Union[AtomMarginal, BetaMixture, HistogramMarginal]


def as_marginal(marginal) -> Marginal:
    if isinstance(marginal, Histogram):
        return HistogramMarginal(marginal)
    if isinstance(marginal, (AtomMarginal, BetaMixture, HistogramMarginal)):
        return marginal
    raise ArgumentError(f"Marginal no soportada: {type(marginal).__name__}")


# ------------------------------- Modelo de Markov -------------------------------

@dataclass(frozen=True, eq=False)
class MarkovModel:
    states: np.ndarray          # valores en [0, 1] (centros de bin)
    transition: np.ndarray      # B x B estocástica por filas
    initial: np.ndarray
    jitter: bool = False        # ruido uniforme dentro del bin de cada estado
    bin_width: float = 0.1

    def __post_init__(self):
        s = np.asarray(self.states, dtype=np.float64).ravel()
        P = np.asarray(self.transition, dtype=np.float64)
        p0 = np.asarray(self.initial, dtype=np.float64).ravel()
        B = s.size
        if B == 0 or P.shape != (B, B) or p0.shape != (B,):
            raise ArgumentError("MarkovModel: formas incompatibles entre estados, transición e inicial")
        if np.any((s < 0) | (s > 1)):
            raise ArgumentError("MarkovModel: estados fuera de [0, 1]")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1) > ROW_TOL):
            raise ArgumentError("Matriz de transición no estocástica")
        if np.any(p0 < 0) or abs(p0.sum() - 1) > ROW_TOL:
            raise ArgumentError("Distribución inicial no estocástica")
        BinSpec(self.bin_width)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "initial", p0)

    @property
    def n_states(self) -> int:
        return int(self.states.size)

    @property
    def spec(self) -> BinSpec:
        return BinSpec(self.bin_width)

    @classmethod
    def persistent(cls, n_states: int = 2, stay: float = 0.9, bin_width: float = 0.1, jitter: bool = True) -> "MarkovModel":
        """
        Estados repartidos sobre los centros de bin (2 estados: 0.05 y 0.95 con
        width=0.1), probabilidad `stay` de repetir estado y el resto uniforme.
        Inicial uniforme, que es también la estacionaria.
        """
        spec = BinSpec(bin_width)
        if not (1 <= n_states <= spec.n_bins):
            raise ArgumentError(f"n_states debe estar en [1, {spec.n_bins}]")
        if not (0 <= stay <= 1):
            raise ArgumentError("stay debe estar en [0, 1]")
        picks = np.round(np.linspace(0, spec.n_bins - 1, n_states)).astype(int)
        if n_states == 1:
            P = np.ones((1, 1))
        else:
            P = np.full((n_states, n_states), (1.0 - stay) / (n_states - 1))
            np.fill_diagonal(P, stay)
        return cls(spec.centers[picks], P, np.full(n_states, 1.0 / n_states), jitter, bin_width)

    def values(self, state_idx: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if not self.jitter:
            return self.states[state_idx]
        spec = self.spec
        b = spec.digitize(self.states)
        lo, hi = spec.edges[b], spec.edges[b + 1]
        return rng.uniform(lo[state_idx], hi[state_idx])


# --------------------------------- Configuración ---------------------------------

@dataclass(frozen=True)
class GeneratorConfig:
    thread_count: int = 100
    length_law: Literal["fixed", "geometric"] = "geometric"
    mean_length: float = 20.0
    fields_coupling: Literal["independent", "shared"] = "independent"
    seed: int = 0

    def __post_init__(self):
        if int(self.thread_count) < 1:
            raise ArgumentError("thread_count debe ser >= 1")
        if self.length_law not in ("fixed", "geometric"):
            raise ArgumentError(f"length_law desconocida: {self.length_law!r}")
        if not (self.mean_length >= 1):
            raise ArgumentError("mean_length debe ser >= 1")
        if self.fields_coupling not in ("independent", "shared"):
            raise ArgumentError(f"fields_coupling desconocido: {self.fields_coupling!r}")


def thread_lengths(config: GeneratorConfig, rng: np.random.Generator) -> np.ndarray:
    if config.length_law == "fixed":
        return np.full(config.thread_count, int(round(config.mean_length)), dtype=np.int64)
    # geométrica con soporte {1, 2, ...} y media mean_length
    return rng.geometric(1.0 / config.mean_length, size=config.thread_count).astype(np.int64)


def _thread_ids(n: int) -> list:
    return [f"t{i:06d}" for i in range(n)]


# ---------------------------------- Generadores ----------------------------------

def generate_iid(marginal, config: GeneratorConfig) -> Dataset:
    marginal = as_marginal(marginal)
    rng = make_rng(config.seed)
    lengths = thread_lengths(config, rng)
    n = int(lengths.sum())
    pos = np.clip(marginal.sample(rng, n), 0.0, 1.0)
    sub = pos.copy() if config.fields_coupling == "shared" else np.clip(marginal.sample(rng, n), 0.0, 1.0)
    logger.info("IID: %d hilos, %d comentarios", lengths.size, n)
    return Dataset.from_arrays(_thread_ids(lengths.size), lengths, pos, sub, "synth:iid")


def simulate_chain(model: MarkovModel, lengths: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Índices de estado por comentario; todos los hilos avanzan a la vez, paso a paso."""
    lengths = np.asarray(lengths, dtype=np.int64)
    n = int(lengths.sum())
    first = np.concatenate(([0], np.cumsum(lengths)[:-1])).astype(np.int64)
    last = model.n_states - 1
    u = rng.random(n)
    cum_init = np.cumsum(model.initial)
    cum_P = np.cumsum(model.transition, axis=1)

    states = np.empty(n, dtype=np.int64)
    states[first] = np.minimum(np.searchsorted(cum_init, u[first], side="right"), last)
    for t in range(1, int(lengths.max(initial=0))):
        at = first[lengths > t] + t
        prev = states[at - 1]
        states[at] = np.minimum((u[at][:, None] >= cum_P[prev]).sum(axis=1), last)
    return states


def generate_markov(model: MarkovModel, config: GeneratorConfig) -> Dataset:
    rng = make_rng(config.seed)
    lengths = thread_lengths(config, rng)
    chain = simulate_chain(model, lengths, rng)
    pos = model.values(chain, rng)
    if config.fields_coupling == "shared":
        sub = model.values(chain, rng)
    else:
        sub = model.values(simulate_chain(model, lengths, rng), rng)
    logger.info("Markov (%d estados): %d hilos, %d comentarios", model.n_states, lengths.size, chain.size)
    return Dataset.from_arrays(_thread_ids(lengths.size), lengths, pos, sub, "synth:markov")


# ----------------------------------- Oráculos -----------------------------------

def stationary(model: MarkovModel) -> np.ndarray:
    P = model.transition
    ns = null_space(P.T - np.eye(model.n_states))
    if ns.shape[1] != 1:
        raise OracleError("Cadena sin distribución estacionaria única: indica marginal='initial'")
    pi = ns[:, 0] / ns[:, 0].sum()
    return np.clip(pi, 0.0, None) / np.clip(pi, 0.0, None).sum()


def _marginal_of(model: MarkovModel, marginal: str) -> np.ndarray:
    if marginal == "stationary":
        return stationary(model)
    if marginal == "initial":
        return model.initial
    raise ArgumentError(f"marginal desconocida: {marginal!r} (stationary o initial)")


def mi_oracle(model: MarkovModel, marginal: str = "stationary", base: Optional[Base] = None) -> float:
    """I(X,Y) exacta de pares consecutivos: p(i, j) = pi_i P_ij."""
    pi = _marginal_of(model, marginal)
    joint = pi[:, None] * model.transition
    row, col = joint.sum(axis=1), joint.sum(axis=0)
    nz = joint > 0
    outer = np.outer(row, col)
    value = float(np.sum(joint[nz] * np.log(joint[nz] / outer[nz])))
    return max(0.0, value) / log_divisor(base)


@dataclass(frozen=True, eq=False)
class ThreeStepOracle:
    states: np.ndarray
    c_plus: np.ndarray      # por estado; NaN si el estado tiene masa marginal nula
    c_minus: np.ndarray


def threestep_oracle(
    model: MarkovModel,
    top_states: Optional[Sequence[int]] = None,
    bottom_states: Optional[Sequence[int]] = None,
    marginal: str = "stationary",
    plus: float = 0.9,
    minus: float = 0.1,
) -> ThreeStepOracle:
    """P(x_n | x_{n-1} en A, x_{n-2} en A) / P(x_n), exacto con dos pasos de la matriz."""
    pi = _marginal_of(model, marginal)
    P = model.transition
    top = np.flatnonzero(model.states >= plus) if top_states is None else np.asarray(top_states, dtype=int)
    bottom = np.flatnonzero(model.states <= minus) if bottom_states is None else np.asarray(bottom_states, dtype=int)
    p_n = pi @ P @ P

    def curve(A: np.ndarray, name: str) -> np.ndarray:
        in_a = np.zeros(model.n_states, dtype=bool)
        in_a[A] = True
        first = np.where(in_a, pi, 0.0)
        second = np.where(in_a, first @ P, 0.0)
        mass = second.sum()
        if mass <= 0:
            raise OracleError(f"Conjunto condicionante de {name} con masa estacionaria nula")
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(p_n > 0, (second @ P / mass) / p_n, np.nan)

    return ThreeStepOracle(model.states.copy(), curve(top, "C+"), curve(bottom, "C-"))


def cluster_size_oracle(q: float, lengths) -> float:
    """
    <S> agrupado esperado para pertenencia IID Bernoulli(q) en hilos de
    longitudes dadas: sum N q / sum [q + (N - 1) q (1 - q)].
    """
    N = np.asarray(lengths, dtype=np.float64)
    if q <= 0 or N.size == 0:
        return float("nan")
    return float((N * q).sum() / (q + (N - 1) * q * (1 - q)).sum())


# ------------------------- Archivo de configuración (key=value) -------------------------

@dataclass(frozen=True, eq=False)
class SynthPlan:
    kind: Literal["iid", "markov"]
    config: GeneratorConfig
    model: Optional[MarkovModel] = None
    marginal: Optional[Marginal] = None

    def generate(self) -> Dataset:
        if self.kind == "markov":
            return generate_markov(self.model, self.config)
        return generate_iid(self.marginal, self.config)

    def oracles(self) -> dict:
        """Valores de referencia que deberían recuperar los estimadores."""
        if self.kind == "iid":
            return {"mi": 0.0, "c_plus": 1.0, "c_minus": 1.0}
        out: dict = {"states": self.model.states.tolist()}
        for marginal in ("stationary", "initial"):
            try:
                out["mi"] = mi_oracle(self.model, marginal)
                out["marginal"] = marginal
                break
            except OracleError:
                continue
        try:
            ts = threestep_oracle(self.model, marginal=out.get("marginal", "initial"))
            out["c_plus"] = ts.c_plus.tolist()
            out["c_minus"] = ts.c_minus.tolist()
        except OracleError as e:
            out["threestep"] = str(e)
        return out


def _floats(text: str) -> list:
    return [float(x) for x in str(text).replace(" ", "").split(",") if x != ""]


def _bool(text: Optional[str], default: bool) -> bool:
    if text is None:
        return default
    return str(text).strip().lower() in ("1", "true", "yes", "si", "on")


def parse_marginal(text: Optional[str]) -> Marginal:
    """'extremes' | 'uniform' | 'beta:w:a:b;...' | 'atom:v:w;...'"""
    text = (text or "extremes").strip()
    if text == "extremes":
        return BetaMixture.extremes()
    if text == "uniform":
        return BetaMixture.uniform()
    betas, atoms = [], []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        kind, *nums = part.split(":")
        try:
            nums = [float(x) for x in nums]
        except ValueError:
            raise ArgumentError(f"Componente de marginal inválida: {part!r}") from None
        if kind == "beta" and len(nums) == 3:
            betas.append(tuple(nums))
        elif kind == "atom" and len(nums) == 2:
            atoms.append(nums)
        else:
            raise ArgumentError(f"Componente de marginal inválida: {part!r}")
    if betas and atoms:
        raise ArgumentError("No se pueden mezclar componentes beta y atom")
    if atoms:
        return AtomMarginal([a[0] for a in atoms], [a[1] for a in atoms])
    return BetaMixture(tuple(betas))


def plan_from_mapping(values: dict) -> SynthPlan:
    v = {k.upper(): val for k, val in values.items() if val is not None}
    try:
        config = GeneratorConfig(
            thread_count=int(v.get("THREADS", 100)),
            length_law=v.get("LENGTH_LAW", "geometric"),
            mean_length=float(v.get("MEAN_LENGTH", 20)),
            fields_coupling=v.get("COUPLING", "independent"),
            seed=int(v.get("SEED", 0)),
        )
        kind = v.get("KIND", "markov").lower()
        if kind == "iid":
            return SynthPlan("iid", config, marginal=parse_marginal(v.get("MARGINAL")))
        if kind != "markov":
            raise ArgumentError(f"KIND desconocido: {kind!r} (iid o markov)")

        width = float(v.get("BIN_WIDTH", 0.1))
        jitter = _bool(v.get("JITTER"), True)
        if "TRANSITION" in v:
            rows = [_floats(r) for r in str(v["TRANSITION"]).split(";") if r.strip()]
            states = _floats(v.get("STATES", ""))
            initial = _floats(v["INITIAL"]) if "INITIAL" in v else [1.0 / len(rows)] * len(rows)
            model = MarkovModel(states, rows, initial, jitter, width)
        else:
            model = MarkovModel.persistent(int(v.get("N_STATES", 2)), float(v.get("STAY", 0.9)), width, jitter)
        return SynthPlan("markov", config, model=model)
    except (TypeError, ValueError) as e:
        if isinstance(e, ArgumentError):
            raise
        raise ArgumentError(f"Configuración de generador inválida: {e}") from e


def load_plan(path=None, overrides: Optional[dict] = None) -> SynthPlan:
    """
    Plan desde un archivo key=value (opcional) con `overrides` encima; las
    claves con valor None no pisan. Sin SEED en ninguno se sortea una.
    """
    values: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise InputNotFoundError(f"No existe el archivo de configuración: {path}")
        values.update({k.upper(): v for k, v in dotenv_values(path).items() if v is not None})
    values.update({k.upper(): str(v) for k, v in (overrides or {}).items() if v is not None})
    seed = values.get("SEED")
    try:
        values["SEED"] = str(resolve_seed(int(seed) if seed not in (None, "") else None))
    except ValueError:
        raise ArgumentError(f"SEED no entero: {seed!r}") from None
    return plan_from_mapping(values)
