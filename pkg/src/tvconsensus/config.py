"""Experiment configuration: YAML schema, validation, default materialization.

A configuration fully determines a run; all randomness is seeded.  See the
README for the documented schema.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import yaml

from .errors import ConfigError
from .graph import (
    Graph,
    complete_graph,
    cycle_graph,
    erdos_renyi,
    load_edge_list,
    path_graph,
)

KNOWN_GENERATORS = ("complete", "path", "cycle", "erdos_renyi", "edgelist")
KNOWN_OBJECTIVES = ("quadratic", "absolute")
KNOWN_ENGINES = ("subgradient", "admm", "gossip")


@dataclass(frozen=True)
class GraphConfig:
    generator: str = "complete"
    n: int = 0
    p: float = 0.5
    seed: int = 0
    path: str = ""


@dataclass(frozen=True)
class DataConfig:
    source: str = "uniform"  # uniform | explicit
    seed: int = 0
    low: float = 0.0
    high: float = 1.0
    values: tuple[float, ...] = ()
    outliers: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class LambdaConfig:
    value: float | None = None
    multiplier: float | None = None


@dataclass(frozen=True)
class EngineConfig:
    name: str
    gamma0: float = 1.0
    rho: float = 1.0
    max_iterations: int = 100_000
    disagreement_tol: float = 1e-9
    change_tol: float = 1e-10
    record_every: int = 1


@dataclass(frozen=True)
class StubbornConfig:
    vertices: tuple[int, ...] = ()
    values: tuple[float, ...] = ()


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GraphConfig
    objective_kind: str
    data: DataConfig
    lam: LambdaConfig
    engines: tuple[EngineConfig, ...]
    stubborn: StubbornConfig = StubbornConfig()
    output_dir: str = "out"
    prefix: str = "experiment"

    def resolved_dict(self) -> dict:
        """All fields with defaults materialized, for the summary echo."""
        return {
            "graph": asdict(self.graph),
            "objective_kind": self.objective_kind,
            "data": {
                **asdict(self.data),
                "values": list(self.data.values),
                "outliers": [list(o) for o in self.data.outliers],
            },
            "lambda": asdict(self.lam),
            "engines": [asdict(e) for e in self.engines],
            "stubborn": {
                "vertices": list(self.stubborn.vertices),
                "values": list(self.stubborn.values),
            },
            "output_dir": self.output_dir,
            "prefix": self.prefix,
        }


def _require(condition: bool, where: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{where}: {message}")


def _as_mapping(node, where: str) -> dict:
    _require(isinstance(node, dict), where, f"expected a mapping, got {type(node).__name__}")
    return node


def _parse_graph(node, where: str) -> GraphConfig:
    node = _as_mapping(node, where)
    generator = str(node.get("generator", "complete"))
    _require(generator in KNOWN_GENERATORS, f"{where}.generator",
             f"unknown generator {generator!r}, expected one of {KNOWN_GENERATORS}")
    if generator == "edgelist":
        path = node.get("path", "")
        _require(bool(path), f"{where}.path", "edgelist graphs need a file path")
        return GraphConfig(generator=generator, path=str(path))
    n = node.get("n")
    _require(isinstance(n, int) and n >= 1, f"{where}.n", "need a positive vertex count")
    cfg = GraphConfig(
        generator=generator,
        n=int(n),
        p=float(node.get("p", 0.5)),
        seed=int(node.get("seed", 0)),
    )
    if generator == "erdos_renyi":
        _require(0.0 <= cfg.p <= 1.0, f"{where}.p", "edge probability must be in [0, 1]")
    return cfg


def _parse_data(node, where: str) -> DataConfig:
    node = _as_mapping(node, where)
    source = str(node.get("source", "uniform"))
    _require(source in ("uniform", "explicit"), f"{where}.source",
             "data source must be 'uniform' or 'explicit'")
    outliers_node = node.get("outliers", [])
    _require(isinstance(outliers_node, list), f"{where}.outliers", "expected a list")
    outliers = []
    for k, item in enumerate(outliers_node):
        item = _as_mapping(item, f"{where}.outliers[{k}]")
        _require("vertex" in item and "value" in item, f"{where}.outliers[{k}]",
                 "need 'vertex' and 'value'")
        outliers.append((int(item["vertex"]), float(item["value"])))
    if source == "explicit":
        values = node.get("values")
        _require(isinstance(values, list) and values, f"{where}.values",
                 "explicit data needs a nonempty 'values' list")
        return DataConfig(
            source=source,
            values=tuple(float(v) for v in values),
            outliers=tuple(outliers),
        )
    return DataConfig(
        source=source,
        seed=int(node.get("seed", 0)),
        low=float(node.get("low", 0.0)),
        high=float(node.get("high", 1.0)),
        outliers=tuple(outliers),
    )


def _parse_lambda(node, where: str) -> LambdaConfig:
    node = _as_mapping(node, where)
    value = node.get("value")
    multiplier = node.get("multiplier")
    _require((value is None) != (multiplier is None), where,
             "give exactly one of 'value' or 'multiplier'")
    if value is not None:
        value = float(value)
        _require(value > 0.0, f"{where}.value", "lambda must be positive")
        return LambdaConfig(value=value)
    multiplier = float(multiplier)
    _require(multiplier > 0.0, f"{where}.multiplier", "multiplier must be positive")
    return LambdaConfig(multiplier=multiplier)


def _parse_engine(node, where: str) -> EngineConfig:
    node = _as_mapping(node, where)
    name = str(node.get("name", ""))
    _require(name in KNOWN_ENGINES, f"{where}.name",
             f"unknown engine {name!r}, expected one of {KNOWN_ENGINES}")
    cfg = EngineConfig(
        name=name,
        gamma0=float(node.get("gamma0", 1.0)),
        rho=float(node.get("rho", 1.0)),
        max_iterations=int(node.get("max_iterations", 100_000)),
        disagreement_tol=float(node.get("disagreement_tol", 1e-9)),
        change_tol=float(node.get("change_tol", 1e-10)),
        record_every=int(node.get("record_every", 1)),
    )
    _require(cfg.gamma0 > 0.0, f"{where}.gamma0", "must be positive")
    _require(cfg.rho > 0.0, f"{where}.rho", "must be positive")
    _require(cfg.max_iterations >= 0, f"{where}.max_iterations", "must be nonnegative")
    _require(cfg.record_every >= 1, f"{where}.record_every", "must be at least 1")
    return cfg


def _parse_stubborn(node, where: str) -> StubbornConfig:
    node = _as_mapping(node, where)
    vertices = node.get("vertices", [])
    values = node.get("values", [])
    _require(isinstance(vertices, list) and isinstance(values, list), where,
             "'vertices' and 'values' must be lists")
    _require(len(vertices) == len(values), where,
             "need one pinned value per stubborn vertex")
    return StubbornConfig(
        vertices=tuple(int(v) for v in vertices),
        values=tuple(float(v) for v in values),
    )


def parse_config(raw: dict) -> ExperimentConfig:
    raw = _as_mapping(raw, "config")
    _require("graph" in raw, "config", "missing 'graph' section")
    _require("objective" in raw, "config", "missing 'objective' section")
    _require("lambda" in raw, "config", "missing 'lambda' section")
    _require("engines" in raw, "config", "missing 'engines' section")

    graph = _parse_graph(raw["graph"], "graph")
    objective = _as_mapping(raw["objective"], "objective")
    kind = str(objective.get("kind", ""))
    _require(kind in KNOWN_OBJECTIVES, "objective.kind",
             f"unknown kind {kind!r}, expected one of {KNOWN_OBJECTIVES}")
    data = _parse_data(objective.get("data", {}), "objective.data")
    lam = _parse_lambda(raw["lambda"], "lambda")
    engines_node = raw["engines"]
    _require(isinstance(engines_node, list) and engines_node, "engines",
             "need a nonempty list of engines")
    engines = tuple(
        _parse_engine(e, f"engines[{k}]") for k, e in enumerate(engines_node)
    )
    stubborn = _parse_stubborn(raw.get("stubborn", {}), "stubborn")
    output = _as_mapping(raw.get("output", {}), "output")
    return ExperimentConfig(
        graph=graph,
        objective_kind=kind,
        data=data,
        lam=lam,
        engines=engines,
        stubborn=stubborn,
        output_dir=str(output.get("directory", "out")),
        prefix=str(output.get("prefix", "experiment")),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if raw is None:
        raise ConfigError(f"{path}: empty configuration")
    return parse_config(raw)


def build_graph(cfg: GraphConfig) -> Graph:
    if cfg.generator == "complete":
        return complete_graph(cfg.n)
    if cfg.generator == "path":
        return path_graph(cfg.n)
    if cfg.generator == "cycle":
        return cycle_graph(cfg.n)
    if cfg.generator == "erdos_renyi":
        return erdos_renyi(cfg.n, cfg.p, cfg.seed)
    if cfg.generator == "edgelist":
        return load_edge_list(cfg.path)
    raise ConfigError(f"graph.generator: unknown generator {cfg.generator!r}")


def build_initial_data(cfg: DataConfig, n_vertices: int) -> np.ndarray:
    if cfg.source == "explicit":
        if len(cfg.values) != n_vertices:
            raise ConfigError(
                f"objective.data.values: expected {n_vertices} values, got {len(cfg.values)}"
            )
        x0 = np.array(cfg.values, dtype=float)
    else:
        rng = np.random.default_rng(cfg.seed)
        x0 = rng.uniform(cfg.low, cfg.high, size=n_vertices)
    for vertex, value in cfg.outliers:
        if not 0 <= vertex < n_vertices:
            raise ConfigError(f"objective.data.outliers: unknown vertex {vertex}")
        x0[vertex] = value
    return x0
