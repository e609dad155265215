"""Experiment runner: build a scenario from a config, run engines, emit artifacts.

Outputs one metrics CSV per engine plus a JSON summary embedding the fully
resolved configuration, so every run is reproducible from its artifacts alone.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from . import analysis
from .config import ExperimentConfig, build_graph, build_initial_data
from .dualnorm import dual_norm_algorithm0
from .engines import (
    AdmmEngine,
    AgentRoles,
    GossipEngine,
    StopRule,
    SubgradientEngine,
    Trajectory,
    harmonic_schedule,
    run,
    uniform_gossip_matrix,
)
from .errors import (
    ConfigError,
    IterationAnomalyError,
    TvConsensusError,
    UnsupportedGraphError,
)
from .graph import Graph
from .metrics import emit_csv, metrics_from_trajectory
from .objectives import aggregate_absolute, aggregate_quadratic


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    lam: float
    summary: dict
    csv_paths: dict[str, str]
    summary_path: str
    trajectories: dict[str, Trajectory]


def _critical_dual_norm(g: Graph, x0: np.ndarray) -> float:
    """Dual norm of the centered data; anomalies abort the run."""
    result = dual_norm_algorithm0(g, x0 - x0.mean())
    if result.anomaly:
        raise IterationAnomalyError(
            "dual norm ratio iteration exceeded its edge-count bound"
        )
    return result.value


def _resolve_lambda(
    cfg: ExperimentConfig,
    g: Graph,
    x0: np.ndarray,
    roles: AgentRoles,
) -> tuple[float, dict]:
    """Resolve lambda and report the reference levels used for classification."""
    info: dict = {"source": "value" if cfg.lam.value is not None else "multiplier"}
    regular = list(roles.regular_ids)
    if cfg.objective_kind == "quadratic":
        if roles.stubborn_ids:
            sub, _ = g.induced_subgraph(regular)
            reference = _critical_dual_norm(sub, x0[regular]) if sub.is_connected else None
        else:
            reference = _critical_dual_norm(g, x0)
        info["critical_lambda"] = reference
    else:
        try:
            reference = analysis.mc_lambda0_exact(g)
        except TvConsensusError:
            reference = None
        info["lambda0_exact"] = reference
        try:
            info["lambda0_upper"] = analysis.mc_lambda0_upper(g)
        except UnsupportedGraphError:
            info["lambda0_upper"] = None

    if cfg.lam.value is not None:
        lam = cfg.lam.value
    else:
        if reference is None or reference <= 0.0:
            raise ConfigError(
                "lambda.multiplier: no positive reference level available for this scenario; "
                "give an explicit lambda value"
            )
        lam = cfg.lam.multiplier * reference

    if reference is not None:
        if cfg.objective_kind == "quadratic":
            info["classification"] = "supercritical" if lam >= reference else "subcritical"
        else:
            info["classification"] = "supercritical" if lam > reference else "subcritical"
    else:
        info["classification"] = None
    info["resolved"] = lam
    return lam, info


def _build_engine(engine_cfg, lam: float, g: Graph, roles: AgentRoles):
    if engine_cfg.name == "subgradient":
        return SubgradientEngine(lam, harmonic_schedule(engine_cfg.gamma0))
    if engine_cfg.name == "admm":
        return AdmmEngine(lam, rho=engine_cfg.rho)
    if engine_cfg.name == "gossip":
        return GossipEngine(uniform_gossip_matrix(g, roles))
    raise ConfigError(f"engines: unknown engine {engine_cfg.name!r}")


def _is_scenario1(g: Graph, roles: AgentRoles) -> bool:
    """Every stubborn agent adjacent to all regular agents, one common value."""
    if not roles.stubborn_ids:
        return False
    if len(set(roles.pinned_values)) != 1:
        return False
    regular = set(roles.regular_ids)
    return all(regular <= set(g.neighbors(s)) for s in roles.stubborn_ids)


def _certificate_block(g, objs, kind, x0, lam) -> dict:
    candidate = float(np.mean(x0)) if kind == "quadratic" else float(np.median(x0))
    cert = analysis.certify_consensus_minimizer(g, objs, candidate, lam)
    return {
        "candidate": candidate,
        "verdict": cert.verdict,
        "mean_u": cert.mean_u,
        "dual_gap": None if not np.isfinite(cert.dual_gap) else cert.dual_gap,
    }


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    g = build_graph(cfg.graph)
    for v in cfg.stubborn.vertices:
        if not 0 <= v < g.n_vertices:
            raise ConfigError(f"stubborn.vertices: vertex {v} is not in the graph")

    x0 = build_initial_data(cfg.data, g.n_vertices)
    for v, value in zip(cfg.stubborn.vertices, cfg.stubborn.values):
        x0[v] = value
    roles = AgentRoles(
        n_vertices=g.n_vertices,
        stubborn_ids=cfg.stubborn.vertices,
        pinned_values=cfg.stubborn.values,
    )

    lam, lam_info = _resolve_lambda(cfg, g, x0, roles)
    if cfg.objective_kind == "quadratic":
        objs = aggregate_quadratic(g, x0)
    else:
        objs = aggregate_absolute(g, x0)

    os.makedirs(cfg.output_dir, exist_ok=True)
    names = [e.name for e in cfg.engines]
    keys = [
        name if names.count(name) == 1 else f"{name}_{k}"
        for k, name in enumerate(names)
    ]

    trajectories: dict[str, Trajectory] = {}
    csv_paths: dict[str, str] = {}
    engine_summaries: dict[str, dict] = {}
    for key, engine_cfg in zip(keys, cfg.engines):
        engine = _build_engine(engine_cfg, lam, g, roles)
        stop = StopRule(
            max_iterations=engine_cfg.max_iterations,
            disagreement_tol=engine_cfg.disagreement_tol,
            change_tol=engine_cfg.change_tol,
        )
        traj = run(
            engine,
            g,
            x0,
            objs,
            roles,
            stop=stop,
            record_every=engine_cfg.record_every,
            metric_lambda=lam,
        )
        trajectories[key] = traj
        path = os.path.join(cfg.output_dir, f"{cfg.prefix}_{key}.csv")
        emit_csv(metrics_from_trajectory(traj), path)
        csv_paths[key] = path
        engine_summaries[key] = {
            "engine": engine_cfg.name,
            "iterations": int(traj.n_steps),
            "converged": bool(traj.converged),
            "final_mean": float(traj.final_x.mean()),
            "final_disagreement": float(traj.disagreement[-1]),
            "final_objective": float(traj.objective[-1]),
            "csv": path,
        }

    regular = list(roles.regular_ids)
    summary: dict = {
        "config": cfg.resolved_dict(),
        "graph": {
            "n_vertices": g.n_vertices,
            "n_edges": g.n_edges,
            "is_connected": g.is_connected,
            "degree_min": int(g.degrees.min()),
            "degree_max": int(g.degrees.max()),
            "is_regular": bool(g.degrees.min() == g.degrees.max()),
        },
        "lambda": lam_info,
        "initial": {
            "mean": float(x0.mean()),
            "median": float(np.median(x0)),
            "regular_mean": float(x0[regular].mean()) if regular else None,
        },
        "engines": engine_summaries,
    }

    if not roles.stubborn_ids:
        summary["certificate"] = _certificate_block(g, objs, cfg.objective_kind, x0, lam)
        summary["stubborn_analysis"] = None
    else:
        summary["certificate"] = None
        block: dict = {"scenario1": _is_scenario1(g, roles)}
        if block["scenario1"]:
            sub, kept = g.induced_subgraph(regular)
            prediction = analysis.stubborn_limit(
                x0[regular],
                a=roles.pinned_values[0],
                lam=lam,
                s_count=len(roles.stubborn_ids),
                graph_regular=sub if sub.is_connected else None,
            )
            achieved = {
                key: float(trajectories[key].final_x[regular].mean())
                for key, e in zip(keys, cfg.engines)
                if e.name in ("subgradient", "admm")
            }
            block["prediction"] = {
                "x_star": prediction.x_star,
                "case": prediction.case,
                "margin": prediction.margin,
                "regular_mean": prediction.regular_mean,
                "lambda_ok": prediction.lambda_ok,
            }
            block["achieved_regular_mean"] = achieved
            block["prediction_error"] = {
                key: abs(value - prediction.x_star) for key, value in achieved.items()
            }
        summary["stubborn_analysis"] = block

    summary_path = os.path.join(cfg.output_dir, f"{cfg.prefix}_summary.json")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return ExperimentResult(
        config=cfg,
        lam=lam,
        summary=summary,
        csv_paths=csv_paths,
        summary_path=summary_path,
        trajectories=trajectories,
    )
