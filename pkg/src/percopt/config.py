"""JSON run-configuration parsing and validation for the CLI.

A config file is one JSON object with up to five blocks:

    degree_distribution   constructor name + parameters, or a CSV path
    percolation           T1/T2 directly, or beta/mu rates per type
    policy                constant | table | from_optimizer
    optimization          mode, gamma or budget_c, budget_b, cost model
    simulation            n, trials, theta, master_seed, method, workers
    sweep                 variable (T1|C|gamma|B) and a grid

Validation errors name the offending field with a dotted path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .degree_dist import DegreeDistribution
from .errors import ConfigError, ParameterError
from .optimizer import CostModel, OptimizationSpec
from .percolation import IncentivePolicy, PercolationParams

SWEEP_VARIABLES = ("T1", "C", "gamma", "B")


def _get(block: dict, key: str, path: str, required: bool = True, default=None):
    if key in block:
        return block[key]
    if required:
        raise ConfigError(f"{path}.{key}: missing required field")
    return default


def _number(value, path: str, lo=None, hi=None, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{path}: must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"{path}: must be <= {hi}, got {value}")
    return int(value) if integer else float(value)


def _table(value, path: str) -> dict:
    if not isinstance(value, dict) or not value:
        raise ConfigError(f"{path}: expected a non-empty object")
    out = {}
    for key, item in value.items():
        try:
            out[int(key)] = float(item)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: bad entry {key!r}: {item!r}") from exc
    return out


@dataclass
class RunConfig:
    base_dir: Path
    dist: DegreeDistribution
    params: PercolationParams | None
    policy_block: dict | None
    optimization_block: dict | None
    simulation_block: dict | None
    sweep_block: dict | None

    # ------------------------------------------------------------------

    def policy(self, dist: DegreeDistribution, optimizer_result=None) -> IncentivePolicy:
        block = self.policy_block
        if block is None:
            raise ConfigError("policy: block required for this command")
        kind = _get(block, "kind", "policy")
        if kind == "constant":
            value = _number(_get(block, "value", "policy"), "policy.value", 0.0, 1.0)
            return IncentivePolicy.constant(value, dist.k_max)
        if kind == "table":
            if "csv" in block:
                path = self.base_dir / str(block["csv"])
                table = _read_phi_csv(path)
            else:
                table = _table(_get(block, "phi", "policy"), "policy.phi")
            try:
                return IncentivePolicy.from_table(table, dist.k_max)
            except ParameterError as exc:
                raise ConfigError(f"policy.phi: {exc}") from exc
        if kind == "from_optimizer":
            if optimizer_result is None or optimizer_result.phi is None:
                raise ConfigError("policy.kind=from_optimizer needs a solvable optimization block")
            return optimizer_result.phi
        raise ConfigError(f"policy.kind: unknown kind {kind!r}")

    def optimization_spec(self) -> OptimizationSpec:
        block = self.optimization_block
        if block is None:
            raise ConfigError("optimization: block required for this command")
        if self.params is None:
            raise ConfigError("percolation: block required for optimization")
        mode = _get(block, "mode", "optimization")
        if mode not in ("cost_min", "size_max"):
            raise ConfigError(f"optimization.mode: unknown mode {mode!r}")
        budget_b = _number(block.get("budget_b", 1.0), "optimization.budget_b", 0.0, 1.0)
        gamma = budget_c = None
        if mode == "cost_min":
            gamma = _number(_get(block, "gamma", "optimization"), "optimization.gamma", 0.0, 1.0)
        else:
            budget_c = _number(
                _get(block, "budget_c", "optimization"), "optimization.budget_c", 0.0
            )
        cost = self._cost_model(block.get("cost", {"kind": "linear"}))
        try:
            return OptimizationSpec(
                mode=mode,
                dist=self.dist,
                params=self.params,
                cost=cost,
                budget_b=budget_b,
                gamma=gamma,
                budget_c=budget_c,
            )
        except ParameterError as exc:
            raise ConfigError(f"optimization: {exc}") from exc

    def _cost_model(self, block) -> CostModel:
        if not isinstance(block, dict):
            raise ConfigError("optimization.cost: expected an object")
        kind = _get(block, "kind", "optimization.cost")
        k_max = self.dist.k_max
        if kind == "linear":
            return CostModel.linear(k_max)
        if kind == "constant":
            value = _number(block.get("value", 1.0), "optimization.cost.value", 0.0)
            return CostModel.constant(k_max, value)
        if kind == "quadratic":
            return CostModel.quadratic(k_max)
        if kind == "csv":
            path = self.base_dir / str(_get(block, "csv", "optimization.cost"))
            try:
                return CostModel.from_csv(path, k_max)
            except (OSError, ParameterError) as exc:
                raise ConfigError(f"optimization.cost.csv: {exc}") from exc
        if kind == "table":
            return CostModel.from_table(
                _table(_get(block, "values", "optimization.cost"), "optimization.cost.values"),
                k_max,
            )
        raise ConfigError(f"optimization.cost.kind: unknown kind {kind!r}")

    def simulation(self) -> dict:
        block = self.simulation_block
        if block is None:
            raise ConfigError("simulation: block required for this command")
        method = block.get("method", "percolation")
        if method not in ("percolation", "sir", "both"):
            raise ConfigError(f"simulation.method: unknown method {method!r}")
        if method in ("sir", "both") and (self.params is None or self.params.rates is None):
            raise ConfigError("simulation.method: SIR needs percolation rates (beta/mu)")
        return {
            "n": _number(_get(block, "n", "simulation"), "simulation.n", 2, integer=True),
            "trials": _number(
                _get(block, "trials", "simulation"), "simulation.trials", 1, integer=True
            ),
            "theta": _number(block.get("theta", 0.01), "simulation.theta", 0.0, 1.0),
            "master_seed": _number(
                block.get("master_seed", 0), "simulation.master_seed", 0, integer=True
            ),
            "workers": _number(block.get("workers", 1), "simulation.workers", 1, integer=True),
            "method": method,
        }

    def sweep(self) -> tuple[str, list[float]]:
        block = self.sweep_block
        if block is None:
            raise ConfigError("sweep: block required for this command")
        variable = _get(block, "variable", "sweep")
        if variable not in SWEEP_VARIABLES:
            raise ConfigError(
                f"sweep.variable: expected one of {', '.join(SWEEP_VARIABLES)}, got {variable!r}"
            )
        grid = _get(block, "grid", "sweep")
        if isinstance(grid, dict):
            start = _number(_get(grid, "start", "sweep.grid"), "sweep.grid.start")
            stop = _number(_get(grid, "stop", "sweep.grid"), "sweep.grid.stop")
            count = _number(_get(grid, "count", "sweep.grid"), "sweep.grid.count", 1, integer=True)
            points = np.linspace(start, stop, count).tolist()
        elif isinstance(grid, list) and grid:
            points = [_number(v, f"sweep.grid[{i}]") for i, v in enumerate(grid)]
        else:
            raise ConfigError("sweep.grid: expected a non-empty list or start/stop/count")
        return variable, points


def _read_phi_csv(path) -> dict:
    import csv as _csv

    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"policy.csv: cannot open {path}: {exc}") from exc
    with fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["k", "phi"]:
            raise ConfigError(f"policy.csv: {path}: expected header 'k,phi'")
        table = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                table[int(row[0])] = float(row[1])
            except (IndexError, ValueError) as exc:
                raise ConfigError(f"policy.csv: {path}:{lineno}: bad row {row!r}") from exc
    return table


def _build_distribution(block, base_dir: Path) -> DegreeDistribution:
    if not isinstance(block, dict):
        raise ConfigError("degree_distribution: expected an object")
    name = _get(block, "constructor", "degree_distribution")
    try:
        if name == "power_law":
            return DegreeDistribution.power_law(
                alpha=_number(_get(block, "alpha", "degree_distribution"),
                              "degree_distribution.alpha"),
                k_min=_number(block.get("k_min", 1), "degree_distribution.k_min", 1,
                              integer=True),
                k_max=_number(block.get("k_max", 100), "degree_distribution.k_max", 1,
                              integer=True),
            )
        if name == "poisson":
            return DegreeDistribution.poisson(
                mean=_number(_get(block, "mean", "degree_distribution"),
                             "degree_distribution.mean"),
                k_max=_number(block.get("k_max", 100), "degree_distribution.k_max", 1,
                              integer=True),
            )
        if name == "regular":
            return DegreeDistribution.regular(
                _number(_get(block, "degree", "degree_distribution"),
                        "degree_distribution.degree", 1, integer=True)
            )
        if name == "empirical":
            if "csv" in block:
                return DegreeDistribution.from_csv(base_dir / str(block["csv"]))
            table = _table(_get(block, "probs", "degree_distribution"),
                           "degree_distribution.probs")
            raw = np.zeros(max(table) + 1)
            for k, mass in table.items():
                if k < 0:
                    raise ConfigError(f"degree_distribution.probs: negative degree {k}")
                raw[k] = mass
            return DegreeDistribution.empirical(raw)
    except (OSError, ParameterError) as exc:
        raise ConfigError(f"degree_distribution: {exc}") from exc
    raise ConfigError(f"degree_distribution.constructor: unknown constructor {name!r}")


def _build_params(block) -> PercolationParams | None:
    if block is None:
        return None
    if not isinstance(block, dict):
        raise ConfigError("percolation: expected an object")
    try:
        if "T1" in block or "T2" in block:
            return PercolationParams(
                t1=_number(_get(block, "T1", "percolation"), "percolation.T1", 0.0, 1.0),
                t2=_number(_get(block, "T2", "percolation"), "percolation.T2", 0.0, 1.0),
            )
        return PercolationParams.from_rates(
            beta1=_number(_get(block, "beta1", "percolation"), "percolation.beta1", 0.0),
            mu1=_number(_get(block, "mu1", "percolation"), "percolation.mu1", 0.0),
            beta2=_number(_get(block, "beta2", "percolation"), "percolation.beta2", 0.0),
            mu2=_number(_get(block, "mu2", "percolation"), "percolation.mu2", 0.0),
        )
    except ParameterError as exc:
        raise ConfigError(f"percolation: {exc}") from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    known = {
        "degree_distribution",
        "percolation",
        "policy",
        "optimization",
        "simulation",
        "sweep",
    }
    for key in raw:
        if key not in known:
            raise ConfigError(f"{key}: unknown top-level block")
    dist = _build_distribution(
        _get(raw, "degree_distribution", "config"), base_dir=path.parent
    )
    return RunConfig(
        base_dir=path.parent,
        dist=dist,
        params=_build_params(raw.get("percolation")),
        policy_block=raw.get("policy"),
        optimization_block=raw.get("optimization"),
        simulation_block=raw.get("simulation"),
        sweep_block=raw.get("sweep"),
    )
