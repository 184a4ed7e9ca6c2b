"""Incentive-allocation linear programs over the per-degree policy phi(k).

Two formulations share one exact LP core:

* cost minimization: cheapest phi whose outbreak size reaches a target
  gamma, rewritten through the monotone size-vs-q map as a linear
  constraint q(phi) >= q*;
* size maximization: phi maximizing q(phi) under a spend cap C and a
  type-2 fraction cap B (the transmissibilities drop out of this LP).

Ties are resolved deterministically by lexicographically minimizing phi
from the lowest degree up, which concentrates incentive mass on the
highest-degree classes.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .degree_dist import DegreeDistribution
from .errors import DegenerateDistributionError, InfeasibleError, ParameterError
from .lp import lp_solve
from .percolation import (
    IncentivePolicy,
    PercolationParams,
    invert_outreach,
    outbreak_analysis_at_q,
)

_BIND_TOL = 1e-9
_TIE_EPS = 1e-11


@dataclass(frozen=True)
class CostModel:
    """Per-degree incentive cost c(k) >= 0 on degrees 0..k_max."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ParameterError("cost table must be a non-empty 1-d vector")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise ParameterError("costs must be finite and nonnegative")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def linear(cls, k_max: int) -> "CostModel":
        return cls(np.arange(int(k_max) + 1, dtype=float))

    @classmethod
    def constant(cls, k_max: int, value: float = 1.0) -> "CostModel":
        return cls(np.full(int(k_max) + 1, float(value)))

    @classmethod
    def quadratic(cls, k_max: int) -> "CostModel":
        return cls(np.arange(int(k_max) + 1, dtype=float) ** 2)

    @classmethod
    def from_table(cls, table: dict, k_max: int) -> "CostModel":
        values = np.zeros(int(k_max) + 1)
        for k, cost in table.items():
            k = int(k)
            if not 0 <= k <= k_max:
                raise ParameterError(f"cost degree {k} outside support 0..{k_max}")
            values[k] = float(cost)
        return cls(values)

    @classmethod
    def from_csv(cls, path, k_max: int) -> "CostModel":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip().lower() for c in header[:2]] != ["k", "cost"]:
                raise ParameterError(f"{path}: expected header 'k,cost'")
            table = {}
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                try:
                    table[int(row[0])] = float(row[1])
                except (IndexError, ValueError) as exc:
                    raise ParameterError(f"{path}:{lineno}: bad row {row!r}") from exc
        return cls.from_table(table, k_max)


@dataclass(frozen=True)
class OptimizationSpec:
    mode: str  # "cost_min" | "size_max"
    dist: DegreeDistribution
    params: PercolationParams
    cost: CostModel
    budget_b: float = 1.0
    gamma: float | None = None  # cost_min only
    budget_c: float | None = None  # size_max only

    def __post_init__(self):
        if self.mode not in ("cost_min", "size_max"):
            raise ParameterError(f"unknown optimization mode {self.mode!r}")
        if not 0.0 <= self.budget_b <= 1.0:
            raise ParameterError(f"B must lie in [0,1], got {self.budget_b}")
        if self.mode == "cost_min":
            if self.gamma is None or not 0.0 <= self.gamma <= 1.0:
                raise ParameterError(f"cost_min needs gamma in [0,1], got {self.gamma}")
        else:
            if self.budget_c is None or self.budget_c < 0.0:
                raise ParameterError(f"size_max needs budget C >= 0, got {self.budget_c}")
        if self.cost.values.size != self.dist.probs.size:
            raise ParameterError(
                f"cost support 0..{self.cost.values.size - 1} does not match "
                f"distribution support 0..{self.dist.k_max}"
            )


@dataclass
class OptimizationResult:
    status: str  # "optimal" | "infeasible"
    phi: IncentivePolicy | None
    objective: float | None
    q_achieved: float | None
    p_achieved: float | None
    cost_achieved: float | None
    size_achieved: float | None
    binding: list[str] = field(default_factory=list)
    q_target: float | None = None
    reason: str | None = None  # infeasible: "target" | "budget"
    detail: str | None = None


def _achieved(dist, cost, phi):
    k = np.arange(dist.probs.size, dtype=float)
    q = math.fsum((k * phi * dist.probs).tolist()) / dist.mean()
    p = math.fsum((phi * dist.probs).tolist())
    spend = math.fsum((cost.values * phi * dist.probs).tolist())
    return min(max(q, 0.0), 1.0), min(max(p, 0.0), 1.0), spend


def _lexicographic_min(base_objective, rows, senses, rhs, n, optimum, maximize):
    """Among optimal solutions, minimize phi degree by degree from k = 0 up.

    Keeps optimality as an extra row (with a relative slack far below all
    reporting tolerances) and fixes one variable per pass, which pushes any
    slack incentive mass onto the highest-degree classes deterministically.
    """
    eps = _TIE_EPS * (1.0 + abs(optimum))
    bound = optimum + eps if not maximize else optimum - eps
    rows = list(rows) + [base_objective]
    senses = list(senses) + ["<=" if not maximize else ">="]
    rhs = list(rhs) + [bound]
    lower = np.zeros(n)
    upper = np.ones(n)
    unit = np.zeros(n)
    for j in range(n):
        unit[:] = 0.0
        unit[j] = 1.0
        sol = lp_solve(unit, rows, senses, rhs, lower=lower, upper=upper)
        if sol.status != "optimal":  # cannot happen: previous iterate stays feasible
            raise AssertionError("tie-break subproblem lost feasibility")
        v = min(max(float(sol.x[j]), 0.0), 1.0)
        # the eps slack lets values leak a hair off their bound; snap back
        # whenever the exact bound stays feasible
        for target in (0.0, 1.0):
            if v != target and abs(v - target) <= 1e-7:
                lower[j] = upper[j] = target
                check = lp_solve(unit, rows, senses, rhs, lower=lower, upper=upper)
                if check.status == "optimal":
                    v = target
                break
        lower[j] = upper[j] = v
    return lower


def solve_cost_min_at_q(
    dist: DegreeDistribution,
    cost: CostModel,
    q_star: float,
    budget_b: float,
    params: PercolationParams | None = None,
) -> OptimizationResult:
    """Minimize expected spend subject to q(phi) >= q_star and p(phi) <= B."""
    if cost.values.size != dist.probs.size:
        raise ParameterError("cost table does not cover the distribution support")
    if not 0.0 <= q_star <= 1.0:
        raise ParameterError(f"q_star must lie in [0,1], got {q_star}")
    if not 0.0 <= budget_b <= 1.0:
        raise ParameterError(f"B must lie in [0,1], got {budget_b}")
    probs = dist.probs
    n = probs.size
    k = np.arange(n, dtype=float)
    mean = dist.mean()
    if mean <= 0.0:
        raise DegenerateDistributionError("optimization undefined: mean degree is zero")
    q_row = k * probs / mean
    p_row = probs.copy()
    c_lp = cost.values * probs
    rows = [q_row, p_row]
    senses = [">=", "<="]
    rhs = [q_star, budget_b]

    sol = lp_solve(c_lp, rows, senses, rhs)
    if sol.status != "optimal":
        reach = lp_solve(q_row, [p_row], ["<="], [budget_b], maximize=True)
        q_best = reach.objective if reach.status == "optimal" else 0.0
        return OptimizationResult(
            status="infeasible",
            phi=None,
            objective=None,
            q_achieved=None,
            p_achieved=None,
            cost_achieved=None,
            size_achieved=None,
            q_target=q_star,
            reason="budget",
            detail=(
                f"type-2 budget B={budget_b} caps q at {q_best:.6g} "
                f"but the outreach constraint needs q >= {q_star:.6g}"
            ),
        )

    phi_vec = _lexicographic_min(c_lp, rows, senses, rhs, n, sol.objective, maximize=False)
    q_ach, p_ach, spend = _achieved(dist, cost, phi_vec)
    binding = []
    if abs(q_ach - q_star) <= _BIND_TOL:
        binding.append("outreach_target")
    if abs(p_ach - budget_b) <= _BIND_TOL:
        binding.append("type2_budget")
    size = outbreak_analysis_at_q(dist, q_ach, params).size if params is not None else None
    return OptimizationResult(
        status="optimal",
        phi=IncentivePolicy(phi_vec),
        objective=spend,
        q_achieved=q_ach,
        p_achieved=p_ach,
        cost_achieved=spend,
        size_achieved=size,
        binding=binding,
        q_target=q_star,
    )


def solve_cost_min(spec: OptimizationSpec) -> OptimizationResult:
    """Cheapest policy meeting the outreach target gamma; needs T2 > T1."""
    if spec.mode != "cost_min":
        raise ParameterError(f"spec mode is {spec.mode!r}, expected 'cost_min'")
    spec.params.require_ordered()
    try:
        q_star = invert_outreach(spec.dist, spec.params, spec.gamma, tol=1e-12)
    except InfeasibleError as exc:
        return OptimizationResult(
            status="infeasible",
            phi=None,
            objective=None,
            q_achieved=None,
            p_achieved=None,
            cost_achieved=None,
            size_achieved=None,
            reason="target",
            detail=str(exc),
        )
    return solve_cost_min_at_q(spec.dist, spec.cost, q_star, spec.budget_b, spec.params)


def solve_size_max(spec: OptimizationSpec) -> OptimizationResult:
    """Maximize outreach under spend cap C and type-2 cap B; needs T2 > T1.

    The LP maximizes the link-weighted incentive mass sum_k k phi(k) P(k);
    the transmissibilities only enter the reported outbreak size.
    """
    if spec.mode != "size_max":
        raise ParameterError(f"spec mode is {spec.mode!r}, expected 'size_max'")
    spec.params.require_ordered()
    probs = spec.dist.probs
    n = probs.size
    k = np.arange(n, dtype=float)
    objective = k * probs
    rows = [spec.cost.values * probs, probs.copy()]
    senses = ["<=", "<="]
    rhs = [spec.budget_c, spec.budget_b]

    sol = lp_solve(objective, rows, senses, rhs, maximize=True)
    if sol.status != "optimal":  # phi = 0 is always feasible for C, B >= 0
        raise AssertionError("size maximization cannot be infeasible")
    phi_vec = _lexicographic_min(objective, rows, senses, rhs, n, sol.objective, maximize=True)
    q_ach, p_ach, spend = _achieved(spec.dist, spec.cost, phi_vec)
    mass = math.fsum((k * phi_vec * probs).tolist())
    binding = []
    if abs(spend - spec.budget_c) <= _BIND_TOL:
        binding.append("cost_budget")
    if abs(p_ach - spec.budget_b) <= _BIND_TOL:
        binding.append("type2_budget")
    size = outbreak_analysis_at_q(spec.dist, q_ach, spec.params).size
    return OptimizationResult(
        status="optimal",
        phi=IncentivePolicy(phi_vec),
        objective=mass,
        q_achieved=q_ach,
        p_achieved=p_ach,
        cost_achieved=spend,
        size_achieved=size,
        binding=binding,
    )
