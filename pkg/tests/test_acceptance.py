"""Acceptance suite: one test per release criterion, each printing a
pass/fail line (run with ``pytest tests/test_acceptance.py -v -s``)."""
import csv
import json
import math
import time

import numpy as np

from oracles import combinatorial_identity_lhs, lp_enumerate
from percopt import (
    CostModel,
    DegreeDistribution,
    IncentivePolicy,
    OptimizationSpec,
    PercolationParams,
    build_network,
    branching_factor_at_q,
    lp_solve,
    mean_component_size_at_q,
    outbreak_analysis,
    outbreak_analysis_at_q,
    run_campaign,
    solve_cost_min,
    solve_cost_min_at_q,
)
from percopt.cli import main
from percopt.simulator import network_seed

REG3 = DegreeDistribution.regular(3)
POWER_LAW = DegreeDistribution.power_law(2.5, 1, 100)


def _report(num, name, ok, detail=""):
    print(f"[acceptance] {num:02d} {name}: {'PASS' if ok else 'FAIL'}"
          + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def test_criterion_01_closed_form_outbreak_size():
    params = PercolationParams(0.75, 0.75)
    policy = IncentivePolicy.zeros(3)
    outbreak_analysis(REG3, policy, params)  # warm-up
    best = math.inf
    for _ in range(5):
        start = time.perf_counter()
        result = outbreak_analysis(REG3, policy, params)
        best = min(best, time.perf_counter() - start)
    gap = abs(result.size - 26.0 / 27.0)
    _report(1, "closed-form outbreak size", gap <= 1e-9 and best < 1e-3,
            f"|size - 26/27| = {gap:.2e}, best runtime {best * 1e3:.3f} ms")


def test_criterion_02_theory_vs_monte_carlo():
    params = PercolationParams(0.75, 0.75)
    start = time.perf_counter()
    report = run_campaign(
        (REG3, IncentivePolicy.zeros(3), 100_000), params,
        trials=200, theta=0.01, master_seed=11,
    )
    elapsed = time.perf_counter() - start
    gap = abs(report.mean_outbreak_size - 26.0 / 27.0)
    _report(2, "theory vs Monte Carlo", gap <= 0.01 and elapsed < 60.0,
            f"|mean size - 26/27| = {gap:.4g}, {elapsed:.1f} s for 200 trials at n=1e5")


def test_criterion_03_two_type_criticality():
    params = PercolationParams(0.0, 1.0)
    critical = outbreak_analysis_at_q(REG3, 0.5, params)
    perturbed = outbreak_analysis_at_q(REG3, 0.51, params)
    ok = (
        critical.nu_tilde == 1.0
        and critical.size == 0.0
        and perturbed.nu_tilde > 1.0
        and perturbed.size > 0.0
    )
    _report(3, "two-type criticality", ok,
            f"nu(0.5) = {critical.nu_tilde}, size(0.51) = {perturbed.size:.4g}")


def test_criterion_04_combinatorial_identity():
    rng = np.random.default_rng(2025)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 11))
        f_values = rng.normal(size=2 * n + 1)
        a, b = rng.random(), rng.random()
        worst = max(worst, abs(combinatorial_identity_lhs(f_values, a, b, n)))
    _report(4, "combinatorial exchange identity", worst <= 1e-10, f"max |sum| = {worst:.2e}")


def test_criterion_05_monotonicity_in_q():
    grid = np.linspace(0.0, 1.0, 50)
    ok = True
    detail = []
    for t1 in (0.3, 0.45):
        params = PercolationParams(t1, 0.6)
        nu = np.array([branching_factor_at_q(POWER_LAW, q, params) for q in grid])
        psi = np.array([outbreak_analysis_at_q(POWER_LAW, q, params).psi for q in grid])
        nu_ok = bool(np.all(np.diff(nu) > 0.0))
        interior = (psi[:-1] > 0.0) & (psi[:-1] < 1.0) & (psi[1:] > 0.0) & (psi[1:] < 1.0)
        size_ok = bool(np.all(np.diff(psi)[interior] < 0.0)) and bool(interior.any())
        ok = ok and nu_ok and size_ok
        detail.append(f"T1={t1}: nu increasing {nu_ok}, size increasing {size_ok}")
    _report(5, "monotone threshold and size in q", ok, "; ".join(detail))


def test_criterion_06_lp_exactness():
    rng = np.random.default_rng(77)
    mismatches = 0
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(0, 3))
        c = rng.uniform(-1.0, 1.0, size=n).tolist()
        rows = rng.uniform(-1.0, 1.0, size=(m, n)).tolist() if m else None
        senses = [("<=" if rng.random() < 0.5 else ">=") for _ in range(m)]
        rhs = rng.uniform(-1.0, 1.0, size=m).tolist() if m else None
        maximize = bool(rng.random() < 0.5)
        sol = lp_solve(c, rows, senses, rhs, maximize=maximize)
        status, best = lp_enumerate(c, rows, senses, rhs, maximize=maximize)
        if sol.status != status:
            mismatches += 1
        elif status == "optimal":
            worst = max(worst, abs(sol.objective - best))
    hand = solve_cost_min_at_q(
        DegreeDistribution.empirical([0.0, 0.5, 0.0, 0.5]),
        CostModel.quadratic(3), q_star=0.5, budget_b=1.0,
    )
    hand_ok = (
        abs(hand.objective - 2.0) <= 1e-9
        and abs(hand.phi.phi[1] - 1.0) <= 1e-9
        and abs(hand.phi.phi[3] - 1.0 / 3.0) <= 1e-9
    )
    _report(6, "LP exactness", mismatches == 0 and worst <= 1e-9 and hand_ok,
            f"status mismatches {mismatches}, worst objective gap {worst:.2e}, "
            f"hand cost {hand.objective:.12g}")


def test_criterion_07_cost_minimization_sweep(tmp_path):
    grid = [round(0.30 + 0.01 * i, 2) for i in range(18)]  # 0.30 .. 0.47
    config = {
        "degree_distribution": {"constructor": "power_law", "alpha": 2.5,
                                "k_min": 1, "k_max": 100},
        "percolation": {"T1": 0.35, "T2": 0.6},
        "optimization": {"mode": "cost_min", "gamma": 0.2, "budget_b": 0.7,
                         "cost": {"kind": "linear"}},
        "sweep": {"variable": "T1", "grid": grid},
    }
    path = tmp_path / "t1_sweep.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 0
    with open(tmp_path / "sweep.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    statuses_ok = all(r["status"] == "optimal" for r in rows)
    p = [float(r["p"]) for r in rows]
    p_ok = all(b <= a + 1e-9 for a, b in zip(p, p[1:]))
    size_ok = all(float(r["size"]) >= 0.2 - 1e-6 for r in rows)

    structure_ok = True
    for t1 in (0.30, 0.38, 0.47):
        spec = OptimizationSpec(
            mode="cost_min", dist=POWER_LAW, params=PercolationParams(t1, 0.6),
            cost=CostModel.linear(100), gamma=0.2, budget_b=0.7,
        )
        phi = solve_cost_min(spec).phi.phi[1:]  # support starts at k = 1
        fractional = int(np.sum((phi > 1e-9) & (phi < 1.0 - 1e-9)))
        monotone = bool(np.all(np.diff(phi) >= -1e-9))
        structure_ok = structure_ok and monotone and fractional <= 2
    ok = statuses_ok and p_ok and size_ok and structure_ok
    _report(7, "cost-minimization sweep regime", ok,
            f"p range [{min(p):.3g}, {max(p):.3g}], high-degree saturation {structure_ok}")


def test_criterion_08_size_maximization_sweep(tmp_path):
    grid = [round(0.2 * i, 1) for i in range(11)]  # 0.0 .. 2.0
    config = {
        "degree_distribution": {"constructor": "power_law", "alpha": 2.5,
                                "k_min": 1, "k_max": 100},
        "percolation": {"T1": 0.35, "T2": 0.6},
        "optimization": {"mode": "size_max", "budget_c": 1.0, "budget_b": 0.7,
                         "cost": {"kind": "linear"}},
        "sweep": {"variable": "C", "grid": grid},
    }
    path = tmp_path / "budget_sweep.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 0
    with open(tmp_path / "sweep.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    size = [float(r["size"]) for r in rows]
    monotone = all(b >= a - 1e-9 for a, b in zip(size, size[1:]))
    # saturation: beyond the first grid point where the spend no longer
    # exhausts the budget, the achieved size must stay constant
    slack = [i for i, r in enumerate(rows) if float(r["cost"]) < float(r["x"]) - 1e-9]
    saturated = bool(slack) and all(
        abs(size[i] - size[slack[0]]) <= 1e-9 for i in range(slack[0], len(size))
    )
    _report(8, "size-maximization sweep regime", monotone and saturated,
            f"sizes {size[0]:.3g}..{size[-1]:.3g}, saturation from index {slack[0] if slack else '-'}")


def test_criterion_09_sir_percolation_mapping():
    params = PercolationParams.from_rates(3.0, 1.0, 3.0, 1.0)  # T = 3/4 per type
    net = build_network(REG3, IncentivePolicy.zeros(3), 10_000, network_seed(55))
    perc = run_campaign(net, params, trials=200, master_seed=1000, method="percolation")
    sir = run_campaign(net, params, trials=200, master_seed=2000, method="sir")
    gap = abs(perc.mean_outbreak_size - sir.mean_outbreak_size)
    pooled = math.hypot(perc.se_mean_outbreak_size, sir.se_mean_outbreak_size)
    _report(9, "SIR vs percolation final size", gap <= 2.0 * pooled,
            f"gap {gap:.4g} vs 2 pooled se {2.0 * pooled:.4g}")


def test_criterion_10_subcritical_mean_component():
    params = PercolationParams(0.25, 0.25)
    stats = mean_component_size_at_q(REG3, 0.5, 0.5, params)
    analytic_ok = stats.s_mean == 2.5
    report = run_campaign(
        (REG3, IncentivePolicy.constant(0.5, 3), 100_000), params,
        trials=500, theta=0.01, master_seed=13,
    )
    rel = abs(report.mean_small_component - 2.5) / 2.5
    _report(10, "subcritical mean component size", analytic_ok and rel <= 0.10,
            f"analytic {stats.s_mean}, simulated {report.mean_small_component:.4g} "
            f"(rel err {rel:.3f})")
