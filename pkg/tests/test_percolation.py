import math

import numpy as np
import pytest

from oracles import (
    combinatorial_identity_lhs,
    fixed_point_rhs_double_sum,
    nu_double_sum,
    psi_double_sum,
)
from percopt import (
    DegreeDistribution,
    IncentivePolicy,
    InfeasibleError,
    ParameterError,
    PercolationParams,
    SupercriticalError,
    branching_factor,
    branching_factor_at_q,
    fixed_point_rhs,
    invert_outreach,
    mean_component_size,
    mean_component_size_at_q,
    mixture,
    outbreak_analysis,
    outbreak_analysis_at_q,
    psi_at_u,
    solve_fixed_point_at_q,
    transmissibility,
)

REG3 = DegreeDistribution.regular(3)


def random_dist(rng, k_max=30):
    weights = rng.random(k_max + 1) ** 3
    weights[0] = 0.0
    return DegreeDistribution.empirical(weights)


# ----------------------------------------------------------------------
# transmissibility and mixture

def test_transmissibility_values():
    assert transmissibility(1.0, 1.0) == 0.5
    assert transmissibility(0.0, 1.0) == 0.0
    assert transmissibility(3.0, 1.0) == 0.75


def test_transmissibility_rejects_dead_rates():
    with pytest.raises(ParameterError):
        transmissibility(0.0, 0.0)
    with pytest.raises(ParameterError):
        transmissibility(-1.0, 2.0)


def test_params_from_rates():
    params = PercolationParams.from_rates(3.0, 1.0, 1.0, 0.0)
    assert params.t1 == 0.75
    assert params.t2 == 1.0
    assert params.rates == (3.0, 1.0, 1.0, 0.0)


def test_mixture_all_and_constant():
    dist = DegreeDistribution.power_law(2.5, 1, 60)
    all_in = mixture(dist, IncentivePolicy.ones(dist.k_max))
    assert all_in.q == pytest.approx(1.0, abs=1e-14)
    assert all_in.p == pytest.approx(1.0, abs=1e-14)
    third = mixture(dist, IncentivePolicy.constant(0.3, dist.k_max))
    assert third.q == pytest.approx(0.3, abs=1e-14)
    assert third.p == pytest.approx(0.3, abs=1e-14)


def test_mixture_hand_case():
    dist = DegreeDistribution.empirical([0.0, 0.5, 0.0, 0.5])
    policy = IncentivePolicy(np.array([0.0, 0.0, 0.0, 1.0]))
    mix = mixture(dist, policy)
    assert mix.q == pytest.approx(0.75, abs=1e-15)
    assert mix.p == pytest.approx(0.5, abs=1e-15)


def test_mixture_rejects_support_mismatch():
    with pytest.raises(ParameterError):
        mixture(REG3, IncentivePolicy.ones(5))


# ----------------------------------------------------------------------
# branching factor

def test_branching_factor_regular_single_type():
    params = PercolationParams(0.4, 0.4)
    nu = branching_factor_at_q(REG3, 0.3, params)
    assert nu == pytest.approx(0.8, abs=1e-15)
    assert nu == pytest.approx(nu_double_sum(REG3.probs, 0.3, 0.4, 0.4), abs=1e-12)


def test_branching_factor_zero_transmissibility():
    assert branching_factor_at_q(REG3, 0.4, PercolationParams(0.0, 0.0)) == 0.0


def test_branching_factor_critical_mix():
    nu = branching_factor_at_q(REG3, 0.5, PercolationParams(0.0, 1.0))
    assert nu == 1.0
    assert nu_double_sum(REG3.probs, 0.5, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_collapse_matches_double_sums_on_random_inputs():
    rng = np.random.default_rng(42)
    for _ in range(25):
        dist = random_dist(rng)
        q = rng.random()
        params = PercolationParams(rng.random(), rng.random())
        assert branching_factor_at_q(dist, q, params) == pytest.approx(
            nu_double_sum(dist.probs, q, params.t1, params.t2), abs=1e-10
        )
        for u in (0.0, rng.random(), 1.0):
            assert fixed_point_rhs(dist, q, params, u) == pytest.approx(
                fixed_point_rhs_double_sum(dist.probs, q, params.t1, params.t2, u),
                abs=1e-10,
            )
            assert psi_at_u(dist, q, params, u) == pytest.approx(
                psi_double_sum(dist.probs, q, params.t1, params.t2, u), abs=1e-10
            )


def test_single_type_reduces_to_scalar_threshold_condition():
    # with T1 = T2 = T the threshold quantity is T (<k^2> - <k>) / <k>, whatever phi is
    rng = np.random.default_rng(7)
    for _ in range(10):
        dist = random_dist(rng, k_max=20)
        t = rng.random()
        params = PercolationParams(t, t)
        phi = IncentivePolicy(rng.random(dist.probs.size))
        expected = t * (dist.moment(2) - dist.moment(1)) / dist.moment(1)
        assert branching_factor(dist, phi, params) == pytest.approx(expected, abs=1e-12)


# ----------------------------------------------------------------------
# fixed point

def test_fixed_point_subcritical_returns_one():
    assert solve_fixed_point_at_q(REG3, 0.2, PercolationParams(0.3, 0.4)) == 1.0


def test_fixed_point_quadratic_closed_form():
    # 3-regular, T = 3/4: u = (1/4 + 3u/4)^2 has roots 1/9 and 1
    u = solve_fixed_point_at_q(REG3, 0.37, PercolationParams(0.75, 0.75))
    assert u == pytest.approx(1.0 / 9.0, abs=1e-10)


def test_fixed_point_full_transmission():
    u = solve_fixed_point_at_q(REG3, 0.5, PercolationParams(1.0, 1.0))
    assert u == 0.0


def test_fixed_point_is_smallest_root():
    params = PercolationParams(0.75, 0.75)
    u_star = solve_fixed_point_at_q(REG3, 0.0, params)
    for u in np.linspace(0.0, u_star - 1e-6, 25):
        assert fixed_point_rhs(REG3, 0.0, params, u) > u


def test_psi_at_unity_is_exactly_one():
    assert psi_at_u(REG3, 0.3, PercolationParams(0.5, 0.9), 1.0) == 1.0
    rng = np.random.default_rng(3)
    dist = random_dist(rng)
    assert psi_double_sum(dist.probs, 0.3, 0.5, 0.9, 1.0) == pytest.approx(1.0, abs=1e-12)


# ----------------------------------------------------------------------
# outbreak analysis

def test_outbreak_zero_transmissibility():
    res = outbreak_analysis_at_q(REG3, 0.4, PercolationParams(0.0, 0.0))
    assert res.size == 0.0
    assert res.psi == 1.0
    assert not res.supercritical
    assert res.u_star == 1.0


def test_outbreak_closed_form_26_27():
    res = outbreak_analysis_at_q(REG3, 0.0, PercolationParams(0.75, 0.75))
    assert res.size == pytest.approx(26.0 / 27.0, abs=1e-9)
    assert res.psi == pytest.approx(1.0 / 27.0, abs=1e-9)
    assert res.supercritical


def test_outbreak_exactly_critical_is_zero():
    res = outbreak_analysis_at_q(REG3, 0.5, PercolationParams(0.0, 1.0))
    assert res.nu_tilde == 1.0
    assert res.size == 0.0
    assert res.supercritical  # threshold condition is nu >= 1


def test_outbreak_policy_wrapper_matches_at_q():
    dist = DegreeDistribution.power_law(2.5, 1, 60)
    params = PercolationParams(0.35, 0.6)
    policy = IncentivePolicy.constant(0.4, dist.k_max)
    via_policy = outbreak_analysis(dist, policy, params)
    via_q = outbreak_analysis_at_q(dist, mixture(dist, policy).q, params)
    assert via_policy == via_q


# ----------------------------------------------------------------------
# monotonicity in q (finite differences)

@pytest.mark.parametrize("t1", [0.3, 0.45])
def test_branching_factor_strictly_increasing_in_q(t1):
    dist = DegreeDistribution.power_law(2.5, 1, 100)
    params = PercolationParams(t1, 0.6)
    grid = np.linspace(0.0, 1.0, 50)
    nu = [branching_factor_at_q(dist, q, params) for q in grid]
    diffs = np.diff(nu)
    assert np.all(diffs > 0.0)


@pytest.mark.parametrize("t1", [0.3, 0.45])
def test_outbreak_size_strictly_increasing_in_q(t1):
    dist = DegreeDistribution.power_law(2.5, 1, 100)
    params = PercolationParams(t1, 0.6)
    grid = np.linspace(0.0, 1.0, 50)
    psi = [outbreak_analysis_at_q(dist, q, params).psi for q in grid]
    interior = [(a, b) for a, b in zip(psi, psi[1:]) if 0.0 < a < 1.0 and 0.0 < b < 1.0]
    assert interior, "grid never leaves the boundary"
    for a, b in interior:
        assert b < a


def test_combinatorial_identity_small_batch():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(1, 11))
        f_values = rng.normal(size=2 * n + 1)
        a, b = rng.random(), rng.random()
        assert abs(combinatorial_identity_lhs(f_values, a, b, n)) <= 1e-10


# ----------------------------------------------------------------------
# mean component size

def test_mean_component_size_isolated_seed():
    stats = mean_component_size_at_q(REG3, 0.2, 0.2, PercolationParams(0.0, 0.0))
    assert stats.s_mean == 1.0


def test_mean_component_size_closed_form():
    stats = mean_component_size_at_q(REG3, 0.5, 0.5, PercolationParams(0.25, 0.25))
    assert stats.s_mean == 2.5
    assert stats.s1_mean + stats.s2_mean == pytest.approx(stats.s_mean, abs=1e-12)


def test_mean_component_size_policy_wrapper():
    policy = IncentivePolicy.constant(0.5, REG3.k_max)
    stats = mean_component_size(REG3, policy, PercolationParams(0.25, 0.25))
    assert stats.s_mean == 2.5


def test_mean_component_size_diverges_towards_threshold():
    # same distribution, nu = 0.9 vs 0.99 via the transmissibility
    near = mean_component_size_at_q(REG3, 0.0, 0.0, PercolationParams(0.495, 0.495))
    far = mean_component_size_at_q(REG3, 0.0, 0.0, PercolationParams(0.45, 0.45))
    assert near.s_mean > far.s_mean


def test_mean_component_size_rejects_supercritical():
    with pytest.raises(SupercriticalError):
        mean_component_size_at_q(REG3, 0.0, 0.0, PercolationParams(0.75, 0.75))


# ----------------------------------------------------------------------
# outreach inversion

def test_invert_outreach_zero_target():
    dist = DegreeDistribution.power_law(2.5, 1, 100)
    assert invert_outreach(dist, PercolationParams(0.35, 0.6), 0.0) == 0.0


def test_invert_outreach_infeasible_reports_max():
    params = PercolationParams(0.05, 0.1)  # subcritical even at q = 1
    with pytest.raises(InfeasibleError) as err:
        invert_outreach(REG3, params, 0.5)
    assert err.value.reason == "target"
    assert err.value.max_achievable == pytest.approx(0.0, abs=1e-12)


def test_invert_outreach_requires_ordered_transmissibilities():
    with pytest.raises(ParameterError):
        invert_outreach(REG3, PercolationParams(0.6, 0.6), 0.2)


def test_invert_outreach_matches_grid_scan():
    dist = DegreeDistribution.power_law(2.5, 1, 100)
    params = PercolationParams(0.35, 0.6)
    gamma = 0.2
    q_star = invert_outreach(dist, params, gamma, tol=1e-9)

    def size(q):
        return outbreak_analysis_at_q(dist, q, params).size

    # two-stage scan: coarse bracket, then 1e-6 resolution inside it
    coarse = np.arange(0.0, 1.0 + 1e-3, 1e-3)
    hit = next(i for i, q in enumerate(coarse) if size(q) >= gamma)
    fine = np.arange(coarse[hit - 1], coarse[hit] + 1e-6, 1e-6)
    q_grid = next(q for q in fine if size(q) >= gamma)
    assert abs(q_star - q_grid) <= 1e-6 + 1e-9
