"""Bond-percolation analytics for the two-type spreading model.

Ordinary nodes (type 1) transmit along an edge with probability T1, selected
(incentivized, type 2) nodes with probability T2.  When a random link points
to a type-2 node with probability q, the two-type model collapses exactly to
a single effective transmissibility

    T_eff(q) = (1 - q) T1 + q T2,

because the joint neighbor-type distribution is binomial.  Every quantity
here is computed through that collapse; the explicit double sums over
(k1, k2) serve as independent oracles in the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .degree_dist import DegreeDistribution
from .errors import (
    ConvergenceError,
    DegenerateDistributionError,
    InfeasibleError,
    ParameterError,
    SupercriticalError,
)

# |branching factor - 1| below this band counts as critical: no outbreak
CRITICAL_BAND = 1e-9

_FIXED_POINT_ITERS = 200
_BISECT_ITERS = 200


def transmissibility(beta: float, mu: float) -> float:
    """Probability of transmitting along an edge before recovery: beta/(beta+mu)."""
    if beta < 0.0 or mu < 0.0:
        raise ParameterError(f"rates must be nonnegative, got beta={beta}, mu={mu}")
    if beta + mu <= 0.0:
        raise ParameterError("beta and mu cannot both be zero")
    return beta / (beta + mu)


@dataclass(frozen=True)
class PercolationParams:
    """Per-type transmissibilities, optionally remembering the SIR rates."""

    t1: float
    t2: float
    rates: tuple[float, float, float, float] | None = None  # (beta1, mu1, beta2, mu2)

    def __post_init__(self):
        for name, t in (("T1", self.t1), ("T2", self.t2)):
            if not 0.0 <= t <= 1.0:
                raise ParameterError(f"{name} must lie in [0,1], got {t}")

    @classmethod
    def from_rates(cls, beta1: float, mu1: float, beta2: float, mu2: float) -> "PercolationParams":
        return cls(
            t1=transmissibility(beta1, mu1),
            t2=transmissibility(beta2, mu2),
            rates=(float(beta1), float(mu1), float(beta2), float(mu2)),
        )

    def require_ordered(self) -> None:
        """Monotonicity of outbreak size in q needs T2 > T1."""
        if not self.t2 > self.t1:
            raise ParameterError(f"requires T2 > T1, got T1={self.t1}, T2={self.t2}")


@dataclass(frozen=True)
class IncentivePolicy:
    """Fraction phi(k) of degree-k nodes that are incentivized (type 2)."""

    phi: np.ndarray

    def __post_init__(self):
        p = np.array(self.phi, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ParameterError("phi must be a non-empty 1-d vector")
        if not np.all(np.isfinite(p)):
            raise ParameterError("phi contains non-finite entries")
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ParameterError("phi entries must lie in [0,1]")
        p.flags.writeable = False
        object.__setattr__(self, "phi", p)

    @classmethod
    def constant(cls, value: float, k_max: int) -> "IncentivePolicy":
        return cls(np.full(int(k_max) + 1, float(value)))

    @classmethod
    def zeros(cls, k_max: int) -> "IncentivePolicy":
        return cls.constant(0.0, k_max)

    @classmethod
    def ones(cls, k_max: int) -> "IncentivePolicy":
        return cls.constant(1.0, k_max)

    @classmethod
    def from_table(cls, table: dict, k_max: int) -> "IncentivePolicy":
        """Dense policy from a {degree: fraction} mapping; missing degrees get 0."""
        phi = np.zeros(int(k_max) + 1)
        for k, value in table.items():
            k = int(k)
            if not 0 <= k <= k_max:
                raise ParameterError(f"policy degree {k} outside support 0..{k_max}")
            phi[k] = float(value)
        return cls(phi)

    @property
    def k_max(self) -> int:
        return self.phi.size - 1


@dataclass(frozen=True)
class TwoTypeMixture:
    """q: probability a random link leads to a type-2 node; p: fraction of type-2 nodes."""

    q: float
    p: float


@dataclass(frozen=True)
class OutbreakAnalysis:
    nu_tilde: float
    u_star: float
    psi: float
    size: float
    supercritical: bool


@dataclass(frozen=True)
class ComponentStats:
    s_mean: float
    s1_mean: float
    s2_mean: float
    k_tilde_1: float
    k_tilde_2: float


# ----------------------------------------------------------------------
# mixture

def mixture(dist: DegreeDistribution, policy: IncentivePolicy) -> TwoTypeMixture:
    """Link-level and node-level probabilities of meeting a type-2 node.

    q = (1/<k>) sum_k k phi(k) P(k),   p = sum_k phi(k) P(k).
    """
    if policy.phi.size != dist.probs.size:
        raise ParameterError(
            f"policy support 0..{policy.k_max} does not match "
            f"distribution support 0..{dist.k_max}"
        )
    mean = dist.mean()
    if mean <= 0.0:
        raise DegenerateDistributionError("mixture undefined: mean degree is zero")
    k = np.arange(dist.probs.size, dtype=float)
    q = math.fsum((k * policy.phi * dist.probs).tolist()) / mean
    p = math.fsum((policy.phi * dist.probs).tolist())
    return TwoTypeMixture(q=min(max(q, 0.0), 1.0), p=min(max(p, 0.0), 1.0))


# ----------------------------------------------------------------------
# collapsed evaluations

def _check_q(q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise ParameterError(f"q must lie in [0,1], got {q}")
    return float(q)


def effective_transmissibility(q: float, params: PercolationParams) -> float:
    """Mean transmissibility of the node at the end of a random link."""
    return (1.0 - q) * params.t1 + q * params.t2


def _pgf(probs: np.ndarray, x: float) -> float:
    """sum_k probs[k] x**k, compensated."""
    if x == 1.0:
        return 1.0
    k = np.arange(probs.size, dtype=float)
    return math.fsum((probs * np.power(x, k)).tolist())


def excess_mean(dist: DegreeDistribution) -> float:
    """Mean excess degree (<k^2> - <k>) / <k>."""
    mean = dist.mean()
    if mean <= 0.0:
        raise DegenerateDistributionError("excess degree undefined: mean degree is zero")
    return (dist.moment(2) - mean) / mean


def branching_factor_at_q(dist: DegreeDistribution, q: float, params: PercolationParams) -> float:
    """Expected occupied onward links from a newly informed node."""
    q = _check_q(q)
    return effective_transmissibility(q, params) * excess_mean(dist)


def fixed_point_rhs(dist: DegreeDistribution, q: float, params: PercolationParams, u: float) -> float:
    """Right-hand side of the self-consistency equation for u."""
    q = _check_q(q)
    t_eff = effective_transmissibility(q, params)
    return _pgf(dist.excess().probs, 1.0 + (u - 1.0) * t_eff)


def psi_at_u(dist: DegreeDistribution, q: float, params: PercolationParams, u: float) -> float:
    """Probability a random node is outside the giant component, given u."""
    q = _check_q(q)
    if u == 1.0:
        return 1.0
    t_eff = effective_transmissibility(q, params)
    return _pgf(dist.probs, 1.0 + (u - 1.0) * t_eff)


def solve_fixed_point_at_q(
    dist: DegreeDistribution, q: float, params: PercolationParams, tol: float = 1e-12
) -> float:
    """Smallest u in [0,1] with u = f(u); returns 1 when no smaller root exists.

    Iterates u <- f(u) from 0 (f is increasing and convex, so this converges
    monotonically to the smallest root); near criticality the iteration stalls
    and we fall back to bisection on f(u) - u, which brackets the same root.
    """
    if not tol > 0.0:
        raise ParameterError(f"tol must be positive, got {tol}")
    q = _check_q(q)
    nu = branching_factor_at_q(dist, q, params)
    if nu <= 1.0 + CRITICAL_BAND:
        return 1.0

    excess_probs = dist.excess().probs
    t_eff = effective_transmissibility(q, params)

    def f(u: float) -> float:
        return _pgf(excess_probs, 1.0 + (u - 1.0) * t_eff)

    u = 0.0
    for _ in range(_FIXED_POINT_ITERS):
        fu = f(u)
        if abs(fu - u) <= tol:
            return fu
        u = fu

    # bisection fallback: g > 0 below the smallest root, g < 0 between it and 1
    lo, hi = u, 1.0 - 1e-9
    if f(hi) - hi >= 0.0:
        return 1.0  # root indistinguishable from 1: treat as no outbreak
    for _ in range(_BISECT_ITERS):
        if hi - lo <= 1e-15:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) - mid > 0.0:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    if abs(f(u) - u) > tol:
        raise ConvergenceError(
            f"fixed point not resolved to {tol} (residual {abs(f(u) - u):.3e})",
            last_iterate=u,
        )
    return u


def outbreak_analysis_at_q(
    dist: DegreeDistribution, q: float, params: PercolationParams, tol: float = 1e-12
) -> OutbreakAnalysis:
    """Threshold, fixed point, and outbreak size at a given link-type probability q."""
    q = _check_q(q)
    nu = branching_factor_at_q(dist, q, params)
    u = solve_fixed_point_at_q(dist, q, params, tol=tol)
    if u == 1.0:
        psi, size = 1.0, 0.0
    else:
        psi = psi_at_u(dist, q, params, u)
        psi = min(max(psi, 0.0), 1.0)
        size = 1.0 - psi
    return OutbreakAnalysis(
        nu_tilde=nu, u_star=u, psi=psi, size=size, supercritical=bool(nu >= 1.0)
    )


def mean_component_size_at_q(
    dist: DegreeDistribution, q: float, p: float, params: PercolationParams
) -> ComponentStats:
    """Expected informed-cluster size below threshold, split by node type.

    p only affects the type split, not the total.  Diverges as the branching
    factor approaches 1, hence the strict subcriticality requirement.
    """
    q = _check_q(q)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0,1], got {p}")
    nu = branching_factor_at_q(dist, q, params)
    if nu >= 1.0:
        raise SupercriticalError(
            f"mean component size diverges at or above threshold (nu={nu:.6g})"
        )
    mean = dist.mean()
    e_excess = excess_mean(dist)
    kbar1 = (1.0 - q) * e_excess
    kbar2 = q * e_excess
    kt1 = params.t1 * (1.0 - q) * mean  # mean occupied links from type-1 neighbors
    kt2 = params.t2 * q * mean
    denom = 1.0 - params.t1 * kbar1 - params.t2 * kbar2
    s1 = (1.0 - p) + (kt1 * (1.0 - params.t2 * kbar2) + kt2 * params.t1 * kbar1) / denom
    s2 = p + (kt1 * params.t2 * kbar2 + kt2 * (1.0 - params.t1 * kbar1)) / denom
    s = 1.0 + (kt1 + kt2) / denom
    return ComponentStats(s_mean=s, s1_mean=s1, s2_mean=s2, k_tilde_1=kt1, k_tilde_2=kt2)


# ----------------------------------------------------------------------
# policy-level wrappers

def branching_factor(
    dist: DegreeDistribution, policy: IncentivePolicy, params: PercolationParams
) -> float:
    return branching_factor_at_q(dist, mixture(dist, policy).q, params)


def solve_fixed_point(
    dist: DegreeDistribution,
    policy: IncentivePolicy,
    params: PercolationParams,
    tol: float = 1e-12,
) -> float:
    return solve_fixed_point_at_q(dist, mixture(dist, policy).q, params, tol=tol)


def outbreak_analysis(
    dist: DegreeDistribution,
    policy: IncentivePolicy,
    params: PercolationParams,
    tol: float = 1e-12,
) -> OutbreakAnalysis:
    return outbreak_analysis_at_q(dist, mixture(dist, policy).q, params, tol=tol)


def mean_component_size(
    dist: DegreeDistribution, policy: IncentivePolicy, params: PercolationParams
) -> ComponentStats:
    mix = mixture(dist, policy)
    return mean_component_size_at_q(dist, mix.q, mix.p, params)


# ----------------------------------------------------------------------
# outreach inversion

def invert_outreach(
    dist: DegreeDistribution, params: PercolationParams, gamma: float, tol: float = 1e-10
) -> float:
    """Smallest q whose outbreak size reaches gamma, by bisection.

    Outbreak size is nondecreasing in q when T2 > T1, so the predicate
    size(q) >= gamma is monotone and bisection returns its left edge.
    """
    params.require_ordered()
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0,1], got {gamma}")
    if not tol > 0.0:
        raise ParameterError(f"tol must be positive, got {tol}")
    if gamma == 0.0:
        return 0.0

    def size(q: float) -> float:
        return outbreak_analysis_at_q(dist, q, params).size

    best = size(1.0)
    if best < gamma:
        raise InfeasibleError(
            f"outreach target {gamma} unreachable: even with every node "
            f"incentivized the outbreak size is {best:.6g}",
            reason="target",
            max_achievable=best,
        )
    if size(0.0) >= gamma:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(_BISECT_ITERS):
        if hi - lo < tol:
            break
        mid = 0.5 * (lo + hi)
        if size(mid) >= gamma:
            hi = mid
        else:
            lo = mid
    return hi
