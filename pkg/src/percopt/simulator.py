"""Monte Carlo ground truth on configuration-model graphs.

Networks are built by uniform stub matching (self-loops and multi-edges
kept; they cannot help spread).  Both trial types reduce to one reachability
kernel over per-node transmission thresholds:

* percolation trial: threshold is the type's transmissibility, so each
  directed edge u->v is occupied independently with probability T_type(u);
* SIR trial: each node draws an exponential recovery time R_u, and the
  threshold becomes 1 - exp(-beta_u R_u), the chance an exponential
  transmission clock beats the recovery.  This per-edge race is exact for
  the SIR final size and maps one-to-one onto the percolation trial.

Per-trial randomness is a pure function of (master_seed, trial_index) and
aggregation order is fixed, so reports are identical under any worker count.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _core
from .degree_dist import DegreeDistribution, _sample_degrees
from .errors import ParameterError
from .percolation import IncentivePolicy, PercolationParams


@dataclass
class Network:
    """Configuration-model multigraph with per-node types."""

    n: int
    indptr: np.ndarray  # int64, length n+1
    indices: np.ndarray  # int32, concatenated neighbor lists (stub order)
    node_type: np.ndarray  # uint8, 1 = ordinary, 2 = selected
    node_degree: np.ndarray  # int64
    edges: np.ndarray  # (E, 2) int32, one row per undirected edge

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]


@dataclass
class TrialOutcome:
    reached: int
    is_outbreak: bool
    reached_type1: int
    reached_type2: int


@dataclass
class SimulationReport:
    trials: int
    outbreak_fraction: float
    mean_outbreak_size: float  # mean reached/n over outbreak trials
    mean_small_component: float  # mean reached count over non-outbreak trials
    se_outbreak_fraction: float
    se_mean_outbreak_size: float
    se_mean_small_component: float


def build_network(
    dist: DegreeDistribution, policy: IncentivePolicy, n: int, seed
) -> Network:
    """Sample a degree sequence, assign types by phi(degree), match stubs."""
    if n < 2:
        raise ParameterError(f"need n >= 2 nodes, got {n}")
    if policy.phi.size != dist.probs.size:
        raise ParameterError("policy support does not match distribution support")
    rng = np.random.default_rng(seed)
    degrees = _sample_degrees(dist, int(n), rng)
    node_type = np.where(rng.random(n) < policy.phi[degrees], 2, 1).astype(np.uint8)

    stubs = np.repeat(np.arange(n, dtype=np.int32), degrees)
    rng.shuffle(stubs)
    edges = stubs.reshape(-1, 2)

    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.argsort(src, kind="stable")
    indices = np.ascontiguousarray(dst[order], dtype=np.int32)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Network(
        n=int(n),
        indptr=indptr,
        indices=indices,
        node_type=node_type,
        node_degree=degrees.astype(np.int64),
        edges=np.ascontiguousarray(edges, dtype=np.int32),
    )


def _finish_trial(net, visited, theta):
    reached = int(visited.sum())
    reached2 = int(visited[net.node_type == 2].sum())
    return TrialOutcome(
        reached=reached,
        is_outbreak=reached >= theta * net.n,
        reached_type1=reached - reached2,
        reached_type2=reached2,
    )


def percolation_trial(
    net: Network,
    params: PercolationParams,
    seed,
    theta: float = 0.01,
    seed_node: int | None = None,
) -> TrialOutcome:
    """Occupy directed edges by source type and count the out-reachable set."""
    rng = np.random.default_rng(seed)
    threshold = np.where(net.node_type == 2, params.t2, params.t1)
    coins = rng.random(net.indices.size)
    if seed_node is None:
        seed_node = int(rng.integers(net.n))
    visited = _core.reach_mask(net.indptr, net.indices, threshold, coins, seed_node)
    return _finish_trial(net, visited, theta)


def sir_trial(
    net: Network,
    params: PercolationParams,
    seed,
    theta: float = 0.01,
    seed_node: int | None = None,
) -> TrialOutcome:
    """Continuous-time SIR final size via the per-edge transmission race."""
    if params.rates is None:
        raise ParameterError("sir_trial needs PercolationParams.from_rates(...)")
    beta1, mu1, beta2, mu2 = params.rates
    selected = net.node_type == 2
    beta = np.where(selected, beta2, beta1)
    mu = np.where(selected, mu2, mu1)
    rng = np.random.default_rng(seed)
    scale = np.divide(1.0, mu, out=np.full(net.n, np.inf), where=mu > 0)
    recovery = rng.exponential(scale)
    with np.errstate(invalid="ignore"):
        threshold = -np.expm1(-np.where(beta > 0, beta * recovery, 0.0))
    coins = rng.random(net.indices.size)
    if seed_node is None:
        seed_node = int(rng.integers(net.n))
    visited = _core.reach_mask(net.indptr, net.indices, threshold, coins, seed_node)
    return _finish_trial(net, visited, theta)


# ----------------------------------------------------------------------
# campaign harness

_TRIAL_FNS = {"percolation": percolation_trial, "sir": sir_trial}

_WORKER_CTX: tuple | None = None


def _worker_init(net, params, theta, master_seed, method):
    global _WORKER_CTX
    _WORKER_CTX = (net, params, theta, master_seed, method)


def _worker_trial(index: int) -> TrialOutcome:
    net, params, theta, master_seed, method = _WORKER_CTX
    return _TRIAL_FNS[method](net, params, trial_seed(master_seed, index), theta)


def trial_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Deterministic per-trial seed; pure function of (master_seed, index)."""
    return np.random.SeedSequence([int(master_seed), 0, int(index)])


def network_seed(master_seed: int) -> np.random.SeedSequence:
    # the leading 1 keeps the graph stream disjoint from every trial stream
    return np.random.SeedSequence([int(master_seed), 1])


def run_campaign(
    net,
    params: PercolationParams,
    trials: int,
    theta: float = 0.01,
    master_seed: int = 0,
    method: str = "percolation",
    workers: int = 1,
) -> SimulationReport:
    """Run independent seeded trials and aggregate in fixed trial order.

    ``net`` is either a built Network or a (dist, policy, n) triple, in which
    case the graph is constructed once from a seed derived from master_seed.
    """
    if trials < 1:
        raise ParameterError(f"need trials >= 1, got {trials}")
    if master_seed < 0:
        raise ParameterError(f"master_seed must be nonnegative, got {master_seed}")
    if not 0.0 < theta < 1.0:
        raise ParameterError(f"theta must lie in (0,1), got {theta}")
    if method not in _TRIAL_FNS:
        raise ParameterError(f"unknown method {method!r}")
    if not isinstance(net, Network):
        dist, policy, n = net
        net = build_network(dist, policy, n, network_seed(master_seed))

    if workers > 1:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_worker_init,
            initargs=(net, params, theta, master_seed, method),
        ) as pool:
            outcomes = list(pool.map(_worker_trial, range(trials), chunksize=64))
    else:
        fn = _TRIAL_FNS[method]
        outcomes = [
            fn(net, params, trial_seed(master_seed, i), theta) for i in range(trials)
        ]

    big = [o.reached / net.n for o in outcomes if o.is_outbreak]
    small = [float(o.reached) for o in outcomes if not o.is_outbreak]
    frac = len(big) / trials
    return SimulationReport(
        trials=trials,
        outbreak_fraction=frac,
        mean_outbreak_size=_mean(big),
        mean_small_component=_mean(small),
        se_outbreak_fraction=math.sqrt(frac * (1.0 - frac) / trials),
        se_mean_outbreak_size=_stderr(big),
        se_mean_small_component=_stderr(small),
    )


def _mean(values: list[float]) -> float:
    if not values:
        return math.nan
    return math.fsum(values) / len(values)


def _stderr(values: list[float]) -> float:
    m = len(values)
    if m == 0:
        return math.nan
    if m == 1:
        return 0.0
    mean = _mean(values)
    var = math.fsum((v - mean) ** 2 for v in values) / (m - 1)
    return math.sqrt(var / m)


# ----------------------------------------------------------------------
# exports

def write_edge_csv(net: Network, path) -> None:
    """One undirected edge per row (self-loops and multiplicities kept)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["u", "v"])
        writer.writerows(net.edges.tolist())


def write_node_csv(net: Network, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "degree", "type"])
        for u in range(net.n):
            writer.writerow([u, int(net.node_degree[u]), int(net.node_type[u])])
