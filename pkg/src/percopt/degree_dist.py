"""Finite degree distributions: constructors, moments, excess degree, sampling."""
from __future__ import annotations

import csv
import math

import numpy as np

from .errors import DegenerateDistributionError, ParameterError


def _normalized(raw: np.ndarray) -> np.ndarray:
    # fsum: heavy-tailed pmfs lose mass under naive left-to-right accumulation
    total = math.fsum(raw.tolist())
    if total <= 0.0:
        raise ParameterError("pmf has no mass")
    return raw / total


class DegreeDistribution:
    """Probability mass P(k) on degrees k = 0..k_max.

    ``probs[k]`` is the probability that a uniformly random node has exactly
    k neighbors.  The vector is stored dense and read-only.
    """

    __slots__ = ("probs",)

    def __init__(self, probs):
        p = np.array(probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ParameterError("pmf must be a non-empty 1-d vector")
        if not np.all(np.isfinite(p)):
            raise ParameterError("pmf contains non-finite mass")
        if np.any(p < 0.0):
            raise ParameterError("pmf contains negative mass")
        total = math.fsum(p.tolist())
        if abs(total - 1.0) > 1e-12:
            raise ParameterError(f"pmf must sum to 1 within 1e-12, got {total!r}")
        p.flags.writeable = False
        self.probs = p

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def power_law(cls, alpha: float, k_min: int = 1, k_max: int = 100) -> "DegreeDistribution":
        """P(k) proportional to k**(-alpha) on [k_min, k_max], zero elsewhere."""
        if not alpha > 1.0:
            raise ParameterError(f"power-law exponent must exceed 1, got {alpha}")
        k_min, k_max = int(k_min), int(k_max)
        if k_min < 1 or k_min > k_max:
            raise ParameterError(f"need 1 <= k_min <= k_max, got [{k_min}, {k_max}]")
        raw = np.zeros(k_max + 1)
        k = np.arange(k_min, k_max + 1, dtype=float)
        raw[k_min:] = k ** (-alpha)
        return cls(_normalized(raw))

    @classmethod
    def poisson(cls, mean: float, k_max: int = 100) -> "DegreeDistribution":
        """Poisson pmf with the given mean, truncated at k_max and renormalized."""
        if not mean > 0.0:
            raise ParameterError(f"poisson mean must be positive, got {mean}")
        k_max = int(k_max)
        if k_max < 1:
            raise ParameterError("k_max must be >= 1")
        raw = np.empty(k_max + 1)
        raw[0] = math.exp(-mean)
        for k in range(1, k_max + 1):
            raw[k] = raw[k - 1] * mean / k
        return cls(_normalized(raw))

    @classmethod
    def regular(cls, degree: int) -> "DegreeDistribution":
        """Point mass at the given degree (every node identical)."""
        degree = int(degree)
        if degree < 1:
            raise ParameterError(f"regular degree must be >= 1, got {degree}")
        raw = np.zeros(degree + 1)
        raw[degree] = 1.0
        return cls(raw)

    @classmethod
    def empirical(cls, weights) -> "DegreeDistribution":
        """Normalize a vector of nonnegative masses indexed by degree."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ParameterError("weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ParameterError("weights must be finite and nonnegative")
        return cls(_normalized(w))

    @classmethod
    def from_csv(cls, path) -> "DegreeDistribution":
        """Load a pmf from a two-column CSV ``k,prob`` (header required)."""
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip().lower() for c in header[:2]] != ["k", "prob"]:
                raise ParameterError(f"{path}: expected header 'k,prob'")
            masses: dict[int, float] = {}
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                try:
                    k = int(row[0])
                    mass = float(row[1])
                except (IndexError, ValueError) as exc:
                    raise ParameterError(f"{path}:{lineno}: bad row {row!r}") from exc
                if k < 0:
                    raise ParameterError(f"{path}:{lineno}: negative degree {k}")
                if k in masses:
                    raise ParameterError(f"{path}:{lineno}: duplicate degree {k}")
                masses[k] = mass
        if not masses:
            raise ParameterError(f"{path}: no rows")
        raw = np.zeros(max(masses) + 1)
        for k, mass in masses.items():
            raw[k] = mass
        return cls.empirical(raw)

    # ------------------------------------------------------------------
    # accessors

    @property
    def k_max(self) -> int:
        return self.probs.size - 1

    def moment(self, order: int) -> float:
        """Return sum_k k**order P(k) for order 1 or 2."""
        if order not in (1, 2):
            raise ParameterError(f"moment order must be 1 or 2, got {order}")
        k = np.arange(self.probs.size, dtype=float)
        return math.fsum((k**order * self.probs).tolist())

    def mean(self) -> float:
        return self.moment(1)

    def excess(self) -> "DegreeDistribution":
        """Degree distribution of a node reached along a random link, minus that link.

        Q(k) = (k+1) P(k+1) / <k>, supported on 0..k_max-1.
        """
        mean = self.mean()
        if mean <= 0.0:
            raise DegenerateDistributionError("excess degree undefined: mean degree is zero")
        k_plus_1 = np.arange(1, self.probs.size, dtype=float)
        raw = k_plus_1 * self.probs[1:]
        return DegreeDistribution(_normalized(raw))

    # ------------------------------------------------------------------
    # sampling

    def sample_degrees(self, n: int, seed) -> np.ndarray:
        """Draw n degrees; if the stub total is odd, bump one uniform node by 1."""
        if n < 1:
            raise ParameterError(f"need n >= 1, got {n}")
        rng = np.random.default_rng(seed)
        return _sample_degrees(self, int(n), rng)

    def __repr__(self) -> str:
        return f"DegreeDistribution(k_max={self.k_max}, mean={self.mean():.6g})"


def _sample_degrees(dist: DegreeDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    degrees = rng.choice(dist.probs.size, size=n, p=dist.probs)
    if degrees.sum() % 2 == 1:
        # standard even-total repair; distorts the sequence by O(1/n)
        degrees[rng.integers(n)] += 1
    return degrees
