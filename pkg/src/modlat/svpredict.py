"""Shortest-vector predictions from moment bounds.

Converts a second-moment error bound Err into a probabilistic bracket for the
first volume minimum V_1 = lambda_1^n * vol(B_n(1)) of a Haar-random rank-t
module lattice, plus reference predictions: the Haar baseline and Poisson
moments. All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from sympy.functions.combinatorial.numbers import stirling

from .fieldcore import CyclotomicField


def gamma_n(n: int) -> float:
    """Radius of the n-ball of unit volume: Gamma(n/2+1)^{1/n} / sqrt(pi)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return math.exp(math.lgamma(n / 2.0 + 1.0) / n) / math.sqrt(math.pi)


def poisson_moment(k: int, lam: float) -> float:
    """k-th moment of a Poisson(lam) variable: sum_j S2(k, j) * lam^j."""
    if k < 0 or int(k) != k:
        raise ValueError("moment order must be a nonnegative integer")
    if lam < 0:
        raise ValueError("mean must be nonnegative")
    return float(sum(int(stirling(k, j)) * lam ** j for j in range(k + 1)))


@dataclass(frozen=True)
class SVBracket:
    n: int
    epsilon: float
    err: float
    vol_low: float          # omega * epsilon
    vol_high: float         # omega / epsilon
    lambda_low: float
    lambda_high: float
    probability_floor: float

    def as_json(self) -> dict:
        return {"n": self.n, "epsilon": self.epsilon, "err": self.err,
                "vol_low": self.vol_low, "vol_high": self.vol_high,
                "lambda_low": self.lambda_low, "lambda_high": self.lambda_high,
                "probability_floor": self.probability_floor}


def sv_bracket(field: CyclotomicField, t: int, err: float,
               epsilon: float) -> SVBracket:
    """Volume-minimum bracket [omega*eps, omega/eps], holding with probability
    at least 1 - eps*(2 + omega*Err); lengths derived via gamma_n."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if err < 0:
        raise ValueError("error bound must be nonnegative")
    omega = field.omega
    n = t * field.d
    vol_low = omega * epsilon
    vol_high = omega / epsilon
    g = gamma_n(n)
    floor = 1.0 - epsilon * (2.0 + omega * err)
    return SVBracket(n=n, epsilon=epsilon, err=err,
                     vol_low=vol_low, vol_high=vol_high,
                     lambda_low=vol_low ** (1.0 / n) * g,
                     lambda_high=vol_high ** (1.0 / n) * g,
                     probability_floor=min(max(floor, 0.0), 1.0))


@dataclass(frozen=True)
class PredictionBracket:
    n: int
    center: float          # reference length scale
    low: float
    high: float
    half_width: float      # relative half-width around the center
    inflation: float       # (omega/2)^{1/n} - 1 vs the unstructured baseline
    theorem_backed: bool
    log_base: str = "natural"

    def as_json(self) -> dict:
        return {"n": self.n, "center": self.center, "low": self.low,
                "high": self.high, "half_width": self.half_width,
                "inflation": self.inflation,
                "theorem_backed": self.theorem_backed,
                "log_base": self.log_base}


def module_prediction(field: CyclotomicField, t: int) -> PredictionBracket:
    """lambda_1 bracket omega^{1/n}*gamma(n)*(1 +- lnln(omega)/n) for random
    rank-t module lattices, with the structured-vs-unstructured inflation."""
    if t < 2:
        raise ValueError("rank t must be at least 2")
    omega = field.omega
    n = t * field.d
    center = omega ** (1.0 / n) * gamma_n(n)
    hw = math.log(math.log(omega)) / n
    inflation = (omega / 2.0) ** (1.0 / n) - 1.0
    backed = field.m > 2 and t >= 11
    return PredictionBracket(n=n, center=center, low=center * (1.0 - hw),
                             high=center * (1.0 + hw), half_width=hw,
                             inflation=inflation, theorem_backed=backed)


def haar_prediction(n: int) -> PredictionBracket:
    """Unstructured baseline: lambda_1 near 2^{1/n}*gamma(n)."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    center = 2.0 ** (1.0 / n) * gamma_n(n)
    hw = math.log(math.log(n)) / n
    return PredictionBracket(n=n, center=center, low=center * (1.0 - hw),
                             high=center * (1.0 + hw), half_width=hw,
                             inflation=0.0, theorem_backed=True)
