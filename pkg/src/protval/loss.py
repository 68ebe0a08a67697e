"""Stochastic loss-ratio scenarios for portfolios known only in aggregate.

The actuarial loss ratio S/P of year 1 is drawn from a lognormal law whose
parameters are inverted from the expected ratio and a relative volatility.
The volatility either comes straight from the portfolio's configuration or
from a qualitative scoring grid: one age criterion and five risk criteria,
each mapped to a multiplicative weight; the product of the six selected
weights is the volatility.

Later years revert geometrically to the deterministic chronicle: the year-1
gap shrinks by a factor ``reversion_speed`` per year. A speed of 0.8 halves
the gap in about three years.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .errors import ConfigError

if TYPE_CHECKING:
    from .projection import PortfolioSpec

DEFAULT_REVERSION_SPEED = 0.8
DEFAULT_SCENARIOS = 10_000
DEFAULT_HORIZON = 30

RATING_LEVELS = ("strong", "moderate", "weak")
AGE_BUCKETS = ("lt_1y", "lt_4y", "ge_4y")
AGE_CRITERION = "portfolio_age"
RATING_CRITERIA = (
    "homogeneity",
    "technical_bases_quality",
    "concentration",
    "moral_hazard",
    "litigation",
)
CRITERIA = (AGE_CRITERION,) + RATING_CRITERIA

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Acklam's rational approximation of the standard normal quantile
# (relative error ~1.15e-9 before refinement).
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def norm_inv(u: float) -> float:
    """Standard normal quantile, accurate to well below 1e-9 absolute.

    Rational approximation refined with one Halley step against the
    erfc-based CDF, which leaves errors near machine precision.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"probability must be in (0, 1), got {u}")

    if u < _P_LOW:
        q = math.sqrt(-2.0 * math.log(u))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif u <= 1.0 - _P_LOW:
        q = u - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - u))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))

    # Halley refinement: e is the CDF residual at x.
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - u
    w = e * _SQRT_2PI * math.exp(0.5 * x * x)
    return x - w / (1.0 + 0.5 * x * w)


@dataclass(frozen=True)
class RiskCriteria:
    """Qualitative volatility drivers of one portfolio.

    The five risk ratings take the levels "strong", "moderate" or "weak"
    (the level of risk, not of quality: a strong concentration risk pushes
    volatility up).
    """

    portfolio_age: float
    homogeneity: str
    technical_bases_quality: str
    concentration: str
    moral_hazard: str
    litigation: str

    def __post_init__(self) -> None:
        if self.portfolio_age < 0.0:
            raise ValueError(f"portfolio age must be >= 0, got {self.portfolio_age}")
        for name in RATING_CRITERIA:
            level = getattr(self, name)
            if level not in RATING_LEVELS:
                raise ValueError(f"{name} must be one of {RATING_LEVELS}, got {level!r}")

    @property
    def age_bucket(self) -> str:
        if self.portfolio_age < 1.0:
            return "lt_1y"
        if self.portfolio_age < 4.0:
            return "lt_4y"
        return "ge_4y"


@dataclass(frozen=True)
class WeightMatrix:
    """Multiplicative weight per (criterion, bucket) cell of the scoring grid."""

    cells: Mapping[str, Mapping[str, float]]

    def __post_init__(self) -> None:
        for criterion in CRITERIA:
            buckets = AGE_BUCKETS if criterion == AGE_CRITERION else RATING_LEVELS
            row = self.cells.get(criterion)
            if row is None:
                raise ConfigError(f"weight matrix is missing criterion {criterion!r}")
            for bucket in buckets:
                weight = row.get(bucket)
                if weight is None:
                    raise ConfigError(f"weight matrix is missing cell ({criterion!r}, {bucket!r})")
                if weight <= 0.0:
                    raise ConfigError(
                        f"weight for ({criterion!r}, {bucket!r}) must be > 0, got {weight}"
                    )

    def weight(self, criterion: str, bucket: str) -> float:
        try:
            return float(self.cells[criterion][bucket])
        except KeyError as exc:
            raise ConfigError(f"weight matrix is missing cell ({criterion!r}, {bucket!r})") from exc


def volatility_score(criteria: RiskCriteria, weights: WeightMatrix) -> float:
    """Relative volatility of S/P as the product of the six selected weights."""
    vol = weights.weight(AGE_CRITERION, criteria.age_bucket)
    for name in RATING_CRITERIA:
        vol *= weights.weight(name, getattr(criteria, name))
    return vol


@dataclass(frozen=True)
class LognormalParams:
    """Parameters of the lognormal law LN(mu, sigma) followed by S/P(1).

    sigma = 0 is the degenerate point mass at exp(mu).
    """

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        try:
            finite = math.isfinite(self.mean)
        except OverflowError:
            finite = False
        if not finite:
            raise ValueError("implied mean exp(mu + sigma^2/2) must be finite")

    @property
    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma * self.sigma)

    @property
    def coefficient_of_variation(self) -> float:
        return math.sqrt(math.expm1(self.sigma * self.sigma))


def lognormal_params(mean_sp: float, vol_sp: float) -> LognormalParams:
    """Invert (mean, relative volatility) into lognormal parameters.

    ``vol_sp`` is the coefficient of variation of S/P:
    sigma = sqrt(ln(vol^2 + 1)), mu = ln(mean) - sigma^2 / 2.
    """
    if mean_sp <= 0.0:
        raise ValueError(f"expected loss ratio must be > 0, got {mean_sp}")
    if vol_sp < 0.0:
        raise ValueError(f"volatility must be >= 0, got {vol_sp}")
    sigma = math.sqrt(math.log1p(vol_sp * vol_sp))
    return LognormalParams(mu=math.log(mean_sp) - 0.5 * sigma * sigma, sigma=sigma)


def lognormal_params_from_sigma(mean_sp: float, sigma: float) -> LognormalParams:
    """Lognormal parameters from the mean and a directly specified sigma."""
    if mean_sp <= 0.0:
        raise ValueError(f"expected loss ratio must be > 0, got {mean_sp}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    return LognormalParams(mu=math.log(mean_sp) - 0.5 * sigma * sigma, sigma=sigma)


def _uniform_for_scenario(seed: int, index: int) -> float:
    """One uniform from the substream keyed by (seed, scenario index).

    Substreams make the draw independent of execution order and thread
    count. random() can return exactly 0.0, which the quantile rejects;
    that draw is nudged to the smallest representable step.
    """
    u = np.random.default_rng((seed, index)).random()
    return u if u > 0.0 else 2.0 ** -53


def draw_initial_ratios(
    params: LognormalParams,
    n: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Draw n year-1 loss ratios exp(norm_inv(u_i) * sigma + mu).

    Deterministic for a given seed, independent of ``workers``.
    """
    if n < 1:
        raise ValueError(f"scenario count must be >= 1, got {n}")
    values = np.empty(n)

    def fill(start: int, stop: int) -> None:
        for i in range(start, stop):
            u = _uniform_for_scenario(seed, i)
            values[i] = math.exp(norm_inv(u) * params.sigma + params.mu)

    if params.sigma == 0.0:
        values.fill(math.exp(params.mu))
    elif workers <= 1:
        fill(0, n)
    else:
        chunk = -(-n // workers)
        bounds = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda span: fill(*span), bounds))
    return values


def _as_chronicle(chronicle: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.asarray(chronicle, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("chronicle must be a non-empty vector")
    if np.any(arr <= 0.0):
        raise ValueError("chronicle values must be > 0")
    return arr


def _check_reversion_speed(nu: float) -> None:
    if not 0.0 < nu <= 1.0:
        raise ValueError(f"reversion speed must be in (0, 1], got {nu}")


def mean_reversion_path(
    sp1: float,
    chronicle: Sequence[float] | np.ndarray,
    nu: float,
) -> np.ndarray:
    """Loss-ratio path reverting from the year-1 draw to the chronicle.

    path[t] = chronicle[t] + (sp1 - chronicle[1]) * nu^(t-1), floored at 0
    (loss ratios are nonnegative; deep negative gaps can otherwise push the
    formula below zero).
    """
    chron = _as_chronicle(chronicle)
    _check_reversion_speed(nu)
    path = chron + (sp1 - chron[0]) * nu ** np.arange(chron.size)
    path[0] = sp1
    return np.maximum(path, 0.0)


@dataclass(frozen=True, eq=False)
class LossScenarioSet:
    """N simulated loss-ratio paths over the projection horizon.

    ``scenarios[i, t-1]`` is S/P of scenario i in projection year t; column
    one holds the lognormal draws. ``floored_count`` counts path values
    clipped at the zero floor.
    """

    scenarios: np.ndarray
    seed: int
    chronicle: np.ndarray
    reversion_speed: float
    floored_count: int = 0

    def __post_init__(self) -> None:
        _check_reversion_speed(self.reversion_speed)
        if self.scenarios.ndim != 2:
            raise ValueError("scenario matrix must be 2-dimensional")
        if self.scenarios.shape[1] != self.chronicle.size:
            raise ValueError("scenario columns must match the chronicle length")
        if np.any(self.scenarios < 0.0):
            raise ValueError("loss ratios must be >= 0")

    @property
    def n_scenarios(self) -> int:
        return self.scenarios.shape[0]

    @property
    def horizon(self) -> int:
        return self.scenarios.shape[1]

    def initial_ratios(self) -> np.ndarray:
        """The drawn S/P(1) column."""
        return self.scenarios[:, 0]

    def quantile_fan(self, probs: Sequence[float] = (0.01, 0.25, 0.50, 0.75, 0.99)) -> np.ndarray:
        """Per-year quantiles of the scenario fan, shape (horizon, len(probs))."""
        return np.quantile(self.scenarios, probs, axis=0).T


def resolve_params(portfolio: "PortfolioSpec", weights: WeightMatrix | None = None) -> LognormalParams:
    """Lognormal parameters for a portfolio: direct sigma if given, else scored.

    The direct-sigma route bypasses the qualitative grid entirely; the scored
    route needs a weight matrix.
    """
    if portfolio.sigma is not None:
        return lognormal_params_from_sigma(portfolio.mean_sp, portfolio.sigma)
    if portfolio.criteria is None:
        raise ConfigError(f"portfolio {portfolio.id!r} has neither sigma nor risk criteria")
    if weights is None:
        raise ConfigError(f"portfolio {portfolio.id!r} uses risk criteria but no weight matrix was given")
    return lognormal_params(portfolio.mean_sp, volatility_score(portfolio.criteria, weights))


def generate_scenarios(
    portfolio: "PortfolioSpec",
    n: int = DEFAULT_SCENARIOS,
    seed: int = 0,
    weights: WeightMatrix | None = None,
    workers: int = 1,
) -> LossScenarioSet:
    """Simulate n mean-reverting loss-ratio paths for one portfolio.

    Each row applies the reversion recursion to its drawn year-1 ratio; the
    matrix is identical for identical (portfolio, n, seed) regardless of
    ``workers``.
    """
    params = resolve_params(portfolio, weights)
    chron = _as_chronicle(portfolio.chronicle)
    nu = portfolio.reversion_speed
    _check_reversion_speed(nu)

    sp1 = draw_initial_ratios(params, n, seed, workers=workers)
    decay = nu ** np.arange(chron.size)
    paths = chron[np.newaxis, :] + (sp1[:, np.newaxis] - chron[0]) * decay[np.newaxis, :]
    paths[:, 0] = sp1
    floored = int(np.count_nonzero(paths < 0.0))
    np.maximum(paths, 0.0, out=paths)

    return LossScenarioSet(
        scenarios=paths,
        seed=seed,
        chronicle=chron,
        reversion_speed=nu,
        floored_count=floored,
    )


def histogram(values: Sequence[float] | np.ndarray, bin_width: float) -> list[tuple[float, int]]:
    """Counts per left-closed bin [k*w, (k+1)*w), as (left edge, count) pairs.

    Bins are contiguous from 0 (or from the lowest occupied bin if values go
    negative) up to the highest occupied bin, so the output can be tabulated
    directly. The small epsilon keeps values like 0.3 in the bin whose edge
    they mathematically sit on despite binary rounding of v / w.
    """
    if bin_width <= 0.0:
        raise ValueError(f"bin width must be > 0, got {bin_width}")
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return []
    k = np.floor(arr / bin_width + 1e-9).astype(int)
    k_lo = min(0, int(k.min()))
    counts = np.bincount(k - k_lo, minlength=int(k.max()) - k_lo + 1)
    return [((k_lo + i) * bin_width, int(c)) for i, c in enumerate(counts)]
