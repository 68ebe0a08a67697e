"""Black-76 pricing of the distributor-remuneration option.

The remuneration scheme pays the distributor the positive excess of a market
index rate over a contractual minimum rate, on the technical provisions of
the portfolio. That payoff is a cap: a strip of caplets whose notionals are
the projected provisions per period.

Pricing convention: each caplet pays at the end of period j, on the forward
rate fixing at the start of the period. Values from the pricer are
nonnegative option values; report layers negate them when presenting them
as insurer costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .curves import MarketData

_SQRT2 = math.sqrt(2.0)


def norm_cdf(x: float) -> float:
    """Standard normal CDF, accurate to double precision via erfc."""
    return 0.5 * math.erfc(-x / _SQRT2)


def caplet_price(
    notional: float,
    df_pay: float,
    fwd: float,
    strike: float,
    vol: float,
    t_fix: float,
    accrual: float = 1.0,
) -> float:
    """Black-76 value of one caplet.

    N * accrual * DF * [F * cdf(d) - E * cdf(d - vol*sqrt(t_fix))] with
    d = [ln(F/E) + vol^2 * t_fix / 2] / (vol * sqrt(t_fix)).

    Degenerates to the discounted intrinsic value N * accrual * DF *
    max(F - E, 0) when the fixing is immediate (t_fix = 0) or the rate is
    deterministic (vol = 0).
    """
    if strike <= 0.0:
        raise ValueError(f"strike must be > 0, got {strike}")
    if vol < 0.0:
        raise ValueError(f"vol must be >= 0, got {vol}")
    if notional < 0.0:
        raise ValueError(f"notional must be >= 0, got {notional}")
    if t_fix < 0.0:
        raise ValueError(f"fixing time must be >= 0, got {t_fix}")
    if accrual <= 0.0:
        raise ValueError(f"accrual must be > 0, got {accrual}")

    scale = notional * accrual * df_pay
    if vol == 0.0 or t_fix == 0.0:
        return scale * max(fwd - strike, 0.0)
    if fwd <= 0.0:
        raise ValueError(f"forward must be > 0 when vol > 0, got {fwd}")

    sd = vol * math.sqrt(t_fix)
    if sd == 0.0:  # underflow of a vanishing stdev: deterministic limit
        return scale * max(fwd - strike, 0.0)
    d = (math.log(fwd / strike) + 0.5 * vol * vol * t_fix) / sd
    return scale * (fwd * norm_cdf(d) - strike * norm_cdf(d - sd))


@dataclass(frozen=True)
class CapSpec:
    """Cap on a market index with one notional per period.

    ``notionals[j]`` is the technical-provision amount for period index j,
    j = 0..horizon. The period-0 entry is carried for reporting but its
    caplet is already fixed and never enters the option value.

    ``strikes`` optionally overrides the contractual strike per period
    (some remuneration conventions display a period-varying rate).
    ``use_spot_for_first_period`` bases the already-running period 0 on the
    observed spot index rate instead of the curve-implied one; the two need
    not agree, and conventions quote the observed rate.
    """

    strike: float
    notionals: tuple[float, ...]
    index_tenor: float
    accrual: float = 1.0
    strikes: tuple[float, ...] | None = None
    use_spot_for_first_period: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "notionals", tuple(float(n) for n in self.notionals))
        if self.strikes is not None:
            object.__setattr__(self, "strikes", tuple(float(s) for s in self.strikes))
        if self.strike <= 0.0:
            raise ValueError(f"strike must be > 0, got {self.strike}")
        if len(self.notionals) < 2:
            raise ValueError("need notionals for period indices 0..n with n >= 1")
        if any(n < 0.0 for n in self.notionals):
            raise ValueError("notionals must be >= 0")
        if self.accrual <= 0.0:
            raise ValueError(f"accrual must be > 0, got {self.accrual}")
        if self.index_tenor <= 0.0:
            raise ValueError(f"index_tenor must be > 0, got {self.index_tenor}")
        if self.strikes is not None and len(self.strikes) != len(self.notionals):
            raise ValueError("per-period strikes must cover period indices 0..n")

    @property
    def horizon(self) -> int:
        """Number of periods n (notionals run 0..n)."""
        return len(self.notionals) - 1

    def strike_for(self, period: int) -> float:
        return self.strikes[period] if self.strikes is not None else self.strike

    def fixing_time(self, period: int) -> float:
        """Fixing time of the period's caplet: the start of the period.

        Period 0 is already running; its rate was fixed at t = 0.
        """
        return max(period * self.accrual - self.accrual, 0.0)

    def forward_for(self, period: int, market: MarketData) -> float:
        """Index rate underlying one period: curve forward, or the observed
        spot for the running period when the spec opts into the override."""
        if period == 0 and self.use_spot_for_first_period:
            return market.spot_index_rate
        return market.curve.forward_index_rate(self.fixing_time(period), self.index_tenor)


@dataclass(frozen=True)
class CapValuation:
    """Cap strip valuation with the aggregates used in remuneration reports.

    ``caplet_values[j]`` is the period-j value; the stochastic value sums
    periods 1..n only (the period-0 caplet is already fixed and paid).
    Values carry the caller's sign convention: the pricer produces
    nonnegative option values, replayed report figures are insurer costs.
    """

    caplet_values: tuple[float, ...]
    stochastic_value: float
    deterministic_value: float
    valuation_spread: float
    booked_flows_pv: float = 0.0
    crd: float = 0.0

    @classmethod
    def from_caplets(
        cls,
        caplet_values: Sequence[float],
        deterministic_value: float,
        booked_flows_pv: float = 0.0,
        tax_rate: float = 0.0,
    ) -> "CapValuation":
        """Assemble the aggregates from per-period caplet values.

        Used both by the pricer and by replay mode, where externally booked
        per-period figures are supplied and only the aggregate identities
        are recomputed.
        """
        values = tuple(float(v) for v in caplet_values)
        stochastic = sum(values[1:])
        valuation = cls(
            caplet_values=values,
            stochastic_value=stochastic,
            deterministic_value=float(deterministic_value),
            valuation_spread=stochastic - float(deterministic_value),
        )
        crd = remuneration_option_cost(valuation, booked_flows_pv, tax_rate)
        return replace(valuation, booked_flows_pv=float(booked_flows_pv), crd=crd)


def price_cap(spec: CapSpec, market: MarketData) -> CapValuation:
    """Value the cap strip under the given market data.

    Caplet j pays at T_j = j * accrual on the forward fixing at T_{j-1} for
    the index tenor, discounted with B(0, T_j) and using the Black vol
    quoted for the fixing time. The deterministic value reprices the same
    strip with all vols forced to zero.
    """
    stochastic_caplets = []
    deterministic_caplets = []
    for j, notional in enumerate(spec.notionals):
        t_fix = spec.fixing_time(j)
        df = market.curve.discount_factor(j * spec.accrual)
        fwd = spec.forward_for(j, market)
        vol = market.vols.vol_at(t_fix)
        strike = spec.strike_for(j)
        stochastic_caplets.append(caplet_price(notional, df, fwd, strike, vol, t_fix, spec.accrual))
        deterministic_caplets.append(caplet_price(notional, df, fwd, strike, 0.0, t_fix, spec.accrual))

    return CapValuation.from_caplets(
        stochastic_caplets,
        deterministic_value=sum(deterministic_caplets[1:]),
    )


def remuneration_option_cost(valuation: CapValuation, booked_flows_pv: float, tax_rate: float) -> float:
    """Net option cost after tax, beyond what the deterministic account already books.

    (stochastic value - discounted booked flows) * (1 - tax rate).
    """
    if not 0.0 <= tax_rate < 1.0:
        raise ValueError(f"tax_rate must be in [0, 1), got {tax_rate}")
    return (valuation.stochastic_value - booked_flows_pv) * (1.0 - tax_rate)
