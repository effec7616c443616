"""Fixed plus proportional transaction costs and the three money-movement primitives.

Fixed FX charges are paid in the target currency after conversion; fixed
buy/sell charges are paid in the asset's currency.  The primitives are total
functions: a negative cash result is returned as-is and callers reject it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from hindsight.errors import DomainError
from hindsight.market_data import AssetUniverse, MarketPanel, cross_rate


def _matrix(rows, n) -> tuple[tuple[float, ...], ...]:
    m = tuple(tuple(float(v) for v in row) for row in rows)
    if len(m) != n or any(len(r) != n for r in m):
        raise DomainError(f"expected a {n}x{n} FX cost matrix")
    return m


def _per_asset(values, n_currencies: int, n_assets: int) -> tuple[float, ...]:
    """Per-asset table indexed by ``a - N_c``; accepts a sequence or an id-keyed mapping."""
    if isinstance(values, Mapping):
        keys = {int(k) for k in values}
        if keys != set(range(n_currencies, n_currencies + n_assets)):
            raise DomainError("per-asset cost table must cover every asset id")
        return tuple(float(values[k] if k in values else values[str(k)]) for k in range(n_currencies, n_currencies + n_assets))
    out = tuple(float(v) for v in values)
    if len(out) != n_assets:
        raise DomainError(f"expected {n_assets} per-asset cost entries")
    return out


@dataclass(frozen=True)
class CostSchedule:
    eps_fx: tuple[tuple[float, ...], ...]
    beta_fx: tuple[tuple[float, ...], ...]
    eps_buy: tuple[float, ...]
    beta_buy: tuple[float, ...]
    eps_sell: tuple[float, ...]
    beta_sell: tuple[float, ...]
    n_currencies: int

    def __post_init__(self):
        nc = self.n_currencies
        object.__setattr__(self, "eps_fx", _matrix(self.eps_fx, nc))
        object.__setattr__(self, "beta_fx", _matrix(self.beta_fx, nc))
        na = len(self.eps_buy)
        for name in ("eps_buy", "beta_buy", "eps_sell", "beta_sell"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != na:
                raise DomainError("per-asset cost tables differ in length")
            object.__setattr__(self, name, vals)

        eps = [v for row in self.eps_fx for v in row] + list(self.eps_buy) + list(self.eps_sell)
        betas = [v for row in self.beta_fx for v in row] + list(self.beta_buy) + list(self.beta_sell)
        if any(not (0.0 <= v < 1.0) for v in eps):
            raise DomainError("proportional costs must lie in [0, 1)")
        if any(not (v >= 0.0 and math.isfinite(v)) for v in betas):
            raise DomainError("fixed costs must be finite and >= 0")
        for c in range(nc):
            if self.eps_fx[c][c] != 0.0 or self.beta_fx[c][c] != 0.0:
                raise DomainError(f"same-currency FX leg for currency {c} must be free")

    @property
    def n_assets(self) -> int:
        return len(self.eps_buy)

    @classmethod
    def uniform(cls, universe: AssetUniverse, eps: float = 0.0, beta: float = 0.0) -> "CostSchedule":
        """One proportional rate and one fixed charge for every FX, buy and sell leg."""
        nc, na = universe.n_currencies, universe.n_assets
        eps_fx = [[0.0 if a == b else eps for b in range(nc)] for a in range(nc)]
        beta_fx = [[0.0 if a == b else beta for b in range(nc)] for a in range(nc)]
        return cls(eps_fx, beta_fx, [eps] * na, [beta] * na, [eps] * na, [beta] * na, nc)

    @classmethod
    def zero(cls, universe: AssetUniverse) -> "CostSchedule":
        return cls.uniform(universe, 0.0, 0.0)

    @classmethod
    def from_tables(
        cls,
        universe: AssetUniverse,
        eps: float = 0.0,
        beta: float = 0.0,
        eps_fx: Sequence[Sequence[float]] | None = None,
        beta_fx: Sequence[Sequence[float]] | None = None,
        eps_buy=None,
        beta_buy=None,
        eps_sell=None,
        beta_sell=None,
    ) -> "CostSchedule":
        """Uniform defaults, with any table replaced wholesale when given."""
        base = cls.uniform(universe, eps, beta)
        nc, na = universe.n_currencies, universe.n_assets

        def pa(v, default):
            return default if v is None else _per_asset(v, nc, na)

        return cls(
            base.eps_fx if eps_fx is None else eps_fx,
            base.beta_fx if beta_fx is None else beta_fx,
            pa(eps_buy, base.eps_buy),
            pa(beta_buy, base.beta_buy),
            pa(eps_sell, base.eps_sell),
            pa(beta_sell, base.beta_sell),
            nc,
        )


def fx_convert(m: float, c1: int, c2: int, t: int, panel: MarketPanel, costs: CostSchedule) -> float:
    """Convert cash ``m`` held in ``c1`` into ``c2`` at the time-``t`` rate, net of FX costs."""
    if c1 == c2:
        return m
    return m * cross_rate(panel, c1, c2, t) * (1.0 - costs.eps_fx[c1][c2]) - costs.beta_fx[c1][c2]


def sell_to_cash(m: float, n: int, a: int, c2: int, t: int, panel: MarketPanel, costs: CostSchedule) -> float:
    """Liquidate ``n`` shares of ``a`` plus the residual ``m`` and move the proceeds into ``c2``."""
    k = a - costs.n_currencies
    c1 = panel.universe.asset_currency[a]
    proceeds = m + n * panel.prices[k][t] * (1.0 - costs.eps_sell[k]) - costs.beta_sell[k]
    return fx_convert(proceeds, c1, c2, t, panel, costs)


def max_integer_buy(budget: float, a: int, t: int, panel: MarketPanel, costs: CostSchedule) -> tuple[int, float]:
    """Largest whole share count affordable from ``budget`` (before the fixed buy charge).

    Returns ``(n, residual)`` with ``residual = budget - beta_buy - n * unit_cost``.
    When even one share is unaffordable, ``n = 0`` and the residual is the
    post-charge cash, which may be negative.
    """
    k = a - costs.n_currencies
    available = budget - costs.beta_buy[k]
    unit = panel.prices[k][t] * (1.0 + costs.eps_buy[k])
    if available < unit:
        return 0, available
    n = int(available // unit)
    # floor division can land one off in floating point; settle on the maximal n with residual >= 0
    while available - n * unit < 0.0:
        n -= 1
    while available - (n + 1) * unit >= 0.0:
        n += 1
    return n, available - n * unit
