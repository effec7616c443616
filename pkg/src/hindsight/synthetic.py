"""Seeded geometric-random-walk panels for tests and fixture generation."""

from __future__ import annotations

import numpy as np

from hindsight.market_data import MarketPanel, universe_from_currency_list


def random_panel(
    rng: np.random.Generator | int,
    n_currencies: int,
    n_assets: int,
    n_steps: int,
    price_vol: float = 0.03,
    fx_vol: float = 0.01,
    price0: float = 100.0,
) -> MarketPanel:
    """Panel with ``n_steps + 1`` dates; asset currencies drawn uniformly."""
    rng = np.random.default_rng(rng)
    asset_ccy = rng.integers(0, n_currencies, size=n_assets).tolist()
    universe = universe_from_currency_list(asset_ccy, n_currencies)

    def walk(rows, start, vol):
        steps = rng.normal(0.0, vol, size=(rows, n_steps))
        logs = np.concatenate([np.zeros((rows, 1)), np.cumsum(steps, axis=1)], axis=1)
        return start[:, None] * np.exp(logs)

    fx_start = rng.uniform(0.5, 2.0, size=n_currencies - 1)
    fx = walk(n_currencies - 1, fx_start, fx_vol)
    prices = walk(n_assets, np.full(n_assets, price0), price_vol)
    return MarketPanel.from_arrays(universe, fx.reshape(n_currencies - 1, n_steps + 1), prices)
