"""JSON run configuration.

Example::

    {
      "data": [
        {"id": 1, "path": "usd.csv", "kind": "fx", "name": "USD"},
        {"id": 2, "path": "ndx.csv", "kind": "asset", "currency": 1, "name": "NDX"}
      ],
      "costs": {"eps": 0.01, "beta": 50},
      "mode": {"type": "max_trades", "K": 12},
      "diversification": {"Q": 1, "sync": false},
      "m0": 10000
    }

The universe is derived from ``data``: every ``fx`` entry is a currency
(its id is its currency id), every ``asset`` entry names its trading
currency.  Relative paths resolve against the config file's directory.
Instead of ``data`` a ``synthetic`` block generates a seeded random panel.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from hindsight.costs import CostSchedule
from hindsight.diversification import DiversificationPlan
from hindsight.errors import DomainError
from hindsight.market_data import AssetUniverse, MarketPanel, align_calendar, load_quotes, normalize_prices
from hindsight.optimizer import ConstraintMode, MaxTrades, MinWait, Unconstrained
from hindsight.synthetic import random_panel


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DataSpec(_Model):
    id: int = Field(ge=1)
    path: str
    kind: Literal["fx", "asset"]
    currency: Optional[int] = None
    name: Optional[str] = None


class SyntheticSpec(_Model):
    n_currencies: int = Field(1, ge=1)
    n_assets: int = Field(1, ge=0)
    n_steps: int = Field(50, ge=1)
    price_vol: float = 0.03
    fx_vol: float = 0.01
    seed: int = 0


PerAsset = Union[list[float], dict[int, float]]


class CostSpec(_Model):
    eps: float = Field(0.0, ge=0.0, lt=1.0)
    beta: float = Field(0.0, ge=0.0)
    eps_fx: Optional[list[list[float]]] = None
    beta_fx: Optional[list[list[float]]] = None
    eps_buy: Optional[PerAsset] = None
    beta_buy: Optional[PerAsset] = None
    eps_sell: Optional[PerAsset] = None
    beta_sell: Optional[PerAsset] = None


class ModeSpec(_Model):
    type: Literal["unconstrained", "max_trades", "min_wait"] = "unconstrained"
    K: Optional[int] = Field(None, ge=1)
    D: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _params(self):
        if self.type == "max_trades" and self.K is None:
            raise ValueError("max_trades needs K")
        if self.type == "min_wait" and self.D is None:
            raise ValueError("min_wait needs D")
        return self

    def build(self) -> ConstraintMode:
        if self.type == "max_trades":
            return MaxTrades(self.K)
        if self.type == "min_wait":
            return MinWait(self.D)
        return Unconstrained()


class DiversificationSpec(_Model):
    Q: int = Field(1, ge=1)
    sync: bool = False
    split: Optional[list[float]] = None
    constrained_times: Optional[list[Optional[list[int]]]] = None


class RunConfig(_Model):
    data: list[DataSpec] = []
    synthetic: Optional[SyntheticSpec] = None
    costs: CostSpec = CostSpec()
    mode: ModeSpec = ModeSpec()
    diversification: DiversificationSpec = DiversificationSpec()
    m0: float = Field(10000.0, gt=0)
    normalize: bool = True
    use_heuristics: bool = True
    force_terminal_cash: bool = False
    output_dir: str = "out"
    baseline_asset: Optional[int] = None
    base_dir: str = "."

    @model_validator(mode="after")
    def _source(self):
        if bool(self.data) == bool(self.synthetic):
            raise ValueError("give exactly one of 'data' or 'synthetic'")
        return self

    def universe(self) -> AssetUniverse:
        fx = sorted((d for d in self.data if d.kind == "fx"), key=lambda d: d.id)
        assets = sorted((d for d in self.data if d.kind == "asset"), key=lambda d: d.id)
        n_c = len(fx) + 1
        if [d.id for d in fx] != list(range(1, n_c)):
            raise DomainError(f"fx ids must be 1..{n_c - 1}, got {[d.id for d in fx]}")
        if [d.id for d in assets] != list(range(n_c, n_c + len(assets))):
            raise DomainError(f"asset ids must be {n_c}..{n_c + len(assets) - 1}, got {[d.id for d in assets]}")
        for d in fx:
            if d.currency not in (None, d.id):
                raise DomainError(f"fx entry {d.id} must settle in currency {d.id}")
        for d in assets:
            if d.currency is None:
                raise DomainError(f"asset {d.id} needs a currency")
        names = {0: "REF"} | {d.id: d.name for d in self.data if d.name}
        return AssetUniverse(n_c, len(assets), {d.id: d.currency for d in assets}, names)

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def load_panel(self, seed: int | None = None) -> MarketPanel:
        if self.synthetic is not None:
            s = self.synthetic
            panel = random_panel(
                s.seed if seed is None else seed, s.n_currencies, s.n_assets, s.n_steps, s.price_vol, s.fx_vol
            )
        else:
            universe = self.universe()
            series = []
            for d in self.data:
                path = self.resolve(d.path)
                if not path.is_file():
                    raise DomainError(f"data file not found: {path}")
                with open(path, "rb") as fh:
                    series.append(load_quotes(fh, d.id))
            panel = align_calendar(universe, series)
        return normalize_prices(panel) if self.normalize else panel

    def cost_schedule(self, universe: AssetUniverse, eps: float | None = None, beta: float | None = None) -> CostSchedule:
        """Costs from the config; ``eps``/``beta`` override with uniform scalars (tables ignored)."""
        c = self.costs
        if eps is not None:
            return CostSchedule.uniform(universe, eps, c.beta if beta is None else beta)
        return CostSchedule.from_tables(
            universe, c.eps, c.beta, c.eps_fx, c.beta_fx, c.eps_buy, c.beta_buy, c.eps_sell, c.beta_sell
        )

    def plan(self, sync: bool | None = None) -> DiversificationPlan:
        d = self.diversification
        times = None
        if d.constrained_times is not None:
            times = tuple(None if ts is None else frozenset(ts) for ts in d.constrained_times)
        return DiversificationPlan(
            q_count=d.Q,
            split=None if d.split is None else tuple(d.split),
            constrained_times=times,
            sync=d.sync if sync is None else sync,
            mode=self.mode.build(),
        )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise DomainError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DomainError(f"{path}: invalid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise DomainError(f"{path}: top level must be an object")
    raw.setdefault("base_dir", str(path.parent))
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise DomainError(f"{path}: {e}") from None
