"""Quote ingestion, calendar alignment and FX cross rates.

Instrument ids are contiguous: currencies ``0..N_c-1`` (0 is the reference
currency) followed by assets ``N_c..N_c+N_a-1``.  FX quotes are stored as
units of currency ``c`` per one unit of the reference currency.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from hindsight.errors import AlignmentError, DomainError, EmptySeriesError, QuoteParseError


@dataclass(frozen=True)
class AssetUniverse:
    n_currencies: int
    n_assets: int
    asset_currency: Mapping[int, int]
    display_names: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_currencies < 1:
            raise DomainError("need at least the reference currency")
        if self.n_assets < 0:
            raise DomainError("n_assets must be >= 0")
        expected = set(range(self.n_currencies, self.n_ids))
        if set(self.asset_currency) != expected:
            raise DomainError(f"asset_currency must map exactly the asset ids {sorted(expected)}")
        for a, c in self.asset_currency.items():
            if not 0 <= c < self.n_currencies:
                raise DomainError(f"asset {a} has invalid currency {c}")
        object.__setattr__(self, "asset_currency", dict(self.asset_currency))
        object.__setattr__(self, "display_names", dict(self.display_names))

    @property
    def n_ids(self) -> int:
        return self.n_currencies + self.n_assets

    @property
    def ids(self) -> range:
        return range(self.n_ids)

    def is_currency(self, i: int) -> bool:
        return i < self.n_currencies

    def currency_of(self, i: int) -> int:
        """Settlement currency of an instrument (a currency settles in itself)."""
        if i < self.n_currencies:
            return i
        return self.asset_currency[i]

    def name(self, i: int) -> str:
        return self.display_names.get(i, str(i))


@dataclass(frozen=True)
class QuoteSeries:
    instrument_id: int
    dates: tuple[date, ...]
    values: tuple[float, ...]
    dropped: int = 0

    def __post_init__(self):
        if len(self.dates) != len(self.values):
            raise DomainError("dates and values differ in length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DomainError(f"series {self.instrument_id}: dates not strictly increasing")
        if any(not (v > 0 and math.isfinite(v)) for v in self.values):
            raise DomainError(f"series {self.instrument_id}: values must be finite and > 0")

    def __len__(self):
        return len(self.dates)

    @property
    def observations(self) -> list[tuple[date, float]]:
        return list(zip(self.dates, self.values))


@dataclass(frozen=True)
class MarketPanel:
    """Calendar-aligned quotes.

    ``fx_to_ref[c][t]`` is units of currency ``c`` per reference unit and
    ``prices[a - N_c][t]`` is the price of asset ``a`` in its own currency.
    Rows are stored as float tuples so the optimizer's inner loop can index
    them without numpy scalar overhead.
    """

    universe: AssetUniverse
    dates: tuple[date, ...]
    fx_to_ref: tuple[tuple[float, ...], ...]
    prices: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        u = self.universe
        fx = tuple(tuple(float(v) for v in row) for row in self.fx_to_ref)
        px = tuple(tuple(float(v) for v in row) for row in self.prices)
        object.__setattr__(self, "fx_to_ref", fx)
        object.__setattr__(self, "prices", px)
        object.__setattr__(self, "dates", tuple(self.dates))
        n = len(self.dates)
        if n < 1:
            raise DomainError("panel needs at least one date")
        if len(fx) != u.n_currencies or len(px) != u.n_assets:
            raise DomainError("panel rows do not match the universe")
        for row in fx + px:
            if len(row) != n:
                raise DomainError("all series must share the panel length")
            if any(not (v > 0 and math.isfinite(v)) for v in row):
                raise DomainError("panel entries must be finite and > 0")
        if any(v != 1.0 for v in fx[0]):
            raise DomainError("reference currency row must be all ones")

    @property
    def n_steps(self) -> int:
        """Horizon length N_t (the panel holds N_t + 1 dates)."""
        return len(self.dates) - 1

    def price(self, a: int, t: int) -> float:
        return self.prices[a - self.universe.n_currencies][t]

    @property
    def fx_array(self) -> np.ndarray:
        return np.array(self.fx_to_ref, dtype=float)

    @property
    def price_array(self) -> np.ndarray:
        return np.array(self.prices, dtype=float).reshape(self.universe.n_assets, len(self.dates))

    @classmethod
    def from_arrays(cls, universe: AssetUniverse, fx_to_ref, prices, dates=None) -> "MarketPanel":
        """Build a panel from arrays; ``fx_to_ref`` may omit the reference row."""
        fx = np.asarray(fx_to_ref, dtype=float)
        px = np.asarray(prices, dtype=float)
        if fx.ndim == 1:
            fx = fx.reshape(-1, px.shape[-1] if px.size else fx.shape[0])
        if fx.shape[0] == universe.n_currencies - 1:
            fx = np.vstack([np.ones((1, fx.shape[1] if fx.size else px.shape[-1])), fx])
        n = fx.shape[1]
        px = px.reshape(universe.n_assets, n)
        if dates is None:
            dates = [date.fromordinal(date(2000, 1, 3).toordinal() + t) for t in range(n)]
        return cls(universe, tuple(dates), tuple(map(tuple, fx)), tuple(map(tuple, px)))

    def to_csv(self) -> str:
        """Debug export: one row per date, one column per instrument."""
        u = self.universe
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["date"] + [u.name(i) for i in u.ids])
        for t, d in enumerate(self.dates):
            row = [self.fx_to_ref[c][t] for c in range(u.n_currencies)]
            row += [self.prices[a][t] for a in range(u.n_assets)]
            w.writerow([d.isoformat()] + [repr(v) for v in row])
        return buf.getvalue()


def load_quotes(source: IO, instrument_id: int) -> QuoteSeries:
    """Read a ``date,adj_close`` CSV. Rows with missing or non-positive closes are dropped and counted."""
    raw = source.read()
    text = raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw.lstrip("﻿")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptySeriesError(f"instrument {instrument_id}: empty file") from None
    header = [h.strip().lower() for h in header]
    if "date" not in header or "adj_close" not in header:
        raise QuoteParseError(1, f"expected header with 'date' and 'adj_close', got {header}")
    di, vi = header.index("date"), header.index("adj_close")

    rows: dict[date, float] = {}
    dropped = 0
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise QuoteParseError(line, f"expected {len(header)} fields, got {len(row)}")
        try:
            d = date.fromisoformat(row[di].strip())
        except ValueError:
            raise QuoteParseError(line, f"bad date {row[di]!r}") from None
        cell = row[vi].strip()
        if cell == "" or cell.lower() in ("null", "nan", "na"):
            dropped += 1
            continue
        try:
            v = float(cell)
        except ValueError:
            raise QuoteParseError(line, f"bad adj_close {cell!r}") from None
        if not (v > 0 and math.isfinite(v)):
            dropped += 1
            continue
        if d in rows:
            raise QuoteParseError(line, f"duplicate date {d}")
        rows[d] = v

    if not rows:
        raise EmptySeriesError(f"instrument {instrument_id}: no usable rows ({dropped} dropped)")
    ds = sorted(rows)
    return QuoteSeries(instrument_id, tuple(ds), tuple(rows[d] for d in ds), dropped)


def align_calendar(universe: AssetUniverse, series: Iterable[QuoteSeries]) -> MarketPanel:
    """Intersect the calendars of one series per non-reference currency and per asset."""
    series = list(series)
    by_id = {}
    for s in series:
        if s.instrument_id in by_id:
            raise DomainError(f"duplicate series for instrument {s.instrument_id}")
        by_id[s.instrument_id] = s
    expected = set(range(1, universe.n_ids))
    if set(by_id) != expected:
        missing, extra = expected - set(by_id), set(by_id) - expected
        raise DomainError(f"need one series per instrument 1..{universe.n_ids - 1}; missing {sorted(missing)}, unexpected {sorted(extra)}")
    for s in series:
        if len(s) == 0:
            raise EmptySeriesError(f"instrument {s.instrument_id}: empty series")

    if universe.n_ids == 1:
        raise DomainError("a universe with only the reference currency has no dates to align")
    common: set[date] | None = None
    for i in sorted(by_id):
        ds = set(by_id[i].dates)
        common = ds if common is None else common & ds
    dates = sorted(common)
    if not dates:
        spans = ", ".join(
            f"{i}: {by_id[i].dates[0]}..{by_id[i].dates[-1]} ({len(by_id[i])} rows)" for i in sorted(by_id)
        )
        raise AlignmentError(f"no common trading dates; spans {spans}")

    def pick(s: QuoteSeries) -> tuple[float, ...]:
        lookup = dict(zip(s.dates, s.values))
        return tuple(lookup[d] for d in dates)

    fx = [tuple(1.0 for _ in dates)] + [pick(by_id[c]) for c in range(1, universe.n_currencies)]
    px = [pick(by_id[a]) for a in range(universe.n_currencies, universe.n_ids)]
    return MarketPanel(universe, tuple(dates), tuple(fx), tuple(px))


def normalize_prices(panel: MarketPanel) -> MarketPanel:
    """Rescale each asset to 100 at t=0 in its own currency; FX rows are untouched."""
    px = tuple(tuple(100.0 * v / row[0] for v in row) for row in panel.prices)
    return MarketPanel(panel.universe, panel.dates, panel.fx_to_ref, px)


def cross_rate(panel: MarketPanel, c1: int, c2: int, t: int) -> float:
    """Units of ``c2`` obtained for one unit of ``c1`` at time ``t``."""
    if c1 == c2:
        return 1.0
    fx = panel.fx_to_ref
    return fx[c2][t] / fx[c1][t]


def universe_from_currency_list(asset_currencies: Sequence[int], n_currencies: int, names=None) -> AssetUniverse:
    """Convenience constructor: ``asset_currencies[k]`` is c(N_c + k)."""
    amap = {n_currencies + k: c for k, c in enumerate(asset_currencies)}
    return AssetUniverse(n_currencies, len(asset_currencies), amap, dict(names or {}))
